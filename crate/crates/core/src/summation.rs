//! Error-free-transform accumulators.
//!
//! Both accumulators use the branch-free TwoSum transform, so the result is
//! independent of the magnitude ordering of the summands.

use num_complex::Complex64;

#[inline(always)]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Compensated real sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            comp: 0.0,
        }
    }

    #[inline(always)]
    pub fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.sum, x);
        self.sum = s;
        self.comp += e;
    }

    #[inline(always)]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated complex sum (componentwise).
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl CompensatedComplexSum {
    pub const fn new() -> Self {
        Self {
            re: CompensatedSum::new(),
            im: CompensatedSum::new(),
        }
    }

    #[inline(always)]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline(always)]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for CompensatedComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Compensated sum of an iterator of reals.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

const BLOCK: usize = 1 << 14;

/// `sum f(x)` over `items`, evaluated in parallel over fixed-size blocks and
/// reduced in block order, so the result does not depend on thread count.
pub fn blocked_sum<T, F>(items: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync,
{
    use rayon::prelude::*;
    let partials: Vec<CompensatedSum> = items
        .par_chunks(BLOCK)
        .map(|chunk| chunk.iter().map(&f).collect())
        .collect();
    compensated_sum(partials.iter().map(CompensatedSum::value))
}

/// Complex analogue of [`blocked_sum`].
pub fn blocked_complex_sum<T, F>(items: &[T], f: F) -> Complex64
where
    T: Sync,
    F: Fn(&T) -> Complex64 + Sync,
{
    use rayon::prelude::*;
    let partials: Vec<CompensatedComplexSum> = items
        .par_chunks(BLOCK)
        .map(|chunk| chunk.iter().map(&f).collect())
        .collect();
    partials
        .iter()
        .map(CompensatedComplexSum::value)
        .collect::<CompensatedComplexSum>()
        .value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_low_bits() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(xs), 2.0);
        let naive: f64 = xs.iter().sum();
        assert_ne!(naive, 2.0);
    }

    #[test]
    fn complex_accumulates_componentwise() {
        let acc: CompensatedComplexSum = [
            Complex64::new(1e16, -1e16),
            Complex64::new(1.0, 3.0),
            Complex64::new(-1e16, 1e16),
        ]
        .into_iter()
        .collect();
        assert_eq!(acc.value(), Complex64::new(1.0, 3.0));
    }
}
