use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::PrimeTable;
use crate::character::{root_table, DirichletCharacter, NON_UNIT};
use crate::error::{domain, Result};
use crate::summation::blocked_sum;

/// Largest modulus for which a character's values are tabulated up front
/// instead of being evaluated prime by prime.
const TABULATE_CAP: u64 = 10_000_000;

/// A unit-or-zero valued function known at primes.
pub trait PrimeFunction: Sync {
    fn at_prime(&self, p: u64) -> Complex64;

    fn at_primes(&self, primes: &[u64]) -> Vec<Complex64> {
        primes.iter().map(|&p| self.at_prime(p)).collect()
    }
}

impl PrimeFunction for DirichletCharacter {
    fn at_prime(&self, p: u64) -> Complex64 {
        self.value_complex(p)
    }

    fn at_primes(&self, primes: &[u64]) -> Vec<Complex64> {
        let q = self.modulus();
        if q > TABULATE_CAP || (q as usize) > 4 * primes.len() + 1024 {
            return primes.iter().map(|&p| self.value_complex(p)).collect();
        }
        let angles = self.angle_table();
        let roots = root_table(self.group().root_denominator());
        primes
            .iter()
            .map(|&p| match angles[(p % q) as usize] {
                NON_UNIT => Complex64::new(0.0, 0.0),
                a => roots[a as usize],
            })
            .collect()
    }
}

/// `n -> n^{it}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Archimedean(pub f64);

impl PrimeFunction for Archimedean {
    fn at_prime(&self, p: u64) -> Complex64 {
        Complex64::from_polar(1.0, self.0 * (p as f64).ln())
    }
}

/// Explicit values at finitely many primes, `default` elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeValues {
    pub values: BTreeMap<u64, Complex64>,
    pub default: Complex64,
}

impl PrimeFunction for PrimeValues {
    fn at_prime(&self, p: u64) -> Complex64 {
        self.values.get(&p).copied().unwrap_or(self.default)
    }
}

impl<F: PrimeFunction + ?Sized> PrimeFunction for &F {
    fn at_prime(&self, p: u64) -> Complex64 {
        (**self).at_prime(p)
    }

    fn at_primes(&self, primes: &[u64]) -> Vec<Complex64> {
        (**self).at_primes(primes)
    }
}

fn primes_for(x: f64, table: &PrimeTable) -> Result<&[u64]> {
    if x > table.limit() as f64 + 0.5 {
        return Err(crate::Error::Resource(format!(
            "x = {x} exceeds the sieve limit {}",
            table.limit()
        )));
    }
    Ok(table.primes_up_to(x.floor().max(0.0) as u64))
}

/// `D(f, h; x)^2 = sum_{p <= x} (1 - Re f(p) conj(h(p))) / p`.
pub fn distance2<F, H>(f: &F, h: &H, x: f64, table: &PrimeTable) -> Result<f64>
where
    F: PrimeFunction + ?Sized,
    H: PrimeFunction + ?Sized,
{
    let primes = primes_for(x, table)?;
    let fv = f.at_primes(primes);
    let hv = h.at_primes(primes);
    let idx: Vec<usize> = (0..primes.len()).collect();
    Ok(blocked_sum(&idx, |&i| {
        (1.0 - (fv[i] * hv[i].conj()).re) / primes[i] as f64
    }))
}

/// `D(f, h; x)`.
pub fn pretentious_distance<F, H>(f: &F, h: &H, x: f64, table: &PrimeTable) -> Result<f64>
where
    F: PrimeFunction + ?Sized,
    H: PrimeFunction + ?Sized,
{
    Ok(distance2(f, h, x, table)?.max(0.0).sqrt())
}

/// The cutoffs entering the distance minimization at level `Q = log q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceParams {
    pub q_level: f64,
    pub x: f64,
    pub t_window: f64,
    pub alpha: f64,
    /// `exp((log Q)^alpha)`.
    pub z_cut: f64,
}

impl DistanceParams {
    pub fn new(q_level: f64, x: f64, t_window: f64) -> Result<Self> {
        if x < 16.0 {
            return domain(format!("x = {x} must be at least 16"));
        }
        if t_window.is_nan() || t_window < 0.0 {
            return domain("T must be non-negative");
        }
        let alpha = super::ALPHA;
        let z_cut = if q_level > 1.0 {
            q_level.ln().powf(alpha).exp()
        } else {
            1.0
        };
        Ok(Self {
            q_level,
            x,
            t_window,
            alpha,
            z_cut,
        })
    }
}

/// Result of minimizing `t -> D(f, n^{it}; x)^2` over `|t| <= T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TMinimum {
    pub t: f64,
    pub value: f64,
    pub value_at_zero: f64,
    /// Initial grid spacing `1/(10 log x)`.
    pub grid_step: f64,
    /// Spacing of the final refinement round.
    pub resolution: f64,
}

const REFINE_ROUNDS: u32 = 3;

/// Grid search with spacing `1/(10 log x)` over `[-T, T]` followed by three
/// rounds of tenfold local refinement. `t = 0` is always a candidate.
pub fn min_distance_t<F>(f: &F, x: f64, t_window: f64, table: &PrimeTable) -> Result<TMinimum>
where
    F: PrimeFunction + ?Sized,
{
    if x < 16.0 {
        return domain(format!("x = {x} must be at least 16"));
    }
    if t_window.is_nan() || t_window < 0.0 {
        return domain("T must be non-negative");
    }
    let primes = primes_for(x, table)?;
    let fv = f.at_primes(primes);
    let logs: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
    let idx: Vec<usize> = (0..primes.len()).collect();
    let eval = |t: f64| {
        blocked_sum(&idx, |&i| {
            let tw = Complex64::from_polar(1.0, -t * logs[i]);
            (1.0 - (fv[i] * tw).re) / primes[i] as f64
        })
    };

    let value_at_zero = eval(0.0);
    let grid_step = 1.0 / (10.0 * x.ln());
    let mut best = (0.0f64, value_at_zero);
    let consider = |t: f64, v: f64, best: &mut (f64, f64)| {
        // strict improvement, or a tie closer to zero
        if v < best.1 || (v == best.1 && t.abs() < best.0.abs()) {
            *best = (t, v);
        }
    };
    if t_window > 0.0 {
        let n = (2.0 * t_window / grid_step).ceil().max(1.0) as u64;
        let h = 2.0 * t_window / n as f64;
        for i in 0..=n {
            let t = -t_window + i as f64 * h;
            consider(t, eval(t), &mut best);
        }
        let mut step = h;
        for _ in 0..REFINE_ROUNDS {
            let centre = best.0;
            let fine = step / 10.0;
            for i in -10i32..=10 {
                let t = (centre + i as f64 * fine).clamp(-t_window, t_window);
                consider(t, eval(t), &mut best);
            }
            step = fine;
        }
    }
    Ok(TMinimum {
        t: best.0,
        value: best.1,
        value_at_zero,
        grid_step,
        resolution: if t_window > 0.0 {
            grid_step / 10f64.powi(REFINE_ROUNDS as i32)
        } else {
            0.0
        },
    })
}
