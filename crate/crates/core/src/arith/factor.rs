use serde::Serialize;

use super::modular::is_prime_u64;
use super::sieve::PrimeTable;
use crate::error::{domain, Error, Result};

/// Prime factorization `value = prod p^e`, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
    value: u64,
}

impl Factorization {
    /// Builds from pairs; validates ordering and exponents.
    pub fn from_pairs(factors: Vec<(u64, u32)>) -> Result<Self> {
        let mut value = 1u64;
        for (i, &(p, e)) in factors.iter().enumerate() {
            if e == 0 || p < 2 || (i > 0 && factors[i - 1].0 >= p) {
                return domain(format!("invalid factor list {factors:?}"));
            }
            value = p
                .checked_pow(e)
                .and_then(|pe| value.checked_mul(pe))
                .ok_or_else(|| Error::Domain("factorization overflows u64".into()))?;
        }
        Ok(Self { factors, value })
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Euler's totient.
    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// `P^-(n)`; `None` for `n = 1`.
    pub fn least_prime_factor(&self) -> Option<u64> {
        self.factors.first().map(|&(p, _)| p)
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }

    /// Multiplicity of `p` in the value.
    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }
}

/// Factor `n` using the table's least-prime-factor array, falling back to
/// trial division by the table's primes and a primality check of the cofactor.
pub fn factorize(n: u64, table: &PrimeTable) -> Result<Factorization> {
    if n == 0 {
        return domain("cannot factor 0");
    }
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut push = |p: u64| match factors.last_mut() {
        Some((q, e)) if *q == p => *e += 1,
        _ => factors.push((p, 1)),
    };
    if n <= table.limit() {
        let mut m = n;
        while m > 1 {
            let p = table.smallest_factor(m).expect("within sieve range");
            push(p);
            m /= p;
        }
        return Ok(Factorization { factors, value: n });
    }
    let mut rem = n;
    let mut exhausted = true;
    for &p in table.primes() {
        if p * p > rem {
            exhausted = false;
            break;
        }
        while rem % p == 0 {
            push(p);
            rem /= p;
        }
    }
    if rem > 1 {
        let sqrt_checked = !exhausted || rem <= table.limit();
        if sqrt_checked || is_prime_u64(rem) {
            push(rem);
        } else {
            return Err(Error::IncompleteFactorization { n, cofactor: rem });
        }
    }
    Ok(Factorization { factors, value: n })
}

/// Table-free factorization by trial division (for small inputs).
pub fn factorize_trial(n: u64) -> Result<Factorization> {
    if n == 0 {
        return domain("cannot factor 0");
    }
    let mut factors = Vec::new();
    let mut m = n;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    Ok(Factorization { factors, value: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{gcd, sieve_primes};

    #[test]
    fn examples() {
        let t = sieve_primes(10_000).unwrap();
        assert_eq!(factorize(12, &t).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert!(factorize(1, &t).unwrap().factors().is_empty());
        let n = 32 * 7919;
        let f = factorize(n, &t).unwrap();
        assert_eq!(f.factors(), &[(2, 5), (7919, 1)]);
        assert_eq!(
            f.factors().iter().map(|&(p, e)| p.pow(e)).product::<u64>(),
            n
        );
    }

    #[test]
    fn beyond_the_sieve() {
        let t = sieve_primes(100).unwrap();
        // 101 * 103 survives trial division by every sieved prime.
        assert_eq!(
            factorize(10_403, &t),
            Err(Error::IncompleteFactorization {
                n: 10_403,
                cofactor: 10_403
            })
        );
        assert_eq!(factorize(9_973, &t).unwrap().factors(), &[(9_973, 1)]);
        assert_eq!(
            factorize(2 * 9_973, &t).unwrap().factors(),
            &[(2, 1), (9_973, 1)]
        );
        let big_prime = 1_000_000_007;
        assert_eq!(
            factorize(big_prime, &t).unwrap().factors(),
            &[(big_prime, 1)]
        );
    }

    #[test]
    fn roundtrip_and_phi_against_brute_force() {
        let t = sieve_primes(10_000).unwrap();
        for n in 1..=10_000u64 {
            let f = factorize(n, &t).unwrap();
            let back: u64 = f.factors().iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
            assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
            assert_eq!(f, factorize_trial(n).unwrap());
            let brute = (1..=n).filter(|&a| gcd(a, n) == 1).count() as u64;
            assert_eq!(f.phi(), brute, "phi({n})");
        }
    }

    #[test]
    fn divisors_are_complete() {
        let f = factorize_trial(360).unwrap();
        let brute: Vec<u64> = (1..=360).filter(|d| 360 % d == 0).collect();
        assert_eq!(f.divisors(), brute);
    }
}
