use crate::error::{Error, Result};

/// Largest sieve limit accepted by [`sieve_primes`].
pub const DEFAULT_SIEVE_CEILING: u64 = 1_000_000_000;

/// Primes up to `limit` together with a least-prime-factor table.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
    lpf: Vec<u32>,
}

/// Sieve all primes `<= limit` (linear sieve, least-prime-factor output).
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    PrimeTable::with_ceiling(limit, DEFAULT_SIEVE_CEILING)
}

impl PrimeTable {
    pub fn new(limit: u64) -> Result<Self> {
        sieve_primes(limit)
    }

    pub fn with_ceiling(limit: u64, ceiling: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::EmptyTable(limit));
        }
        if limit > ceiling {
            return Err(Error::Resource(format!(
                "sieve limit {limit} exceeds ceiling {ceiling}"
            )));
        }
        let n = limit as usize;
        let mut lpf = vec![0u32; n + 1];
        let mut primes: Vec<u64> = Vec::with_capacity(estimate_pi(limit));
        for i in 2..=n {
            if lpf[i] == 0 {
                lpf[i] = i as u32;
                primes.push(i as u64);
            }
            let li = lpf[i] as u64;
            for &p in &primes {
                let ip = i as u64 * p;
                if p > li || ip > limit {
                    break;
                }
                lpf[ip as usize] = p as u32;
            }
        }
        Ok(Self { limit, primes, lpf })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Primes `p <= y` (inclusive cutoff). `y` beyond the limit is clamped.
    pub fn primes_up_to(&self, y: u64) -> &[u64] {
        let end = self.primes.partition_point(|&p| p <= y);
        &self.primes[..end]
    }

    /// Primes in `(lo, hi]`.
    pub fn primes_between(&self, lo: u64, hi: u64) -> &[u64] {
        let start = self.primes.partition_point(|&p| p <= lo);
        let end = self.primes.partition_point(|&p| p <= hi);
        &self.primes[start..end.max(start)]
    }

    pub fn count_up_to(&self, y: u64) -> usize {
        self.primes.partition_point(|&p| p <= y)
    }

    /// Least prime factor of `n` for `2 <= n <= limit`.
    pub fn smallest_factor(&self, n: u64) -> Option<u64> {
        if n < 2 || n > self.limit {
            return None;
        }
        Some(self.lpf[n as usize] as u64)
    }

    /// Primality for `n <= limit`; `None` when out of range.
    pub fn is_prime(&self, n: u64) -> Option<bool> {
        if n > self.limit {
            return None;
        }
        Some(n >= 2 && self.lpf[n as usize] as u64 == n)
    }
}

fn estimate_pi(x: u64) -> usize {
    if x < 17 {
        return 8;
    }
    let xf = x as f64;
    (1.26 * xf / xf.ln()) as usize
}
