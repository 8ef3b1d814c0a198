//! The odd-order correlation machinery: `delta_g`, the maximizers `z_l`, the
//! mean identity, the correlation sum, pretentious distances and the
//! Fourier coefficients `S_j`.

mod distance;
mod sj;
mod taylor;

pub use distance::{
    distance2, min_distance_t, pretentious_distance, Archimedean, DistanceParams, PrimeFunction,
    PrimeValues, TMinimum,
};
pub use sj::{sj_table, SjTable};
pub use taylor::{g_coefficient, optimal_m, taylor_G, OptimalM, ALPHA};

use std::f64::consts::PI;

use serde::Serialize;

use crate::arith::{gcd, PrimeTable};
use crate::character::DirichletCharacter;
use crate::error::{domain, Result};
use crate::summation::blocked_sum;

fn check_odd_order(g: u64) -> Result<()> {
    if g < 3 || g % 2 == 0 {
        return domain(format!("g = {g} must be odd and at least 3"));
    }
    Ok(())
}

/// `delta_g = 1 - (g/pi) sin(pi/g)`.
pub fn delta_g(g: u64) -> Result<f64> {
    check_odd_order(g)?;
    let g = g as f64;
    Ok(1.0 - g / PI * (PI / g).sin())
}

/// An odd order `g` paired with the order `k` of a character it is meant to
/// imitate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OddOrderParams {
    pub g: u64,
    pub k: u64,
    pub k_star: u64,
    pub g_star: u64,
    pub delta_g: f64,
}

impl OddOrderParams {
    pub fn new(g: u64, k: u64) -> Result<Self> {
        let delta = delta_g(g)?;
        if k == 0 {
            return domain("k must be at least 1");
        }
        let d = gcd(g, k);
        Ok(Self {
            g,
            k,
            k_star: k / d,
            g_star: g / d,
            delta_g: delta,
        })
    }

    /// `cos((2 pi / g) ||g* l / k*||)`.
    pub fn cos_weight(&self, l: u64) -> f64 {
        cos_weight(self.g, self.g_star, self.k_star, l)
    }

    /// All `k*` distinct weights, indexed by `l mod k*`.
    pub fn cos_weights(&self) -> Vec<f64> {
        (0..self.k_star).map(|l| self.cos_weight(l)).collect()
    }
}

pub(crate) fn cos_weight(g: u64, g_star: u64, k_star: u64, l: u64) -> f64 {
    let r = ((g_star as u128 * l as u128) % k_star as u128) as u64;
    let dist = r.min(k_star - r) as f64 / k_star as f64;
    (2.0 * PI / g as f64 * dist).cos()
}

/// The maximizer `z_l = e(n/g)` of `Re(z e(-l/k))` over `mu_g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZChoice {
    /// `n` reduced mod `g`.
    pub n: u64,
    /// `Re(z_l e(-l/k))` evaluated from `z_l` itself.
    pub re_value: f64,
    /// The same quantity from the closed form `cos((2 pi/g)||g* l/k*||)`.
    pub cos_value: f64,
}

/// Pick `z_l`: `n` is the integer nearest `l g / k`, rounding halves down.
pub fn select_z(l: u64, k: u64, g: u64) -> Result<ZChoice> {
    check_odd_order(g)?;
    if k == 0 || l >= k {
        return domain(format!("need 0 <= l < k, got l = {l}, k = {k}"));
    }
    let (l128, k128, g128) = (l as u128, k as u128, g as u128);
    let n = (2 * l128 * g128 + k128 - 1) / (2 * k128);
    // Re(e(n/g - l/k)) = cos(2 pi (n k - l g) / (g k))
    let num = n as i128 * k as i128 - l as i128 * g as i128;
    let re_value = (2.0 * PI * num as f64 / (g as f64 * k as f64)).cos();
    let d = gcd(g, k);
    Ok(ZChoice {
        n: (n % g128) as u64,
        re_value,
        cos_value: cos_weight(g, g / d, k / d, l),
    })
}

/// Both sides of the mean identity for the weights `cos((2pi/g)||g* l/k*||)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanIdentity {
    pub g: u64,
    pub k: u64,
    /// `(1/k) sum_{l mod k}` of the weights.
    pub lhs: f64,
    /// Closed form: `(1 - delta_g) G(pi/(g k*))` for even `k*` and
    /// `(1 - delta_g) (pi/(g k*)) / sin(pi/(g k*))` for odd `k*`.
    pub rhs: f64,
    /// `(1 - delta_g) G(pi/(g k*))` regardless of parity.
    pub tan_form: f64,
    pub abs_err: f64,
}

pub fn mean_identity(g: u64, k: u64) -> Result<MeanIdentity> {
    let p = OddOrderParams::new(g, k)?;
    let lhs = crate::summation::compensated_sum((0..k).map(|l| p.cos_weight(l))) / k as f64;
    let x = PI / (g as f64 * p.k_star as f64);
    let scale = 1.0 - p.delta_g;
    let tan_form = scale * x / x.tan();
    let rhs = if p.k_star % 2 == 0 {
        tan_form
    } else {
        scale * x / x.sin()
    };
    Ok(MeanIdentity {
        g,
        k,
        lhs,
        rhs,
        tan_form,
        abs_err: (lhs - rhs).abs(),
    })
}

/// `S(y; psi, g) = sum_{p <= y} (1/p) max_{z in mu_g + {0}} Re(z conj(psi(p)))`.
pub fn corr_sum(y: f64, psi: &DirichletCharacter, g: u64, table: &PrimeTable) -> Result<f64> {
    let weights = prime_weights(psi, g)?;
    Ok(corr_sum_with(y, &weights, table))
}

/// Per-residue weights `max_z Re(z conj(psi(n)))` for `n mod m` (zero off the
/// units).
pub(crate) fn prime_weights(psi: &DirichletCharacter, g: u64) -> Result<Vec<f64>> {
    let params = OddOrderParams::new(g, psi.order())?;
    let by_l = params.cos_weights();
    let r = psi.group().root_denominator();
    let step = r / params.k;
    Ok(psi
        .angle_table()
        .into_iter()
        .map(|a| {
            if a == crate::character::NON_UNIT {
                0.0
            } else {
                by_l[((a as u64 / step) % params.k_star) as usize]
            }
        })
        .collect())
}

pub(crate) fn corr_sum_with(y: f64, weights: &[f64], table: &PrimeTable) -> f64 {
    let m = weights.len() as u64;
    let primes = table.primes_up_to(y.floor().max(0.0) as u64);
    blocked_sum(primes, |&p| weights[(p % m) as usize] / p as f64)
}

#[cfg(test)]
mod tests;
