use std::f64::consts::PI;

use serde::Serialize;

use crate::arith::{gcd, mod_inverse};
use crate::error::{domain, Result};

use super::cos_weight;

/// DFT size up to which `S_j` is also computed directly (quadratic cost).
const DIRECT_DFT_CAP: u64 = 4096;

/// Fourier coefficients `S_j = (1/k*) sum_{l mod k*} c(l) e(-j l/k*)` of the
/// weights `c(l) = cos((2pi/g)||g* l/k*||)`.
///
/// The weights are even in `l`, so every `S_j` is real.
#[derive(Debug, Clone, Serialize)]
pub struct SjTable {
    pub g: u64,
    pub g_star: u64,
    pub k_star: u64,
    /// Closed-form values, indexed by `j mod k*`.
    pub values: Vec<f64>,
    /// Direct DFT values when `k* <= 4096`.
    pub direct: Option<Vec<f64>>,
    /// `max_j |direct - closed|`, when the DFT was computed.
    pub max_discrepancy: Option<f64>,
    /// `sum_{j != 0} |S_j|`.
    pub l1_tail: f64,
}

/// `S_j` for `gcd(g, k*) = 1` (so that `g* = g`).
pub fn sj_table(g: u64, k_star: u64) -> Result<SjTable> {
    SjTable::new(g, g, k_star)
}

impl SjTable {
    pub fn new(g: u64, g_star: u64, k_star: u64) -> Result<Self> {
        Self::build(g, g_star, k_star, k_star <= DIRECT_DFT_CAP)
    }

    /// Closed form only; linear in `k*`.
    pub fn closed_form(g: u64, g_star: u64, k_star: u64) -> Result<Self> {
        Self::build(g, g_star, k_star, false)
    }

    fn build(g: u64, g_star: u64, k_star: u64, with_direct: bool) -> Result<Self> {
        super::check_odd_order(g)?;
        if k_star == 0 || g_star == 0 || g % g_star != 0 {
            return domain(format!(
                "invalid pair g* = {g_star}, k* = {k_star} for g = {g}"
            ));
        }
        if gcd(g_star, k_star) != 1 {
            return domain(format!(
                "gcd(g*, k*) must be 1, got g* = {g_star}, k* = {k_star}"
            ));
        }
        let values = closed_form_values(g, g_star, k_star);
        let direct = with_direct.then(|| direct_values(g, g_star, k_star));
        let max_discrepancy = direct.as_ref().map(|d| {
            d.iter()
                .zip(&values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        });
        let l1_tail = crate::summation::compensated_sum(values.iter().skip(1).map(|v| v.abs()));
        Ok(Self {
            g,
            g_star,
            k_star,
            values,
            direct,
            max_discrepancy,
            l1_tail,
        })
    }

    pub fn s(&self, j: u64) -> f64 {
        self.values[(j % self.k_star) as usize]
    }

    /// `sum_j S_j e(j l / k*)`, which reproduces the weight at `l`.
    pub fn reconstruct(&self, l: u64) -> f64 {
        let k = self.k_star;
        crate::summation::compensated_sum(self.values.iter().enumerate().map(|(j, s)| {
            let r = (j as u128 * l as u128 % k as u128) as f64;
            s * (2.0 * PI * r / k as f64).cos()
        }))
    }
}

fn direct_values(g: u64, g_star: u64, k: u64) -> Vec<f64> {
    let weights: Vec<f64> = (0..k).map(|l| cos_weight(g, g_star, k, l)).collect();
    let cosines: Vec<f64> = (0..k)
        .map(|r| (2.0 * PI * r as f64 / k as f64).cos())
        .collect();
    (0..k)
        .map(|j| {
            let mut acc = crate::summation::CompensatedSum::new();
            let mut r = 0u64;
            for w in &weights {
                acc.add(w * cosines[r as usize]);
                r += j;
                if r >= k {
                    r -= k;
                }
            }
            acc.value() / k as f64
        })
        .collect()
}

/// `sin((n + 1/2) x) / sin(x / 2) = sum_{|u| <= n} cos(u x)`.
fn dirichlet_kernel(n: u64, x: f64) -> f64 {
    ((n as f64 + 0.5) * x).sin() / (x / 2.0).sin()
}

// Substituting l = a u with a = (g*)^{-1} mod k* turns the weights into
// cos(theta |u|) for |u| <= k*/2, theta = 2pi/(g k*). The coefficient is then
// a pair of Dirichlet kernels, plus the lone u = k*/2 term when k* is even.
fn closed_form_values(g: u64, g_star: u64, k: u64) -> Vec<f64> {
    if k == 1 {
        return vec![1.0];
    }
    let a = mod_inverse(g_star % k, k).expect("g* invertible mod k*");
    let theta = 2.0 * PI / (g as f64 * k as f64);
    let kf = k as f64;
    (0..k)
        .map(|j| {
            let h = (a as u128 * j as u128 % k as u128) as u64;
            // reduce h to (-k/2, k/2] so phi stays small
            let hs = if 2 * h > k { h as f64 - kf } else { h as f64 };
            let phi = 2.0 * PI * hs / kf;
            if k % 2 == 1 {
                let n = (k - 1) / 2;
                0.5 * (dirichlet_kernel(n, theta + phi) + dirichlet_kernel(n, theta - phi)) / kf
            } else {
                let n = k / 2 - 1;
                let sign = if h % 2 == 0 { 1.0 } else { -1.0 };
                let edge = sign * (PI / g as f64).cos();
                (0.5 * (dirichlet_kernel(n, theta + phi) + dirichlet_kernel(n, theta - phi)) + edge)
                    / kf
            }
        })
        .collect()
}
