use std::f64::consts::PI;

use serde::Serialize;

use crate::arith::is_prime_u64;
use crate::error::{domain, Result};

/// Exponent in `z = exp((log Q)^alpha)`.
pub const ALPHA: f64 = 7.0 / 11.0;

/// `G(x) = x / tan x` on `(0, pi)`.
#[allow(non_snake_case)]
pub fn taylor_G(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < PI) {
        return domain(format!("G(x) needs 0 < x < pi, got {x}"));
    }
    let t = x.tan();
    if t == 0.0 || !t.is_finite() {
        return domain(format!("tan pole at x = {x}"));
    }
    Ok(x / t)
}

/// The coefficient `c` in `G(x) = 1 - c x^2 + O(x^4)`, by Richardson
/// extrapolation of `(1 - G(x)) / x^2` along `x = 0.2 / 2^i`.
pub fn g_coefficient() -> f64 {
    const LEVELS: usize = 4;
    let quotient = |x: f64| {
        // 1 - x cos x / sin x, arranged to avoid the leading cancellation
        let (s, c) = x.sin_cos();
        (s - x * c) / s / (x * x)
    };
    let mut t = [[0.0f64; LEVELS]; LEVELS];
    for i in 0..LEVELS {
        t[i][0] = quotient(0.2 / f64::powi(2.0, i as i32));
        for j in 1..=i {
            let w = f64::powi(4.0, j as i32);
            t[i][j] = (w * t[i][j - 1] - t[i - 1][j - 1]) / (w - 1.0);
        }
    }
    t[LEVELS - 1][LEVELS - 1]
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimalM {
    pub q_level: f64,
    pub g: u64,
    pub g_star: u64,
    pub c: f64,
    pub c1: f64,
    /// `sqrt(4 c1 loglog Q)`.
    pub m_real: f64,
    /// Prime nearest `m_real` (smaller on ties).
    pub m_prime: u64,
    /// `(m, 1/2 log m + c1 loglog Q / m^2)` on a grid around `m_real`.
    pub curve: Vec<(f64, f64)>,
}

impl OptimalM {
    pub fn objective(&self, m: f64) -> f64 {
        0.5 * m.ln() + self.c1 * self.q_level.ln().ln() / (m * m)
    }
}

/// Minimize `1/2 log m + c1 loglog Q / m^2` with
/// `c1 = alpha c pi^2 (1 - delta_g) / g*^2`.
pub fn optimal_m(q_level: f64, g: u64, g_star: u64) -> Result<OptimalM> {
    let delta = super::delta_g(g)?;
    if g_star == 0 || g % g_star != 0 {
        return domain(format!("g* = {g_star} must divide g = {g}"));
    }
    let llq = if q_level > 1.0 {
        q_level.ln().ln()
    } else {
        f64::NAN
    };
    if llq.is_nan() || llq <= 0.0 {
        return domain(format!("loglog Q must be positive, Q = {q_level}"));
    }
    let c = g_coefficient();
    let c1 = ALPHA * c * PI * PI * (1.0 - delta) / (g_star * g_star) as f64;
    let m_real = (4.0 * c1 * llq).sqrt();
    let mut out = OptimalM {
        q_level,
        g,
        g_star,
        c,
        c1,
        m_real,
        m_prime: nearest_prime(m_real),
        curve: Vec::new(),
    };
    const POINTS: usize = 64;
    let (lo, hi) = ((m_real / 4.0).max(1.0 + 1e-9), 4.0 * m_real.max(1.0));
    out.curve = (0..POINTS)
        .map(|i| {
            let m = lo * (hi / lo).powf(i as f64 / (POINTS - 1) as f64);
            (m, out.objective(m))
        })
        .collect();
    Ok(out)
}

fn nearest_prime(x: f64) -> u64 {
    let floor = x.floor().max(2.0) as u64;
    let below = (2..=floor).rev().find(|&n| is_prime_u64(n)).unwrap_or(2);
    let above = (floor..)
        .find(|&n| is_prime_u64(n) && n as f64 >= x)
        .unwrap();
    if x - below as f64 <= above as f64 - x {
        below
    } else {
        above
    }
}
