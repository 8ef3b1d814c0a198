use serde::Serialize;

use crate::arith::PrimeTable;
use crate::character::DirichletCharacter;
use crate::error::{domain, Result};
use crate::lfunc::{sj_weighted_log_kl_collapsed, small_prime_cos_sum, EULER_GAMMA};
use crate::pretentious::{corr_sum, mean_identity, OddOrderParams};

/// `S(y; psi, g)` set against its predicted main terms.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub m: u64,
    pub psi: String,
    pub g: u64,
    pub k: u64,
    pub k_star: u64,
    pub y: f64,
    pub p_threshold: f64,
    pub x: f64,
    /// Exact `S(y; psi, g)`.
    pub corr_sum: f64,
    /// `A log(log y / loglog m)` with `A` the mean weight.
    pub main_term: f64,
    /// `sum_l c_l sum_{p <= P, psi~(p) = e(l/k*)} 1/p`.
    pub small_prime_term: f64,
    /// `corr_sum - main_term - small_prime_term`.
    pub residual: f64,
    /// `A (loglog y + gamma + log(phi(m)/m)) - sum_{j != 0} S_j log(K/L)(psi~^j)`.
    pub with_sj: f64,
    /// `corr_sum - with_sj`.
    pub with_sj_residual: f64,
}

pub fn spsig_decomposition(
    y: f64,
    psi: &DirichletCharacter,
    g: u64,
    p_threshold: f64,
    x: f64,
    table: &PrimeTable,
) -> Result<DecompositionReport> {
    let m = psi.modulus();
    if y.is_nan() || y < 16.0 {
        return domain(format!("y = {y} must be at least 16"));
    }
    if m < 3 {
        return domain("psi must have modulus at least 3");
    }
    let k = psi.order();
    let params = OddOrderParams::new(g, k)?;
    let mean = mean_identity(g, k)?.rhs;
    let s = corr_sum(y, psi, g, table)?;
    let main_term = mean * (y.ln() / (m as f64).ln().ln()).ln();
    let small = small_prime_cos_sum(psi, &params, p_threshold, table, false)?;
    let phi = crate::arith::factorize(m, table)?.phi();
    let sj = sj_weighted_log_kl_collapsed(psi, &params, x, table)?;
    let with_sj = mean * (y.ln().ln() + EULER_GAMMA + (phi as f64 / m as f64).ln()) - sj;
    Ok(DecompositionReport {
        m,
        psi: psi.id(),
        g,
        k,
        k_star: params.k_star,
        y,
        p_threshold,
        x,
        corr_sum: s,
        main_term,
        small_prime_term: small,
        residual: s - main_term - small,
        with_sj,
        with_sj_residual: s - with_sj,
    })
}
