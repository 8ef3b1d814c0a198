//! Truncated Euler products for `L(1, xi)` and the auxiliary `K(1, xi)`,
//! the constants `C_m(a)`, and the identities built from them.

mod cma;

pub use cma::{
    c_m_a, cma_table, control_err_check, coset_identity_check, lz_residual, mertens_restricted,
    sj_weighted_log_kl, sj_weighted_log_kl_collapsed, small_prime_cos_sum, CmaTable, CmaValue,
    ControlErrCheck, CosetCheck, LzResidual, MertensCheck, SmallPrimeThreshold,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::PrimeTable;
use crate::character::DirichletCharacter;
use crate::error::{Error, Result};
use crate::pretentious::PrimeFunction;
use crate::summation::blocked_complex_sum;

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577215664901532860606512090082;

/// Meissel–Mertens constant: `sum_{p <= x} 1/p = loglog x + B + o(1)`.
pub const MERTENS_B: f64 = 0.261_497_212_847_642_8;

/// Error-estimate constant for `log K`: the tail beyond `X` is `O(1/X)`.
const K_TAIL_CONSTANT: f64 = 10.0;

/// `H_n - log n` with the first asymptotic corrections; an independent
/// estimate of Euler's constant.
pub fn euler_gamma_oracle(n: u64) -> f64 {
    let h = crate::summation::compensated_sum((1..=n).rev().map(|i| 1.0 / i as f64));
    let nf = n as f64;
    let n2 = nf * nf;
    h - nf.ln() - 1.0 / (2.0 * nf) + 1.0 / (12.0 * n2) - 1.0 / (120.0 * n2 * n2)
}

/// `log(1 + z)` accurate for small `|z|`.
pub(crate) fn clog1p(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re > -1.0 {
        return Complex64::new(z.re.ln_1p(), 0.0);
    }
    let re = 0.5 * (2.0 * z.re + z.norm_sqr()).ln_1p();
    let im = z.im.atan2(1.0 + z.re);
    Complex64::new(re, im)
}

/// `exp(w) - 1` accurate for small `|w|`.
fn cexpm1(w: Complex64) -> Complex64 {
    let half = (w.im / 2.0).sin();
    let re = w.re.exp_m1() * w.im.cos() - 2.0 * half * half;
    Complex64::new(re, w.re.exp() * w.im.sin())
}

/// `k_xi(p) = p (1 - (1 - xi(p)/p) (1 - 1/p)^{-xi(p)})`, with the power taken
/// as `exp(-xi(p) log(1 - 1/p))`.
pub fn k_xi_at_prime(xi_p: Complex64, p: u64) -> Complex64 {
    if xi_p == Complex64::new(0.0, 0.0) {
        return xi_p;
    }
    let pf = p as f64;
    let log_factor = (-1.0 / pf).ln_1p();
    let w = clog1p(-xi_p / pf) - xi_p * log_factor;
    -pf * cexpm1(w)
}

/// `| -log(1 - k(p)/p) + log(1 - xi(p)/p) - xi(p) log(1 - 1/p) |`.
pub fn comb_kl_error(xi_p: Complex64, p: u64) -> f64 {
    let pf = p as f64;
    let k = k_xi_at_prime(xi_p, p);
    let lhs = -clog1p(-k / pf) + clog1p(-xi_p / pf);
    (lhs - xi_p * (-1.0 / pf).ln_1p()).norm()
}

/// A truncated `log` of an Euler product.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerProductValue {
    pub character: String,
    pub x: f64,
    pub log_value: Complex64,
    /// `10/X` for `K`; `|value(X) - value(X/2)|` for `L`.
    pub error_estimate: f64,
    /// The same truncation at `X/2`.
    pub half_value: Complex64,
}

fn check_x(x: f64, table: &PrimeTable) -> Result<()> {
    if x.is_nan() || x < 3.0 {
        return Err(Error::Domain(format!(
            "truncation X = {x} must be at least 3"
        )));
    }
    if x > table.limit() as f64 + 0.5 {
        return Err(Error::Resource(format!(
            "truncation X = {x} exceeds the sieve limit {}",
            table.limit()
        )));
    }
    Ok(())
}

/// `(sum over p <= X/2, sum over X/2 < p <= X)` of `term(xi(p), p)`.
fn split_sums<F>(
    xi: &DirichletCharacter,
    x: f64,
    table: &PrimeTable,
    term: F,
) -> (Complex64, Complex64)
where
    F: Fn(Complex64, u64) -> Complex64 + Sync,
{
    let primes = table.primes_up_to(x.floor() as u64);
    let values = xi.at_primes(primes);
    let half = table.count_up_to((x / 2.0).floor() as u64);
    let idx: Vec<usize> = (0..primes.len()).collect();
    let f = |&i: &usize| term(values[i], primes[i]);
    (
        blocked_complex_sum(&idx[..half], f),
        blocked_complex_sum(&idx[half..], f),
    )
}

/// `log K(1, xi) ~ -sum_{p <= X} log(1 - k_xi(p)/p)`.
#[allow(non_snake_case)]
pub fn log_K(xi: &DirichletCharacter, x: f64, table: &PrimeTable) -> Result<EulerProductValue> {
    check_x(x, table)?;
    // |k(p)/p| < 1 is checked up front where it could fail
    for &p in table
        .primes_up_to(x.floor() as u64)
        .iter()
        .take_while(|&&p| p < 5)
    {
        let r = k_xi_at_prime(xi.value_complex(p), p).norm() / p as f64;
        if r >= 1.0 {
            return Err(Error::Numerical(format!("|k(p)/p| = {r} >= 1 at p = {p}")));
        }
    }
    let (lo, hi) = split_sums(xi, x, table, |v, p| {
        -clog1p(-k_xi_at_prime(v, p) / p as f64)
    });
    Ok(EulerProductValue {
        character: xi.id(),
        x,
        log_value: lo + hi,
        error_estimate: K_TAIL_CONSTANT / x,
        half_value: lo,
    })
}

/// `log L(1, xi) ~ -sum_{p <= X} log(1 - xi(p)/p)` for non-principal `xi`.
#[allow(non_snake_case)]
pub fn log_L(xi: &DirichletCharacter, x: f64, table: &PrimeTable) -> Result<EulerProductValue> {
    if xi.is_principal() {
        return Err(Error::Domain(format!(
            "L(1, {xi}) diverges for the principal character"
        )));
    }
    check_x(x, table)?;
    let (lo, hi) = split_sums(xi, x, table, |v, p| -clog1p(-v / p as f64));
    Ok(EulerProductValue {
        character: xi.id(),
        x,
        log_value: lo + hi,
        error_estimate: hi.norm(),
        half_value: lo,
    })
}
