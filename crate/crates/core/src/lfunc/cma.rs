use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use super::{log_K, log_L, EULER_GAMMA, MERTENS_B};
use crate::arith::{factorize, gcd, PrimeTable};
use crate::character::{
    build_group, enumerate_characters, root_table, CharacterFilter, DirichletCharacter, NON_UNIT,
};
use crate::error::{domain, Error, Result};
use crate::pretentious::{OddOrderParams, SjTable};
use crate::summation::{blocked_sum, compensated_sum, CompensatedComplexSum};

/// `log(K(1, xi)/L(1, xi))` at `X` and at `X/2`.
fn log_k_over_l(
    xi: &DirichletCharacter,
    x: f64,
    table: &PrimeTable,
) -> Result<(Complex64, Complex64)> {
    let k = log_K(xi, x, table)?;
    let l = log_L(xi, x, table)?;
    Ok((k.log_value - l.log_value, k.half_value - l.half_value))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmaValue {
    pub m: u64,
    pub a: u64,
    pub value: f64,
    /// `(1/phi(m)) sum_{xi != xi_0} conj(xi(a)) log(K/L)(xi)`, real part.
    pub xi_term: f64,
    /// `-(gamma + log(phi(m)/m)) / phi(m)`.
    pub gamma_term: f64,
    /// Imaginary part of the assembled character sum (zero up to rounding).
    pub imag_residue: f64,
    /// The same constant from products truncated at `X/2`.
    pub half_value: f64,
}

/// `C_m(a)` for every unit `a mod m` at one truncation.
#[derive(Debug, Clone, Serialize)]
pub struct CmaTable {
    pub m: u64,
    pub phi: u64,
    pub x: f64,
    /// Non-principal characters and `log(K/L)` at `X` and `X/2`.
    #[serde(skip)]
    pub characters: Vec<(DirichletCharacter, Complex64, Complex64)>,
    pub values: Vec<CmaValue>,
}

/// `-(gamma + log(phi(m)/m))`, the exact value of `sum_a C_m(a)`.
fn full_row_sum(m: u64, phi: u64) -> f64 {
    -(EULER_GAMMA + (phi as f64 / m as f64).ln())
}

pub fn cma_table(m: u64, x: f64, table: &PrimeTable) -> Result<CmaTable> {
    if m == 0 {
        return domain("modulus must be positive");
    }
    let group = build_group(m, table)?;
    let phi = group.order();
    let mut characters = Vec::with_capacity(phi as usize);
    for xi in enumerate_characters(&group, CharacterFilter::non_principal()) {
        let (full, half) = log_k_over_l(&xi, x, table)?;
        characters.push((xi, full, half));
    }
    let gamma_term = full_row_sum(m, phi) / phi as f64;
    let roots = root_table(group.root_denominator());
    let angle_tables: Vec<Vec<u32>> = characters
        .iter()
        .map(|(xi, _, _)| xi.angle_table())
        .collect();
    let mut values: Vec<CmaValue> = (1..=m)
        .map(|a| a % m)
        .filter(|&a| gcd(a, m) == 1)
        .map(|a| {
            let mut full = CompensatedComplexSum::new();
            let mut half = CompensatedComplexSum::new();
            for ((_, d, dh), angles) in characters.iter().zip(&angle_tables) {
                let v = roots[angles[a as usize] as usize].conj();
                full.add(v * d);
                half.add(v * dh);
            }
            let (full, half) = (full.value() / phi as f64, half.value() / phi as f64);
            CmaValue {
                m,
                a,
                value: full.re + gamma_term,
                xi_term: full.re,
                gamma_term,
                imag_residue: full.im,
                half_value: half.re + gamma_term,
            }
        })
        .collect();
    values.sort_by_key(|v| v.a);
    Ok(CmaTable {
        m,
        phi,
        x,
        characters,
        values,
    })
}

impl CmaTable {
    pub fn get(&self, a: u64) -> Option<&CmaValue> {
        let a = a % self.m;
        self.values
            .binary_search_by_key(&a, |v| v.a)
            .ok()
            .map(|i| &self.values[i])
    }

    pub fn row_sum(&self) -> f64 {
        compensated_sum(self.values.iter().map(|v| v.value))
    }

    /// `-(gamma + log(phi(m)/m))`.
    pub fn expected_row_sum(&self) -> f64 {
        full_row_sum(self.m, self.phi)
    }

    /// Largest change of any `C_m(a)` between truncations `X/2` and `X`.
    pub fn drift(&self) -> f64 {
        self.values
            .iter()
            .map(|v| (v.value - v.half_value).abs())
            .fold(0.0, f64::max)
    }

    /// `log(K/L)` for `xi`, at `X` and `X/2`.
    pub fn log_k_over_l(&self, xi: &DirichletCharacter) -> Option<(Complex64, Complex64)> {
        self.characters
            .iter()
            .find(|(c, _, _)| c == xi)
            .map(|&(_, d, h)| (d, h))
    }
}

pub fn c_m_a(m: u64, a: u64, x: f64, table: &PrimeTable) -> Result<CmaValue> {
    if m < 3 || gcd(a, m) != 1 {
        return domain(format!(
            "need m >= 3 and gcd(a, m) = 1, got m = {m}, a = {a}"
        ));
    }
    let t = cma_table(m, x, table)?;
    Ok(t.get(a).cloned().expect("unit residue present"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LzResidual {
    pub m: u64,
    pub a: u64,
    pub y: f64,
    /// `sum_{p <= y, p = a (m)} -log(1 - 1/p)`.
    pub log_sum: f64,
    /// `sum_{p <= y, p = a (m)} 1/p`.
    pub reciprocal_sum: f64,
    /// `loglog y / phi(m) - C_m(a)`.
    pub main_term: f64,
    /// `log_sum - main_term`: the deviation `C_m(a)` actually controls.
    pub residual: f64,
    /// `reciprocal_sum - main_term`; tends to `sum_{p = a} (1/p + log(1 - 1/p))`
    /// rather than zero.
    pub raw_residual: f64,
}

/// Deviation of the prime sum in the class `a mod m` from
/// `loglog y / phi(m) - C_m(a)`.
pub fn lz_residual(cma: &CmaTable, a: u64, y: f64, table: &PrimeTable) -> Result<LzResidual> {
    let c = cma
        .get(a)
        .ok_or_else(|| Error::Domain(format!("{a} is not a unit mod {}", cma.m)))?;
    if y.is_nan() || y < 3.0 {
        return domain(format!("y = {y} too small"));
    }
    if y > table.limit() as f64 + 0.5 {
        return Err(Error::Resource(format!(
            "y = {y} exceeds the sieve limit {}",
            table.limit()
        )));
    }
    let m = cma.m;
    let class: Vec<u64> = table
        .primes_up_to(y.floor() as u64)
        .iter()
        .copied()
        .filter(|&p| p % m == c.a)
        .collect();
    let log_sum = blocked_sum(&class, |&p| -(-1.0 / p as f64).ln_1p());
    let reciprocal_sum = blocked_sum(&class, |&p| 1.0 / p as f64);
    let main_term = y.ln().ln() / cma.phi as f64 - c.value;
    Ok(LzResidual {
        m,
        a: c.a,
        y,
        log_sum,
        reciprocal_sum,
        main_term,
        residual: log_sum - main_term,
        raw_residual: reciprocal_sum - main_term,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CosetCheck {
    pub m: u64,
    pub psi: String,
    pub k: u64,
    pub ell: u64,
    /// `sum_{a: psi(a) = e(l/k)} C_m(a)`.
    pub lhs: f64,
    /// `(1/k) sum_{j != 0} e(-lj/k) log(K/L)(psi^j) - (gamma + log(phi(m)/m))/k`.
    pub rhs: f64,
    pub abs_err: f64,
    pub cardinality: u64,
    pub expected_cardinality: u64,
    /// `|lhs(X) - lhs(X/2)|`.
    pub truncation_drift: f64,
}

pub fn coset_identity_check(
    psi: &DirichletCharacter,
    ell: u64,
    cma: &CmaTable,
) -> Result<CosetCheck> {
    let m = psi.modulus();
    if m != cma.m {
        return domain(format!(
            "character modulus {m} does not match table modulus {}",
            cma.m
        ));
    }
    let k = psi.order();
    if ell >= k {
        return domain(format!("need 0 <= l < k = {k}, got {ell}"));
    }
    let r = psi.group().root_denominator();
    let target = ell * (r / k);
    let angles = psi.angle_table();
    let coset: Vec<u64> = (0..m)
        .filter(|&a| angles[a as usize] != NON_UNIT && angles[a as usize] as u64 == target)
        .collect();
    let mut lhs = CompensatedComplexSum::new();
    let mut lhs_half = CompensatedComplexSum::new();
    for &a in &coset {
        let c = cma.get(a).expect("coset element is a unit");
        lhs.add(Complex64::new(c.value, 0.0));
        lhs_half.add(Complex64::new(c.half_value, 0.0));
    }
    let mut acc = CompensatedComplexSum::new();
    for j in 1..k {
        let (d, _) = cma
            .log_k_over_l(&psi.pow(j))
            .ok_or_else(|| Error::Numerical(format!("missing log(K/L) for {}", psi.pow(j))))?;
        let jl = (j as u128 * ell as u128 % k as u128) as u64;
        acc.add(crate::character::root_complex(k - jl, k) * d);
    }
    let rhs = acc.value().re / k as f64 + full_row_sum(m, cma.phi) / k as f64;
    let (lhs, lhs_half) = (lhs.value().re, lhs_half.value().re);
    Ok(CosetCheck {
        m,
        psi: psi.id(),
        k,
        ell,
        lhs,
        rhs,
        abs_err: (lhs - rhs).abs(),
        cardinality: coset.len() as u64,
        expected_cardinality: cma.phi / k,
        truncation_drift: (lhs - lhs_half).abs(),
    })
}

/// Small-prime cutoff `P` as a function of the modulus `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SmallPrimeThreshold {
    /// `max(3, (log m)/100)`; contains no primes for any feasible `m`.
    Paper,
    /// `100 log m`.
    Desk,
    Fixed(f64),
}

impl SmallPrimeThreshold {
    pub fn value(self, m: u64) -> f64 {
        let lm = (m.max(2) as f64).ln();
        match self {
            Self::Paper => (lm / 100.0).max(3.0),
            Self::Desk => 100.0 * lm,
            Self::Fixed(p) => p,
        }
    }
}

impl FromStr for SmallPrimeThreshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Self::Paper),
            "desk" => Ok(Self::Desk),
            _ => s.parse::<f64>().map(Self::Fixed).map_err(|_| Error::Parse {
                spec: s.to_string(),
                reason: "expected 'paper', 'desk' or a number".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlErrCheck {
    pub m: u64,
    pub psi: String,
    pub g: u64,
    pub k_star: u64,
    pub p_threshold: f64,
    pub x: f64,
    /// `sum_{j != 0 mod k*} S_j log(K/L)(psi~^j)`.
    pub lhs: f64,
    /// `-sum_l c_l (sum_{p <= P, psi~(p) = e(l/k*)} 1/p - (1/k*) sum_{p <= P, p !| m} 1/p)`.
    pub rhs: f64,
    pub abs_err: f64,
}

/// `sum_{j != 0 mod k*} S_j log(K/L)(psi~^j)` with `psi~ = psi^{(k,g)}`.
pub fn sj_weighted_log_kl(
    psi: &DirichletCharacter,
    params: &OddOrderParams,
    x: f64,
    table: &PrimeTable,
) -> Result<f64> {
    if params.k_star == 1 {
        return Ok(0.0);
    }
    let sj = SjTable::new(params.g, params.g_star, params.k_star)?;
    let tilde = psi.pow(gcd(params.k, params.g));
    let mut acc = CompensatedComplexSum::new();
    for j in 1..params.k_star {
        let (d, _) = log_k_over_l(&tilde.pow(j), x, table)?;
        acc.add(d * sj.s(j));
    }
    Ok(acc.value().re)
}

/// [`sj_weighted_log_kl`] in linear time.
///
/// Termwise, `-log(1 - k_xi(p)/p) + log(1 - xi(p)/p) = xi(p) log(1 - 1/p)`, and
/// `sum_{j != 0} S_j psi~(p)^j = c_l(p) - S_0` for `p !| m`, so the sum collapses
/// to `sum_{p <= X, p !| m} (c_l(p) - S_0) log(1 - 1/p)`.
pub fn sj_weighted_log_kl_collapsed(
    psi: &DirichletCharacter,
    params: &OddOrderParams,
    x: f64,
    table: &PrimeTable,
) -> Result<f64> {
    if params.k_star == 1 {
        return Ok(0.0);
    }
    if x > table.limit() as f64 + 0.5 {
        return Err(Error::Resource(format!(
            "X = {x} exceeds the sieve limit {}",
            table.limit()
        )));
    }
    let weights = params.cos_weights();
    let s0 = compensated_sum(weights.iter().copied()) / params.k_star as f64;
    let tilde = psi.pow(gcd(params.k, params.g));
    let m = psi.modulus();
    let step = tilde.group().root_denominator() / params.k_star;
    let angles = tilde.angle_table();
    let primes = table.primes_up_to(x.floor() as u64);
    Ok(blocked_sum(primes, |&p| match angles[(p % m) as usize] {
        NON_UNIT => 0.0,
        a => (weights[(a as u64 / step) as usize] - s0) * (-1.0 / p as f64).ln_1p(),
    }))
}

pub fn control_err_check(
    psi: &DirichletCharacter,
    g: u64,
    p_threshold: f64,
    x: f64,
    table: &PrimeTable,
) -> Result<ControlErrCheck> {
    if !psi.is_primitive() {
        return domain(format!("{psi} is not primitive"));
    }
    let params = OddOrderParams::new(g, psi.order())?;
    let lhs = sj_weighted_log_kl(psi, &params, x, table)?;
    let rhs = small_prime_cos_sum(psi, &params, p_threshold, table, true)?;
    Ok(ControlErrCheck {
        m: psi.modulus(),
        psi: psi.id(),
        g,
        k_star: params.k_star,
        p_threshold,
        x,
        lhs,
        rhs: -rhs,
        abs_err: (lhs + rhs).abs(),
    })
}

/// `sum_l c_l sum_{p <= P, psi~(p) = e(l/k*)} 1/p`, minus the mean weight
/// times `sum_{p <= P, p !| m} 1/p` when `centred`.
pub fn small_prime_cos_sum(
    psi: &DirichletCharacter,
    params: &OddOrderParams,
    p_threshold: f64,
    table: &PrimeTable,
    centred: bool,
) -> Result<f64> {
    if p_threshold > table.limit() as f64 + 0.5 {
        return Err(Error::Resource(format!(
            "P = {p_threshold} exceeds the sieve limit {}",
            table.limit()
        )));
    }
    let weights = params.cos_weights();
    let mean = if centred {
        compensated_sum(weights.iter().copied()) / params.k_star as f64
    } else {
        0.0
    };
    let tilde = psi.pow(gcd(params.k, params.g));
    let m = psi.modulus();
    let step = tilde.group().root_denominator() / params.k_star;
    let angles = tilde.angle_table();
    let primes = table.primes_up_to(p_threshold.max(0.0).floor() as u64);
    Ok(blocked_sum(primes, |&p| match angles[(p % m) as usize] {
        NON_UNIT => 0.0,
        a => (weights[(a as u64 / step) as usize] - mean) / p as f64,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MertensCheck {
    pub m: u64,
    pub p_threshold: f64,
    /// `sum_{p <= P, p !| m} 1/p`.
    pub lhs: f64,
    /// `loglog P - log(m/phi(m)) + B`.
    pub rhs: f64,
    pub abs_err: f64,
    /// `sum_{p | m, p <= P} 1/p`.
    pub subtracted: f64,
    /// `loglog P + B - subtracted`.
    pub rhs_exact: f64,
}

pub fn mertens_restricted(m: u64, p_threshold: f64, table: &PrimeTable) -> Result<MertensCheck> {
    if p_threshold.is_nan() || p_threshold < 3.0 {
        return domain(format!("P = {p_threshold} must be at least 3"));
    }
    if p_threshold > table.limit() as f64 + 0.5 {
        return Err(Error::Resource(format!(
            "P = {p_threshold} exceeds the sieve limit {}",
            table.limit()
        )));
    }
    let f = factorize(m.max(1), table)?;
    let pmax = p_threshold.floor() as u64;
    let subtracted = compensated_sum(f.primes().filter(|&p| p <= pmax).map(|p| 1.0 / p as f64));
    let all = blocked_sum(table.primes_up_to(pmax), |&p| 1.0 / p as f64);
    let lhs = all - subtracted;
    let ll = p_threshold.ln().ln();
    let rhs = ll - (m.max(1) as f64 / f.phi() as f64).ln() + MERTENS_B;
    Ok(MertensCheck {
        m,
        p_threshold,
        lhs,
        rhs,
        abs_err: (lhs - rhs).abs(),
        subtracted,
        rhs_exact: ll + MERTENS_B - subtracted,
    })
}
