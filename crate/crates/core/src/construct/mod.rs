//! The extremal-character pipeline: sifted prime moduli `m`, odd characters
//! `psi mod m` of large order that are close to 1 at small primes, and an
//! order-`g` character `chi` copying the maximizers `z_l` of `psi`.

mod chi;
mod decomposition;
mod pipeline;

pub use chi::{agreement_score, build_chi, ChiChoice, QCandidates};
pub use decomposition::{spsig_decomposition, DecompositionReport};
pub use pipeline::{
    goal2, run_pipeline, ConstructionReport, Goal2, PipelineConfig, Preset, StageCandidate,
};

use std::f64::consts::PI;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{factorize, gcd, PrimeTable};
use crate::character::{build_group, CharacterGroup, DirichletCharacter, Parity};
use crate::error::{domain, Error, Result};

/// A prime `m` together with the sieve conditions on `m - 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiftedPrime {
    pub m: u64,
    /// `(prime, exponent)` pairs of `m - 1`.
    pub m_minus_one: Vec<(u64, u32)>,
    /// Least prime factor of `(m - 1)/2`; `None` when `(m - 1)/2 = 1`
    /// (no prime factor, treated as infinitely large).
    pub least_odd_factor: Option<u64>,
    /// `2 || (m - 1)`.
    pub two_exact: bool,
    /// `P^-((m - 1)/2) > M^delta`.
    pub pminus_large: bool,
}

impl SiftedPrime {
    pub fn passes(&self) -> bool {
        self.two_exact && self.pminus_large
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SiftedSearch {
    pub m_low: u64,
    pub m_high: u64,
    pub delta: f64,
    pub primes: Vec<SiftedPrime>,
    /// `M/(log M)^2` with `M = m_high`; a density comparison only.
    pub predicted: f64,
}

/// Classify the prime `m` against the threshold `bound = M^delta`.
pub fn sift_prime(m: u64, bound: f64, table: &PrimeTable) -> Result<SiftedPrime> {
    let f = factorize(m - 1, table)?;
    let two_exact = f.valuation(2) == 1;
    let least_odd_factor = if two_exact {
        factorize((m - 1) / 2, table)?.least_prime_factor()
    } else {
        None
    };
    Ok(SiftedPrime {
        m,
        m_minus_one: f.factors().to_vec(),
        least_odd_factor,
        two_exact,
        pminus_large: two_exact && least_odd_factor.map_or(true, |p| p as f64 > bound),
    })
}

/// All primes `m` in `(m_low, m_high]` with `2 || m - 1` and
/// `P^-((m-1)/2) > m_high^delta`, by direct factorization.
pub fn find_sifted_primes(
    m_low: u64,
    m_high: u64,
    delta: f64,
    table: &PrimeTable,
) -> Result<SiftedSearch> {
    if !(delta > 0.0 && delta < 0.5) {
        return domain(format!("delta = {delta} must lie in (0, 1/2)"));
    }
    if m_high > table.limit() {
        return Err(Error::Resource(format!(
            "M = {m_high} exceeds the sieve limit {}",
            table.limit()
        )));
    }
    let bound = (m_high as f64).powf(delta);
    let mut primes = Vec::new();
    for &m in table.primes_between(m_low, m_high) {
        let s = sift_prime(m, bound, table)?;
        if s.passes() {
            primes.push(s);
        }
    }
    let mf = m_high as f64;
    Ok(SiftedSearch {
        m_low,
        m_high,
        delta,
        primes,
        predicted: mf / mf.ln().powi(2),
    })
}

fn require_prime(m: u64) -> Result<()> {
    if !crate::arith::is_prime_u64(m) {
        return domain(format!("{m} is not prime"));
    }
    Ok(())
}

/// Number of characters mod the prime `m` with order `< (m-1)/2`:
/// `#{1 <= d <= m-1 : gcd(d, m-1) > 2}`.
pub fn count_small_order(m: u64) -> Result<u64> {
    require_prime(m)?;
    let n = m - 1;
    Ok((1..=n).filter(|&d| gcd(d, n) > 2).count() as u64)
}

/// The same count by inclusion–exclusion over the odd primes dividing
/// `m - 1` (and the factor 4 when present).
pub fn count_small_order_by_sieve(m: u64, table: &PrimeTable) -> Result<u64> {
    require_prime(m)?;
    let n = m - 1;
    let f = factorize(n, table)?;
    let odd: Vec<u64> = f.primes().filter(|&p| p != 2).collect();
    let four = n % 4 == 0;
    // d in [1, n] with no odd prime factor of n, and not divisible by 4 when 4 | n
    let mut coprime_part: i64 = 0;
    for mask in 0u32..(1 << odd.len()) {
        let prod: u64 = odd
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, p)| p)
            .product();
        let mut c = (n / prod) as i64;
        if four {
            c -= (n / (4 * prod)) as i64;
        }
        coprime_part += if mask.count_ones() % 2 == 0 { c } else { -c };
    }
    Ok(n - coprime_part as u64)
}

/// An odd character mod a prime `m`, with its behaviour at small primes.
#[derive(Debug, Clone, Serialize)]
pub struct PsiCandidate {
    #[serde(serialize_with = "serialize_id")]
    pub psi: DirichletCharacter,
    /// Exponent `e` of `psi` on the generator of `(Z/m)^*`.
    pub index: u64,
    pub order: u64,
    pub parity: Parity,
    /// `max_{p <= T, p != m} ||arg psi(p)||`, in turns.
    pub max_small_arg: f64,
    /// `(p, arg psi(p))` for the primes `p <= T`, `p != m`; arguments in
    /// `(-1/2, 1/2]` turns.
    pub small_values: Vec<(u64, f64)>,
}

pub(crate) fn serialize_id<S: serde::Serializer>(
    chi: &DirichletCharacter,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&chi.id())
}

/// How the odd characters mod `m` are visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SearchMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

/// Largest prime modulus scanned exhaustively.
pub const EXHAUSTIVE_CAP: u64 = 5_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct BujoldSearch {
    pub m: u64,
    pub t: f64,
    pub n: f64,
    pub scanned: u64,
    pub candidates: Vec<PsiCandidate>,
    /// `m exp(-2 T log N / log T)`; comparison only.
    pub predicted_lower: f64,
    /// `|psi(p) - 1| <= 1/N` iff `||arg psi(p)|| <= asin(1/(2N))/pi`.
    pub arg_threshold: f64,
}

/// Odd characters `psi mod m` with `|psi(p) - 1| <= 1/N` for every prime
/// `p <= T`, `p != m`.
pub fn bujold_search(
    m: u64,
    t: f64,
    n: f64,
    mode: SearchMode,
    table: &PrimeTable,
) -> Result<BujoldSearch> {
    require_prime(m)?;
    if m < 3 {
        return domain("m must be an odd prime");
    }
    if n.is_nan() || n < 2.0 {
        return domain(format!("N = {n} must be at least 2"));
    }
    if mode == SearchMode::Exhaustive && m > EXHAUSTIVE_CAP {
        return Err(Error::Resource(format!(
            "m = {m} exceeds the exhaustive-scan cap {EXHAUSTIVE_CAP}; use sampling"
        )));
    }
    let group = build_group(m, table)?;
    let order = m - 1;
    let t_floor = if t >= 2.0 { t.floor() as u64 } else { 0 };
    let small: Vec<(u64, u64)> = table
        .primes_up_to(t_floor)
        .iter()
        .copied()
        .filter(|&p| p != m)
        .map(|p| (p, group.logs(p).expect("unit")[0]))
        .collect();
    let chord = 1.0 / n;
    // odd characters are exactly the odd exponents e
    let odd_count = order / 2;
    let exponents: Vec<u64> = match mode {
        SearchMode::Exhaustive => (0..odd_count).map(|i| 2 * i + 1).collect(),
        SearchMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ m);
            let mut idx =
                sample(&mut rng, odd_count as usize, count.min(odd_count as usize)).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| 2 * i as u64 + 1).collect()
        }
    };
    let mut candidates = Vec::new();
    'outer: for &e in &exponents {
        let mut worst = 0.0f64;
        for &(_, l) in &small {
            let r = (e as u128 * l as u128 % order as u128) as u64;
            let dist = r.min(order - r) as f64 / order as f64;
            if 2.0 * (PI * dist).sin() > chord {
                continue 'outer;
            }
            worst = worst.max(dist);
        }
        candidates.push(make_candidate(&group, e, &small, worst)?);
    }
    let predicted_lower = if t > 1.0 {
        m as f64 * (-2.0 * t * n.ln() / t.ln()).exp()
    } else {
        m as f64
    };
    Ok(BujoldSearch {
        m,
        t,
        n,
        scanned: exponents.len() as u64,
        candidates,
        predicted_lower,
        arg_threshold: (1.0 / (2.0 * n)).asin() / PI,
    })
}

fn make_candidate(
    group: &Arc<CharacterGroup>,
    e: u64,
    small: &[(u64, u64)],
    worst: f64,
) -> Result<PsiCandidate> {
    let psi = DirichletCharacter::new(Arc::clone(group), &[e])?;
    let small_values = small
        .iter()
        .map(|&(p, _)| (p, psi.value(p).arg().expect("unit")))
        .collect();
    Ok(PsiCandidate {
        order: psi.order(),
        parity: psi.parity(),
        index: e,
        psi,
        max_small_arg: worst,
        small_values,
    })
}

/// The candidate of order `>= (m-1)/2` with the smallest `max_small_arg`
/// (ties by exponent).
pub fn pick_psi(
    m: u64,
    t: f64,
    n: f64,
    g: u64,
    mode: SearchMode,
    table: &PrimeTable,
) -> Result<PsiCandidate> {
    crate::pretentious::delta_g(g)?;
    if gcd(m.saturating_sub(1), g) != 1 {
        return domain(format!("gcd(m - 1, g) must be 1 for m = {m}, g = {g}"));
    }
    let search = bujold_search(m, t, n, mode, table)?;
    best_large_order(search.candidates, m).ok_or_else(|| {
        Error::SearchFailure(format!(
            "no odd character of order >= (m-1)/2 mod {m} with T = {t}, N = {n}"
        ))
    })
}

pub(crate) fn best_large_order(candidates: Vec<PsiCandidate>, m: u64) -> Option<PsiCandidate> {
    candidates
        .into_iter()
        .filter(|c| 2 * c.order >= m - 1)
        .min_by(|a, b| {
            a.max_small_arg
                .total_cmp(&b.max_small_arg)
                .then(a.index.cmp(&b.index))
        })
}

#[cfg(test)]
mod tests;
