//! Maximal partial sums `M(chi) = max_t |sum_{n<=t} chi(n)|` and scans over
//! character families.
//!
//! Because a non-principal character sums to zero over a full period, the
//! maximum over `t >= 1` is attained for some `1 <= t <= q`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::PrimeTable;
use crate::character::{
    angle_table_from_scaled, build_group, enumerate_characters, root_table, CharacterFilter,
    CharacterGroup, DirichletCharacter, Parity, NON_UNIT,
};
use crate::error::{Error, Result};
use crate::pretentious::delta_g;
use crate::summation::CompensatedComplexSum;

/// Relative slack under which a later partial sum does not displace an
/// earlier maximum (ties go to the smallest `t`).
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct SumProfile {
    pub q: u64,
    pub character: String,
    pub m: f64,
    pub argmax_t: u64,
    pub normalized: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partial_sums: Option<Vec<Complex64>>,
}

#[derive(Debug, Clone, Copy)]
struct RunningMax {
    best: f64,
    arg: u64,
}

impl RunningMax {
    const fn new() -> Self {
        Self { best: -1.0, arg: 0 }
    }

    #[inline(always)]
    fn offer(&mut self, norm_sqr: f64, t: u64) {
        if norm_sqr > self.best + TIE_TOLERANCE * self.best.max(1.0) {
            self.best = norm_sqr;
            self.arg = t;
        }
    }
}

fn require_non_principal(chi: &DirichletCharacter) -> Result<()> {
    if chi.is_principal() || chi.modulus() < 3 {
        return Err(Error::Domain(format!(
            "M(chi) is unbounded for the principal character {chi}"
        )));
    }
    Ok(())
}

/// `M(chi)` with the maximizing `t` (smallest on ties).
pub fn max_partial_sum(chi: &DirichletCharacter) -> Result<SumProfile> {
    profile(chi, false, None)
}

/// As [`max_partial_sum`], also retaining `S(t)` for `t = 1..=q`.
pub fn max_partial_sum_retained(chi: &DirichletCharacter) -> Result<SumProfile> {
    profile(chi, true, None)
}

fn profile(chi: &DirichletCharacter, retain: bool, scaled: Option<&[u32]>) -> Result<SumProfile> {
    require_non_principal(chi)?;
    let group = chi.group();
    let r = group.root_denominator();
    let angles = match scaled {
        Some(s) => angle_table_from_scaled(s, chi.exponents(), r),
        None => chi.angle_table(),
    };
    let roots = root_table(r);
    let q = chi.modulus();
    let mut acc = CompensatedComplexSum::new();
    let mut run = RunningMax::new();
    let mut partials = retain.then(|| Vec::with_capacity(q as usize));
    for t in 1..=q {
        let a = angles[(t % q) as usize];
        if a != NON_UNIT {
            acc.add(roots[a as usize]);
        }
        let s = acc.value();
        run.offer(s.norm_sqr(), t);
        if let Some(p) = partials.as_mut() {
            p.push(s);
        }
    }
    let m = run.best.sqrt();
    Ok(SumProfile {
        q,
        character: chi.id(),
        m,
        argmax_t: run.arg,
        normalized: m / (q as f64).sqrt(),
        partial_sums: partials,
    })
}

/// `M(chi)` for every non-principal character of `group`, in enumeration
/// order.
///
/// All characters advance together through `n = 1..=q`; successive
/// characters in lexicographic order differ by one generator step per
/// carried position, so each angle costs one modular addition.
pub fn max_partial_sums_all(group: &Arc<CharacterGroup>) -> Vec<(DirichletCharacter, SumProfile)> {
    let q = group.modulus();
    let count = group.order() as usize;
    if q < 3 || count < 2 {
        return Vec::new();
    }
    let k = group.num_generators();
    let orders = group.generator_orders();
    let r = group.root_denominator() as u32;
    let roots = root_table(r as u64);
    let scaled = group.scaled_log_table();

    // depth[j]: number of trailing positions incremented to reach character j
    let mut depth = vec![0u8; count];
    let mut exps = vec![0u64; k];
    for d in depth.iter_mut().skip(1) {
        let mut carried = 0u8;
        for i in (0..k).rev() {
            carried += 1;
            exps[i] += 1;
            if exps[i] < orders[i] {
                break;
            }
            exps[i] = 0;
        }
        *d = carried;
    }

    let mut sums = vec![CompensatedComplexSum::new(); count];
    let mut runs = vec![RunningMax::new(); count];
    let mut step = vec![0u32; k + 1];
    for t in 1..=q {
        let n = (t % q) as usize;
        let row = &scaled[n * k..n * k + k];
        if row[0] != NON_UNIT {
            // step[d] = sum of the last d scaled logs (mod R)
            for d in 1..=k {
                let v = step[d - 1] + row[k - d];
                step[d] = if v >= r { v - r } else { v };
            }
            let mut angle = 0u32;
            for j in 1..count {
                let v = angle + step[depth[j] as usize];
                angle = if v >= r { v - r } else { v };
                sums[j].add(roots[angle as usize]);
            }
        }
        for j in 1..count {
            runs[j].offer(sums[j].value().norm_sqr(), t);
        }
    }

    enumerate_characters(group, CharacterFilter::all())
        .zip(runs)
        .skip(1)
        .map(|(chi, run)| {
            let m = run.best.sqrt();
            let profile = SumProfile {
                q,
                character: chi.id(),
                m,
                argmax_t: run.arg,
                normalized: m / (q as f64).sqrt(),
                partial_sums: None,
            };
            (chi, profile)
        })
        .collect()
}

/// One row of a family scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRecord {
    pub q: u64,
    pub character: String,
    pub order: u64,
    pub parity: Parity,
    pub conductor: u64,
    pub m: f64,
    pub m_over_sqrt_q: f64,
    /// `M / (sqrt(q) (loglog q)^(1 - delta_g))`; absent when the order is
    /// not odd and at least 3.
    pub envelope_ratio: Option<f64>,
}

impl ScanRecord {
    pub fn new(chi: &DirichletCharacter, profile: &SumProfile) -> Self {
        let q = chi.modulus();
        let order = chi.order();
        Self {
            q,
            character: chi.id(),
            order,
            parity: chi.parity(),
            conductor: chi.conductor(),
            m: profile.m,
            m_over_sqrt_q: profile.normalized,
            envelope_ratio: envelope_ratio(profile.m, q, order),
        }
    }
}

/// `M / (sqrt(q) (loglog q)^(1 - delta_g))` for odd `g >= 3`.
pub fn envelope_ratio(m: f64, q: u64, g: u64) -> Option<f64> {
    let dg = delta_g(g).ok()?;
    let ll = (q as f64).ln().ln();
    (ll > 0.0).then(|| m / ((q as f64).sqrt() * ll.powf(1.0 - dg)))
}

/// Family scan parameters.
#[derive(Debug, Clone, Serialize)]
pub struct ScanConfig {
    pub q_min: u64,
    pub q_max: u64,
    pub order: u64,
    pub primitive_only: bool,
    /// Stop (at a modulus boundary) once this many `chi(n)` evaluations
    /// have been spent.
    pub work_budget: Option<u64>,
    /// Keep at most this many characters per modulus, drawn with `seed`.
    pub sample_per_q: Option<usize>,
    pub seed: u64,
}

impl ScanConfig {
    pub fn new(q_min: u64, q_max: u64, order: u64, primitive_only: bool) -> Self {
        Self {
            q_min,
            q_max,
            order,
            primitive_only,
            work_budget: None,
            sample_per_q: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanOutcome {
    pub records: Vec<ScanRecord>,
    /// Running maximum of `M/sqrt(q)` after each record.
    pub running_max: Vec<f64>,
    pub truncated: bool,
    /// First modulus not scanned when truncated.
    pub resume_at: Option<u64>,
}

/// Scan all characters of exact order `g` (optionally primitive) with
/// modulus in `[q_min, q_max]`, in modulus order.
pub fn scan_family(config: &ScanConfig, table: &PrimeTable) -> Result<ScanOutcome> {
    let g = config.order;
    if g < 3 || g % 2 == 0 {
        return Err(Error::Domain(format!(
            "order {g} must be odd and at least 3"
        )));
    }
    if config.q_max > table.limit() {
        return Err(Error::Resource(format!(
            "q_max {} exceeds the sieve limit {}",
            config.q_max,
            table.limit()
        )));
    }
    let filter = CharacterFilter {
        exact_order: Some(g),
        primitive_only: config.primitive_only,
        non_principal: true,
        ..Default::default()
    };
    let mut out = ScanOutcome {
        records: Vec::new(),
        running_max: Vec::new(),
        truncated: false,
        resume_at: None,
    };
    let mut spent = 0u64;
    let mut best = 0f64;
    for q in config.q_min.max(3)..=config.q_max {
        // order-g characters exist only when g divides the group exponent
        if crate::arith::factorize(q, table)?.phi() % g != 0 {
            continue;
        }
        let group = build_group(q, table)?;
        let mut chars: Vec<DirichletCharacter> =
            enumerate_characters(&group, filter.clone()).collect();
        if let Some(k) = config.sample_per_q {
            if chars.len() > k {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ q.rotate_left(17));
                let mut picked = sample(&mut rng, chars.len(), k).into_vec();
                picked.sort_unstable();
                chars = picked.into_iter().map(|i| chars[i].clone()).collect();
            }
        }
        if chars.is_empty() {
            continue;
        }
        let cost = q * chars.len() as u64;
        if config.work_budget.is_some_and(|b| spent + cost > b) {
            out.truncated = true;
            out.resume_at = Some(q);
            break;
        }
        spent += cost;
        let scaled = group.scaled_log_table();
        let rows: Vec<ScanRecord> = chars
            .par_iter()
            .map(|chi| {
                let p = profile(chi, false, Some(&scaled)).expect("filtered non-principal");
                ScanRecord::new(chi, &p)
            })
            .collect();
        for rec in rows {
            best = best.max(rec.m_over_sqrt_q);
            out.running_max.push(best);
            out.records.push(rec);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct PvViolation {
    pub q: u64,
    pub character: String,
    pub m: f64,
    pub bound: f64,
}

/// Empirical check of `M <= sqrt(q) log q` (constant 1).
#[derive(Debug, Clone, Default, Serialize)]
pub struct PvReport {
    pub checked: usize,
    pub max_ratio: Option<f64>,
    pub violations: Vec<PvViolation>,
}

impl PvReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn polya_vinogradov_check<'a, I>(records: I) -> PvReport
where
    I: IntoIterator<Item = &'a ScanRecord>,
{
    let mut report = PvReport::default();
    for rec in records {
        let qf = rec.q as f64;
        let bound = qf.sqrt() * qf.ln();
        let ratio = rec.m / bound;
        report.checked += 1;
        report.max_ratio = Some(report.max_ratio.map_or(ratio, |r: f64| r.max(ratio)));
        if rec.m > bound {
            report.violations.push(PvViolation {
                q: rec.q,
                character: rec.character.clone(),
                m: rec.m,
                bound,
            });
        }
    }
    report
}
