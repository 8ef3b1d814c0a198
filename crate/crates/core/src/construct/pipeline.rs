use serde::{Deserialize, Serialize};

use super::{
    best_large_order, build_chi, bujold_search, find_sifted_primes, spsig_decomposition,
    DecompositionReport, QCandidates, SearchMode, EXHAUSTIVE_CAP,
};
use crate::arith::{gcd, PrimeTable};
use crate::character::{DirichletCharacter, NON_UNIT};
use crate::error::{Error, Result};
use crate::lfunc::SmallPrimeThreshold;
use crate::pretentious::{corr_sum, distance2, select_z};
use crate::summation::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Thresholds scaled so that every stage has primes to work with.
    Desk,
    /// The literal asymptotic thresholds.
    Paper,
}

/// Pipeline knobs. Unset thresholds follow the preset:
///
/// | knob | desk | paper |
/// |------|------|-------|
/// | `T`  | `max(10, 2 log m)` | `(log m)/100` |
/// | `N`  | `ceil(loglog M)`   | `loglog M` |
/// | `P`  | `100 log m`        | `max(3, (log m)/100)` |
///
/// `N` is never taken below 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(rename = "M")]
    pub m_max: u64,
    pub g: u64,
    pub preset: Preset,
    pub delta: f64,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<f64>,
    #[serde(rename = "P")]
    pub p: Option<f64>,
    /// Small-prime range on which `chi` is scored against `z_l`.
    pub agree_p: f64,
    /// Horizon `Y` for the distance and the correlation sum.
    #[serde(rename = "Y")]
    pub horizon: f64,
    /// Euler-product truncation for the `S_j` form of the decomposition.
    #[serde(rename = "X")]
    pub x: f64,
    pub q_max: u64,
    pub include_products: bool,
    /// Step `T` down one prime at a time (to 10) when no candidate exists.
    pub relax_t: bool,
    /// Scan this many odd characters per `m` instead of all of them.
    pub sample: Option<usize>,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            m_max: 20_000,
            g: 3,
            preset: Preset::Desk,
            delta: 0.25,
            t: None,
            n: None,
            p: None,
            agree_p: 10.0,
            horizon: 1e6,
            x: 1e6,
            q_max: 100_000,
            include_products: false,
            relax_t: true,
            sample: None,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn t_for(&self, m: u64) -> f64 {
        let lm = (m as f64).ln();
        self.t.unwrap_or(match self.preset {
            Preset::Desk => (2.0 * lm).max(10.0),
            Preset::Paper => lm / 100.0,
        })
    }

    pub fn n_value(&self) -> f64 {
        let ll = (self.m_max.max(3) as f64).ln().ln();
        self.n
            .unwrap_or(match self.preset {
                Preset::Desk => ll.ceil(),
                Preset::Paper => ll,
            })
            .max(2.0)
    }

    pub fn p_for(&self, m: u64) -> f64 {
        self.p.unwrap_or_else(|| match self.preset {
            Preset::Desk => SmallPrimeThreshold::Desk.value(m),
            Preset::Paper => SmallPrimeThreshold::Paper.value(m),
        })
    }

    /// Sieve limit needed to run every stage.
    pub fn required_limit(&self) -> u64 {
        let p = self.p_for(self.m_max.max(3));
        [
            self.m_max,
            self.q_max,
            self.horizon as u64,
            self.x as u64,
            p as u64,
            self.agree_p as u64,
        ]
        .into_iter()
        .max()
        .unwrap()
    }
}

/// One row of the per-stage candidate log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageCandidate {
    pub stage: String,
    pub modulus: u64,
    pub id: String,
    pub score: f64,
}

/// Bookkeeping for `D(chi, psi; Y)^2` against `sum 1/p - S(Y; psi, g)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Goal2 {
    pub horizon: f64,
    pub distance2: f64,
    pub corr_sum: f64,
    /// `sum_{p <= Y} 1/p - S(Y)`.
    pub gap: f64,
    /// `distance2 - gap`.
    pub residual: f64,
    /// `sum_{p <= Y, p !| qm, chi(p) != z_l(p)} 2/p + sum_{p | qm} 1/p`.
    pub bound: f64,
    pub disagreeing_primes: u64,
    pub within_bound: bool,
    /// `distance2 - (loglog Y - S(Y))`.
    pub literal_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstructionReport {
    pub config: PipelineConfig,
    pub sifted_count: Option<usize>,
    pub sifted_predicted: Option<f64>,
    pub t_initial: Option<f64>,
    pub t_used: Option<f64>,
    pub relaxation_steps: Option<usize>,
    pub n: f64,
    pub m: Option<u64>,
    pub psi: Option<String>,
    pub k: Option<u64>,
    pub psi_odd: Option<bool>,
    pub psi_max_small_arg: Option<f64>,
    pub p_threshold: Option<f64>,
    pub q: Option<u64>,
    pub chi: Option<String>,
    pub chi_order: Option<u64>,
    pub chi_conductor: Option<u64>,
    pub agreement: Option<f64>,
    pub goal2: Option<Goal2>,
    pub decomposition: Option<DecompositionReport>,
    /// `(sqrt(m)/phi(m)) log Q exp(-D(chi, psi; Q)^2)` with `Q = log q`.
    pub lower_bound_proxy: Option<f64>,
    /// `sqrt(logloglog q)`, the size the asymptotic argument couples `m` to.
    pub coupled_m: Option<f64>,
    pub failed_stage: Option<String>,
    pub error: Option<String>,
    #[serde(skip)]
    pub candidates: Vec<StageCandidate>,
}

impl ConstructionReport {
    fn new(config: &PipelineConfig) -> Self {
        Self {
            config: config.clone(),
            sifted_count: None,
            sifted_predicted: None,
            t_initial: None,
            t_used: None,
            relaxation_steps: None,
            n: config.n_value(),
            m: None,
            psi: None,
            k: None,
            psi_odd: None,
            psi_max_small_arg: None,
            p_threshold: None,
            q: None,
            chi: None,
            chi_order: None,
            chi_conductor: None,
            agreement: None,
            goal2: None,
            decomposition: None,
            lower_bound_proxy: None,
            coupled_m: None,
            failed_stage: None,
            error: None,
            candidates: Vec::new(),
        }
    }

    pub fn succeeded(&self) -> bool {
        self.failed_stage.is_none()
    }

    fn fail(mut self, stage: &str, err: Error) -> Self {
        self.failed_stage = Some(stage.to_string());
        self.error = Some(err.to_string());
        self
    }
}

/// `T0`, then one prime fewer per step, ending at 10.
fn t_ladder(t0: f64, relax: bool, table: &PrimeTable) -> Vec<f64> {
    let mut out = vec![t0];
    if relax && t0 > 10.0 {
        for &p in table.primes_up_to(t0.floor() as u64).iter().rev() {
            let t = (p - 1) as f64;
            if t < 10.0 {
                break;
            }
            out.push(t);
        }
        if *out.last().unwrap() > 10.0 {
            out.push(10.0);
        }
    }
    out
}

/// Run every stage, stopping at the first failure with a partial report.
pub fn run_pipeline(config: &PipelineConfig, table: &PrimeTable) -> ConstructionReport {
    let mut report = ConstructionReport::new(config);
    let g = config.g;
    if let Err(e) = crate::pretentious::delta_g(g) {
        return report.fail("config", e);
    }
    if config.required_limit() > table.limit() {
        let e = Error::Resource(format!(
            "configuration needs primes up to {}, sieve has {}",
            config.required_limit(),
            table.limit()
        ));
        return report.fail("config", e);
    }

    // sifted primes in (M/2, M]
    let sifted = match find_sifted_primes(config.m_max / 2, config.m_max, config.delta, table) {
        Ok(s) => s,
        Err(e) => return report.fail("sift", e),
    };
    report.sifted_count = Some(sifted.primes.len());
    report.sifted_predicted = Some(sifted.predicted);
    let moduli: Vec<u64> = sifted
        .primes
        .iter()
        .map(|s| s.m)
        .filter(|&m| gcd(m - 1, g) == 1)
        .collect();
    for s in &sifted.primes {
        report.candidates.push(StageCandidate {
            stage: "sift".into(),
            modulus: s.m,
            id: String::new(),
            score: s.least_odd_factor.map_or(f64::INFINITY, |p| p as f64),
        });
    }
    if moduli.is_empty() {
        let e = Error::SearchFailure(format!(
            "no sifted prime m in ({}, {}] with gcd(m - 1, {g}) = 1",
            config.m_max / 2,
            config.m_max
        ));
        return report.fail("sift", e);
    }

    // psi: strictest T first, smallest m first
    let n = config.n_value();
    let mode = |m: u64| match config.sample {
        Some(count) => SearchMode::Sampled {
            count,
            seed: config.seed,
        },
        None if m > EXHAUSTIVE_CAP => SearchMode::Sampled {
            count: 100_000,
            seed: config.seed,
        },
        None => SearchMode::Exhaustive,
    };
    let t0 = config.t_for(moduli[0]);
    report.t_initial = Some(t0);
    let mut found = None;
    'ladder: for (step, t_level) in t_ladder(t0, config.relax_t && config.t.is_none(), table)
        .into_iter()
        .enumerate()
    {
        for &m in &moduli {
            // the preset T depends on m; relaxed levels are absolute
            let t = if step == 0 { config.t_for(m) } else { t_level };
            let search = match bujold_search(m, t, n, mode(m), table) {
                Ok(s) => s,
                Err(e) => return report.fail("psi", e),
            };
            if let Some(c) = best_large_order(search.candidates.clone(), m) {
                for cand in &search.candidates {
                    report.candidates.push(StageCandidate {
                        stage: "psi".into(),
                        modulus: m,
                        id: cand.psi.id(),
                        score: cand.max_small_arg,
                    });
                }
                report.t_used = Some(t);
                report.relaxation_steps = Some(step);
                found = Some(c);
                break 'ladder;
            }
        }
    }
    let Some(psi_cand) = found else {
        let e = Error::SearchFailure(format!(
            "no odd character of order >= (m-1)/2 for any of {} sifted moduli, down to T = 10",
            moduli.len()
        ));
        return report.fail("psi", e);
    };
    let psi = psi_cand.psi.clone();
    let m = psi.modulus();
    report.m = Some(m);
    report.psi = Some(psi.id());
    report.k = Some(psi_cand.order);
    report.psi_odd = Some(psi.is_odd());
    report.psi_max_small_arg = Some(psi_cand.max_small_arg);

    // chi
    let qc = QCandidates {
        q_max: config.q_max,
        include_products: config.include_products,
    };
    let choice = match build_chi(&psi, g, config.agree_p, &qc, table) {
        Ok(c) => c,
        Err(e) => return report.fail("chi", e),
    };
    let chi = choice.chi.clone();
    report.candidates.push(StageCandidate {
        stage: "chi".into(),
        modulus: choice.q,
        id: chi.id(),
        score: choice.agreement,
    });
    report.q = Some(choice.q);
    report.chi = Some(chi.id());
    report.chi_order = Some(chi.order());
    report.chi_conductor = Some(chi.conductor());
    report.agreement = Some(choice.agreement);

    // distances and decomposition
    let p_threshold = config.p_for(m);
    report.p_threshold = Some(p_threshold);
    match goal2(&chi, &psi, g, config.horizon, table) {
        Ok(g2) => report.goal2 = Some(g2),
        Err(e) => return report.fail("distance", e),
    }
    match spsig_decomposition(config.horizon, &psi, g, p_threshold, config.x, table) {
        Ok(d) => report.decomposition = Some(d),
        Err(e) => return report.fail("decomposition", e),
    }
    let q_level = (choice.q as f64).ln();
    match distance2(&chi, &psi, q_level, table) {
        Ok(d) => {
            let phi_m = (m - 1) as f64;
            report.lower_bound_proxy = Some((m as f64).sqrt() / phi_m * q_level.ln() * (-d).exp());
        }
        Err(e) => return report.fail("distance", e),
    }
    let lll = (choice.q as f64).ln().ln().ln();
    report.coupled_m = (lll > 0.0).then(|| lll.sqrt());
    report
}

/// Exact bookkeeping of `D(chi, psi; Y)^2` against the correlation gap.
pub fn goal2(
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
    g: u64,
    horizon: f64,
    table: &PrimeTable,
) -> Result<Goal2> {
    let d2 = distance2(chi, psi, horizon, table)?;
    let s = corr_sum(horizon, psi, g, table)?;
    let (q, m) = (chi.modulus(), psi.modulus());
    let k = psi.order();
    let r_psi = psi.group().root_denominator();
    let r_chi = chi.group().root_denominator();
    let z_by_l: Vec<u64> = (0..k)
        .map(|l| select_z(l, k, g).map(|z| z.n))
        .collect::<Result<_>>()?;
    let psi_angles = psi.angle_table();
    let chi_angles = chi.angle_table();
    let primes = table.primes_up_to(horizon.floor() as u64);
    let mut all = CompensatedSum::new();
    let mut bound = CompensatedSum::new();
    let mut disagreeing = 0u64;
    for &p in primes {
        let w = 1.0 / p as f64;
        all.add(w);
        if q % p == 0 || m % p == 0 {
            bound.add(w);
            continue;
        }
        let a_psi = psi_angles[(p % m) as usize];
        let a_chi = chi_angles[(p % q) as usize];
        debug_assert!(a_psi != NON_UNIT && a_chi != NON_UNIT);
        let n = z_by_l[(a_psi as u64 / (r_psi / k)) as usize];
        if a_chi as u64 * g != n * r_chi {
            bound.add(2.0 * w);
            disagreeing += 1;
        }
    }
    let gap = all.value() - s;
    let residual = d2 - gap;
    let bound = bound.value();
    Ok(Goal2 {
        horizon,
        distance2: d2,
        corr_sum: s,
        gap,
        residual,
        bound,
        disagreeing_primes: disagreeing,
        within_bound: residual.abs() <= bound + 1e-12,
        literal_residual: d2 - (horizon.ln().ln() - s),
    })
}
