use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use charlab_core::character::{parse_character, quadratic_character};
use charlab_core::charsum::{max_partial_sums_all, polya_vinogradov_check, ScanConfig};
use charlab_core::construct::{run_pipeline, PipelineConfig, Preset};
use charlab_core::lfunc::{
    cma_table, control_err_check, coset_identity_check, lz_residual, SmallPrimeThreshold,
};
use charlab_core::pretentious::{mean_identity, select_z, OddOrderParams, SjTable};
use charlab_core::{
    build_group, scan_family, sieve_primes, CharacterFilter, CharacterGroup, DirichletCharacter,
    PrimeTable, ScanRecord,
};
use clap::Args;
use serde_json::json;

use crate::output::{fmt_f64, fmt_opt, Sink, Table};
use crate::{CmdResult, Failure, Global};

/// Largest sieve any command will build.
const SIEVE_CAP: u64 = 2_000_000_000;

fn table_to(limit: u64) -> Result<PrimeTable, Failure> {
    if limit > SIEVE_CAP {
        return Err(Failure::Resource(format!(
            "a sieve to {limit} exceeds the cap {SIEVE_CAP}"
        )));
    }
    Ok(sieve_primes(limit.max(100))?)
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn parse_span(s: &str) -> Result<(u64, u64), Failure> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| usage(format!("range {s:?} must look like a:b")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|_| usage(format!("range bound {t:?} is not an integer")))
    };
    Ok((parse(a)?, parse(b)?))
}

fn parse_real(s: &str) -> Result<f64, Failure> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(usage(format!("{s:?} is not a finite number"))),
    }
}

fn parse_reals(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',').map(parse_real).collect()
}

/// `quadratic`, `generator`, `q:e1,...` or bare `e1,...` against modulus `q`.
fn resolve_character(
    spec: &str,
    q: u64,
    table: &PrimeTable,
) -> Result<DirichletCharacter, Failure> {
    let group = build_group(q, table)?;
    match spec {
        "quadratic" => Ok(quadratic_character(&group)?),
        "generator" => match group.generator_orders() {
            [_] => Ok(DirichletCharacter::new(Arc::clone(&group), &[1])?),
            _ => Err(usage(format!("modulus {q} has no unit-group generator"))),
        },
        s if s.contains(':') => {
            let chi = parse_character(s, table)?;
            if chi.modulus() != q {
                return Err(usage(format!("character {s} is not modulo {q}")));
            }
            Ok(chi)
        }
        s => Ok(DirichletCharacter::parse(&format!("{q}:{s}"), group)?),
    }
}

fn check_odd_g(g: u64) -> Result<(), Failure> {
    if g < 3 || g % 2 == 0 {
        return Err(usage(format!("g must be odd and at least 3, got {g}")));
    }
    Ok(())
}

// ---------------------------------------------------------------- msum

#[derive(Debug, Args)]
pub struct MsumArgs {
    /// Single modulus.
    #[arg(long, conflicts_with = "range")]
    q: Option<u64>,
    /// Character of modulus q: `quadratic`, `generator`, `q:e1,..` or `e1,..`.
    #[arg(long = "char", conflicts_with = "all")]
    character: Option<String>,
    /// Every non-principal character of modulus q.
    #[arg(long)]
    all: bool,
    /// Family scan over moduli `a:b`.
    #[arg(long)]
    range: Option<String>,
    /// Exact character order (required for family scans).
    #[arg(long)]
    order: Option<u64>,
    /// Keep primitive characters only.
    #[arg(long)]
    primitive: bool,
    /// Keep at most this many characters per modulus (drawn with --seed).
    #[arg(long)]
    sample: Option<usize>,
    /// Stop the scan after about this many character evaluations.
    #[arg(long)]
    budget: Option<u64>,
}

pub fn msum(global: &Global, a: MsumArgs) -> CmdResult {
    let params = json!({
        "q": a.q, "char": a.character, "all": a.all, "range": a.range,
        "order": a.order, "primitive": a.primitive, "sample": a.sample, "budget": a.budget,
    });
    let mut sink = Sink::new(global.out.as_deref(), "msum", params, global.seed);
    let records = match (a.q, &a.range) {
        (Some(q), None) => msum_single(q, &a, &mut sink)?,
        (None, Some(r)) => msum_scan(global, r, &a, &mut sink)?,
        _ => return Err(usage("give exactly one of --q or --range")),
    };
    sink.finish()?;
    let pv = polya_vinogradov_check(records.iter());
    if !pv.holds() {
        return Err(Failure::Threshold(format!(
            "{} characters exceed sqrt(q) log q (max ratio {})",
            pv.violations.len(),
            fmt_opt(pv.max_ratio)
        )));
    }
    Ok(())
}

fn msum_single(q: u64, a: &MsumArgs, sink: &mut Sink) -> Result<Vec<ScanRecord>, Failure> {
    if q < 3 {
        return Err(usage(format!(
            "modulus {q} has no primitive non-principal characters"
        )));
    }
    let table = table_to(q)?;
    let group: Arc<CharacterGroup> = build_group(q, &table)?;
    let filter = CharacterFilter {
        exact_order: a.order,
        primitive_only: a.primitive,
        non_principal: true,
        ..Default::default()
    };
    let mut rows = Vec::new();
    if a.all {
        for (chi, profile) in max_partial_sums_all(&group) {
            if filter.accepts(&chi) {
                rows.push((chi, profile));
            }
        }
    } else {
        let spec = a
            .character
            .as_deref()
            .ok_or_else(|| usage("give --char or --all with --q"))?;
        let chi = resolve_character(spec, q, &table)?;
        let profile = charlab_core::max_partial_sum(&chi)?;
        rows.push((chi, profile));
    }
    let mut t = Table::new(
        "msum",
        &[
            "q",
            "char",
            "order",
            "parity",
            "conductor",
            "M",
            "M_over_sqrtq",
            "argmax_t",
        ],
    );
    let mut records = Vec::new();
    for (chi, p) in &rows {
        t.push(vec![
            q.to_string(),
            chi.id(),
            chi.order().to_string(),
            chi.parity().to_string(),
            chi.conductor().to_string(),
            fmt_f64(p.m),
            fmt_f64(p.normalized),
            p.argmax_t.to_string(),
        ]);
        records.push(ScanRecord::new(chi, p));
    }
    sink.table(&t)?;
    Ok(records)
}

fn msum_scan(
    global: &Global,
    range: &str,
    a: &MsumArgs,
    sink: &mut Sink,
) -> Result<Vec<ScanRecord>, Failure> {
    let (lo, hi) = parse_span(range)?;
    let order = a.order.ok_or_else(|| usage("family scans need --order"))?;
    check_odd_g(order)?;
    let table = table_to(hi)?;
    let mut cfg = ScanConfig::new(lo, hi, order, a.primitive);
    cfg.work_budget = a.budget;
    cfg.sample_per_q = a.sample;
    cfg.seed = global.seed;
    let outcome = scan_family(&cfg, &table)?;
    if outcome.truncated {
        eprintln!(
            "scan truncated by the work budget; resume at q = {}",
            outcome.resume_at.map_or("?".into(), |q| q.to_string())
        );
    }
    let mut t = Table::new(
        "msum_scan",
        &[
            "q",
            "char",
            "order",
            "parity",
            "conductor",
            "M",
            "M_over_sqrtq",
            "envelope_ratio",
            "running_max",
        ],
    );
    for (r, best) in outcome.records.iter().zip(&outcome.running_max) {
        t.push(vec![
            r.q.to_string(),
            r.character.clone(),
            r.order.to_string(),
            r.parity.to_string(),
            r.conductor.to_string(),
            fmt_f64(r.m),
            fmt_f64(r.m_over_sqrt_q),
            fmt_opt(r.envelope_ratio),
            fmt_f64(*best),
        ]);
    }
    sink.table(&t)?;
    Ok(outcome.records)
}

// ---------------------------------------------------------- identities

#[derive(Debug, Args)]
pub struct IdentitiesArgs {
    /// Orders g as `a:b` (even values are skipped).
    #[arg(long, default_value = "3:15")]
    g: String,
    /// Orders k as `a:b`.
    #[arg(long, default_value = "1:300")]
    k: String,
}

/// Tolerance on every identity in the sweep.
pub const IDENTITY_TOL: f64 = 1e-10;

pub fn identities(global: &Global, a: IdentitiesArgs) -> CmdResult {
    let (g_lo, g_hi) = parse_span(&a.g)?;
    let (k_lo, k_hi) = parse_span(&a.k)?;
    let params = json!({ "g": a.g, "k": a.k });
    let mut sink = Sink::new(global.out.as_deref(), "identities", params, global.seed);
    let mut t = Table::new(
        "identities",
        &[
            "g",
            "k",
            "k_star",
            "lhs",
            "rhs",
            "tan_form",
            "abs_err",
            "min_weight",
            "z_max_err",
            "sj_max_discrepancy",
            "sj_l1_tail",
        ],
    );
    let mut worst: f64 = 0.0;
    let mut min_weight_all = f64::INFINITY;
    for g in (g_lo.max(3)..=g_hi).filter(|g| g % 2 == 1) {
        for k in k_lo.max(1)..=k_hi {
            let mi = mean_identity(g, k)?;
            let mut min_w = f64::INFINITY;
            let mut z_err: f64 = 0.0;
            for l in 0..k {
                let z = select_z(l, k, g)?;
                min_w = min_w.min(z.re_value);
                z_err = z_err.max((z.re_value - z.cos_value).abs());
            }
            let p = OddOrderParams::new(g, k)?;
            let sj = SjTable::new(g, p.g_star, p.k_star).ok();
            let disc = sj.as_ref().and_then(|s| s.max_discrepancy);
            worst = worst.max(mi.abs_err).max(z_err).max(disc.unwrap_or(0.0));
            min_weight_all = min_weight_all.min(min_w);
            t.push(vec![
                g.to_string(),
                k.to_string(),
                p.k_star.to_string(),
                fmt_f64(mi.lhs),
                fmt_f64(mi.rhs),
                fmt_f64(mi.tan_form),
                fmt_f64(mi.abs_err),
                fmt_f64(min_w),
                fmt_f64(z_err),
                fmt_opt(disc),
                fmt_opt(sj.as_ref().map(|s| s.l1_tail)),
            ]);
        }
    }
    sink.table(&t)?;
    sink.finish()?;
    if worst > IDENTITY_TOL {
        return Err(Failure::Threshold(format!(
            "identity error {} exceeds {IDENTITY_TOL}",
            fmt_f64(worst)
        )));
    }
    if min_weight_all <= 0.0 {
        return Err(Failure::Threshold(format!(
            "non-positive weight {}",
            fmt_f64(min_weight_all)
        )));
    }
    Ok(())
}

// ----------------------------------------------------------------- cma

#[derive(Debug, Args)]
pub struct CmaArgs {
    #[arg(long)]
    m: u64,
    /// Euler-product truncation.
    #[arg(long = "X", default_value = "1e6")]
    x: String,
}

/// Tolerance on `sum_a C_m(a) = -(gamma + log(phi(m)/m))`.
pub const ROW_SUM_TOL: f64 = 1e-8;

pub fn cma(global: &Global, a: CmaArgs) -> CmdResult {
    let x = parse_real(&a.x)?;
    let table = table_to(x as u64)?;
    let params = json!({ "m": a.m, "X": x });
    let mut sink = Sink::new(global.out.as_deref(), "cma", params, global.seed);
    let ct = cma_table(a.m, x, &table)?;
    let mut t = Table::new(
        "cma",
        &[
            "m",
            "a",
            "value",
            "xi_term",
            "gamma_term",
            "half_value",
            "imag_residue",
        ],
    );
    for v in &ct.values {
        t.push(vec![
            v.m.to_string(),
            v.a.to_string(),
            fmt_f64(v.value),
            fmt_f64(v.xi_term),
            fmt_f64(v.gamma_term),
            fmt_f64(v.half_value),
            fmt_f64(v.imag_residue),
        ]);
    }
    sink.table(&t)?;
    sink.finish()?;
    let err = (ct.row_sum() - ct.expected_row_sum()).abs();
    eprintln!(
        "row sum {} expected {} error {}",
        fmt_f64(ct.row_sum()),
        fmt_f64(ct.expected_row_sum()),
        fmt_f64(err)
    );
    if err > ROW_SUM_TOL {
        return Err(Failure::Threshold(format!(
            "row-sum error {} exceeds {ROW_SUM_TOL}",
            fmt_f64(err)
        )));
    }
    Ok(())
}

// ------------------------------------------------------------------ lz

#[derive(Debug, Args)]
pub struct LzArgs {
    #[arg(long)]
    m: u64,
    /// Comma-separated horizons.
    #[arg(long, default_value = "1e4,1e5,1e6")]
    y: String,
    /// Euler-product truncation for C_m(a).
    #[arg(long = "X", default_value = "1e6")]
    x: String,
    /// Restrict to one class.
    #[arg(long)]
    a: Option<u64>,
}

/// Allowed growth of |residual| from the first to the last horizon.
pub const LZ_SLACK: f64 = 1.2;

pub fn lz(global: &Global, a: LzArgs) -> CmdResult {
    let ys = parse_reals(&a.y)?;
    let x = parse_real(&a.x)?;
    let y_max = ys.iter().copied().fold(0.0, f64::max);
    let table = table_to(y_max.max(x) as u64)?;
    let params = json!({ "m": a.m, "y": ys, "X": x, "a": a.a });
    let mut sink = Sink::new(global.out.as_deref(), "lz", params, global.seed);
    let ct = cma_table(a.m, x, &table)?;
    let classes: Vec<u64> = match a.a {
        Some(r) => vec![r],
        None => ct.values.iter().map(|v| v.a).collect(),
    };
    let mut t = Table::new(
        "lz",
        &[
            "m",
            "a",
            "y",
            "log_sum",
            "reciprocal_sum",
            "main_term",
            "residual",
            "raw_residual",
        ],
    );
    let mut growing = Vec::new();
    for &r in &classes {
        let mut first = None;
        let mut last = None;
        for &y in &ys {
            let res = lz_residual(&ct, r, y, &table)?;
            first.get_or_insert(res.residual);
            last = Some(res.residual);
            t.push(vec![
                res.m.to_string(),
                res.a.to_string(),
                fmt_f64(res.y),
                fmt_f64(res.log_sum),
                fmt_f64(res.reciprocal_sum),
                fmt_f64(res.main_term),
                fmt_f64(res.residual),
                fmt_f64(res.raw_residual),
            ]);
        }
        if let (Some(f), Some(l)) = (first, last) {
            // 20% non-monotone slack, and nothing below the truncation drift
            let c = ct.get(r).expect("unit class");
            let drift = (c.value - c.half_value).abs();
            if ys.len() > 1 && l.abs() > (LZ_SLACK * f.abs()).max(drift) {
                growing.push(r);
            }
        }
    }
    sink.table(&t)?;
    sink.finish()?;
    if !growing.is_empty() {
        return Err(Failure::Threshold(format!(
            "residual grew by more than 20% from first to last y for classes {growing:?}"
        )));
    }
    Ok(())
}

// --------------------------------------------------------------- coset

#[derive(Debug, Args)]
pub struct CosetArgs {
    #[arg(long)]
    m: u64,
    /// `quadratic`, `generator`, `m:e1,..` or `e1,..`.
    #[arg(long, default_value = "quadratic")]
    psi: String,
    #[arg(long = "X", default_value = "1e6")]
    x: String,
}

/// Tolerance on the coset identity at `X = 10^6`.
pub const COSET_TOL: f64 = 1e-3;

pub fn coset(global: &Global, a: CosetArgs) -> CmdResult {
    let x = parse_real(&a.x)?;
    let table = table_to((x as u64).max(a.m))?;
    let psi = resolve_character(&a.psi, a.m, &table)?;
    let params = json!({ "m": a.m, "psi": psi.id(), "X": x });
    let mut sink = Sink::new(global.out.as_deref(), "coset", params, global.seed);
    let ct = cma_table(a.m, x, &table)?;
    let mut t = Table::new(
        "coset",
        &[
            "m",
            "psi",
            "k",
            "ell",
            "lhs",
            "rhs",
            "err",
            "cardinality",
            "expected_cardinality",
            "truncation_drift",
        ],
    );
    let mut worst: f64 = 0.0;
    let mut bad_card = false;
    for ell in 0..psi.order() {
        let c = coset_identity_check(&psi, ell, &ct)?;
        worst = worst.max(c.abs_err);
        bad_card |= c.cardinality != c.expected_cardinality;
        t.push(vec![
            c.m.to_string(),
            c.psi.clone(),
            c.k.to_string(),
            c.ell.to_string(),
            fmt_f64(c.lhs),
            fmt_f64(c.rhs),
            fmt_f64(c.abs_err),
            c.cardinality.to_string(),
            c.expected_cardinality.to_string(),
            fmt_f64(c.truncation_drift),
        ]);
    }
    sink.table(&t)?;
    sink.finish()?;
    if bad_card {
        return Err(Failure::Threshold("coset cardinality mismatch".into()));
    }
    if worst > COSET_TOL {
        return Err(Failure::Threshold(format!(
            "coset error {} exceeds {COSET_TOL}",
            fmt_f64(worst)
        )));
    }
    Ok(())
}

// ---------------------------------------------------------- controlerr

#[derive(Debug, Args)]
pub struct ControlErrArgs {
    #[arg(long)]
    m: u64,
    /// `generator`, `quadratic`, `m:e1,..` or `e1,..`; must be primitive.
    #[arg(long, default_value = "generator")]
    psi: String,
    #[arg(long, default_value_t = 3)]
    g: u64,
    /// Small-prime cutoff: `paper`, `desk` or a number.
    #[arg(long = "P", default_value = "desk")]
    p: String,
    #[arg(long = "X", default_value = "1e6")]
    x: String,
}

pub fn controlerr(global: &Global, a: ControlErrArgs) -> CmdResult {
    check_odd_g(a.g)?;
    let x = parse_real(&a.x)?;
    let threshold: SmallPrimeThreshold = a.p.parse()?;
    let p = threshold.value(a.m);
    let table = table_to((x as u64).max(a.m).max(p as u64))?;
    let psi = resolve_character(&a.psi, a.m, &table)?;
    let params = json!({ "m": a.m, "psi": psi.id(), "g": a.g, "P": p, "X": x });
    let mut sink = Sink::new(global.out.as_deref(), "controlerr", params, global.seed);
    let c = control_err_check(&psi, a.g, p, x, &table)?;
    let mut t = Table::new(
        "controlerr",
        &["m", "psi", "g", "k_star", "P", "X", "lhs", "rhs", "abs_err"],
    );
    t.push(vec![
        c.m.to_string(),
        c.psi.clone(),
        c.g.to_string(),
        c.k_star.to_string(),
        fmt_f64(c.p_threshold),
        fmt_f64(c.x),
        fmt_f64(c.lhs),
        fmt_f64(c.rhs),
        fmt_f64(c.abs_err),
    ]);
    sink.table(&t)?;
    sink.finish()?;
    Ok(())
}

// ----------------------------------------------------------- construct

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// Upper end of the modulus search range.
    #[arg(long = "M")]
    m_max: Option<u64>,
    #[arg(long)]
    g: Option<u64>,
    #[arg(long, value_parser = parse_preset)]
    preset: Option<Preset>,
    /// TOML file with pipeline settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long = "T")]
    t: Option<f64>,
    #[arg(long = "N")]
    n: Option<f64>,
    #[arg(long = "P")]
    p: Option<f64>,
    #[arg(long)]
    agree_p: Option<f64>,
    #[arg(long = "Y")]
    horizon: Option<f64>,
    #[arg(long = "X")]
    x: Option<f64>,
    #[arg(long)]
    q_max: Option<u64>,
    #[arg(long)]
    include_products: bool,
    /// Keep T fixed instead of stepping it down when no candidate exists.
    #[arg(long)]
    no_relax: bool,
    #[arg(long)]
    sample: Option<usize>,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    match s {
        "desk" => Ok(Preset::Desk),
        "paper" => Ok(Preset::Paper),
        _ => Err(format!("unknown preset {s:?} (desk or paper)")),
    }
}

fn pipeline_config(global: &Global, a: &ConstructArgs) -> Result<PipelineConfig, Failure> {
    let mut cfg: PipelineConfig = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(|e| usage(format!("{e:#}")))?;
            toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => PipelineConfig::default(),
    };
    macro_rules! set {
        ($($field:ident <- $arg:expr),*) => {
            $(if let Some(v) = $arg { cfg.$field = v; })*
        };
    }
    set!(m_max <- a.m_max, g <- a.g, preset <- a.preset, delta <- a.delta,
         agree_p <- a.agree_p, horizon <- a.horizon, x <- a.x, q_max <- a.q_max);
    if a.t.is_some() {
        cfg.t = a.t;
    }
    if a.n.is_some() {
        cfg.n = a.n;
    }
    if a.p.is_some() {
        cfg.p = a.p;
    }
    if a.sample.is_some() {
        cfg.sample = a.sample;
    }
    cfg.include_products |= a.include_products;
    if a.no_relax {
        cfg.relax_t = false;
    }
    if a.config.is_none() || global.seed != 0 {
        cfg.seed = global.seed;
    }
    Ok(cfg)
}

pub fn construct(global: &Global, a: ConstructArgs) -> CmdResult {
    let cfg = pipeline_config(global, &a)?;
    check_odd_g(cfg.g)?;
    let table = table_to(cfg.required_limit())?;
    let params = serde_json::to_value(&cfg).context("serializing the config")?;
    let mut sink = Sink::new(global.out.as_deref(), "construct", params, cfg.seed);
    let report = run_pipeline(&cfg, &table);
    sink.json("construct", &report)?;
    let mut t = Table::new("construct_candidates", &["stage", "modulus", "id", "score"]);
    for c in &report.candidates {
        t.push(vec![
            c.stage.clone(),
            c.modulus.to_string(),
            c.id.clone(),
            fmt_f64(c.score),
        ]);
    }
    sink.table(&t)?;
    sink.finish()?;
    if let Some(stage) = &report.failed_stage {
        let msg = format!(
            "stage {stage} failed: {}",
            report.error.as_deref().unwrap_or("unknown error")
        );
        return Err(if stage == "config" {
            usage(msg)
        } else {
            Failure::Threshold(msg)
        });
    }
    if report.goal2.as_ref().is_some_and(|g| !g.within_bound) {
        return Err(Failure::Threshold(
            "distance residual exceeds the disagreement bound".into(),
        ));
    }
    Ok(())
}

// ------------------------------------------------------------ plotdata

#[derive(Debug, Args)]
pub struct PlotdataArgs {
    /// CSV written by `msum --range` (envelope) or `lz` (residual).
    #[arg(long)]
    input: PathBuf,
    /// `envelope` or `residual`.
    #[arg(long)]
    spec: String,
}

fn column(header: &csv::StringRecord, name: &str) -> Result<usize, Failure> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| usage(format!("schema error: input has no column {name:?}")))
}

fn cell(row: &csv::StringRecord, i: usize) -> Result<f64, Failure> {
    parse_real(row.get(i).unwrap_or(""))
}

pub fn plotdata(global: &Global, a: PlotdataArgs) -> CmdResult {
    let mut rdr = csv::Reader::from_path(&a.input)
        .with_context(|| format!("reading {}", a.input.display()))
        .map_err(|e| usage(format!("{e:#}")))?;
    let header = rdr.headers().map_err(|e| usage(e.to_string()))?.clone();
    let rows: Vec<csv::StringRecord> = rdr
        .records()
        .collect::<Result<_, _>>()
        .map_err(|e| usage(e.to_string()))?;
    let params = json!({ "input": a.input.display().to_string(), "spec": a.spec });
    let mut sink = Sink::new(global.out.as_deref(), "plotdata", params, global.seed);
    let t = match a.spec.as_str() {
        "envelope" => {
            let (qi, mi) = (column(&header, "q")?, column(&header, "M_over_sqrtq")?);
            let mut pts = rows
                .iter()
                .map(|r| Ok((cell(r, qi)?, cell(r, mi)?)))
                .collect::<Result<Vec<_>, Failure>>()?;
            pts.sort_by(|x, y| x.0.total_cmp(&y.0));
            let mut t = Table::new("plotdata_envelope", &["loglog_q", "M_over_sqrtq"]);
            for (q, m) in pts {
                t.push(vec![fmt_f64(q.ln().ln()), fmt_f64(m)]);
            }
            t
        }
        "residual" => {
            let (yi, ri) = (column(&header, "y")?, column(&header, "residual")?);
            let ai = header.iter().position(|h| h == "a");
            let mut pts = rows
                .iter()
                .map(|r| {
                    let a = ai.map(|i| r.get(i).unwrap_or("").to_string());
                    Ok((a, cell(r, yi)?, cell(r, ri)?))
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            pts.sort_by(|x, y| {
                let key = |s: &Option<String>| s.as_deref().and_then(|v| v.parse::<u64>().ok());
                key(&x.0).cmp(&key(&y.0)).then(x.1.total_cmp(&y.1))
            });
            let mut t = if ai.is_some() {
                Table::new("plotdata_residual", &["a", "log10_y", "residual"])
            } else {
                Table::new("plotdata_residual", &["log10_y", "residual"])
            };
            for (a, y, r) in pts {
                let mut row = a.into_iter().collect::<Vec<_>>();
                row.extend([fmt_f64(y.log10()), fmt_f64(r)]);
                t.push(row);
            }
            t
        }
        other => return Err(usage(format!("unknown plot spec {other:?}"))),
    };
    sink.table(&t)?;
    sink.finish()?;
    Ok(())
}
