use serde::{Deserialize, Serialize};

use crate::arith::{gcd, mod_pow, primitive_root, PrimeTable};
use crate::character::{build_group, DirichletCharacter, UnitValue};
use crate::error::{domain, Error, Result};
use crate::pretentious::select_z;

/// Which moduli `build_chi` searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QCandidates {
    /// Primes `q = 1 (mod g)` up to this bound.
    pub q_max: u64,
    /// Also try `q1 q2 <= q_max` for two such primes `q1 < q2`.
    pub include_products: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChiChoice {
    pub q: u64,
    #[serde(serialize_with = "super::serialize_id")]
    pub chi: DirichletCharacter,
    /// `sum_{p <= P, chi(p) = z_l(p)} 1/p / sum_{p <= P, p !| qm} 1/p`.
    pub agreement: f64,
    pub agreeing_weight: f64,
    pub total_weight: f64,
    pub agree_p: f64,
    /// Moduli examined before the choice was final.
    pub searched: u64,
}

/// Target exponents: `(p, n)` with `z_l(p) = e(n/g)` for primes
/// `p <= P`, `p !| m`.
fn targets(
    psi: &DirichletCharacter,
    g: u64,
    agree_p: f64,
    table: &PrimeTable,
) -> Result<Vec<(u64, u64)>> {
    let k = psi.order();
    let r = psi.group().root_denominator();
    let pmax = if agree_p >= 2.0 {
        agree_p.floor() as u64
    } else {
        0
    };
    if pmax > table.limit() {
        return Err(Error::Resource(format!(
            "P = {agree_p} exceeds the sieve limit"
        )));
    }
    let mut out = Vec::new();
    for &p in table.primes_up_to(pmax) {
        if let Some(a) = psi.angle(p) {
            let l = a / (r / k);
            out.push((p, select_z(l, k, g)?.n));
        }
    }
    Ok(out)
}

/// `log_omega(p^{(q-1)/g})` for each target prime, `omega` the image of the
/// least primitive root; `None` for `p = q`.
fn residues_mod_g(q: u64, g: u64, primes: &[(u64, u64)]) -> Result<Vec<Option<u64>>> {
    let root = primitive_root(q)?.generator().expect("prime modulus");
    let e = (q - 1) / g;
    let omega = mod_pow(root, e, q);
    let powers: Vec<u64> =
        std::iter::successors(Some(1u64), |&x| Some(crate::arith::mod_mul(x, omega, q)))
            .take(g as usize)
            .collect();
    primes
        .iter()
        .map(|&(p, _)| {
            if p % q == 0 {
                return Ok(None);
            }
            let y = mod_pow(p % q, e, q);
            powers
                .iter()
                .position(|&w| w == y)
                .map(|i| Some(i as u64))
                .ok_or_else(|| Error::Numerical(format!("{p}^((q-1)/g) not a g-th root mod {q}")))
        })
        .collect()
}

enum Modulus {
    Prime(u64),
    Product(u64, u64),
}

impl Modulus {
    fn value(&self) -> u64 {
        match *self {
            Self::Prime(q) => q,
            Self::Product(a, b) => a * b,
        }
    }
}

/// Choose `q` and a primitive character `chi mod q` of exact order `g`
/// agreeing with `z_l(p)` on as much of the small-prime mass as possible.
///
/// Moduli are visited in increasing order and the first maximizer is kept,
/// so the result is deterministic; the search stops early at agreement 1.
pub fn build_chi(
    psi: &DirichletCharacter,
    g: u64,
    agree_p: f64,
    candidates: &QCandidates,
    table: &PrimeTable,
) -> Result<ChiChoice> {
    crate::pretentious::delta_g(g)?;
    if candidates.q_max > table.limit() {
        return Err(Error::Resource(format!(
            "q budget {} exceeds the sieve limit {}",
            candidates.q_max,
            table.limit()
        )));
    }
    let m = psi.modulus();
    let target = targets(psi, g, agree_p, table)?;
    let primes: Vec<u64> = table
        .primes_up_to(candidates.q_max)
        .iter()
        .copied()
        .filter(|&q| q % g == 1)
        .collect();
    let mut moduli: Vec<Modulus> = primes.iter().map(|&q| Modulus::Prime(q)).collect();
    if candidates.include_products {
        for (i, &a) in primes.iter().enumerate() {
            for &b in &primes[i + 1..] {
                if a * b > candidates.q_max {
                    break;
                }
                moduli.push(Modulus::Product(a, b));
            }
        }
        moduli.sort_by_key(Modulus::value);
    }
    if moduli.is_empty() {
        return domain(format!(
            "no candidate moduli q = 1 (mod {g}) up to {}",
            candidates.q_max
        ));
    }
    let units: Vec<u64> = (1..g).filter(|&e| gcd(e, g) == 1).collect();
    let mut best: Option<(f64, f64, f64, u64, Vec<u64>)> = None;
    let mut searched = 0u64;
    for modulus in &moduli {
        searched += 1;
        let q = modulus.value();
        let weights: Vec<f64> = target
            .iter()
            .map(|&(p, _)| {
                if q % p == 0 || m % p == 0 {
                    0.0
                } else {
                    1.0 / p as f64
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        // (exponents, per-prime residues) for each component
        let parts: Vec<(u64, Vec<Option<u64>>)> = match *modulus {
            Modulus::Prime(a) => vec![(a, residues_mod_g(a, g, &target)?)],
            Modulus::Product(a, b) => vec![
                (a, residues_mod_g(a, g, &target)?),
                (b, residues_mod_g(b, g, &target)?),
            ],
        };
        let choices: Vec<Vec<u64>> = match parts.len() {
            1 => units.iter().map(|&e| vec![e]).collect(),
            _ => (1..g)
                .flat_map(|e1| (1..g).map(move |e2| vec![e1, e2]))
                .filter(|es| {
                    let o = |e: u64| g / gcd(e, g);
                    crate::arith::lcm(o(es[0]), o(es[1])) == g
                })
                .collect(),
        };
        for es in choices {
            let mut agree = 0.0;
            for (i, &(_, n)) in target.iter().enumerate() {
                let mut exp = 0u64;
                let mut unit = true;
                for ((_, res), &e) in parts.iter().zip(&es) {
                    match res[i] {
                        Some(r) => exp += e * r,
                        None => unit = false,
                    }
                }
                if unit && exp % g == n {
                    agree += weights[i];
                }
            }
            let score = if total > 0.0 { agree / total } else { 1.0 };
            if best.as_ref().map_or(true, |b| score > b.0) {
                let exps = parts
                    .iter()
                    .zip(&es)
                    .map(|(&(p, _), &e)| e * (p - 1) / g)
                    .collect();
                best = Some((score, agree, total, q, exps));
            }
        }
        if best.as_ref().is_some_and(|b| b.0 >= 1.0) {
            break;
        }
    }
    let (agreement, agreeing_weight, total_weight, q, exps) = best.expect("non-empty candidates");
    let chi = DirichletCharacter::new(build_group(q, table)?, &exps)?;
    // the exponent layout must reproduce the scored values
    let recomputed = score(&chi, m, g, &target);
    if (recomputed - agreement).abs() > 1e-12 {
        return Err(Error::Numerical(format!(
            "character {chi} scores {recomputed}, search recorded {agreement}"
        )));
    }
    Ok(ChiChoice {
        q,
        chi,
        agreement,
        agreeing_weight,
        total_weight,
        agree_p,
        searched,
    })
}

fn score(chi: &DirichletCharacter, m: u64, g: u64, target: &[(u64, u64)]) -> f64 {
    let q = chi.modulus();
    let (mut agree, mut total) = (0.0, 0.0);
    for &(p, n) in target {
        if q % p == 0 || m % p == 0 {
            continue;
        }
        total += 1.0 / p as f64;
        if chi.value(p) == UnitValue::root(n, g) {
            agree += 1.0 / p as f64;
        }
    }
    if total > 0.0 {
        agree / total
    } else {
        1.0
    }
}

/// Agreement of `chi` with the maximizers `z_l` of `psi` on primes `p <= P`.
pub fn agreement_score(
    chi: &DirichletCharacter,
    psi: &DirichletCharacter,
    g: u64,
    agree_p: f64,
    table: &PrimeTable,
) -> Result<f64> {
    let target = targets(psi, g, agree_p, table)?;
    Ok(score(chi, psi.modulus(), g, &target))
}
