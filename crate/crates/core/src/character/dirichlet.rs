use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::group::{CharacterGroup, NON_UNIT};
use super::unit_value::{root_complex, UnitValue};
use crate::arith::{gcd, lcm};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// A Dirichlet character, stored as an exponent vector over the group's
/// generators: `chi(g_i) = e(exponent_i / ord_i)`.
#[derive(Clone)]
pub struct DirichletCharacter {
    group: Arc<CharacterGroup>,
    exponents: Vec<u64>,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.exponents == other.exponents
    }
}

impl Eq for DirichletCharacter {}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DirichletCharacter({})", self.id())
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl DirichletCharacter {
    /// Exponents are reduced modulo the generator orders.
    pub fn new(group: Arc<CharacterGroup>, exponents: &[u64]) -> Result<Self> {
        let orders = group.generator_orders();
        if exponents.len() != orders.len() {
            return Err(Error::Domain(format!(
                "modulus {} has {} generators, got {} exponents",
                group.modulus(),
                orders.len(),
                exponents.len()
            )));
        }
        let exponents = exponents.iter().zip(orders).map(|(&e, &o)| e % o).collect();
        Ok(Self { group, exponents })
    }

    pub fn principal(group: Arc<CharacterGroup>) -> Self {
        let exponents = vec![0; group.num_generators()];
        Self { group, exponents }
    }

    /// Parse the text form `q:e1,e2,...` against an existing group.
    pub fn parse(spec: &str, group: Arc<CharacterGroup>) -> Result<Self> {
        let bad = |reason: &str| Error::Parse {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let (q, rest) = spec
            .split_once(':')
            .ok_or_else(|| bad("expected q:e1,e2,..."))?;
        let q: u64 = q
            .trim()
            .parse()
            .map_err(|_| bad("modulus is not an integer"))?;
        if q != group.modulus() {
            return Err(bad("modulus does not match the group"));
        }
        let exps: Vec<u64> = if rest.trim().is_empty() {
            Vec::new()
        } else {
            rest.split(',')
                .map(|e| e.trim().parse::<u64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad("exponent is not a non-negative integer"))?
        };
        if exps.len() != group.num_generators() {
            return Err(bad("wrong number of exponents"));
        }
        Self::new(group, &exps)
    }

    /// Modulus named by a `q:...` spec, for building the group first.
    pub fn spec_modulus(spec: &str) -> Result<u64> {
        spec.split_once(':')
            .and_then(|(q, _)| q.trim().parse().ok())
            .ok_or_else(|| Error::Parse {
                spec: spec.to_string(),
                reason: "expected q:e1,e2,...".into(),
            })
    }

    /// Text form `q:e1,e2,...`.
    pub fn id(&self) -> String {
        let exps: Vec<String> = self.exponents.iter().map(u64::to_string).collect();
        format!("{}:{}", self.modulus(), exps.join(","))
    }

    pub fn group(&self) -> &Arc<CharacterGroup> {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus()
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// `lcm_i ord_i / gcd(ord_i, e_i)`.
    pub fn order(&self) -> u64 {
        self.exponents
            .iter()
            .zip(self.group.generator_orders())
            .fold(1, |acc, (&e, &o)| lcm(acc, o / gcd(o, e)))
    }

    /// Numerator `a` with `chi(n) = e(a / R)`, `R` the group's root
    /// denominator; `None` when `gcd(n, q) > 1`.
    pub fn angle(&self, n: u64) -> Option<u64> {
        let r = self.group.root_denominator();
        let logs = self.group.logs(n)?;
        let mut acc: u128 = 0;
        for ((&e, &o), l) in self
            .exponents
            .iter()
            .zip(self.group.generator_orders())
            .zip(logs)
        {
            acc += e as u128 * (r / o) as u128 * l as u128;
        }
        Some((acc % r as u128) as u64)
    }

    /// Exact value `chi(n)`.
    pub fn value(&self, n: u64) -> UnitValue {
        match self.angle(n) {
            None => UnitValue::Zero,
            Some(a) => UnitValue::root(a, self.group.root_denominator()),
        }
    }

    pub fn value_complex(&self, n: u64) -> Complex64 {
        match self.angle(n) {
            None => Complex64::new(0.0, 0.0),
            Some(a) => root_complex(a, self.group.root_denominator()),
        }
    }

    /// Angle numerators over `R` for every `n` in `0..q` (`u32::MAX` marks
    /// non-units).
    pub fn angle_table(&self) -> Vec<u32> {
        angle_table_from_scaled(
            &self.group.scaled_log_table(),
            &self.exponents,
            self.group.root_denominator(),
        )
    }

    /// `chi(-1) = (-1)^(sum of parity bits)`.
    pub fn parity(&self) -> Parity {
        let mut bit = 0u64;
        for (i, &e) in self.exponents.iter().enumerate() {
            let (ci, li) = self.group.slot(i);
            let c = &self.group.components()[ci];
            // -1 is g^(ord/2) for cyclic components and the first generator for 2^e, e >= 3
            let contributes = if c.prime() == 2 && c.exponent() >= 3 {
                li == 0
            } else {
                true
            };
            if contributes {
                bit ^= e & 1;
            }
        }
        if bit == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == Parity::Odd
    }

    /// Least `f | q` such that `chi` is induced from a character mod `f`,
    /// computed from the p-adic divisibility of each component exponent.
    pub fn conductor(&self) -> u64 {
        let mut f = 1u64;
        let mut slot = 0;
        for c in self.group.components() {
            let k = c.orders().len();
            let exps = &self.exponents[slot..slot + k];
            slot += k;
            let (p, e) = (c.prime(), c.exponent());
            let local = if p == 2 {
                match (e, exps) {
                    (1, _) => 0,
                    (2, [s]) => u32::from(*s != 0) * 2,
                    (_, [s, t]) => {
                        if *t == 0 {
                            u32::from(*s != 0) * 2
                        } else {
                            e - t.trailing_zeros()
                        }
                    }
                    _ => unreachable!("2-adic component shape"),
                }
            } else {
                let a = exps[0];
                if a == 0 {
                    0
                } else {
                    e - p_adic_valuation(a, p).min(e - 1)
                }
            };
            f *= p.pow(local);
        }
        f
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus()
    }

    pub fn pow(&self, j: u64) -> Self {
        let exponents = self
            .exponents
            .iter()
            .zip(self.group.generator_orders())
            .map(|(&e, &o)| ((e as u128 * j as u128) % o as u128) as u64)
            .collect();
        Self {
            group: Arc::clone(&self.group),
            exponents,
        }
    }

    pub fn conj(&self) -> Self {
        let exponents = self
            .exponents
            .iter()
            .zip(self.group.generator_orders())
            .map(|(&e, &o)| (o - e) % o)
            .collect();
        Self {
            group: Arc::clone(&self.group),
            exponents,
        }
    }

    /// Product of two characters of the same modulus.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.modulus() != other.modulus() {
            return Err(Error::Domain("characters have different moduli".into()));
        }
        let exponents = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .zip(self.group.generator_orders())
            .map(|((&a, &b), &o)| (a + b) % o)
            .collect();
        Ok(Self {
            group: Arc::clone(&self.group),
            exponents,
        })
    }
}

pub(crate) fn angle_table_from_scaled(scaled: &[u32], exponents: &[u64], r: u64) -> Vec<u32> {
    let k = exponents.len().max(1);
    let q = scaled.len() / k;
    let mut out = Vec::with_capacity(q);
    for n in 0..q {
        let row = &scaled[n * k..n * k + k];
        if row[0] == NON_UNIT {
            out.push(NON_UNIT);
            continue;
        }
        let mut acc: u64 = 0;
        for (&s, &e) in row.iter().zip(exponents) {
            acc = (acc + s as u64 * e) % r;
        }
        out.push(acc as u32);
    }
    out
}

fn p_adic_valuation(mut a: u64, p: u64) -> u32 {
    let mut v = 0;
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    v
}
