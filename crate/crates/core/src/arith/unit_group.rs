use super::factor::factorize_trial;
use super::modular::{gcd, mod_mul, mod_pow};
use crate::error::{domain, Error, Result};

/// Largest modulus for which a full discrete-log table is built.
pub const DLOG_TABLE_CAP: u64 = 10_000_000;

/// Generators of `(Z/p^e)^*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitGenerators {
    /// Cyclic group (odd prime powers, 2 and 4). For modulus 2 the
    /// generator is 1 and the order is 1.
    Cyclic { generator: u64, order: u64 },
    /// `2^e` with `e >= 3`: `<-1> x <5>`.
    TwoPower {
        minus_one: u64,
        five: u64,
        order_five: u64,
    },
}

impl UnitGenerators {
    /// The single generator of a cyclic unit group.
    pub fn generator(&self) -> Option<u64> {
        match *self {
            UnitGenerators::Cyclic { generator, .. } => Some(generator),
            UnitGenerators::TwoPower { .. } => None,
        }
    }

    /// `(generator, order)` pairs, in the order used for exponent vectors.
    pub fn pairs(&self) -> Vec<(u64, u64)> {
        match *self {
            UnitGenerators::Cyclic { order: 1, .. } => Vec::new(),
            UnitGenerators::Cyclic { generator, order } => vec![(generator, order)],
            UnitGenerators::TwoPower {
                minus_one,
                five,
                order_five,
            } => vec![(minus_one, 2), (five, order_five)],
        }
    }
}

/// Smallest generator of the unit group modulo a prime power.
///
/// For `2^e`, `e >= 3`, the group is not cyclic and the two-generator
/// decomposition `<-1> x <5>` is returned instead.
pub fn primitive_root(prime_power: u64) -> Result<UnitGenerators> {
    let f = factorize_trial(prime_power)?;
    if f.omega() != 1 {
        return domain(format!("{prime_power} is not a prime power"));
    }
    let (p, e) = f.factors()[0];
    match (p, e) {
        (2, 1) => Ok(UnitGenerators::Cyclic {
            generator: 1,
            order: 1,
        }),
        (2, 2) => Ok(UnitGenerators::Cyclic {
            generator: 3,
            order: 2,
        }),
        (2, _) => Ok(UnitGenerators::TwoPower {
            minus_one: prime_power - 1,
            five: 5,
            order_five: prime_power / 4,
        }),
        _ => {
            let order = f.phi();
            let order_primes: Vec<u64> = factorize_trial(order)?.primes().collect();
            let generator = (2..prime_power)
                .filter(|&g| g % p != 0)
                .find(|&g| {
                    order_primes
                        .iter()
                        .all(|&r| mod_pow(g, order / r, prime_power) != 1)
                })
                .ok_or_else(|| Error::Domain(format!("no primitive root mod {prime_power}")))?;
            Ok(UnitGenerators::Cyclic { generator, order })
        }
    }
}

/// Full discrete-log table for the cyclic subgroup generated by `generator`.
#[derive(Debug, Clone)]
pub struct DlogTable {
    modulus: u64,
    generator: u64,
    order: u64,
    table: Vec<u32>,
}

const NOT_IN_SUBGROUP: u32 = u32::MAX;

impl DlogTable {
    pub fn new(modulus: u64, generator: u64) -> Result<Self> {
        if modulus < 2 {
            return domain("modulus must be at least 2");
        }
        if modulus > DLOG_TABLE_CAP {
            return Err(Error::Resource(format!(
                "discrete-log table for modulus {modulus} exceeds cap {DLOG_TABLE_CAP}"
            )));
        }
        if gcd(generator, modulus) != 1 {
            return domain(format!("{generator} is not a unit mod {modulus}"));
        }
        let mut table = vec![NOT_IN_SUBGROUP; modulus as usize];
        let mut x = 1 % modulus;
        let mut k = 0u32;
        loop {
            table[x as usize] = k;
            x = mod_mul(x, generator, modulus);
            k += 1;
            if x == 1 % modulus {
                break;
            }
        }
        Ok(Self {
            modulus,
            generator: generator % modulus,
            order: k as u64,
            table,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// Multiplicative order of the generator.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// `x` with `generator^x = a`, `0 <= x < order`.
    pub fn log(&self, a: u64) -> Result<u64> {
        let r = a % self.modulus;
        if gcd(r, self.modulus) != 1 {
            return domain(format!("{a} is not coprime to {}", self.modulus));
        }
        match self.table[r as usize] {
            NOT_IN_SUBGROUP => domain(format!(
                "{a} is not a power of {} mod {}",
                self.generator, self.modulus
            )),
            k => Ok(k as u64),
        }
    }
}

/// One-shot discrete logarithm (builds a table; prefer [`DlogTable`] for
/// repeated queries).
pub fn discrete_log(modulus: u64, generator: u64, a: u64) -> Result<u64> {
    DlogTable::new(modulus, generator)?.log(a)
}
