use std::sync::Arc;

use crate::arith::{
    factorize, lcm, mod_inverse, mod_mul, primitive_root, PrimeTable, DLOG_TABLE_CAP,
};
use crate::error::{Error, Result};

pub(crate) const NON_UNIT: u32 = u32::MAX;

/// The unit group modulo one prime power `p^e`.
#[derive(Debug, Clone)]
pub struct GroupComponent {
    modulus: u64,
    prime: u64,
    exponent: u32,
    generators: Vec<u64>,
    orders: Vec<u64>,
    /// residue -> mixed-radix packed exponent vector (first generator most
    /// significant), `NON_UNIT` for non-units.
    table: Vec<u32>,
}

impl GroupComponent {
    fn new(prime: u64, exponent: u32) -> Result<Self> {
        let modulus = prime.pow(exponent);
        if modulus > DLOG_TABLE_CAP {
            return Err(Error::Resource(format!(
                "prime-power component {modulus} exceeds discrete-log cap {DLOG_TABLE_CAP}"
            )));
        }
        let pairs = primitive_root(modulus)?.pairs();
        let generators: Vec<u64> = pairs.iter().map(|&(g, _)| g).collect();
        let orders: Vec<u64> = pairs.iter().map(|&(_, o)| o).collect();
        let mut table = vec![NON_UNIT; modulus as usize];
        // Walk the group in packed-index order.
        let size: u64 = orders.iter().product();
        let mut exps = vec![0u64; orders.len()];
        let mut powers = vec![1 % modulus; orders.len()];
        for idx in 0..size {
            let r = powers
                .iter()
                .fold(1 % modulus, |acc, &x| mod_mul(acc, x, modulus));
            table[r as usize] = idx as u32;
            for i in (0..orders.len()).rev() {
                exps[i] += 1;
                powers[i] = mod_mul(powers[i], generators[i], modulus);
                if exps[i] < orders[i] {
                    break;
                }
                exps[i] = 0;
                powers[i] = 1 % modulus;
            }
        }
        Ok(Self {
            modulus,
            prime,
            exponent,
            generators,
            orders,
            table,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// Generators as residues modulo this prime power.
    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    /// Discrete logs of `r` (a residue mod this component) with respect to
    /// the component generators; `None` if `r` is not a unit.
    pub fn logs(&self, r: u64) -> Option<impl Iterator<Item = u64> + '_> {
        let packed = self.table[(r % self.modulus) as usize];
        if packed == NON_UNIT {
            return None;
        }
        let mut rest = packed as u64;
        let mut out = [0u64; 2];
        for i in (0..self.orders.len()).rev() {
            out[i] = rest % self.orders[i];
            rest /= self.orders[i];
        }
        Some(out.into_iter().take(self.orders.len()))
    }
}

/// CRT-decomposed unit group `(Z/q)^*` with generators and log tables.
#[derive(Debug, Clone)]
pub struct CharacterGroup {
    modulus: u64,
    components: Vec<GroupComponent>,
    /// flattened generator orders
    orders: Vec<u64>,
    /// flattened generator index -> (component index, local index)
    slots: Vec<(usize, usize)>,
    /// generators lifted to residues mod q (≡ 1 on the other components)
    lifted: Vec<u64>,
    total_order: u64,
    root_den: u64,
}

/// Build the character group modulo `q`.
pub fn build_group(q: u64, table: &PrimeTable) -> Result<Arc<CharacterGroup>> {
    CharacterGroup::new(q, table).map(Arc::new)
}

impl CharacterGroup {
    pub fn new(q: u64, table: &PrimeTable) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("modulus must be at least 1".into()));
        }
        let f = factorize(q, table)?;
        let components = f
            .factors()
            .iter()
            .map(|&(p, e)| GroupComponent::new(p, e))
            .collect::<Result<Vec<_>>>()?;
        let mut orders = Vec::new();
        let mut slots = Vec::new();
        let mut lifted = Vec::new();
        for (ci, c) in components.iter().enumerate() {
            let rest = q / c.modulus;
            // e ≡ 1 (mod p^e), e ≡ 0 (mod q/p^e)
            let idem = if rest == 1 {
                1 % q
            } else {
                mod_mul(rest, mod_inverse(rest % c.modulus, c.modulus).unwrap(), q)
            };
            for (li, (&g, &o)) in c.generators.iter().zip(&c.orders).enumerate() {
                orders.push(o);
                slots.push((ci, li));
                // g*idem + (1 - idem) mod q
                let lift = (mod_mul(g, idem, q) + q + 1 - idem) % q;
                lifted.push(lift);
            }
        }
        let total_order = orders.iter().product();
        let root_den = orders.iter().fold(1, |a, &o| lcm(a, o));
        Ok(Self {
            modulus: q,
            components,
            orders,
            slots,
            lifted,
            total_order,
            root_den,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn components(&self) -> &[GroupComponent] {
        &self.components
    }

    /// Orders of the flattened generator list.
    pub fn generator_orders(&self) -> &[u64] {
        &self.orders
    }

    /// Generators as residues modulo `q`.
    pub fn generators(&self) -> &[u64] {
        &self.lifted
    }

    pub fn num_generators(&self) -> usize {
        self.orders.len()
    }

    /// `phi(q)`.
    pub fn order(&self) -> u64 {
        self.total_order
    }

    /// Common denominator `R` (group exponent) for exact character values.
    pub fn root_denominator(&self) -> u64 {
        self.root_den
    }

    pub(crate) fn slot(&self, i: usize) -> (usize, usize) {
        self.slots[i]
    }

    /// Discrete logs of `n` along the flattened generators; `None` if
    /// `gcd(n, q) > 1`.
    pub fn logs(&self, n: u64) -> Option<Vec<u64>> {
        let mut out = Vec::with_capacity(self.orders.len());
        for c in &self.components {
            out.extend(c.logs(n % c.modulus)?);
        }
        Some(out)
    }

    /// Reconstruct the residue with the given exponent vector.
    pub fn element(&self, exponents: &[u64]) -> u64 {
        let q = self.modulus;
        exponents
            .iter()
            .zip(&self.lifted)
            .fold(1 % q, |acc, (&e, &g)| {
                mod_mul(acc, crate::arith::mod_pow(g, e, q), q)
            })
    }

    /// Per-residue scaled logs: `out[n * gens + i] = (R / ord_i) * log_i(n)`,
    /// or `NON_UNIT` in slot 0 for non-units. Built without division by
    /// stepping per-component residue counters.
    pub fn scaled_log_table(&self) -> Vec<u32> {
        let gens = self.orders.len().max(1);
        let q = self.modulus as usize;
        let mut out = vec![0u32; q * gens];
        let scales: Vec<u64> = self.orders.iter().map(|&o| self.root_den / o).collect();
        // component-local tables of scaled logs
        let mut local: Vec<Vec<u32>> = Vec::with_capacity(self.components.len());
        let mut offset = 0;
        for c in &self.components {
            let k = c.orders.len();
            let mut t = vec![NON_UNIT; c.modulus as usize * k.max(1)];
            for r in 0..c.modulus {
                if let Some(logs) = c.logs(r) {
                    for (j, l) in logs.enumerate() {
                        t[r as usize * k + j] = (scales[offset + j] * l) as u32;
                    }
                    if k == 0 {
                        t[r as usize] = 0;
                    }
                }
            }
            offset += k;
            local.push(t);
        }
        let mut counters = vec![0usize; self.components.len()];
        for n in 0..q {
            let row = &mut out[n * gens..(n + 1) * gens];
            let mut slot = 0;
            let mut unit = true;
            for (ci, c) in self.components.iter().enumerate() {
                let k = c.orders.len();
                let r = counters[ci];
                let t = &local[ci];
                if t[r * k.max(1)] == NON_UNIT {
                    unit = false;
                    break;
                }
                row[slot..slot + k].copy_from_slice(&t[r * k..r * k + k]);
                slot += k;
            }
            if !unit {
                row[0] = NON_UNIT;
            }
            for (ci, c) in self.components.iter().enumerate() {
                counters[ci] += 1;
                if counters[ci] == c.modulus as usize {
                    counters[ci] = 0;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{gcd, sieve_primes};

    #[test]
    fn structure_examples() {
        let t = sieve_primes(1000).unwrap();
        let g7 = CharacterGroup::new(7, &t).unwrap();
        assert_eq!(g7.generator_orders(), &[6]);
        let g8 = CharacterGroup::new(8, &t).unwrap();
        assert_eq!(g8.generator_orders(), &[2, 2]);
        assert_eq!(g8.generators(), &[7, 5]);
        let g1 = CharacterGroup::new(1, &t).unwrap();
        assert_eq!(g1.order(), 1);
        assert_eq!(g1.num_generators(), 0);
        let g2 = CharacterGroup::new(2, &t).unwrap();
        assert_eq!(g2.order(), 1);
        assert!(matches!(CharacterGroup::new(0, &t), Err(Error::Domain(_))));
    }

    #[test]
    fn crt_reconstruction_is_exact() {
        let t = sieve_primes(1000).unwrap();
        for q in 1..=400u64 {
            let g = CharacterGroup::new(q, &t).unwrap();
            let prod: u64 = g.components().iter().map(|c| c.modulus()).product();
            assert_eq!(prod, q);
            assert_eq!(
                g.order(),
                (1..=q).filter(|&a| gcd(a, q) == 1).count() as u64
            );
            let scaled = g.scaled_log_table();
            let k = g.num_generators().max(1);
            for n in 0..q {
                match g.logs(n) {
                    Some(logs) => {
                        assert_eq!(gcd(n, q), 1);
                        assert_eq!(g.element(&logs), n % q);
                        for (i, &l) in logs.iter().enumerate() {
                            let s = g.root_denominator() / g.generator_orders()[i];
                            assert_eq!(scaled[n as usize * k + i] as u64, s * l);
                        }
                    }
                    None => {
                        assert!(gcd(n, q) > 1);
                        assert_eq!(scaled[n as usize * k], NON_UNIT);
                    }
                }
            }
        }
    }
}
