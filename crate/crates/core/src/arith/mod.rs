//! Prime sieving, factorization, primitive roots and discrete logarithms.

mod factor;
mod modular;
mod sieve;
mod unit_group;

pub use factor::{factorize, factorize_trial, Factorization};
pub use modular::{gcd, is_prime_u64, lcm, mod_inverse, mod_mul, mod_pow};
pub use sieve::{sieve_primes, PrimeTable, DEFAULT_SIEVE_CEILING};
pub use unit_group::{discrete_log, primitive_root, DlogTable, UnitGenerators, DLOG_TABLE_CAP};
