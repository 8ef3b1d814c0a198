//! Dirichlet character groups, exact character values, conductors and
//! enumeration.

mod dirichlet;
mod enumerate;
mod group;
mod unit_value;

pub(crate) use dirichlet::angle_table_from_scaled;
pub use dirichlet::{DirichletCharacter, Parity};
pub use enumerate::{enumerate_characters, CharacterFilter, CharacterIter};
pub(crate) use group::NON_UNIT;
pub use group::{build_group, CharacterGroup, GroupComponent};
pub use unit_value::{root_complex, root_table, UnitValue};

use std::sync::Arc;

use crate::arith::PrimeTable;
use crate::error::{Error, Result};

/// Resolve a character description against modulus `q`.
///
/// Accepts the `q:e1,e2,...` text form and the keyword `quadratic`, which
/// names the unique real non-principal character when the group is cyclic.
pub fn parse_character(spec: &str, table: &PrimeTable) -> Result<DirichletCharacter> {
    let q = DirichletCharacter::spec_modulus(spec)?;
    let group = build_group(q, table)?;
    DirichletCharacter::parse(spec, group)
}

/// The quadratic character of a cyclic group modulo `m`.
pub fn quadratic_character(group: &Arc<CharacterGroup>) -> Result<DirichletCharacter> {
    match group.generator_orders() {
        [o] if o % 2 == 0 => DirichletCharacter::new(Arc::clone(group), &[o / 2]),
        _ => Err(Error::Domain(format!(
            "modulus {} has no unique quadratic character",
            group.modulus()
        ))),
    }
}

#[cfg(test)]
mod tests;
