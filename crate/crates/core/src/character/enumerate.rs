use std::sync::Arc;

use super::dirichlet::{DirichletCharacter, Parity};
use super::group::CharacterGroup;

/// Selection predicate for [`enumerate_characters`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CharacterFilter {
    pub order_divides: Option<u64>,
    pub exact_order: Option<u64>,
    pub parity: Option<Parity>,
    /// Excludes the principal character as well, so moduli 1 and 2 yield
    /// nothing.
    pub primitive_only: bool,
    pub non_principal: bool,
}

impl CharacterFilter {
    pub fn all() -> Self {
        Self::default()
    }

    pub fn non_principal() -> Self {
        Self {
            non_principal: true,
            ..Self::default()
        }
    }

    pub fn accepts(&self, chi: &DirichletCharacter) -> bool {
        if (self.non_principal || self.primitive_only) && chi.is_principal() {
            return false;
        }
        if self.order_divides.is_some() || self.exact_order.is_some() {
            let ord = chi.order();
            if let Some(d) = self.order_divides {
                if d == 0 || d % ord != 0 {
                    return false;
                }
            }
            if self.exact_order.is_some_and(|g| g != ord) {
                return false;
            }
        }
        if self.parity.is_some_and(|p| p != chi.parity()) {
            return false;
        }
        !self.primitive_only || chi.is_primitive()
    }
}

/// Iterator over characters in lexicographic order of exponent vectors.
pub struct CharacterIter {
    group: Arc<CharacterGroup>,
    filter: CharacterFilter,
    next: Option<Vec<u64>>,
}

impl Iterator for CharacterIter {
    type Item = DirichletCharacter;

    fn next(&mut self) -> Option<DirichletCharacter> {
        loop {
            let current = self.next.take()?;
            let orders = self.group.generator_orders();
            let mut succ = current.clone();
            let mut advanced = false;
            for i in (0..succ.len()).rev() {
                succ[i] += 1;
                if succ[i] < orders[i] {
                    advanced = true;
                    break;
                }
                succ[i] = 0;
            }
            if advanced {
                self.next = Some(succ);
            }
            let chi = DirichletCharacter::new(Arc::clone(&self.group), &current)
                .expect("exponent vector shaped by the group");
            if self.filter.accepts(&chi) {
                return Some(chi);
            }
        }
    }
}

/// Every character of `group` passing `filter`, each exactly once, in
/// lexicographic exponent order (first generator most significant).
pub fn enumerate_characters(group: &Arc<CharacterGroup>, filter: CharacterFilter) -> CharacterIter {
    CharacterIter {
        group: Arc::clone(group),
        filter,
        next: Some(vec![0; group.num_generators()]),
    }
}
