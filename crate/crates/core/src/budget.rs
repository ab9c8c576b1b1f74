/// Work limits for exhaustive enumerations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Maximum `|A|^{|T|}` for atom enumeration on a subtree `T`.
    pub atoms: u64,
    /// Maximum number of labelings or homomorphisms enumerated by brute force.
    pub enumeration: u64,
}

pub const DEFAULT_ATOMS: u64 = 1 << 20;
pub const DEFAULT_ENUMERATION: u64 = 10_000_000;

impl Default for Budget {
    fn default() -> Self {
        Budget { atoms: DEFAULT_ATOMS, enumeration: DEFAULT_ENUMERATION }
    }
}

impl Budget {
    pub fn with_atoms(atoms: u64) -> Self {
        Budget { atoms, ..Budget::default() }
    }

    /// Checks `base^exp ≤ atoms`.
    pub(crate) fn check_atoms(&self, base: usize, exp: usize, what: &'static str) -> crate::Result<()> {
        if pow_le(base as u64, exp, self.atoms) {
            Ok(())
        } else {
            Err(crate::Error::BudgetExceeded {
                what,
                needed: format!("{base}^{exp}"),
                limit: self.atoms,
            })
        }
    }

    pub(crate) fn check_enumeration(&self, needed: f64, what: &'static str) -> crate::Result<()> {
        if needed <= self.enumeration as f64 {
            Ok(())
        } else {
            Err(crate::Error::BudgetExceeded {
                what,
                needed: format!("{needed:.0}"),
                limit: self.enumeration,
            })
        }
    }
}

/// `base^exp ≤ limit` without overflow.
pub(crate) fn pow_le(base: u64, exp: usize, limit: u64) -> bool {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        match acc.checked_mul(base) {
            Some(v) if v <= limit => acc = v,
            _ => return base <= 1,
        }
    }
    acc <= limit
}
