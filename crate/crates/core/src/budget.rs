/// Hard caps for the enumeration-heavy operations.
///
/// Universe sizes grow non-elementarily in the depth bound, so every
/// enumeration checks its object count against these limits and fails with
/// [`Error::ResourceExhausted`](crate::Error::ResourceExhausted) instead of
/// running away.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Models, worlds of generated universes, and relation pairs.
    pub max_models: usize,
    /// Formula equivalence classes.
    pub max_formulas: usize,
}

pub const DEFAULT_LIMIT: usize = 1_000_000;

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_models: DEFAULT_LIMIT,
            max_formulas: DEFAULT_LIMIT,
        }
    }
}

impl Budget {
    pub fn new(max_models: usize, max_formulas: usize) -> Self {
        Budget {
            max_models,
            max_formulas,
        }
    }
}
