//! Central numerical policy. Every tolerance used by the crate is one of
//! these three knobs so that reproductions only have one place to tune.

/// Tolerance bundle.
///
/// * `structural` — identities that hold to rounding error: norms, traces,
///   commutators of block unitaries, recurrence residuals.
/// * `validation` — input checks where a few ulps of slack are expected:
///   unitarity, Hermiticity, density-matrix positivity.
/// * `search` — convergence targets of iterative searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub structural: f64,
    pub validation: f64,
    pub search: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        structural: 1e-12,
        validation: 1e-10,
        search: 1e-6,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
