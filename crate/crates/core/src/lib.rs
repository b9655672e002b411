//! Turaev-Viro type invariants of hyperbolic 3-manifolds at roots of unity,
//! together with Reshetikhin-Turaev surgery invariants and the asymptotic
//! fits used to compare them with hyperbolic volume.

pub mod arith;
pub mod asym;
pub mod error;
pub mod jones;
pub mod sixj;
pub mod statesum;
pub mod tri;

pub use arith::{make_root, InvariantValue, PrecComplex, PrecisionPolicy, RootSpec};
pub use error::{Error, Result};
