//! Measurable lower bounds on the concurrence of bipartite mixed states.
//!
//! The bound is read off from local parity measurements on a two-fold copy
//! `ρ⊗ρ`: the probabilities of finding the two copies of each subsystem in
//! their symmetric or antisymmetric subspace. The crate provides
//!
//! * a small dense complex kernel ([`linalg`]),
//! * state constructors and random ensembles ([`states`], [`stateio`]),
//! * the two-copy parity observables ([`copyspace`]),
//! * the bound itself, the witness verdict and the pair/decomposition
//!   inequality checkers ([`concurrence`]),
//! * a convex-roof upper estimate used as an independent check ([`oracle`]),
//! * finite-shot simulation of the parity measurement ([`measurement`]),
//! * the scatter/ensemble harness behind the command-line tool ([`harness`]).

pub mod concurrence;
pub mod copyspace;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod measurement;
pub mod oracle;
pub mod rng;
pub mod stateio;
pub mod states;

pub use concurrence::{BoundReport, Verdict};
pub use error::{Error, Result};
pub use linalg::{BipartiteDims, ComplexMatrix, Subsystem, C64};
pub use states::{DensityMatrix, PureState};
