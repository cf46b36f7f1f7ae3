//! Quantum cloning by stimulated emission.
//!
//! Two cloners are simulated:
//!
//! * [`atoms`]: `N` three-level atoms with degenerate upper levels, each
//!   prepared in an equal mixture of the two excited levels, amplifying one
//!   incoming photon. Evolution is exact within the invariant sectors built by
//!   [`hilbert`]; [`metrics`] turns the photon statistics into fidelities.
//! * [`pdc`]: stimulated parametric down-conversion, solved in closed form and
//!   checked against direct exponentiation, with exact rational fidelities for
//!   the clones and the universal-NOT outputs.
//!
//! [`symmetry`] checks that both cloners are universal, and [`verify`] bundles
//! every invariant into one report used by the `stimclone verify` command.

pub mod atoms;
pub mod cli;
pub mod error;
pub mod hilbert;
pub mod metrics;
pub mod pdc;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};
