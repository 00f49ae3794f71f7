//! Loop subgroups of free groups: stabilizer constructions and their
//! matrix images.
//!
//! The crate is organized bottom-up:
//!
//! - [`freegroup`]: reduced words and endomorphisms of a free group;
//! - [`permutation`]: permutations and constructive words over two marked
//!   cycles;
//! - [`loopgroup`]: loop subgroups, their cosets, and the permutation action;
//! - [`matgroup`]: integer and modular matrices, generator families,
//!   closures, and constructive decompositions;
//! - [`stabilizer`]: the certified stabilizer constructions and the
//!   sharp-bound verification;
//! - [`excluded`]: the one-big-loop configuration, whose stabilizer image
//!   is an abelian-subspace stabilizer instead;
//! - [`report`]: the pass/fail check records the verifications emit.

pub mod excluded;
pub mod freegroup;
pub mod loopgroup;
pub mod matgroup;
pub mod permutation;
pub mod report;
pub mod stabilizer;

pub use excluded::{ExcludedCase, ExcludedError, ExcludedReport};
pub use freegroup::{AbelianVector, Endo, Word};
pub use loopgroup::{LoopError, LoopSubgroup, ParityVector, RestrictedLoops};
pub use matgroup::{GenTag, GenWord, IntMatrix, MatError, ModMatrix};
pub use permutation::{Parity, PermError, Permutation, SWLetter, SWWord};
pub use report::CheckResult;
pub use stabilizer::{CertifiedStabilizer, ConstructionKind, SharpboundReport, StabError};
