//! Exact verification toolkit for the sign symmetric `P₀,₁⁺` matrix
//! completion problem.
//!
//! * [`exact`]: rational matrices, fraction-free determinants, principal
//!   minor profiles.
//! * [`symbolic`]: sparse polynomials, symbolic determinants of partial
//!   matrices, impossibility certificates.
//! * [`classes`]: matrix classes, partial matrices, membership predicates.
//! * [`digraphs`]: specification patterns, canonical forms, enumeration.
//! * [`completion`]: constructive completions and a verified search engine.
//! * [`audit`]: classification of small patterns against a reference claim
//!   table, with certificates.

pub mod audit;
pub mod classes;
pub mod completion;
pub mod digraphs;
pub mod error;
pub mod exact;
pub mod format;
pub mod symbolic;

pub use classes::{MatrixClass, MembershipVerdict, PartialMatrix};
pub use digraphs::Pattern;
pub use error::{Error, Result};
pub use exact::{ExactMatrix, IndexSet, Rational};
pub use symbolic::MultiPoly;
