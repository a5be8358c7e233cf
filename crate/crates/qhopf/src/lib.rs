//! Symbolic + numeric workbench for a locally trivial quantum principal
//! U(1)-bundle over a glued pair of quantum discs.
//!
//! The crate is organized in layers:
//! - [`ncpoly`]: exact-coefficient free *-algebra on a finite involutive
//!   alphabet, with a text parser/printer.
//! - [`rewrite`]: oriented-relation rewriting with critical-pair completion;
//!   normal forms and vector-space basis enumeration for the presented
//!   algebras (quantum disc, circle, two-sphere, three-sphere, U(1)).
//! - [`hopf`]: the Hopf algebra of Laurent polynomials on U(1), the winding
//!   grading, right coactions and coinvariants.
//! - [`bundle`]: coverings, completeness, transition functions, cocycle
//!   checks and the gluing of two trivial pieces into the total space.
//! - [`galois`]: the canonical map, a strong connection lifting the
//!   translation map, and projector matrices of associated line bundles.
//! - [`oper`]: truncated weighted-shift representations, relation residuals,
//!   the difference trace and the Chern-Connes winding pairing.
//! - [`report`]: machine-readable check reports shared by the CLI.

pub mod scalar;
pub mod ncpoly;
pub mod parse;
pub mod linalg;
pub mod rewrite;
pub mod hopf;
pub mod bundle;
pub mod galois;
pub mod oper;
pub mod report;

pub use ncpoly::{Alphabet, Letter, NCPoly, Word};
pub use rewrite::{Presentation, RewriteRule, RewriteSystem};
pub use scalar::Scalar;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(String, String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("degree {0} exceeds cap {1}")]
    DegreeOverflow(usize, usize),
    #[error("rule not oriented: {0}")]
    NotOriented(String),
    #[error("system not completed up to degree {0}")]
    NotCompleted(usize),
    #[error("letter {0} carries no winding degree")]
    UngradedLetter(String),
    #[error("not coinvariant: {0}")]
    NotCoinvariant(String),
    #[error("no solution within degree cap {0}")]
    NoSolution(usize),
    #[error("unknown representation family: {0}")]
    UnknownFamily(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("window too large: {0}")]
    WindowTooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
