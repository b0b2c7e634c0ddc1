//! Feasibility of tropical (min-plus) linear inequality systems.
//!
//! A signed system `(A, Σ)` is decided by pivoting over basic covectors: tropical Cramer
//! solutions whose covector graphs are trees of a prescribed shape. Every verdict comes
//! with a checkable certificate.

pub mod convert;
pub mod covector;
pub mod cramer;
pub mod crosscheck;
pub mod error;
pub mod generate;
pub mod io;
pub mod oracle;
pub mod solver;
pub mod stm;
pub mod system;
pub mod tropical;

pub use covector::{classify, covector_of, point_from_covector, verify_covector_axioms, Classification, CovectorGraph};
pub use cramer::{cramer_covector, cramer_solution, is_basic_covector, CramerQuery};
pub use solver::{
    extract_nonlosing_strategy, extract_winning_matching, feasible_support, find_witness, verify_certificate,
    Certificate, SolveOptions, Strategy, SupportResult, Verdict,
};
pub use system::{Sign, SignMatrix, SignedSystem};
pub use tropical::{mat_vec, t_min, t_plus, tropical_det, Matching, Point, Rational, TropicalMatrix, TropicalValue};
