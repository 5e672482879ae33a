//! Text formats: formulas, problem files and proof files.

mod formula;
pub(crate) mod problem;
mod proof;

pub use formula::{parse_formula, print_formula, Signature, PREDICATE_WRAPPER};
pub use problem::{parse_problem, print_problem, Named, ParamError, ProblemSpec, PARAMETERS};
pub use proof::{parse_proof, print_proof, ProofDocument};
