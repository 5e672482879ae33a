//! Condensed-detachment theorem proving for Hilbert-style propositional
//! calculi: terms and unification, problem and proof files, a given-clause
//! search with weighting, resonators, hints and blocking, an independent
//! proof checker with simplicity measures, and multi-run proof-shortening
//! campaigns.

pub mod campaign;
pub mod error;
pub mod inference;
pub mod proofkit;
pub mod search;
pub mod syntax;
pub mod term;

pub use campaign::{
    axiom_dependence, block_steps_loop, cram, lemma_adjunction, parse_plan, run_plan, sweep, BlockOutcome,
    CampaignError, CampaignPlan, CampaignResult, Dependence, DependenceReport, Mode, PlanFile, PlanKind, RunReport,
};
pub use error::ParseError;
pub use inference::{
    condensed_detachment, matches_hint, passes_filters, subsumes, CdFailure, Clause, FilterConfig, Justification,
    RejectReason, Verdict,
};
pub use proofkit::{
    check_proof, proof_metrics, steps_as_resonators, GoalLine, InvalidReason, Metrics, Proof, ProofStep, Validity,
};
pub use search::{
    ground_goal, priority, saturate, saturate_traced, Hint, Limit, Outcome, PriorityKey, Resonator, Search,
    SearchResult, Selection, SpecError, Stats, StrategyConfig, TraceEvent,
};
pub use syntax::{
    parse_formula, parse_problem, parse_proof, print_formula, print_problem, print_proof, Named, ProblemSpec,
    ProofDocument,
};
pub use term::{match_term, rename_apart, unify, Skeleton, Substitution, Term, UnifyFailure};
