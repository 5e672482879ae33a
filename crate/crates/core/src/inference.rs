//! Condensed detachment, unit subsumption and the retention filters.

use std::fmt;

use crate::search::Hint;
use crate::term::{match_term, rename_apart, unify, Term, UnifyFailure};

/// How a clause or proof line was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Justification {
    Axiom(String),
    /// Condensed detachment with the given major and minor premise ids.
    Cd {
        major: u32,
        minor: u32,
    },
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Axiom(name) => write!(f, "axiom {name}"),
            Justification::Cd { major, minor } => write!(f, "cd {major},{minor}"),
        }
    }
}

/// A retained unit formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub id: u32,
    /// Always in canonical variable naming.
    pub term: Term,
    pub justification: Justification,
    pub weight: usize,
    pub vars: usize,
    pub birth_order: u32,
}

impl Clause {
    pub fn new(id: u32, term: &Term, justification: Justification, birth_order: u32) -> Self {
        let term = term.canonicalize();
        Clause { id, weight: term.weight(), vars: term.distinct_vars(), term, justification, birth_order }
    }
}

/// Retention limits applied to every derived conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterConfig {
    pub max_weight: usize,
    pub max_distinct_vars: Option<usize>,
    /// Conclusions containing an instance of any of these as a subterm are dropped.
    pub forbidden_patterns: Vec<Term>,
    /// Conclusions that are variants of any of these are dropped.
    pub blocked_lemmas: Vec<Term>,
    /// Conclusions matching a hint are kept even above `max_weight`.
    pub hint_exempt_max_weight: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            max_weight: 30,
            max_distinct_vars: None,
            forbidden_patterns: Vec::new(),
            blocked_lemmas: Vec::new(),
            hint_exempt_max_weight: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RejectReason {
    Blocked,
    Forbidden,
    TooManyVars,
    TooHeavy,
    /// Forward-subsumed by a retained clause (search only).
    Subsumed,
}

impl RejectReason {
    pub const ALL: [RejectReason; 5] = [
        RejectReason::Blocked,
        RejectReason::Forbidden,
        RejectReason::TooManyVars,
        RejectReason::TooHeavy,
        RejectReason::Subsumed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::Blocked => "blocked",
            RejectReason::Forbidden => "forbidden",
            RejectReason::TooManyVars => "too_many_vars",
            RejectReason::TooHeavy => "too_heavy",
            RejectReason::Subsumed => "subsumed",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(RejectReason),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CdFailure {
    /// The major premise is not an application of the detachment symbol.
    NotDetachable,
    NoUnifier(UnifyFailure),
}

/// From `major = i(a,b)` and `minor`, infers `σ(b)` where σ is the most general
/// unifier of `a` with a renamed-apart copy of `minor`. The result is canonical.
pub fn condensed_detachment(major: &Term, minor: &Term, detachment_symbol: &str) -> Result<Term, CdFailure> {
    let (antecedent, consequent) = match major {
        Term::App(f, args) if f == detachment_symbol && args.len() == 2 => (&args[0], &args[1]),
        _ => return Err(CdFailure::NotDetachable),
    };
    let minor = rename_apart(major, minor);
    let sigma = unify(antecedent, &minor).map_err(CdFailure::NoUnifier)?;
    Ok(consequent.substitute(&sigma).canonicalize())
}

/// `general` subsumes `specific` iff `specific` is an instance of `general`.
pub fn subsumes(general: &Clause, specific: &Clause) -> bool {
    match_term(&general.term, &specific.term).is_some()
}

/// A conclusion matches a hint when it subsumes the hint.
pub fn matches_hint(term: &Term, hint: &Hint) -> bool {
    match_term(term, &hint.term).is_some()
}

/// Retention decision for a derived conclusion. Checks run in a fixed order:
/// blocked, forbidden, variable count, weight.
pub fn passes_filters(term: &Term, filters: &FilterConfig, hints: &[Hint]) -> Verdict {
    if filters.blocked_lemmas.iter().any(|b| b.is_variant(term)) {
        return Verdict::Reject(RejectReason::Blocked);
    }
    if filters.forbidden_patterns.iter().any(|p| term.contains_pattern(p)) {
        return Verdict::Reject(RejectReason::Forbidden);
    }
    if filters.max_distinct_vars.is_some_and(|k| term.distinct_vars() > k) {
        return Verdict::Reject(RejectReason::TooManyVars);
    }
    if term.weight() > filters.max_weight
        && !(filters.hint_exempt_max_weight && hints.iter().any(|h| matches_hint(term, h)))
    {
        return Verdict::Reject(RejectReason::TooHeavy);
    }
    Verdict::Accept
}
