//! Proof objects, proof checking and the simplicity measures.
//!
//! The checker recomputes every condensed-detachment step with
//! [`crate::inference::condensed_detachment`], which works on plain terms and
//! shares no code with the search engine's internal representation.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::inference::{condensed_detachment, Justification};
use crate::search::{ground_goal, Resonator};
use crate::syntax::ProblemSpec;
use crate::term::{match_term, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub id: u32,
    pub term: Term,
    pub justification: Justification,
}

impl ProofStep {
    pub fn is_deduced(&self) -> bool {
        matches!(self.justification, Justification::Cd { .. })
    }
}

/// A closing line stating that goal `name` is matched by some step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalLine {
    pub id: u32,
    pub name: String,
}

/// A Hilbert-style derivation: numbered steps followed by goal lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub steps: Vec<ProofStep>,
    pub goals: Vec<GoalLine>,
}

impl Proof {
    pub fn length(&self) -> usize {
        self.deduced().count()
    }

    pub fn deduced(&self) -> impl Iterator<Item = &ProofStep> {
        self.steps.iter().filter(|s| s.is_deduced())
    }

    pub fn step(&self, id: u32) -> Option<&ProofStep> {
        self.steps.iter().find(|s| s.id == id)
    }

    /// Renumbers steps `1..=n` in their current order and goal lines after them.
    pub fn renumbered(&self) -> Proof {
        let map: HashMap<u32, u32> = self.steps.iter().enumerate().map(|(i, s)| (s.id, i as u32 + 1)).collect();
        let remap = |id: u32| map.get(&id).copied().unwrap_or(id);
        let steps = self
            .steps
            .iter()
            .map(|s| ProofStep {
                id: remap(s.id),
                term: s.term.clone(),
                justification: match &s.justification {
                    Justification::Cd { major, minor } => {
                        Justification::Cd { major: remap(*major), minor: remap(*minor) }
                    }
                    other => other.clone(),
                },
            })
            .collect::<Vec<_>>();
        let next = steps.len() as u32;
        let goals = self
            .goals
            .iter()
            .enumerate()
            .map(|(i, g)| GoalLine { id: next + 1 + i as u32, name: g.name.clone() })
            .collect();
        Proof { steps, goals }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvalidReason {
    /// Step or goal-line id not larger than the one before it.
    NonMonotoneId,
    DanglingParent(u32),
    /// Axiom line whose name is unknown or whose formula is not a variant of it.
    BadAxiom,
    /// Recomputed detachment fails or is not a variant of the recorded formula.
    CdMismatch,
    /// No step matches the grounded goal, or the goal is unknown.
    GoalMismatch,
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidReason::NonMonotoneId => f.write_str("non-monotone id"),
            InvalidReason::DanglingParent(p) => write!(f, "dangling parent {p}"),
            InvalidReason::BadAxiom => f.write_str("bad axiom"),
            InvalidReason::CdMismatch => f.write_str("cd mismatch"),
            InvalidReason::GoalMismatch => f.write_str("goal mismatch"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid { step: u32, reason: InvalidReason },
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Validity::Valid => f.write_str("valid"),
            Validity::Invalid { step, reason } => write!(f, "invalid step {step}: {reason}"),
        }
    }
}

/// Verifies a proof against a problem, reporting the first failing line.
pub fn check_proof(proof: &Proof, spec: &ProblemSpec) -> Validity {
    let invalid = |step, reason| Validity::Invalid { step, reason };
    let mut terms: HashMap<u32, &Term> = HashMap::new();
    let mut last: Option<u32> = None;
    for step in &proof.steps {
        if last.is_some_and(|prev| step.id <= prev) {
            return invalid(step.id, InvalidReason::NonMonotoneId);
        }
        last = Some(step.id);
        match &step.justification {
            Justification::Axiom(name) => match spec.axiom(name) {
                Some(ax) if ax.term.is_variant(&step.term) => {}
                _ => return invalid(step.id, InvalidReason::BadAxiom),
            },
            Justification::Cd { major, minor } => {
                let (Some(maj), Some(min)) = (terms.get(major), terms.get(minor)) else {
                    let missing = if terms.contains_key(major) { *minor } else { *major };
                    return invalid(step.id, InvalidReason::DanglingParent(missing));
                };
                match condensed_detachment(maj, min, &spec.detachment_symbol) {
                    Ok(c) if c.is_variant(&step.term) => {}
                    _ => return invalid(step.id, InvalidReason::CdMismatch),
                }
            }
        }
        terms.insert(step.id, &step.term);
    }
    if proof.goals.is_empty() {
        let id = last.map_or(1, |l| l + 1);
        return invalid(id, InvalidReason::GoalMismatch);
    }
    for goal in &proof.goals {
        if last.is_some_and(|prev| goal.id <= prev) {
            return invalid(goal.id, InvalidReason::NonMonotoneId);
        }
        last = Some(goal.id);
        let Some(target) = spec.goal(&goal.name) else {
            return invalid(goal.id, InvalidReason::GoalMismatch);
        };
        let grounded = ground_goal(&target.term);
        if !proof.steps.iter().any(|s| match_term(&s.term, &grounded).is_some()) {
            return invalid(goal.id, InvalidReason::GoalMismatch);
        }
    }
    Validity::Valid
}

/// The four simplicity measures, computed over deduced steps only.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Metrics {
    /// Number of condensed-detachment steps.
    pub length: usize,
    /// Largest number of distinct variables in one deduced step.
    pub richness: usize,
    /// Largest symbol count of one deduced step.
    pub complexity: usize,
    /// Total symbol count of all deduced steps.
    pub size: usize,
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "length={} richness={} complexity={} size={}", self.length, self.richness, self.complexity, self.size)
    }
}

pub fn proof_metrics(proof: &Proof) -> Metrics {
    proof.deduced().fold(Metrics::default(), |m, s| {
        let w = s.term.weight();
        Metrics {
            length: m.length + 1,
            richness: m.richness.max(s.term.distinct_vars()),
            complexity: m.complexity.max(w),
            size: m.size + w,
        }
    })
}

/// One resonator per distinct skeleton among the deduced steps, in proof order.
pub fn steps_as_resonators(proof: &Proof, value: u32) -> Vec<Resonator> {
    let mut seen = HashSet::new();
    proof
        .deduced()
        .map(|s| s.term.skeleton())
        .filter(|sk| seen.insert(sk.clone()))
        .map(|shape| Resonator { shape, value })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_problem, parse_proof};

    const LUK3: &str =
        "axioms:\nax1: i(i(x,y),i(i(y,z),i(x,z))).\nax2: i(i(n(x),x),x).\nax3: i(x,i(n(x),y)).\ngoals:\nid: i(x,x).\n";

    const A1_PROOF: &str = "\
problem: luk3
1 [axiom ax1] i(i(x,y),i(i(y,z),i(x,z))).
2 [axiom ax2] i(i(n(x),x),x).
3 [axiom ax3] i(x,i(n(x),y)).
4 [cd 1,3] i(i(i(n(x),y),z),i(x,z)).
5 [cd 4,2] i(x,x).
6 [goal id] matched.
";

    fn a1() -> (Proof, ProblemSpec) {
        (parse_proof(A1_PROOF).unwrap().proof, parse_problem(LUK3).unwrap())
    }

    #[test]
    fn accepts_the_two_step_proof() {
        let (p, spec) = a1();
        assert_eq!(check_proof(&p, &spec), Validity::Valid);
    }

    #[test]
    fn swapped_parents_are_a_cd_mismatch() {
        let (mut p, spec) = a1();
        p.steps[4].justification = Justification::Cd { major: 2, minor: 4 };
        assert_eq!(check_proof(&p, &spec), Validity::Invalid { step: 5, reason: InvalidReason::CdMismatch });
    }

    #[test]
    fn axiom_only_proof() {
        let spec = parse_problem("axioms:\nr: i(x,x).\ngoals:\ng: i(y,y).\n").unwrap();
        let p = Proof {
            steps: vec![ProofStep {
                id: 1,
                term: parse_formula("i(x,x)").unwrap(),
                justification: Justification::Axiom("r".into()),
            }],
            goals: vec![GoalLine { id: 2, name: "g".into() }],
        };
        assert!(check_proof(&p, &spec).is_valid());
        assert_eq!(proof_metrics(&p), Metrics::default());
    }

    #[test]
    fn first_failure_is_reported() {
        let (mut p, spec) = a1();
        p.steps[0].term = parse_formula("i(x,y)").unwrap();
        assert_eq!(check_proof(&p, &spec), Validity::Invalid { step: 1, reason: InvalidReason::BadAxiom });

        let (mut p, spec) = a1();
        p.steps[3].justification = Justification::Cd { major: 1, minor: 99 };
        assert_eq!(check_proof(&p, &spec), Validity::Invalid { step: 4, reason: InvalidReason::DanglingParent(99) });

        let (mut p, spec) = a1();
        p.goals[0].name = "nope".into();
        assert_eq!(check_proof(&p, &spec), Validity::Invalid { step: 6, reason: InvalidReason::GoalMismatch });

        let (mut p, spec) = a1();
        p.steps.truncate(4);
        p.goals[0].id = 5;
        assert_eq!(check_proof(&p, &spec), Validity::Invalid { step: 5, reason: InvalidReason::GoalMismatch });

        let (mut p, spec) = a1();
        p.steps[2].id = 2;
        assert_eq!(check_proof(&p, &spec), Validity::Invalid { step: 2, reason: InvalidReason::NonMonotoneId });
    }

    #[test]
    fn a1_metrics() {
        let (p, _) = a1();
        let m = proof_metrics(&p);
        assert_eq!(m, Metrics { length: 2, richness: 3, complexity: 10, size: 13 });
        assert_eq!(m.to_string(), "length=2 richness=3 complexity=10 size=13");
    }

    #[test]
    fn resonators_from_steps() {
        let (p, _) = a1();
        let rs = steps_as_resonators(&p, 2);
        assert_eq!(rs.len(), 2);
        assert_eq!(rs[0].shape.to_string(), "i(i(i(n(*),*),*),i(*,*))");
        assert_eq!(rs[1].shape.to_string(), "i(*,*)");
        assert!(rs.iter().all(|r| r.value == 2));

        let mut dup = p.clone();
        dup.steps.push(ProofStep {
            id: 6,
            term: parse_formula("i(y,z)").unwrap(),
            justification: Justification::Cd { major: 4, minor: 2 },
        });
        assert_eq!(steps_as_resonators(&dup, 1).len(), 2);

        let empty = Proof { steps: p.steps[..3].to_vec(), goals: vec![] };
        assert!(steps_as_resonators(&empty, 1).is_empty());
    }

    #[test]
    fn renumbering_keeps_references() {
        let (p, spec) = a1();
        let mut shifted = p.clone();
        for s in &mut shifted.steps {
            s.id += 10;
            if let Justification::Cd { major, minor } = &mut s.justification {
                *major += 10;
                *minor += 10;
            }
        }
        shifted.goals[0].id = 16;
        assert!(check_proof(&shifted, &spec).is_valid());
        assert_eq!(shifted.renumbered(), p);
        assert_eq!(proof_metrics(&shifted), proof_metrics(&p));
    }
}
