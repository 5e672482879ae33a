//! Given-clause saturation with condensed detachment.
//!
//! Axioms start in the set of support. Each round selects a given clause,
//! moves it to the usable list and pairs it with every usable clause in both
//! premise orders, itself included. Conclusions pass through the retention
//! filters and forward subsumption; survivors are kept, optionally
//! back-subsume older clauses, and are tested against every grounded goal.

mod flat;
mod index;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::inference::{matches_hint, Clause, Justification, RejectReason};
use crate::proofkit::{GoalLine, Proof, ProofStep};
use crate::syntax::ProblemSpec;
use crate::term::{Skeleton, Substitution, Term};

use flat::{is_var, skeleton_key, var_count, Code, Detached, Engine, Symbols, VAR_BASE};
use index::DiscTree;

/// A shape with an attached priority value; lower values are picked first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Resonator {
    pub shape: Skeleton,
    pub value: u32,
}

impl Resonator {
    pub fn new(term: &Term, value: u32) -> Self {
        Resonator { shape: term.skeleton(), value }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hint {
    pub term: Term,
}

impl Hint {
    pub fn new(term: &Term) -> Self {
        Hint { term: term.canonicalize() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyConfig {
    /// -1: always oldest first; 0: always best key; r > 0: r best-key picks, then one oldest.
    pub pick_given_ratio: i64,
    pub max_given: u64,
    /// Cap on live retained clauses (set of support plus usable).
    pub max_retained: u64,
    /// Keep searching after the first goal until every goal is proved.
    pub all_goals: bool,
    pub back_subsumption: bool,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            pick_given_ratio: 0,
            max_given: 100_000,
            max_retained: 1_000_000,
            all_goals: false,
            back_subsumption: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("no axioms")]
    NoAxioms,
    #[error("no goals")]
    NoGoals,
    #[error("symbol `{symbol}` used with arity {found}, earlier with arity {expected}")]
    ArityConflict { symbol: String, expected: usize, found: usize },
    #[error("detachment symbol `{symbol}` has arity {arity}, expected 2")]
    DetachmentArity { symbol: String, arity: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Replaces the variables of `goal` (in canonical order) by constants `g1, g2, ...`.
pub fn ground_goal(goal: &Term) -> Term {
    let bindings =
        goal.variables().into_iter().enumerate().map(|(k, v)| (v.to_string(), Term::constant(format!("g{}", k + 1))));
    goal.substitute(&Substitution::from_bindings(bindings))
}

/// Selection key: lower sorts first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PriorityKey {
    /// 0 hint, 1 resonator, 2 plain.
    pub class: u8,
    pub value: u64,
    pub id: u32,
}

impl fmt::Display for PriorityKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.class, self.value, self.id)
    }
}

pub fn priority(clause: &Clause, resonators: &[Resonator], hints: &[Hint]) -> PriorityKey {
    let id = clause.id;
    if hints.iter().any(|h| matches_hint(&clause.term, h)) {
        return PriorityKey { class: 0, value: 0, id };
    }
    let shape = clause.term.skeleton();
    match resonators.iter().filter(|r| r.shape == shape).map(|r| r.value).min() {
        Some(v) => PriorityKey { class: 1, value: v as u64, id },
        None => PriorityKey { class: 2, value: clause.weight as u64, id },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Selection {
    Fifo,
    Priority,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    Given { id: u32, mode: Selection },
    Kept { id: u32, key: PriorityKey, formula: String },
    Rejected(RejectReason),
    Goal { name: String, id: u32 },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Given { id, .. } => write!(f, "given {id}"),
            TraceEvent::Kept { id, key, formula } => write!(f, "kept {id} {key} {formula}"),
            TraceEvent::Rejected(r) => write!(f, "rejected {r}"),
            TraceEvent::Goal { name, id } => write!(f, "goal {name} by {id}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Limit {
    MaxGiven,
    MaxRetained,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    ProofFound,
    SosExhausted,
    LimitReached(Limit),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::ProofFound => "proof_found",
            Outcome::SosExhausted => "sos_exhausted",
            Outcome::LimitReached(Limit::MaxGiven) => "max_given",
            Outcome::LimitReached(Limit::MaxRetained) => "max_retained",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Stats {
    /// Conclusions produced by detachment (axioms excluded).
    pub generated: u64,
    pub kept: u64,
    pub axioms: u64,
    pub given: u64,
    pub back_subsumed: u64,
    rejected: [u64; 5],
}

impl Stats {
    pub fn rejected(&self, reason: RejectReason) -> u64 {
        self.rejected[reason as usize]
    }

    pub fn total_rejected(&self) -> u64 {
        self.rejected.iter().sum()
    }
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "given={} generated={} kept={}", self.given, self.generated, self.kept)?;
        for r in RejectReason::ALL {
            write!(f, " {}={}", r.as_str(), self.rejected(r))?;
        }
        write!(f, " back_subsumed={} axioms={}", self.back_subsumed, self.axioms)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub outcome: Outcome,
    /// One proof per goal reached, in the order the goals were reached.
    pub proofs: Vec<Proof>,
    /// All reached goals in one derivation, if any goal was reached.
    pub combined: Option<Proof>,
    pub stats: Stats,
    pub trace: Vec<TraceEvent>,
}

impl SearchResult {
    pub fn proof(&self) -> Option<&Proof> {
        self.proofs.first()
    }

    pub fn proof_of(&self, goal: &str) -> Option<&Proof> {
        self.proofs.iter().find(|p| p.goals.iter().any(|g| g.name == goal))
    }

    pub fn trace_text(&self) -> String {
        self.trace.iter().map(|e| format!("{e}\n")).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Place {
    Sos,
    Usable,
    Deleted,
}

#[derive(Debug, Clone)]
struct Record {
    term: Vec<Code>,
    justification: Justification,
    key: PriorityKey,
    place: Place,
}

struct GoalSlot {
    name: String,
    grounded: Vec<Code>,
    hit: Option<u32>,
}

/// The state of one saturation run.
pub struct Search {
    syms: Symbols,
    detach: Option<Code>,
    strategy: StrategyConfig,
    max_weight: usize,
    /// Length beyond which a conclusion is certainly rejected as too heavy,
    /// so it need not be built in full.
    heavy_cut: usize,
    max_vars: Option<usize>,
    hint_exempt: bool,
    records: Vec<Record>,
    sos_fifo: BTreeSet<u32>,
    sos_best: BTreeSet<PriorityKey>,
    usable: Vec<u32>,
    live: u64,
    tree: DiscTree,
    blocked: HashSet<Vec<Code>>,
    forbidden: Vec<Vec<Code>>,
    hints: Vec<Vec<Code>>,
    resonators: HashMap<Vec<Code>, u32>,
    goals: Vec<GoalSlot>,
    hits: Vec<usize>,
    engine: Engine,
    candidates: Vec<u32>,
    selections: u64,
    stats: Stats,
    trace: Option<Vec<TraceEvent>>,
    finished: Option<Outcome>,
}

impl Search {
    /// Validates `spec` and loads its axioms into the set of support.
    pub fn new(spec: &ProblemSpec) -> Result<Search, SpecError> {
        if spec.axioms.is_empty() {
            return Err(SpecError::NoAxioms);
        }
        if spec.goals.is_empty() {
            return Err(SpecError::NoGoals);
        }
        let strategy = spec.strategy.clone();
        if strategy.pick_given_ratio < -1 {
            return Err(SpecError::InvalidParameter(format!("pick_given_ratio = {}", strategy.pick_given_ratio)));
        }
        if spec.filters.max_weight == 0 {
            return Err(SpecError::InvalidParameter("max_weight = 0".into()));
        }
        if strategy.max_retained == 0 {
            return Err(SpecError::InvalidParameter("max_retained = 0".into()));
        }
        let mut syms = Symbols::default();
        let axioms = spec.axioms.iter().map(|a| syms.encode(&a.term)).collect::<Result<Vec<_>, _>>()?;
        let goal_terms = spec.goals.iter().map(|g| syms.encode(&g.term)).collect::<Result<Vec<_>, _>>()?;
        let hints = spec.hints.iter().map(|h| syms.encode(&h.term)).collect::<Result<Vec<_>, _>>()?;
        let forbidden =
            spec.filters.forbidden_patterns.iter().map(|p| syms.encode(p)).collect::<Result<Vec<_>, _>>()?;
        let blocked = spec.filters.blocked_lemmas.iter().map(|b| syms.encode(b)).collect::<Result<HashSet<_>, _>>()?;
        let mut resonators: HashMap<Vec<Code>, u32> = HashMap::new();
        for r in &spec.resonators {
            let key = skeleton_key(&syms.encode(&r.shape.to_pattern())?);
            let v = resonators.entry(key).or_insert(r.value);
            *v = (*v).min(r.value);
        }
        let detach = match syms.lookup(&spec.detachment_symbol) {
            Some((c, 2)) => Some(c),
            Some((_, arity)) => {
                return Err(SpecError::DetachmentArity { symbol: spec.detachment_symbol.clone(), arity })
            }
            None => None,
        };

        let mut constants: Vec<Code> = Vec::new();
        let goals = spec
            .goals
            .iter()
            .zip(goal_terms)
            .map(|(g, t)| {
                let grounded = t
                    .iter()
                    .map(|&c| {
                        if !is_var(c) {
                            return c;
                        }
                        let k = (c - VAR_BASE) as usize;
                        while constants.len() <= k {
                            let name = format!("g{}", constants.len() + 1);
                            constants.push(syms.fresh(&name, 0));
                        }
                        constants[k]
                    })
                    .collect();
                GoalSlot { name: g.name.clone(), grounded, hit: None }
            })
            .collect();

        let mut search = Search {
            syms,
            detach,
            strategy,
            max_weight: spec.filters.max_weight,
            heavy_cut: usize::MAX,
            max_vars: spec.filters.max_distinct_vars,
            hint_exempt: spec.filters.hint_exempt_max_weight,
            records: Vec::new(),
            sos_fifo: BTreeSet::new(),
            sos_best: BTreeSet::new(),
            usable: Vec::new(),
            live: 0,
            tree: DiscTree::default(),
            blocked,
            forbidden,
            hints,
            resonators,
            goals,
            hits: Vec::new(),
            engine: Engine::default(),
            candidates: Vec::new(),
            selections: 0,
            stats: Stats::default(),
            trace: None,
            finished: None,
        };
        let exemptible = search.hint_exempt && !search.hints.is_empty();
        if search.forbidden.is_empty() && search.max_vars.is_none() && !exemptible {
            // a long conclusion could still be a variant of a long blocked lemma
            if search.blocked.iter().all(|b| b.len() <= search.max_weight) {
                search.heavy_cut = search.max_weight + 1;
            }
        }
        for (a, term) in spec.axioms.iter().zip(axioms) {
            search.stats.axioms += 1;
            let id = search.insert(term, Justification::Axiom(a.name.clone()));
            search.check_goals(id);
        }
        if search.goals_done() {
            search.finished = Some(Outcome::ProofFound);
        }
        Ok(search)
    }

    /// Turns on event recording. Events from axiom loading are not replayed.
    pub fn with_trace(mut self) -> Self {
        self.trace.get_or_insert_with(Vec::new);
        self
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn trace(&self) -> &[TraceEvent] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.finished
    }

    pub fn clause(&self, id: u32) -> Option<Clause> {
        let r = self.records.get(id.checked_sub(1)? as usize)?;
        Some(Clause::new(id, &self.syms.decode(&r.term), r.justification.clone(), id))
    }

    pub fn sos(&self) -> Vec<u32> {
        self.sos_fifo.iter().copied().collect()
    }

    pub fn usable(&self) -> Vec<u32> {
        self.usable.iter().copied().filter(|&id| self.record(id).place == Place::Usable).collect()
    }

    /// Live clauses, by id.
    pub fn retained(&self) -> Vec<Clause> {
        (1..=self.records.len() as u32)
            .filter(|&id| self.record(id).place != Place::Deleted)
            .filter_map(|id| self.clause(id))
            .collect()
    }

    fn record(&self, id: u32) -> &Record {
        &self.records[id as usize - 1]
    }

    fn emit(&mut self, event: impl FnOnce() -> TraceEvent) {
        if let Some(t) = &mut self.trace {
            t.push(event());
        }
    }

    fn key_for(&mut self, term: &[Code], id: u32) -> PriorityKey {
        for h in &self.hints {
            if self.engine.matches(&self.syms, term, h) {
                return PriorityKey { class: 0, value: 0, id };
            }
        }
        if !self.resonators.is_empty() {
            if let Some(&v) = self.resonators.get(&skeleton_key(term)) {
                return PriorityKey { class: 1, value: v as u64, id };
            }
        }
        PriorityKey { class: 2, value: term.len() as u64, id }
    }

    fn insert(&mut self, term: Vec<Code>, justification: Justification) -> u32 {
        let id = self.records.len() as u32 + 1;
        let key = self.key_for(&term, id);
        self.tree.insert(&self.syms, &term, id);
        self.records.push(Record { term, justification, key, place: Place::Sos });
        self.sos_fifo.insert(id);
        self.sos_best.insert(key);
        self.live += 1;
        id
    }

    fn delete(&mut self, id: u32) {
        let r = &mut self.records[id as usize - 1];
        if r.place == Place::Sos {
            self.sos_fifo.remove(&id);
            self.sos_best.remove(&r.key);
        }
        r.place = Place::Deleted;
        self.tree.remove(&self.records[id as usize - 1].term, id);
        self.live -= 1;
    }

    fn goals_done(&self) -> bool {
        if self.strategy.all_goals {
            self.goals.iter().all(|g| g.hit.is_some())
        } else {
            !self.hits.is_empty()
        }
    }

    fn check_goals(&mut self, id: u32) {
        for g in 0..self.goals.len() {
            if self.goals[g].hit.is_some() {
                continue;
            }
            let term = &self.records[id as usize - 1].term;
            if self.engine.matches(&self.syms, term, &self.goals[g].grounded) {
                self.goals[g].hit = Some(id);
                self.hits.push(g);
                let name = self.goals[g].name.clone();
                self.emit(|| TraceEvent::Goal { name, id });
            }
        }
    }

    /// Picks the next given clause per the ratio schedule and moves it to the
    /// usable list. Returns `None` when the set of support is empty.
    pub fn select_given(&mut self) -> Option<Clause> {
        let r = self.strategy.pick_given_ratio;
        let fifo = r == -1 || (r > 0 && self.selections % (r as u64 + 1) == r as u64);
        let id = if fifo { *self.sos_fifo.first()? } else { self.sos_best.first()?.id };
        let mode = if fifo { Selection::Fifo } else { Selection::Priority };
        let key = self.record(id).key;
        self.sos_fifo.remove(&id);
        self.sos_best.remove(&key);
        self.records[id as usize - 1].place = Place::Usable;
        self.usable.push(id);
        self.selections += 1;
        self.stats.given += 1;
        self.emit(|| TraceEvent::Given { id, mode });
        self.clause(id)
    }

    /// Runs one given-clause round. Returns the outcome once the run is over.
    pub fn step(&mut self) -> Option<Outcome> {
        if self.finished.is_some() {
            return self.finished;
        }
        if self.sos_fifo.is_empty() {
            self.finished = Some(Outcome::SosExhausted);
            return self.finished;
        }
        if self.stats.given >= self.strategy.max_given {
            self.finished = Some(Outcome::LimitReached(Limit::MaxGiven));
            return self.finished;
        }
        let given = self.select_given().expect("non-empty set of support").id;
        let detach = self.detach?;
        let rounds = self.usable.len();
        for i in 0..rounds {
            let u = self.usable[i];
            if self.record(u).place == Place::Deleted || self.record(given).place == Place::Deleted {
                continue;
            }
            self.conclude(detach, given, u);
            if self.finished.is_none() && u != given && self.record(u).place != Place::Deleted {
                self.conclude(detach, u, given);
            }
            if self.finished.is_some() {
                break;
            }
        }
        if self.usable.len() > 2 * self.live as usize + 64 {
            let records = &self.records;
            self.usable.retain(|&id| records[id as usize - 1].place == Place::Usable);
        }
        self.finished
    }

    fn conclude(&mut self, detach: Code, major: u32, minor: u32) {
        let done = {
            let (a, b) = (&self.records[major as usize - 1].term, &self.records[minor as usize - 1].term);
            self.engine.detach(&self.syms, detach, a, b, self.heavy_cut)
        };
        match done {
            Detached::Fail => return,
            Detached::TooLong => {
                self.stats.generated += 1;
                self.reject(RejectReason::TooHeavy);
                return;
            }
            Detached::Done => {}
        }
        self.stats.generated += 1;
        let term = std::mem::take(&mut self.engine.out);
        if let Some(reason) = self.filter(&term) {
            self.reject(reason);
            self.engine.out = term;
            return;
        }
        self.candidates.clear();
        self.tree.generalizations(&self.syms, &term, &mut self.candidates);
        let candidates = std::mem::take(&mut self.candidates);
        let subsumed =
            candidates.iter().any(|&c| self.engine.matches(&self.syms, &self.records[c as usize - 1].term, &term));
        self.candidates = candidates;
        if subsumed {
            self.reject(RejectReason::Subsumed);
            self.engine.out = term;
            return;
        }

        let mut victims = Vec::new();
        if self.strategy.back_subsumption {
            self.candidates.clear();
            self.tree.instances(&term, &mut self.candidates);
            for &c in &self.candidates {
                if self.engine.matches(&self.syms, &term, &self.records[c as usize - 1].term) {
                    victims.push(c);
                }
            }
            victims.sort_unstable();
        }
        let id = self.insert(term, Justification::Cd { major, minor });
        self.stats.kept += 1;
        if self.trace.is_some() {
            let key = self.record(id).key;
            let formula = self.syms.decode(&self.record(id).term).to_string();
            self.emit(|| TraceEvent::Kept { id, key, formula });
        }
        for v in victims {
            self.delete(v);
            self.stats.back_subsumed += 1;
        }
        self.check_goals(id);
        if self.goals_done() {
            self.finished = Some(Outcome::ProofFound);
        } else if self.live >= self.strategy.max_retained {
            self.finished = Some(Outcome::LimitReached(Limit::MaxRetained));
        }
    }

    fn filter(&mut self, term: &[Code]) -> Option<RejectReason> {
        if self.blocked.contains(term) {
            return Some(RejectReason::Blocked);
        }
        for p in &self.forbidden {
            if self.engine.contains_instance(&self.syms, p, term) {
                return Some(RejectReason::Forbidden);
            }
        }
        if self.max_vars.is_some_and(|k| var_count(term) > k) {
            return Some(RejectReason::TooManyVars);
        }
        if term.len() > self.max_weight {
            let exempt = self.hint_exempt && self.hints.iter().any(|h| self.engine.matches(&self.syms, term, h));
            if !exempt {
                return Some(RejectReason::TooHeavy);
            }
        }
        None
    }

    fn reject(&mut self, reason: RejectReason) {
        self.stats.rejected[reason as usize] += 1;
        self.emit(|| TraceEvent::Rejected(reason));
    }

    /// Runs until a goal condition, exhaustion or a limit ends the search.
    pub fn run(&mut self) -> Outcome {
        loop {
            if let Some(o) = self.step() {
                return o;
            }
        }
    }

    /// Ancestor-closed derivation of the given clauses, renumbered from 1,
    /// with one goal line per `(goal name, clause id)` pair.
    pub fn extract_proof(&self, hits: &[(String, u32)]) -> Proof {
        let mut keep = BTreeSet::new();
        let mut stack: Vec<u32> = hits.iter().map(|h| h.1).collect();
        while let Some(id) = stack.pop() {
            if keep.insert(id) {
                if let Justification::Cd { major, minor } = self.record(id).justification {
                    stack.push(major);
                    stack.push(minor);
                }
            }
        }
        let steps = keep
            .iter()
            .map(|&id| {
                let r = self.record(id);
                ProofStep { id, term: self.syms.decode(&r.term), justification: r.justification.clone() }
            })
            .collect::<Vec<_>>();
        let last = steps.last().map_or(0, |s| s.id);
        let goals = hits
            .iter()
            .enumerate()
            .map(|(i, (name, _))| GoalLine { id: last + 1 + i as u32, name: name.clone() })
            .collect();
        Proof { steps, goals }.renumbered()
    }

    /// Goals reached so far, in order, with the clause that reached each.
    pub fn goal_hits(&self) -> Vec<(String, u32)> {
        self.hits.iter().map(|&g| (self.goals[g].name.clone(), self.goals[g].hit.expect("recorded hit"))).collect()
    }

    pub fn into_result(self) -> SearchResult {
        let hits = self.goal_hits();
        let proofs = hits.iter().map(|h| self.extract_proof(std::slice::from_ref(h))).collect();
        let combined = (!hits.is_empty()).then(|| self.extract_proof(&hits));
        SearchResult {
            outcome: self.finished.unwrap_or(Outcome::SosExhausted),
            proofs,
            combined,
            stats: self.stats,
            trace: self.trace.unwrap_or_default(),
        }
    }
}

/// Runs a complete search on `spec`.
pub fn saturate(spec: &ProblemSpec) -> Result<SearchResult, SpecError> {
    let mut s = Search::new(spec)?;
    s.run();
    Ok(s.into_result())
}

/// Like [`saturate`], recording the event trace.
pub fn saturate_traced(spec: &ProblemSpec) -> Result<SearchResult, SpecError> {
    let mut s = Search::new(spec)?.with_trace();
    s.run();
    Ok(s.into_result())
}
