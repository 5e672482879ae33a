//! Multi-run methods built on [`saturate`]: temporary lemma adjunction,
//! cramming, step blocking, parameter sweeps and axiom dependence checks.
//!
//! Runs that do not depend on each other execute on the rayon pool; reports
//! always come back in plan order.

mod plan;

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::inference::Justification;
use crate::proofkit::{check_proof, proof_metrics, steps_as_resonators, GoalLine, Metrics, Proof, ProofStep, Validity};
use crate::search::{saturate, Outcome, Resonator, SearchResult, SpecError, Stats};
use crate::syntax::{Named, ParamError, ProblemSpec};
use crate::term::Term;

pub use plan::{parse_plan, PlanFile, PlanKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    /// Prove pool lemmas alongside the goals, adjoining each proved lemma as an
    /// axiom (and its steps as resonators) for the next round.
    LemmaAdjunction { pool: Vec<Term>, resonator_value: u32, max_rounds: usize },
    /// Reuse the steps of `donor` to reach the remaining goals in few steps.
    Cram { donor: Proof, max_weight: Option<usize> },
    /// Rerun with each deduced step of `reference` blocked in turn.
    BlockSteps { reference: Proof, resonator_value: u32 },
    /// One run per combination of parameter values.
    Sweep { grid: Vec<(String, Vec<String>)> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampaignPlan {
    pub base: ProblemSpec,
    pub mode: Mode,
    /// Given-clause limit for each run.
    pub budget: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CampaignError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("parameter `{key}`: {error}")]
    Param { key: String, error: ParamError },
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("plan needs a proof")]
    MissingProof,
    #[error("supplied proof is not valid for the problem: {0}")]
    InvalidProof(Validity),
    #[error("goal `{0}` not reached")]
    GoalUnreached(String),
    #[error("spliced proof failed verification: {0}")]
    SpliceInvalid(Validity),
}

/// Summary of one run of a campaign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub run: usize,
    /// What distinguishes this run from the base problem, e.g. `max_weight=10` or `block=4`.
    pub delta: String,
    pub outcome: Outcome,
    /// Whether every goal of the run was reached.
    pub proved: bool,
    pub stats: Stats,
    pub proof: Option<Proof>,
    pub metrics: Option<Metrics>,
}

impl RunReport {
    fn new(run: usize, delta: String, spec: &ProblemSpec, result: SearchResult) -> Self {
        let proved = result.proofs.len() == spec.goals.len();
        let metrics = result.combined.as_ref().map(proof_metrics);
        RunReport { run, delta, outcome: result.outcome, proved, stats: result.stats, proof: result.combined, metrics }
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "run {} {} {}", self.run, self.delta, self.outcome)?;
        match &self.metrics {
            Some(m) => write!(f, " len={} rich={} cplx={} size={}", m.length, m.richness, m.complexity, m.size),
            None => f.write_str(" len=- rich=- cplx=- size=-"),
        }
    }
}

fn with_budget(spec: &ProblemSpec, budget: u64) -> ProblemSpec {
    let mut s = spec.clone();
    s.strategy.max_given = budget;
    s
}

fn merge_resonators(into: &mut Vec<Resonator>, extra: impl IntoIterator<Item = Resonator>) {
    for r in extra {
        match into.iter_mut().find(|q| q.shape == r.shape) {
            Some(q) => q.value = q.value.min(r.value),
            None => into.push(r),
        }
    }
}

fn lemma_name(k: usize) -> String {
    format!("lemma_{}", k + 1)
}

/// Runs a plan of any mode.
pub fn run_plan(plan: &CampaignPlan) -> Result<CampaignResult, CampaignError> {
    match &plan.mode {
        Mode::LemmaAdjunction { pool, resonator_value, max_rounds } => {
            let reports = lemma_adjunction(&plan.base, pool, *resonator_value, *max_rounds, plan.budget)?;
            let best = reports.last().and_then(|r| r.proof.clone());
            Ok(CampaignResult { reports, best })
        }
        Mode::Cram { donor, max_weight } => {
            let proof = cram(&plan.base, donor, *max_weight, plan.budget)?;
            Ok(CampaignResult { reports: Vec::new(), best: Some(proof) })
        }
        Mode::BlockSteps { reference, resonator_value } => {
            let out = block_steps_loop(&plan.base, reference, *resonator_value, plan.budget)?;
            Ok(CampaignResult { reports: out.reports, best: Some(out.best) })
        }
        Mode::Sweep { grid } => {
            let reports = sweep(&plan.base, grid, plan.budget)?;
            let best = reports.first().filter(|r| r.proved).and_then(|r| r.proof.clone());
            Ok(CampaignResult { reports, best })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampaignResult {
    pub reports: Vec<RunReport>,
    /// The proof the campaign settles on, if any.
    pub best: Option<Proof>,
}

/// Temporary lemma adjunction. Each round targets the unproved lemmas plus the
/// original goals; proved lemmas become axioms of the following rounds and
/// their proof steps become resonators. The last report is the purged run:
/// original axioms, every accumulated resonator, original goals.
pub fn lemma_adjunction(
    base: &ProblemSpec,
    pool: &[Term],
    resonator_value: u32,
    max_rounds: usize,
    budget: u64,
) -> Result<Vec<RunReport>, CampaignError> {
    if budget == 0 {
        return Err(CampaignError::ZeroBudget);
    }
    let mut reports = Vec::new();
    let mut axioms = base.axioms.clone();
    let mut resonators = base.resonators.clone();
    let mut pending: Vec<usize> = (0..pool.len()).collect();
    let mut round = 0;
    while !pending.is_empty() && round < max_rounds {
        round += 1;
        let mut spec = with_budget(base, budget);
        spec.axioms = axioms.clone();
        spec.resonators = resonators.clone();
        spec.goals = pending.iter().map(|&k| Named::new(lemma_name(k), pool[k].clone())).collect();
        spec.goals.extend(base.goals.iter().cloned());
        spec.strategy.all_goals = true;
        let result = saturate(&spec)?;
        let original_done = base.goals.iter().all(|g| result.proof_of(&g.name).is_some());
        let mut progressed = false;
        pending.retain(|&k| match result.proof_of(&lemma_name(k)) {
            Some(p) => {
                axioms.push(Named::new(lemma_name(k), pool[k].clone()));
                merge_resonators(&mut resonators, steps_as_resonators(p, resonator_value));
                progressed = true;
                false
            }
            None => true,
        });
        reports.push(RunReport::new(reports.len() + 1, format!("round={round}"), &spec, result));
        if original_done || !progressed {
            break;
        }
    }
    let mut purged = with_budget(base, budget);
    purged.resonators = resonators;
    let result = saturate(&purged)?;
    reports.push(RunReport::new(reports.len() + 1, "purged".to_string(), &purged, result));
    Ok(reports)
}

fn donor_name(id: u32) -> String {
    format!("donor_{id}")
}

/// Cramming: the deduced steps of `donor` join the axioms, the goals it does
/// not cover become the targets and hints, and a breadth-first search under a
/// tight weight cap looks for short completions. The result splices donor and
/// completions into one proof, verified against `base`.
pub fn cram(base: &ProblemSpec, donor: &Proof, max_weight: Option<usize>, budget: u64) -> Result<Proof, CampaignError> {
    let valid = check_proof(donor, base);
    if !valid.is_valid() {
        return Err(CampaignError::InvalidProof(valid));
    }
    let covered: Vec<&str> = donor.goals.iter().map(|g| g.name.as_str()).collect();
    let remaining: Vec<Named> = base.goals.iter().filter(|g| !covered.contains(&g.name.as_str())).cloned().collect();
    if remaining.is_empty() {
        return Ok(donor.renumbered());
    }
    let mut spec = with_budget(base, budget);
    spec.axioms.extend(donor.deduced().map(|s| Named::new(donor_name(s.id), s.term.clone())));
    spec.hints.extend(remaining.iter().map(|g| crate::search::Hint::new(&g.term)));
    spec.filters.max_weight =
        max_weight.unwrap_or_else(|| remaining.iter().map(|g| g.term.weight()).max().unwrap_or(1));
    spec.strategy.pick_given_ratio = -1;
    spec.strategy.all_goals = true;
    spec.goals = remaining;
    let result = saturate(&spec)?;
    if let Some(g) = spec.goals.iter().find(|g| result.proof_of(&g.name).is_none()) {
        return Err(CampaignError::GoalUnreached(g.name.clone()));
    }
    let found = result.combined.expect("every goal reached");
    let proof = splice(donor, &found);
    match check_proof(&proof, base) {
        Validity::Valid => Ok(proof),
        invalid => Err(CampaignError::SpliceInvalid(invalid)),
    }
}

/// Appends the steps of `found` to `donor`, resolving `found`'s axiom lines to
/// the donor lines they stand for.
fn splice(donor: &Proof, found: &Proof) -> Proof {
    let mut steps: Vec<ProofStep> = donor.steps.clone();
    let mut next = steps.last().map_or(0, |s| s.id);
    let mut map = std::collections::HashMap::new();
    for s in &found.steps {
        let existing = match &s.justification {
            Justification::Axiom(name) => match name.strip_prefix("donor_").and_then(|id| id.parse::<u32>().ok()) {
                Some(id) if donor.step(id).is_some_and(|d| d.is_deduced()) => Some(id),
                _ => donor.steps.iter().find(|d| d.justification == s.justification).map(|d| d.id),
            },
            Justification::Cd { .. } => None,
        };
        let id = match existing {
            Some(id) => id,
            None => {
                next += 1;
                let justification = match &s.justification {
                    Justification::Cd { major, minor } => Justification::Cd { major: map[major], minor: map[minor] },
                    other => other.clone(),
                };
                steps.push(ProofStep { id: next, term: s.term.clone(), justification });
                next
            }
        };
        map.insert(s.id, id);
    }
    let goals = donor.goals.iter().chain(&found.goals).map(|g| GoalLine { id: 0, name: g.name.clone() }).collect();
    Proof { steps, goals }.renumbered()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockOutcome {
    pub best: Proof,
    pub metrics: Metrics,
    /// `None` when the reference was kept, else the index into `reports`.
    pub improved_by: Option<usize>,
    pub reports: Vec<RunReport>,
}

/// Reruns `base` once per deduced step of `reference` with that step blocked,
/// the reference's step shapes as resonators, and `budget` given clauses.
/// Returns the best valid proof of the reference's goals by (length, size,
/// run order); the reference itself wins ties.
pub fn block_steps_loop(
    base: &ProblemSpec,
    reference: &Proof,
    resonator_value: u32,
    budget: u64,
) -> Result<BlockOutcome, CampaignError> {
    let valid = check_proof(reference, base);
    if !valid.is_valid() {
        return Err(CampaignError::InvalidProof(valid));
    }
    let ref_metrics = proof_metrics(reference);
    let keep_reference =
        |reports| BlockOutcome { best: reference.clone(), metrics: ref_metrics, improved_by: None, reports };
    if budget == 0 {
        return Ok(keep_reference(Vec::new()));
    }
    let mut run_base = with_budget(base, budget);
    run_base.goals.retain(|g| reference.goals.iter().any(|r| r.name == g.name));
    run_base.strategy.all_goals = run_base.goals.len() > 1;
    merge_resonators(&mut run_base.resonators, steps_as_resonators(reference, resonator_value));
    let specs: Vec<(String, ProblemSpec)> = reference
        .deduced()
        .map(|s| {
            let mut spec = run_base.clone();
            spec.filters.blocked_lemmas.push(s.term.canonicalize());
            (format!("block={}", s.id), spec)
        })
        .collect();
    let results = specs.par_iter().map(|(_, spec)| saturate(spec)).collect::<Result<Vec<_>, _>>()?;
    let reports: Vec<RunReport> = specs
        .iter()
        .zip(results)
        .enumerate()
        .map(|(i, ((delta, spec), r))| RunReport::new(i + 1, delta.clone(), spec, r))
        .collect();
    let mut best: Option<(usize, Metrics)> = None;
    for (i, r) in reports.iter().enumerate() {
        let (Some(p), Some(m)) = (&r.proof, r.metrics) else { continue };
        if !r.proved || !check_proof(p, base).is_valid() {
            continue;
        }
        let better =
            (m.length, m.size) < best.map_or((ref_metrics.length, ref_metrics.size), |b| (b.1.length, b.1.size));
        if better {
            best = Some((i, m));
        }
    }
    Ok(match best {
        Some((i, metrics)) => BlockOutcome {
            best: reports[i].proof.clone().expect("checked above"),
            metrics,
            improved_by: Some(i),
            reports,
        },
        None => keep_reference(reports),
    })
}

/// Enumerates the grid with keys sorted and values in listed order, one run
/// per combination. All combinations are validated before any run starts.
/// Reports come back ordered by (proved first, length, size), stable.
pub fn sweep(base: &ProblemSpec, grid: &[(String, Vec<String>)], budget: u64) -> Result<Vec<RunReport>, CampaignError> {
    if grid.is_empty() || grid.iter().any(|(_, vs)| vs.is_empty()) {
        return Err(CampaignError::EmptyGrid);
    }
    if budget == 0 {
        return Err(CampaignError::ZeroBudget);
    }
    let mut keys: Vec<&(String, Vec<String>)> = grid.iter().collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0));
    let mut combos: Vec<Vec<(&str, &str)>> = vec![Vec::new()];
    for (key, values) in &keys {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                values.iter().map(move |v| {
                    let mut c = c.clone();
                    c.push((key.as_str(), v.as_str()));
                    c
                })
            })
            .collect();
    }
    let specs = combos
        .iter()
        .map(|combo| {
            let mut spec = with_budget(base, budget);
            for (k, v) in combo {
                spec.set_param(k, v).map_err(|error| CampaignError::Param { key: k.to_string(), error })?;
            }
            crate::search::Search::new(&spec)?;
            let delta = combo.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",");
            Ok((delta, spec))
        })
        .collect::<Result<Vec<_>, CampaignError>>()?;
    let results = specs.par_iter().map(|(_, spec)| saturate(spec)).collect::<Result<Vec<_>, _>>()?;
    let mut reports: Vec<RunReport> = specs
        .iter()
        .zip(results)
        .enumerate()
        .map(|(i, ((delta, spec), r))| RunReport::new(i + 1, delta.clone(), spec, r))
        .collect();
    reports.sort_by_key(|r| {
        let m = r.metrics.unwrap_or_default();
        (!r.proved, if r.proved { m.length } else { 0 }, if r.proved { m.size } else { 0 })
    });
    Ok(reports)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Dependence {
    /// Derived from the other members.
    Dependent(Proof),
    /// Nothing found; says nothing about independence.
    NoProofWithinBudget(Outcome),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependenceReport {
    pub name: String,
    pub verdict: Dependence,
    pub stats: Stats,
}

impl fmt::Display for DependenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.verdict {
            Dependence::Dependent(p) => write!(f, "{} dependent length={}", self.name, p.length()),
            Dependence::NoProofWithinBudget(o) => {
                write!(f, "{} no proof within budget ({o}, given={})", self.name, self.stats.given)
            }
        }
    }
}

/// Tries to derive each member of `system` from the others, using the
/// filters and strategy of `settings` and `budget` given clauses per run.
pub fn axiom_dependence(
    settings: &ProblemSpec,
    system: &[Named],
    budget: u64,
) -> Result<Vec<DependenceReport>, CampaignError> {
    if budget == 0 {
        return Err(CampaignError::ZeroBudget);
    }
    let specs: Vec<ProblemSpec> = (0..system.len())
        .map(|k| {
            let mut spec = with_budget(settings, budget);
            spec.axioms = system.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, n)| n.clone()).collect();
            spec.goals = vec![system[k].clone()];
            spec.strategy.all_goals = false;
            spec
        })
        .collect();
    let results = specs.par_iter().map(saturate).collect::<Result<Vec<_>, _>>()?;
    Ok(system
        .iter()
        .zip(results)
        .map(|(member, r)| DependenceReport {
            name: member.name.clone(),
            verdict: match r.proofs.into_iter().next() {
                Some(p) => Dependence::Dependent(p),
                None => Dependence::NoProofWithinBudget(r.outcome),
            },
            stats: r.stats,
        })
        .collect())
}
