//! Plan files.
//!
//! ```text
//! mode = sweep
//! budget = 5000
//! grid:
//! max_weight = 10, 20
//! pick_given_ratio = 0, 4
//! ```
//!
//! Settings come first as `key = value` lines. Adjunction plans list their
//! lemma pool under `lemmas:`, one formula per line; sweeps list parameter
//! values under `grid:`. Proofs for `cram` and `block` plans are supplied
//! separately.

use std::collections::HashSet;

use super::{CampaignError, CampaignPlan, Mode};
use crate::error::ParseError;
use crate::proofkit::Proof;
use crate::syntax::problem::{entry_formula, strip_comment};
use crate::syntax::{ProblemSpec, Signature, PARAMETERS};
use crate::term::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanKind {
    Adjoin,
    Cram,
    Block,
    Sweep,
}

impl PlanKind {
    fn parse(s: &str) -> Option<PlanKind> {
        Some(match s {
            "adjoin" => PlanKind::Adjoin,
            "cram" => PlanKind::Cram,
            "block" => PlanKind::Block,
            "sweep" => PlanKind::Sweep,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanFile {
    pub kind: PlanKind,
    pub budget: Option<u64>,
    pub resonator_value: u32,
    pub max_rounds: usize,
    /// Weight cap for cramming; defaults to the heaviest remaining goal.
    pub max_weight: Option<usize>,
    pub lemmas: Vec<Term>,
    pub grid: Vec<(String, Vec<String>)>,
}

fn number<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T, ParseError> {
    value.parse().map_err(|_| ParseError::InvalidValue { line, key: key.to_string(), value: value.to_string() })
}

pub fn parse_plan(text: &str) -> Result<PlanFile, ParseError> {
    let mut kind = None;
    let mut plan = PlanFile {
        kind: PlanKind::Sweep,
        budget: None,
        resonator_value: 2,
        max_rounds: 5,
        max_weight: None,
        lemmas: Vec::new(),
        grid: Vec::new(),
    };
    let mut section: Option<&str> = None;
    let mut seen = HashSet::new();
    let mut sig = Signature::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = strip_comment(raw);
        let line = content.trim();
        if line.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if line == "lemmas:" || line == "grid:" {
            if section.is_some() {
                return Err(ParseError::SectionOrder {
                    line: line_no,
                    section: line.trim_end_matches(':').to_string(),
                });
            }
            section = Some(if line == "grid:" { "grid" } else { "lemmas" });
            continue;
        }
        match section {
            Some("lemmas") => plan.lemmas.push(entry_formula(&mut sig, line, line_no, indent + 1)?),
            _ => {
                let Some((key, value)) = line.split_once('=') else {
                    return Err(ParseError::syntax(line_no, indent + 1, "expected `key = value`"));
                };
                let (key, value) = (key.trim(), value.trim());
                if !seen.insert(key.to_string()) {
                    return Err(ParseError::DuplicateParameter { line: line_no, key: key.to_string() });
                }
                if section == Some("grid") {
                    if !PARAMETERS.contains(&key) {
                        return Err(ParseError::UnknownParameter { line: line_no, key: key.to_string() });
                    }
                    let values: Vec<String> = value.split(',').map(|v| v.trim().to_string()).collect();
                    if values.iter().any(String::is_empty) {
                        return Err(ParseError::InvalidValue {
                            line: line_no,
                            key: key.to_string(),
                            value: value.to_string(),
                        });
                    }
                    plan.grid.push((key.to_string(), values));
                    continue;
                }
                match key {
                    "mode" => {
                        kind = Some(PlanKind::parse(value).ok_or_else(|| ParseError::InvalidValue {
                            line: line_no,
                            key: key.to_string(),
                            value: value.to_string(),
                        })?)
                    }
                    "budget" => plan.budget = Some(number(key, value, line_no)?),
                    "resonator_value" => plan.resonator_value = number(key, value, line_no)?,
                    "max_rounds" => plan.max_rounds = number(key, value, line_no)?,
                    "max_weight" => plan.max_weight = Some(number(key, value, line_no)?),
                    _ => return Err(ParseError::UnknownParameter { line: line_no, key: key.to_string() }),
                }
            }
        }
    }
    let Some(kind) = kind else {
        return Err(ParseError::Missing { line: text.lines().count().max(1), what: "mode".to_string() });
    };
    plan.kind = kind;
    Ok(plan)
}

impl PlanFile {
    /// Binds the plan to a problem. `proof` is the donor for `cram` and the
    /// reference for `block`; the budget defaults to the problem's `max_given`.
    pub fn into_plan(self, base: ProblemSpec, proof: Option<Proof>) -> Result<CampaignPlan, CampaignError> {
        let budget = self.budget.unwrap_or(base.strategy.max_given);
        if budget == 0 {
            return Err(CampaignError::ZeroBudget);
        }
        let mode = match self.kind {
            PlanKind::Adjoin => Mode::LemmaAdjunction {
                pool: self.lemmas,
                resonator_value: self.resonator_value,
                max_rounds: self.max_rounds,
            },
            PlanKind::Cram => {
                Mode::Cram { donor: proof.ok_or(CampaignError::MissingProof)?, max_weight: self.max_weight }
            }
            PlanKind::Block => Mode::BlockSteps {
                reference: proof.ok_or(CampaignError::MissingProof)?,
                resonator_value: self.resonator_value,
            },
            PlanKind::Sweep if self.grid.is_empty() => return Err(CampaignError::EmptyGrid),
            PlanKind::Sweep => Mode::Sweep { grid: self.grid },
        };
        Ok(CampaignPlan { base, mode, budget })
    }
}
