//! Proof files.
//!
//! ```text
//! problem: luk3
//! param max_weight=30
//! 1 [axiom ax1] i(i(x,y),i(i(y,z),i(x,z))).
//! 3 [axiom ax3] i(x,i(n(x),y)).
//! 4 [cd 1,3] i(i(i(n(x),y),z),i(x,z)).
//! 5 [goal id] matched.
//! ```

use std::fmt::Write as _;

use crate::error::ParseError;
use crate::inference::Justification;
use crate::proofkit::{GoalLine, Proof, ProofStep};
use crate::syntax::formula::Signature;
use crate::syntax::problem::{entry_formula, strip_comment};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofDocument {
    pub problem: String,
    /// Parameter echo, in file order.
    pub params: Vec<(String, String)>,
    pub proof: Proof,
}

impl ProofDocument {
    pub fn new(problem: impl Into<String>, proof: Proof) -> Self {
        ProofDocument { problem: problem.into(), params: Vec::new(), proof }
    }
}

fn parse_id(text: &str, line: usize, column: usize) -> Result<u32, ParseError> {
    text.trim()
        .parse::<u32>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| ParseError::syntax(line, column, format!("invalid step id `{}`", text.trim())))
}

/// Parses a proof file. Ids must strictly increase and parents must refer to
/// earlier steps.
pub fn parse_proof(text: &str) -> Result<ProofDocument, ParseError> {
    let mut problem = None;
    let mut params = Vec::new();
    let mut steps: Vec<ProofStep> = Vec::new();
    let mut goals: Vec<GoalLine> = Vec::new();
    let mut sig = Signature::new();
    let mut previous: Option<u32> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = strip_comment(raw);
        let line = content.trim();
        if line.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if let Some(rest) = line.strip_prefix("problem:") {
            if problem.is_some() || !steps.is_empty() || !goals.is_empty() {
                return Err(ParseError::syntax(line_no, indent + 1, "misplaced `problem:` header"));
            }
            problem = Some(rest.trim().to_string());
            continue;
        }
        if let Some(rest) = line.strip_prefix("param ") {
            if problem.is_none() || !steps.is_empty() || !goals.is_empty() {
                return Err(ParseError::syntax(line_no, indent + 1, "misplaced `param` line"));
            }
            let Some((k, v)) = rest.split_once('=') else {
                return Err(ParseError::syntax(line_no, indent + 1, "expected `param key=value`"));
            };
            params.push((k.trim().to_string(), v.trim().to_string()));
            continue;
        }
        if problem.is_none() {
            return Err(ParseError::Missing { line: line_no, what: "problem:".to_string() });
        }
        if !goals.is_empty() && !line.contains("[goal ") {
            return Err(ParseError::syntax(line_no, indent + 1, "step after goal line"));
        }

        let (Some(open), Some(close)) = (line.find('['), line.find(']')) else {
            return Err(ParseError::syntax(line_no, indent + 1, "expected `<id> [justification] ...`"));
        };
        if close < open {
            return Err(ParseError::syntax(line_no, indent + close + 1, "unexpected `]`"));
        }
        let id = parse_id(&line[..open], line_no, indent + 1)?;
        if let Some(prev) = previous.filter(|&p| id <= p) {
            return Err(ParseError::NonMonotoneId { line: line_no, id, previous: prev });
        }
        previous = Some(id);
        let just = line[open + 1..close].trim();
        let body = &line[close + 1..];
        let body_column = indent + close + 2;
        let (kind, arg) = just.split_once(' ').unwrap_or((just, ""));
        let arg = arg.trim();
        match kind {
            "axiom" => {
                let term = entry_formula(&mut sig, body, line_no, body_column)?;
                steps.push(ProofStep { id, term, justification: Justification::Axiom(arg.to_string()) });
            }
            "cd" => {
                let Some((a, b)) = arg.split_once(',') else {
                    return Err(ParseError::syntax(line_no, indent + open + 2, "expected `cd <major>,<minor>`"));
                };
                let major = parse_id(a, line_no, indent + open + 2)?;
                let minor = parse_id(b, line_no, indent + open + 2)?;
                for parent in [major, minor] {
                    if !steps.iter().any(|s| s.id == parent) {
                        return Err(ParseError::DanglingParent { line: line_no, id, parent });
                    }
                }
                let term = entry_formula(&mut sig, body, line_no, body_column)?;
                steps.push(ProofStep { id, term, justification: Justification::Cd { major, minor } });
            }
            "goal" if body.trim() == "matched." => goals.push(GoalLine { id, name: arg.to_string() }),
            "goal" => return Err(ParseError::syntax(line_no, body_column, "expected `matched.`")),
            _ => return Err(ParseError::syntax(line_no, indent + open + 2, format!("unknown justification `{kind}`"))),
        }
        if arg.is_empty() {
            return Err(ParseError::syntax(line_no, indent + open + 2, "missing justification argument"));
        }
    }
    let Some(problem) = problem else {
        return Err(ParseError::Missing { line: text.lines().count().max(1), what: "problem:".to_string() });
    };
    if goals.is_empty() {
        return Err(ParseError::Missing { line: text.lines().count().max(1), what: "goal line".to_string() });
    }
    Ok(ProofDocument { problem, params, proof: Proof { steps, goals } })
}

pub fn print_proof(doc: &ProofDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "problem: {}", doc.problem);
    for (k, v) in &doc.params {
        let _ = writeln!(out, "param {k}={v}");
    }
    for s in &doc.proof.steps {
        let _ = writeln!(out, "{} [{}] {}.", s.id, s.justification, s.term);
    }
    for g in &doc.proof.goals {
        let _ = writeln!(out, "{} [goal {}] matched.", g.id, g.name);
    }
    out
}
