//! Problem files.
//!
//! ```text
//! % comment
//! axioms:
//! ax1: i(i(x,y),i(i(y,z),i(x,z))).
//! goals:
//! id: i(x,x).
//! resonators:
//! 2: i(x,i(y,x)).
//! hints:
//! i(x,x).
//! forbid:
//! n(n(x)).
//! block:
//! i(x,x).
//! params:
//! max_weight = 30
//! ```
//!
//! Sections appear in the order above; `axioms` and `goals` are mandatory.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::ParseError;
use crate::inference::FilterConfig;
use crate::search::{Hint, Resonator, StrategyConfig};
use crate::syntax::formula::Signature;
use crate::term::{is_variable_name, Term};

/// A named formula: an axiom or a goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Named {
    pub name: String,
    pub term: Term,
}

impl Named {
    pub fn new(name: impl Into<String>, term: Term) -> Self {
        Named { name: name.into(), term }
    }
}

/// Everything a search run needs: premises, targets, filters and strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSpec {
    pub name: String,
    /// Initial set of support.
    pub axioms: Vec<Named>,
    /// Passive list: targets, never used as premises.
    pub goals: Vec<Named>,
    pub filters: FilterConfig,
    pub strategy: StrategyConfig,
    pub resonators: Vec<Resonator>,
    pub hints: Vec<Hint>,
    pub detachment_symbol: String,
}

/// Keys accepted in the `params:` section, in printing order.
pub const PARAMETERS: [&str; 9] = [
    "max_weight",
    "max_distinct_vars",
    "pick_given_ratio",
    "max_given",
    "max_retained",
    "detachment_symbol",
    "hint_exempt_max_weight",
    "all_goals",
    "back_subsumption",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamError {
    Unknown(String),
    InvalidValue { key: String, value: String },
}

impl std::fmt::Display for ParamError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamError::Unknown(key) => write!(f, "unknown parameter `{key}`"),
            ParamError::InvalidValue { key, value } => write!(f, "invalid value `{value}` for `{key}`"),
        }
    }
}

impl std::error::Error for ParamError {}

impl ParamError {
    fn at_line(self, line: usize) -> ParseError {
        match self {
            ParamError::Unknown(key) => ParseError::UnknownParameter { line, key },
            ParamError::InvalidValue { key, value } => ParseError::InvalidValue { line, key, value },
        }
    }
}

impl ProblemSpec {
    /// A spec with default parameters and no optional sections.
    pub fn new(name: impl Into<String>, axioms: Vec<Named>, goals: Vec<Named>) -> Self {
        ProblemSpec {
            name: name.into(),
            axioms,
            goals,
            filters: FilterConfig::default(),
            strategy: StrategyConfig::default(),
            resonators: Vec::new(),
            hints: Vec::new(),
            detachment_symbol: "i".to_string(),
        }
    }

    /// Sets one parameter from its textual value.
    pub fn set_param(&mut self, key: &str, value: &str) -> Result<(), ParamError> {
        let invalid = || ParamError::InvalidValue { key: key.to_string(), value: value.to_string() };
        let value = value.trim();
        match key {
            "max_weight" => {
                self.filters.max_weight = value.parse().ok().filter(|&k: &usize| k >= 1).ok_or_else(invalid)?
            }
            "max_distinct_vars" => {
                self.filters.max_distinct_vars = match value {
                    "none" => None,
                    v => Some(v.parse().map_err(|_| invalid())?),
                }
            }
            "pick_given_ratio" => {
                self.strategy.pick_given_ratio = value.parse().ok().filter(|&r: &i64| r >= -1).ok_or_else(invalid)?
            }
            "max_given" => self.strategy.max_given = value.parse().map_err(|_| invalid())?,
            "max_retained" => {
                self.strategy.max_retained = value.parse().ok().filter(|&r: &u64| r >= 1).ok_or_else(invalid)?
            }
            "detachment_symbol" => {
                let ok = !value.is_empty()
                    && !is_variable_name(value)
                    && value.chars().all(|c| c.is_alphanumeric() || c == '_');
                if !ok {
                    return Err(invalid());
                }
                self.detachment_symbol = value.to_string();
            }
            "hint_exempt_max_weight" => self.filters.hint_exempt_max_weight = parse_bool(value).ok_or_else(invalid)?,
            "all_goals" => self.strategy.all_goals = parse_bool(value).ok_or_else(invalid)?,
            "back_subsumption" => self.strategy.back_subsumption = parse_bool(value).ok_or_else(invalid)?,
            _ => return Err(ParamError::Unknown(key.to_string())),
        }
        Ok(())
    }

    /// Current value of a parameter in the form `set_param` accepts.
    pub fn param(&self, key: &str) -> Option<String> {
        Some(match key {
            "max_weight" => self.filters.max_weight.to_string(),
            "max_distinct_vars" => self.filters.max_distinct_vars.map_or("none".to_string(), |k| k.to_string()),
            "pick_given_ratio" => self.strategy.pick_given_ratio.to_string(),
            "max_given" => self.strategy.max_given.to_string(),
            "max_retained" => self.strategy.max_retained.to_string(),
            "detachment_symbol" => self.detachment_symbol.clone(),
            "hint_exempt_max_weight" => self.filters.hint_exempt_max_weight.to_string(),
            "all_goals" => self.strategy.all_goals.to_string(),
            "back_subsumption" => self.strategy.back_subsumption.to_string(),
            _ => return None,
        })
    }

    /// All parameters with their current values, in [`PARAMETERS`] order.
    pub fn params(&self) -> Vec<(&'static str, String)> {
        PARAMETERS.iter().map(|k| (*k, self.param(k).expect("known key"))).collect()
    }

    pub fn goal(&self, name: &str) -> Option<&Named> {
        self.goals.iter().find(|g| g.name == name)
    }

    pub fn axiom(&self, name: &str) -> Option<&Named> {
        self.axioms.iter().find(|a| a.name == name)
    }
}

fn parse_bool(value: &str) -> Option<bool> {
    match value {
        "true" | "on" | "yes" => Some(true),
        "false" | "off" | "no" => Some(false),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Axioms,
    Goals,
    Resonators,
    Hints,
    Forbid,
    Block,
    Params,
}

impl Section {
    fn from_header(line: &str) -> Option<Section> {
        Some(match line {
            "axioms:" => Section::Axioms,
            "goals:" => Section::Goals,
            "resonators:" => Section::Resonators,
            "hints:" => Section::Hints,
            "forbid:" => Section::Forbid,
            "block:" => Section::Block,
            "params:" => Section::Params,
            _ => return None,
        })
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    line.split('%').next().unwrap_or("")
}

/// Parses the formula part of an entry (`<formula>.`) located at `column` on `line`.
pub(crate) fn entry_formula(sig: &mut Signature, text: &str, line: usize, column: usize) -> Result<Term, ParseError> {
    let body = text.trim_end();
    let Some(body) = body.strip_suffix('.') else {
        return Err(ParseError::syntax(line, column + body.len(), "expected `.` at end of entry"));
    };
    sig.parse(body).map_err(|e| e.relocate(line, column - 1))
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-')
}

/// Parses a problem file.
pub fn parse_problem(text: &str) -> Result<ProblemSpec, ParseError> {
    let mut spec = ProblemSpec::new("problem", Vec::new(), Vec::new());
    let mut sig = Signature::new();
    let mut section: Option<Section> = None;
    let mut names = HashSet::new();
    let mut params_seen = HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = strip_comment(raw);
        let line = content.trim();
        if line.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if let Some(next) = Section::from_header(line) {
            if section.is_some_and(|cur| next <= cur) || (section.is_none() && next != Section::Axioms) {
                return Err(ParseError::SectionOrder {
                    line: line_no,
                    section: line.trim_end_matches(':').to_string(),
                });
            }
            section = Some(next);
            continue;
        }
        let Some(current) = section else {
            return Err(ParseError::syntax(line_no, indent + 1, "expected a section header"));
        };
        match current {
            Section::Axioms | Section::Goals => {
                let Some((name, rest)) = line.split_once(':') else {
                    return Err(ParseError::syntax(line_no, indent + 1, "expected `name: formula.`"));
                };
                let name = name.trim();
                if !valid_name(name) {
                    return Err(ParseError::syntax(line_no, indent + 1, format!("invalid name `{name}`")));
                }
                if !names.insert(name.to_string()) {
                    return Err(ParseError::DuplicateName { line: line_no, name: name.to_string() });
                }
                let column = indent + line.len() - rest.len() + 1;
                let term = entry_formula(&mut sig, rest, line_no, column)?;
                let entry = Named::new(name, term);
                if current == Section::Axioms {
                    spec.axioms.push(entry);
                } else {
                    spec.goals.push(entry);
                }
            }
            Section::Resonators => {
                let Some((value, rest)) = line.split_once(':') else {
                    return Err(ParseError::syntax(line_no, indent + 1, "expected `value: formula.`"));
                };
                let value: u32 = value.trim().parse().map_err(|_| {
                    ParseError::syntax(line_no, indent + 1, format!("invalid resonator value `{}`", value.trim()))
                })?;
                let column = indent + line.len() - rest.len() + 1;
                let term = entry_formula(&mut sig, rest, line_no, column)?;
                spec.resonators.push(Resonator::new(&term, value));
            }
            Section::Hints => spec.hints.push(Hint::new(&entry_formula(&mut sig, line, line_no, indent + 1)?)),
            Section::Forbid => {
                spec.filters.forbidden_patterns.push(entry_formula(&mut sig, line, line_no, indent + 1)?)
            }
            Section::Block => {
                let term = entry_formula(&mut sig, line, line_no, indent + 1)?;
                spec.filters.blocked_lemmas.push(term.canonicalize());
            }
            Section::Params => {
                let Some((key, value)) = line.split_once('=') else {
                    return Err(ParseError::syntax(line_no, indent + 1, "expected `key = value`"));
                };
                let key = key.trim();
                if !params_seen.insert(key.to_string()) {
                    return Err(ParseError::DuplicateParameter { line: line_no, key: key.to_string() });
                }
                spec.set_param(key, value).map_err(|e| e.at_line(line_no))?;
            }
        }
    }
    if spec.axioms.is_empty() {
        return Err(ParseError::MissingAxiom);
    }
    if spec.goals.is_empty() {
        return Err(ParseError::MissingGoal);
    }
    Ok(spec)
}

/// Prints a problem in the layout `parse_problem` reads. Parameters equal to
/// their defaults are omitted.
pub fn print_problem(spec: &ProblemSpec) -> String {
    let mut out = String::new();
    out.push_str("axioms:\n");
    for a in &spec.axioms {
        let _ = writeln!(out, "{}: {}.", a.name, a.term);
    }
    out.push_str("goals:\n");
    for g in &spec.goals {
        let _ = writeln!(out, "{}: {}.", g.name, g.term);
    }
    if !spec.resonators.is_empty() {
        out.push_str("resonators:\n");
        for r in &spec.resonators {
            let _ = writeln!(out, "{}: {}.", r.value, r.shape.to_pattern());
        }
    }
    let mut list = |title: &str, items: &mut dyn Iterator<Item = &Term>| {
        let items: Vec<&Term> = items.collect();
        if !items.is_empty() {
            let _ = writeln!(out, "{title}:");
            for t in items {
                let _ = writeln!(out, "{t}.");
            }
        }
    };
    list("hints", &mut spec.hints.iter().map(|h| &h.term));
    list("forbid", &mut spec.filters.forbidden_patterns.iter());
    list("block", &mut spec.filters.blocked_lemmas.iter());
    let defaults = ProblemSpec::new("", Vec::new(), Vec::new());
    let changed: Vec<_> =
        spec.params().into_iter().filter(|(k, v)| defaults.param(k).as_deref() != Some(v.as_str())).collect();
    if !changed.is_empty() {
        out.push_str("params:\n");
        for (k, v) in changed {
            let _ = writeln!(out, "{k} = {v}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    const LUK3: &str = "\
% Lukasiewicz three-axiom system
axioms:
ax1: i(i(x,y),i(i(y,z),i(x,z))).
ax2: i(i(n(x),x),x).
ax3: i(x,i(n(x),y)).
goals:
id: i(x,x).
";

    #[test]
    fn parses_three_axiom_system() {
        let spec = parse_problem(LUK3).unwrap();
        assert_eq!(spec.axioms.len(), 3);
        assert_eq!(spec.goals.len(), 1);
        assert_eq!(spec.axioms[2].term, parse_formula("i(x,i(n(x),y))").unwrap());
        assert_eq!(spec.filters.max_weight, 30);
        assert_eq!(spec.filters.max_distinct_vars, None);
        assert_eq!(spec.strategy.pick_given_ratio, 0);
        assert_eq!(spec.strategy.max_given, 100_000);
        assert_eq!(spec.strategy.max_retained, 1_000_000);
        assert_eq!(spec.detachment_symbol, "i");
        assert!(spec.filters.hint_exempt_max_weight);
    }

    #[test]
    fn empty_goals_section() {
        let text = "axioms:\na: i(x,x).\ngoals:\n";
        assert_eq!(parse_problem(text).unwrap_err(), ParseError::MissingGoal);
        assert_eq!(parse_problem(text).unwrap_err().to_string(), "missing goal");
    }

    #[test]
    fn duplicate_parameter() {
        let text = format!("{LUK3}params:\nmax_weight = 20\nmax_weight = 25\n");
        assert!(matches!(parse_problem(&text), Err(ParseError::DuplicateParameter { line: 10, .. })));
    }

    #[test]
    fn unknown_parameter_and_bad_value() {
        let text = format!("{LUK3}params:\nmax_wieght = 20\n");
        assert!(matches!(parse_problem(&text), Err(ParseError::UnknownParameter { .. })));
        let text = format!("{LUK3}params:\npick_given_ratio = -2\n");
        assert!(matches!(parse_problem(&text), Err(ParseError::InvalidValue { .. })));
        let text = format!("{LUK3}params:\nmax_weight = 0\n");
        assert!(matches!(parse_problem(&text), Err(ParseError::InvalidValue { .. })));
    }

    #[test]
    fn duplicate_names_across_sections() {
        let text = "axioms:\na: i(x,x).\ngoals:\na: i(y,y).\n";
        assert!(matches!(parse_problem(text), Err(ParseError::DuplicateName { line: 4, .. })));
    }

    #[test]
    fn sections_must_be_ordered() {
        let text = "goals:\ng: i(x,x).\naxioms:\na: i(x,x).\n";
        assert!(matches!(parse_problem(text), Err(ParseError::SectionOrder { line: 1, .. })));
        let text = "axioms:\na: i(x,x).\ngoals:\ng: i(x,x).\nparams:\nmax_weight = 3\nhints:\ni(x,x).\n";
        assert!(matches!(parse_problem(text), Err(ParseError::SectionOrder { line: 7, .. })));
    }

    #[test]
    fn syntax_error_positions() {
        let text = "axioms:\nax: i(x,,y).\ngoals:\ng: i(x,x).\n";
        match parse_problem(text).unwrap_err() {
            ParseError::Syntax { line, column, .. } => assert_eq!((line, column), (2, 9)),
            other => panic!("{other:?}"),
        }
        let text = "axioms:\nax: i(x,y)\ngoals:\ng: i(x,x).\n";
        assert!(matches!(parse_problem(text), Err(ParseError::Syntax { line: 2, .. })));
    }

    #[test]
    fn arity_is_consistent_across_the_file() {
        let text = "axioms:\nax: i(x,y).\ngoals:\ng: i(x).\n";
        assert!(matches!(parse_problem(text), Err(ParseError::ArityConflict { line: 4, .. })));
    }

    #[test]
    fn optional_sections() {
        let text = format!(
            "{LUK3}resonators:\n2: i(x,i(y,x)).\nhints:\ni(y,y).\nforbid:\nn(n(x)).\nblock:\ni(q1,q1).\nparams:\nmax_distinct_vars = 4\npick_given_ratio = -1\nhint_exempt_max_weight = false\n"
        );
        let spec = parse_problem(&text).unwrap();
        assert_eq!(spec.resonators.len(), 1);
        assert_eq!(spec.resonators[0].value, 2);
        assert_eq!(spec.resonators[0].shape.to_string(), "i(*,i(*,*))");
        assert_eq!(spec.hints[0].term.to_string(), "i(x,x)");
        assert_eq!(spec.filters.forbidden_patterns[0].to_string(), "n(n(x))");
        assert_eq!(spec.filters.blocked_lemmas[0].to_string(), "i(q1,q1)");
        assert_eq!(spec.filters.max_distinct_vars, Some(4));
        assert_eq!(spec.strategy.pick_given_ratio, -1);
        assert!(!spec.filters.hint_exempt_max_weight);
    }

    #[test]
    fn print_is_a_fixed_point() {
        let text = format!("{LUK3}resonators:\n2: i(x,i(y,x)).\nforbid:\nn(n(x)).\nparams:\nmax_weight = 12\n");
        let once = print_problem(&parse_problem(&text).unwrap());
        let twice = print_problem(&parse_problem(&once).unwrap());
        assert_eq!(once, twice);
        assert!(once.contains("max_weight = 12"));
        assert!(!once.contains("max_given"));
    }
}
