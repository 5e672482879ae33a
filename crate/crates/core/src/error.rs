use thiserror::Error;

/// Errors raised while reading formulas, problem files, proof files and plan files.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: symbol `{symbol}` used with arity {found}, earlier with arity {expected}")]
    ArityConflict { line: usize, column: usize, symbol: String, expected: usize, found: usize },
    #[error("line {line}: unknown parameter `{key}`")]
    UnknownParameter { line: usize, key: String },
    #[error("line {line}: parameter `{key}` set twice")]
    DuplicateParameter { line: usize, key: String },
    #[error("line {line}: invalid value `{value}` for `{key}`")]
    InvalidValue { line: usize, key: String, value: String },
    #[error("line {line}: duplicate name `{name}`")]
    DuplicateName { line: usize, name: String },
    #[error("line {line}: section `{section}` out of place")]
    SectionOrder { line: usize, section: String },
    #[error("missing axiom")]
    MissingAxiom,
    #[error("missing goal")]
    MissingGoal,
    #[error("line {line}: missing `{what}`")]
    Missing { line: usize, what: String },
    #[error("line {line}: step {id} references undefined step {parent}")]
    DanglingParent { line: usize, id: u32, parent: u32 },
    #[error("line {line}: step id {id} does not exceed previous id {previous}")]
    NonMonotoneId { line: usize, id: u32, previous: u32 },
}

impl ParseError {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax { line, column, message: message.into() }
    }

    /// Re-anchors a single-line error onto line `line` of a larger file,
    /// shifting columns by `column_offset`.
    pub(crate) fn relocate(self, line: usize, column_offset: usize) -> Self {
        match self {
            ParseError::Syntax { column, message, .. } => {
                ParseError::Syntax { line, column: column + column_offset, message }
            }
            ParseError::ArityConflict { column, symbol, expected, found, .. } => {
                ParseError::ArityConflict { line, column: column + column_offset, symbol, expected, found }
            }
            other => other,
        }
    }
}
