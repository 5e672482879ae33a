//! Formula syntax: prefix applications `f(a,b)` plus a small infix table.
//!
//! Infix operators are normalized to ordinary binary applications:
//! `=` (loosest), `v` and `+`, then `^`; `~` is a prefix operator binding
//! tighter than all of them. Any of these symbols may also be written in
//! prefix form, e.g. `=(f(x,y),z)`, which is how terms are printed.
//! A top-level predicate wrapper `P(...)` is accepted and stripped.

use std::collections::BTreeMap;

use crate::error::ParseError;
use crate::term::{is_variable_name, Term};

/// Symbol that wraps a formula as an atom; stripped on input, never printed.
pub const PREDICATE_WRAPPER: &str = "P";

fn infix_precedence(op: &str) -> Option<u8> {
    match op {
        "=" => Some(10),
        "v" | "+" => Some(20),
        "^" => Some(30),
        _ => None,
    }
}

const PREFIX_OP: &str = "~";

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Op(String),
    LParen,
    RParen,
    Comma,
    Dot,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut line = 1;
    let mut line_start = 0;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i - line_start + 1;
        match c {
            '\n' => {
                line += 1;
                line_start = i + 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => out.push(Token { tok: Tok::LParen, line, column }),
            ')' => out.push(Token { tok: Tok::RParen, line, column }),
            ',' => out.push(Token { tok: Tok::Comma, line, column }),
            '.' => out.push(Token { tok: Tok::Dot, line, column }),
            '=' | '+' | '^' | '~' => out.push(Token { tok: Tok::Op(c.to_string()), line, column }),
            c if c.is_alphanumeric() || c == '_' || c == '$' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                out.push(Token { tok: Tok::Ident(word), line, column });
                continue;
            }
            other => return Err(ParseError::syntax(line, column, format!("unexpected character `{other}`"))),
        }
        i += 1;
    }
    Ok(out)
}

/// Records the arity of every symbol seen across a set of formulas.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    arities: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn arity(&self, symbol: &str) -> Option<usize> {
        self.arities.get(symbol).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&str, usize)> {
        self.arities.iter().map(|(s, a)| (s.as_str(), *a))
    }

    /// Parses one formula, checking arities against (and extending) this signature.
    pub fn parse(&mut self, text: &str) -> Result<Term, ParseError> {
        let tokens = tokenize(text)?;
        let mut parser = Parser { tokens: &tokens, pos: 0, occurrences: Vec::new() };
        let (mut term, mut root) = parser.expr(0)?;
        if parser.peek() == Some(&Tok::Dot) {
            parser.pos += 1;
        }
        if let Some(t) = parser.tokens.get(parser.pos) {
            return Err(ParseError::syntax(t.line, t.column, "unexpected trailing input"));
        }
        if let Term::App(sym, args) = &term {
            if sym == PREDICATE_WRAPPER && args.len() == 1 {
                term = args[0].clone();
                if let Some(idx) = root.take() {
                    parser.occurrences.remove(idx);
                }
            }
        }
        let mut staged = self.clone();
        for occ in &parser.occurrences {
            staged.record(&occ.symbol, occ.arity, occ.line, occ.column)?;
        }
        *self = staged;
        Ok(term)
    }

    fn record(&mut self, symbol: &str, arity: usize, line: usize, column: usize) -> Result<(), ParseError> {
        match self.arities.get(symbol) {
            Some(&expected) if expected != arity => {
                Err(ParseError::ArityConflict { line, column, symbol: symbol.to_string(), expected, found: arity })
            }
            Some(_) => Ok(()),
            None => {
                self.arities.insert(symbol.to_string(), arity);
                Ok(())
            }
        }
    }

    /// Records every symbol of an already-built term.
    pub fn check_term(&mut self, term: &Term) -> Result<(), ParseError> {
        let mut staged = self.clone();
        for t in term.subterms() {
            if let Term::App(f, args) = t {
                staged.record(f, args.len(), 0, 0)?;
            }
        }
        *self = staged;
        Ok(())
    }
}

struct Occurrence {
    symbol: String,
    arity: usize,
    line: usize,
    column: usize,
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    occurrences: Vec<Occurrence>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn position(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map(|t| (t.line, t.column + usize::from(self.pos >= self.tokens.len())))
            .unwrap_or((1, 1))
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = self.position();
        ParseError::syntax(line, column, message)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    /// Returns the parsed term and, when its root is an application, the
    /// index of that application in `occurrences`.
    fn expr(&mut self, min_prec: u8) -> Result<(Term, Option<usize>), ParseError> {
        let (mut lhs, mut root) = self.operand()?;
        loop {
            let (op, line, column) = match self.tokens.get(self.pos) {
                Some(Token { tok: Tok::Op(op), line, column }) | Some(Token { tok: Tok::Ident(op), line, column })
                    if infix_precedence(op).is_some() =>
                {
                    (op.clone(), *line, *column)
                }
                _ => break,
            };
            let prec = infix_precedence(&op).expect("checked above");
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let (rhs, _) = self.expr(prec + 1)?;
            root = Some(self.occurrences.len());
            self.occurrences.push(Occurrence { symbol: op.clone(), arity: 2, line, column });
            lhs = Term::App(op, vec![lhs, rhs]);
        }
        Ok((lhs, root))
    }

    fn operand(&mut self) -> Result<(Term, Option<usize>), ParseError> {
        let Some(token) = self.tokens.get(self.pos).cloned() else {
            return Err(self.error("unexpected end of formula"));
        };
        match token.tok {
            Tok::LParen => {
                self.pos += 1;
                let inner = self.expr(0)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) | Tok::Op(name) if self.tokens.get(self.pos + 1).map(|t| &t.tok) == Some(&Tok::LParen) => {
                self.pos += 2;
                let mut args = vec![self.expr(0)?.0];
                while self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    args.push(self.expr(0)?.0);
                }
                self.expect(Tok::RParen, "`,` or `)`")?;
                let idx = self.occurrences.len();
                self.occurrences.push(Occurrence {
                    symbol: name.clone(),
                    arity: args.len(),
                    line: token.line,
                    column: token.column,
                });
                Ok((Term::App(name, args), Some(idx)))
            }
            Tok::Op(op) if op == PREFIX_OP => {
                self.pos += 1;
                let (arg, _) = self.operand()?;
                let idx = self.occurrences.len();
                self.occurrences.push(Occurrence {
                    symbol: op.clone(),
                    arity: 1,
                    line: token.line,
                    column: token.column,
                });
                Ok((Term::App(op, vec![arg]), Some(idx)))
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if is_variable_name(&name) {
                    Ok((Term::Var(name), None))
                } else {
                    let idx = self.occurrences.len();
                    self.occurrences.push(Occurrence {
                        symbol: name.clone(),
                        arity: 0,
                        line: token.line,
                        column: token.column,
                    });
                    Ok((Term::App(name, Vec::new()), Some(idx)))
                }
            }
            _ => Err(self.error("expected a term")),
        }
    }
}

/// Parses a single formula with a fresh signature.
pub fn parse_formula(text: &str) -> Result<Term, ParseError> {
    Signature::new().parse(text)
}

/// Prints a term in prefix form with no whitespace.
pub fn print_formula(term: &Term) -> String {
    term.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lukasiewicz_third_axiom() {
        let t = parse_formula("i(x,i(n(x),y))").unwrap();
        let x = Term::var("x");
        let expected = Term::app("i", vec![x.clone(), Term::app("i", vec![Term::app("n", vec![x]), Term::var("y")])]);
        assert_eq!(t, expected);
    }

    #[test]
    fn rejects_empty_argument() {
        let err = parse_formula("i(x,,y)").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { column: 5, .. }), "{err:?}");
    }

    #[test]
    fn strips_predicate_wrapper() {
        let t = parse_formula("P(i(i(x,i(i(y,i(z,z)),i(x,u))),i(i(u,v),i(w,i(x,v))))).").unwrap();
        assert_eq!(print_formula(&t), "i(i(x,i(i(y,i(z,z)),i(x,u))),i(i(u,v),i(w,i(x,v))))");
        let mut sig = Signature::new();
        sig.parse("P(i(x,y))").unwrap();
        assert_eq!(sig.arity("P"), None);
        assert_eq!(sig.arity("i"), Some(2));
    }

    #[test]
    fn whitespace_insensitive() {
        let a = parse_formula("i( x ,\n  i(n(x), y))").unwrap();
        assert_eq!(a, parse_formula("i(x,i(n(x),y))").unwrap());
    }

    #[test]
    fn arity_conflict_names_symbol() {
        let err = parse_formula("i(i(x),y)").unwrap_err();
        match err {
            ParseError::ArityConflict { symbol, .. } => assert_eq!(symbol, "i"),
            other => panic!("unexpected {other:?}"),
        }
        let mut sig = Signature::new();
        sig.parse("n(x)").unwrap();
        assert!(sig.parse("n(x,y)").is_err());
        // failed parses leave the signature untouched
        assert_eq!(sig.arity("n"), Some(1));
    }

    #[test]
    fn infix_lattice_axiom() {
        let t = parse_formula("(((y v x)^x) v (((z^ (x v x)) v (u^x))^v))^ (w v ((v6 v x)^ (x v v7)))=x.").unwrap();
        assert_eq!(t.as_app().unwrap().0, "=");
        assert_eq!(t.weight(), 29);
        let printed = print_formula(&t);
        assert_eq!(parse_formula(&printed).unwrap(), t);
    }

    #[test]
    fn prefix_negation_binds_tightest() {
        let t = parse_formula("~ (x + y) + z").unwrap();
        assert_eq!(print_formula(&t), "+(~(+(x,y)),z)");
        let t = parse_formula("~ z + ~ (z + u)").unwrap();
        assert_eq!(print_formula(&t), "+(~(z),~(+(z,u)))");
    }

    #[test]
    fn prints_constants_without_parens() {
        let t = parse_formula("f(e,g1)").unwrap();
        assert_eq!(print_formula(&t), "f(e,g1)");
        assert_eq!(t, Term::app("f", vec![Term::constant("e"), Term::constant("g1")]));
    }
}
