//! First-order terms, substitutions, unification and matching.
//!
//! Every formula handled by the prover is a [`Term`]: implication `i/2`,
//! negation `n/1` and any other signature entry are ordinary function
//! symbols. An identifier names a variable iff it starts with one of
//! `u`, `v`, `w`, `x`, `y`, `z`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

/// Returns `true` when `name` follows the variable naming convention.
pub fn is_variable_name(name: &str) -> bool {
    matches!(name.chars().next(), Some('u'..='z'))
}

/// Name of the `index`-th variable in canonical order: `x, y, z, u, v, w, v6, v7, ...`.
pub fn canonical_var_name(index: usize) -> String {
    const FIRST: [&str; 6] = ["x", "y", "z", "u", "v", "w"];
    match FIRST.get(index) {
        Some(name) => (*name).to_string(),
        None => format!("v{index}"),
    }
}

/// An immutable first-order term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    /// Function application; constants are applications with no arguments.
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::App(name.into(), Vec::new())
    }

    pub fn app(symbol: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(symbol.into(), args)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Top symbol and arguments, or `None` for a variable.
    pub fn as_app(&self) -> Option<(&str, &[Term])> {
        match self {
            Term::Var(_) => None,
            Term::App(f, args) => Some((f, args)),
        }
    }

    /// Symbol count: variable occurrences plus function/constant occurrences.
    pub fn weight(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::weight).sum::<usize>(),
        }
    }

    pub fn distinct_vars(&self) -> usize {
        self.variables().len()
    }

    /// Distinct variable names in depth-first, left-to-right first-occurrence order.
    pub fn variables(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.collect_vars(&mut seen, &mut out);
        out
    }

    fn collect_vars<'a>(&'a self, seen: &mut HashSet<&'a str>, out: &mut Vec<&'a str>) {
        match self {
            Term::Var(v) => {
                if seen.insert(v) {
                    out.push(v);
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(seen, out)),
        }
    }

    pub fn occurs(&self, var: &str) -> bool {
        match self {
            Term::Var(v) => v == var,
            Term::App(_, args) => args.iter().any(|a| a.occurs(var)),
        }
    }

    /// Pre-order iterator over all subterms, starting with `self`.
    pub fn subterms(&self) -> Subterms<'_> {
        Subterms { stack: vec![self] }
    }

    pub fn skeleton(&self) -> Skeleton {
        fn go(t: &Term) -> Term {
            match t {
                Term::Var(_) => Term::Var(Skeleton::MARKER.to_string()),
                Term::App(f, args) => Term::App(f.clone(), args.iter().map(go).collect()),
            }
        }
        Skeleton(go(self))
    }

    /// Renames variables to `x, y, z, u, v, w, v6, ...` by first occurrence.
    pub fn canonicalize(&self) -> Term {
        let renaming: HashMap<&str, String> =
            self.variables().into_iter().enumerate().map(|(i, v)| (v, canonical_var_name(i))).collect();
        self.rename_vars(&renaming)
    }

    fn rename_vars(&self, renaming: &HashMap<&str, String>) -> Term {
        match self {
            Term::Var(v) => Term::Var(renaming.get(v.as_str()).cloned().unwrap_or_else(|| v.clone())),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.rename_vars(renaming)).collect()),
        }
    }

    /// Simultaneous replacement of the variables bound in `subst`.
    pub fn substitute(&self, subst: &Substitution) -> Term {
        match self {
            Term::Var(v) => subst.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.substitute(subst)).collect()),
        }
    }

    /// True iff some subterm of `self` is an instance of `pattern`.
    pub fn contains_pattern(&self, pattern: &Term) -> bool {
        self.subterms().any(|s| match_term(pattern, s).is_some())
    }

    /// Equal up to a consistent renaming of variables.
    pub fn is_variant(&self, other: &Term) -> bool {
        match_term(self, other).is_some() && match_term(other, self).is_some()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App(sym, args) => {
                f.write_str(sym)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

pub struct Subterms<'a> {
    stack: Vec<&'a Term>,
}

impl<'a> Iterator for Subterms<'a> {
    type Item = &'a Term;

    fn next(&mut self) -> Option<&'a Term> {
        let t = self.stack.pop()?;
        if let Term::App(_, args) = t {
            self.stack.extend(args.iter().rev());
        }
        Some(t)
    }
}

/// Functional shape of a term: every variable replaced by `*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Skeleton(Term);

impl Skeleton {
    pub const MARKER: &'static str = "*";

    pub fn as_term(&self) -> &Term {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.weight()
    }

    /// A term with this shape whose marker positions hold pairwise distinct
    /// variables in canonical order.
    pub fn to_pattern(&self) -> Term {
        fn go(t: &Term, next: &mut usize) -> Term {
            match t {
                Term::Var(_) => {
                    *next += 1;
                    Term::Var(canonical_var_name(*next - 1))
                }
                Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| go(a, next)).collect()),
            }
        }
        go(&self.0, &mut 0)
    }
}

impl fmt::Display for Skeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Finite map from variable names to terms, applied simultaneously.
///
/// Unifiers returned by [`unify`] are idempotent. Matchers returned by
/// [`match_term`] need not be when pattern and instance share variable names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.map.get(var)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Builds a substitution from raw bindings, dropping identity bindings.
    pub fn from_bindings(bindings: impl IntoIterator<Item = (String, Term)>) -> Self {
        let map = bindings.into_iter().filter(|(v, t)| !matches!(t, Term::Var(w) if w == v)).collect();
        Substitution { map }
    }

    /// Adds `var ↦ term` and propagates it through existing images, keeping the
    /// substitution idempotent. `term` must already be fully substituted.
    fn extend(&mut self, var: &str, term: Term) {
        let single = Substitution::from_bindings([(var.to_string(), term.clone())]);
        for image in self.map.values_mut() {
            *image = image.substitute(&single);
        }
        self.map.remove(var);
        if !matches!(&term, Term::Var(w) if w == var) {
            self.map.insert(var.to_string(), term);
        }
    }

    pub fn is_idempotent(&self) -> bool {
        self.map.values().all(|t| t.substitute(self) == *t)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}->{t}")?;
        }
        f.write_str("}")
    }
}

/// Why two terms have no unifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnifyFailure {
    Clash { left: String, right: String },
    Occurs { var: String, term: Term },
}

/// Most general unifier with occurs check.
pub fn unify(s: &Term, t: &Term) -> Result<Substitution, UnifyFailure> {
    let mut subst = Substitution::new();
    let mut work = vec![(s.clone(), t.clone())];
    while let Some((a, b)) = work.pop() {
        let a = a.substitute(&subst);
        let b = b.substitute(&subst);
        match (a, b) {
            (a, b) if a == b => {}
            (Term::Var(v), other) | (other, Term::Var(v)) => {
                if other.occurs(&v) {
                    return Err(UnifyFailure::Occurs { var: v, term: other });
                }
                subst.extend(&v, other);
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return Err(UnifyFailure::Clash { left: f, right: g });
                }
                work.extend(fa.into_iter().zip(ga).rev());
            }
        }
    }
    Ok(subst)
}

/// One-way matching: a substitution over `pattern`'s variables with
/// `pattern.substitute(σ) == instance`, or `None`.
pub fn match_term(pattern: &Term, instance: &Term) -> Option<Substitution> {
    fn go<'a>(p: &'a Term, t: &Term, bound: &mut HashMap<&'a str, Term>) -> bool {
        match p {
            Term::Var(v) => match bound.get(v.as_str()) {
                Some(prev) => prev == t,
                None => {
                    bound.insert(v, t.clone());
                    true
                }
            },
            Term::App(f, pa) => match t {
                Term::App(g, ta) => f == g && pa.len() == ta.len() && pa.iter().zip(ta).all(|(x, y)| go(x, y, bound)),
                Term::Var(_) => false,
            },
        }
    }
    let mut bound = HashMap::new();
    go(pattern, instance, &mut bound)
        .then(|| Substitution::from_bindings(bound.into_iter().map(|(v, t)| (v.to_string(), t))))
}

/// Returns a variant of `shift` whose variables do not occur in `keep`.
///
/// `shift` is returned unchanged when the two already share no variable.
pub fn rename_apart(keep: &Term, shift: &Term) -> Term {
    let kept: HashSet<&str> = keep.variables().into_iter().collect();
    let shifted = shift.variables();
    if shifted.iter().all(|v| !kept.contains(v)) {
        return shift.clone();
    }
    let taken: HashSet<&str> = kept.iter().copied().chain(shifted.iter().copied()).collect();
    let mut fresh = (6..).map(|i| format!("v{i}")).filter(|n| !taken.contains(n.as_str()));
    let renaming: HashMap<&str, String> =
        shifted.into_iter().map(|v| (v, fresh.next().expect("unbounded supply"))).collect();
    shift.rename_vars(&renaming)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }
    fn c(n: &str) -> Term {
        Term::constant(n)
    }
    fn i(a: Term, b: Term) -> Term {
        Term::app("i", vec![a, b])
    }
    fn n(a: Term) -> Term {
        Term::app("n", vec![a])
    }

    fn luk_single() -> Term {
        // i(i(i(x,y),i(i(i(n(z),n(u)),v),z)),i(w,i(i(z,x),i(u,x))))
        i(
            i(i(v("x"), v("y")), i(i(i(n(v("z")), n(v("u"))), v("v")), v("z"))),
            i(v("w"), i(i(v("z"), v("x")), i(v("u"), v("x")))),
        )
    }

    #[test]
    fn variable_convention() {
        for name in ["x", "y", "z", "u", "v", "w", "v6", "x1"] {
            assert!(is_variable_name(name), "{name}");
        }
        for name in ["a", "i", "n", "g1", "e", "P", "+"] {
            assert!(!is_variable_name(name), "{name}");
        }
    }

    #[test]
    fn weights() {
        assert_eq!(v("x").weight(), 1);
        assert_eq!(i(v("x"), v("x")).weight(), 3);
        assert_eq!(luk_single().weight(), 23);
    }

    #[test]
    fn distinct_variable_counts() {
        assert_eq!(i(v("x"), v("x")).distinct_vars(), 1);
        assert_eq!(luk_single().distinct_vars(), 6);
        assert_eq!(luk_single().variables(), vec!["x", "y", "z", "u", "v", "w"]);
    }

    #[test]
    fn skeletons() {
        assert_eq!(i(v("x"), i(v("y"), v("x"))).skeleton().to_string(), "i(*,i(*,*))");
        assert_eq!(n(n(v("x"))).skeleton().to_string(), "n(n(*))");
        assert_eq!(i(v("x"), v("x")).skeleton(), i(v("y"), v("z")).skeleton());
        assert_eq!(luk_single().skeleton().weight(), 23);
    }

    #[test]
    fn canonical_names() {
        assert_eq!(i(v("b1"), v("b1")).canonicalize(), i(v("x"), v("x")));
        assert_eq!(i(v("q"), i(v("r"), v("q"))).canonicalize(), i(v("x"), i(v("y"), v("x"))));
        assert_eq!(luk_single().canonicalize(), luk_single());
        assert_eq!(canonical_var_name(6), "v6");
        assert_eq!(canonical_var_name(7), "v7");
    }

    #[test]
    fn substitution_application() {
        let s = Substitution::from_bindings([("x".to_string(), n(v("z")))]);
        assert_eq!(i(v("x"), v("y")).substitute(&s), i(n(v("z")), v("y")));
        assert_eq!(v("x").substitute(&Substitution::new()), v("x"));
        let s = Substitution::from_bindings([("x".to_string(), i(v("y"), v("z")))]);
        assert_eq!(i(v("x"), v("x")).substitute(&s), i(i(v("y"), v("z")), i(v("y"), v("z"))));
    }

    #[test]
    fn unification_examples() {
        let s = unify(&v("x"), &i(v("y"), v("z"))).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.get("x"), Some(&i(v("y"), v("z"))));

        assert!(matches!(unify(&v("x"), &n(v("x"))), Err(UnifyFailure::Occurs { .. })));

        let s = unify(&i(v("x"), v("y")), &i(n(v("z")), v("z"))).unwrap();
        assert_eq!(s.get("x"), Some(&n(v("z"))));
        assert_eq!(s.get("y"), Some(&v("z")));
        assert_eq!(s.len(), 2);
        assert!(s.is_idempotent());

        assert!(matches!(unify(&n(v("x")), &i(v("x"), v("y"))), Err(UnifyFailure::Clash { .. })));
    }

    #[test]
    fn unifier_is_idempotent_through_chains() {
        // x = y, y = z, z = n(u): every image must be fully resolved
        let s = unify(&i(v("x"), i(v("y"), v("z"))), &i(v("y"), i(v("z"), n(v("u"))))).unwrap();
        assert!(s.is_idempotent());
        let l = i(v("x"), i(v("y"), v("z"))).substitute(&s);
        let r = i(v("y"), i(v("z"), n(v("u")))).substitute(&s);
        assert_eq!(l, r);
    }

    #[test]
    fn matching_examples() {
        let s = match_term(&i(v("x"), v("y")), &i(n(c("a")), c("a"))).unwrap();
        assert_eq!(s.get("x"), Some(&n(c("a"))));
        assert_eq!(s.get("y"), Some(&c("a")));
        assert!(match_term(&i(n(c("a")), c("a")), &i(v("x"), v("y"))).is_none());
        assert!(match_term(&v("x"), &v("x")).unwrap().is_empty());
        // non-linear pattern with shared names
        assert!(match_term(&i(v("x"), v("x")), &i(v("x"), v("y"))).is_none());
        let swap = match_term(&i(v("x"), v("y")), &i(v("y"), v("x"))).unwrap();
        assert_eq!(i(v("x"), v("y")).substitute(&swap), i(v("y"), v("x")));
    }

    #[test]
    fn pattern_containment() {
        assert!(i(n(n(v("x"))), v("y")).contains_pattern(&n(n(v("z")))));
        assert!(!i(n(v("x")), v("y")).contains_pattern(&n(n(v("z")))));
        assert!(i(i(c("a"), c("a")), c("b")).contains_pattern(&i(v("z"), v("z"))));
    }

    #[test]
    fn renaming_apart() {
        let r = rename_apart(&i(v("x"), v("y")), &i(v("x"), v("z")));
        assert_eq!(r, i(v("v6"), v("v7")));
        assert!(r.is_variant(&i(v("x"), v("z"))));
        let t = i(v("x"), v("y"));
        assert_eq!(rename_apart(&i(c("a"), c("b")), &t), t);
        // fresh names avoid names already in use
        let r = rename_apart(&i(v("x"), v("v6")), &i(v("x"), v("v7")));
        assert!(r.variables().iter().all(|n| *n != "x" && *n != "v6"));
        assert!(r.is_variant(&i(v("x"), v("v7"))));
    }

    #[test]
    fn variants() {
        assert!(i(v("x"), v("y")).is_variant(&i(v("y"), v("x"))));
        assert!(!i(v("x"), v("x")).is_variant(&i(v("x"), v("y"))));
        assert!(luk_single().is_variant(&luk_single().canonicalize()));
    }
}
