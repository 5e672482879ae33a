//! Flat preorder term encoding used inside the saturation loop.
//!
//! A term is a `Vec<Code>` in preorder. Symbol codes index the [`Symbols`]
//! table, which records arities; variables are `VAR_BASE + k`. Terms stored
//! by the engine are canonical (variables numbered by first occurrence), so
//! two canonical encodings are equal iff the terms are variants.

use std::collections::HashMap;

use crate::term::{canonical_var_name, Term};

use super::SpecError;

pub(crate) type Code = u32;

pub(crate) const VAR_BASE: Code = 1 << 30;
/// Wildcard used for skeleton keys and index edges; never appears in a term.
pub(crate) const STAR: Code = Code::MAX;

#[inline]
pub(crate) fn is_var(c: Code) -> bool {
    c >= VAR_BASE
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Symbols {
    names: Vec<String>,
    arities: Vec<u32>,
    lookup: HashMap<String, Code>,
}

impl Symbols {
    pub(crate) fn intern(&mut self, name: &str, arity: usize) -> Result<Code, SpecError> {
        if let Some(&c) = self.lookup.get(name) {
            let expected = self.arities[c as usize] as usize;
            if expected != arity {
                return Err(SpecError::ArityConflict { symbol: name.to_string(), expected, found: arity });
            }
            return Ok(c);
        }
        let c = self.fresh(name, arity);
        self.lookup.insert(name.to_string(), c);
        Ok(c)
    }

    /// A new symbol that no user-supplied name resolves to.
    pub(crate) fn fresh(&mut self, name: &str, arity: usize) -> Code {
        let c = self.names.len() as Code;
        self.names.push(name.to_string());
        self.arities.push(arity as u32);
        c
    }

    pub(crate) fn lookup(&self, name: &str) -> Option<(Code, usize)> {
        self.lookup.get(name).map(|&c| (c, self.arities[c as usize] as usize))
    }

    #[inline]
    pub(crate) fn arity(&self, c: Code) -> usize {
        if is_var(c) {
            0
        } else {
            self.arities[c as usize] as usize
        }
    }

    /// One past the last position of the subterm starting at `pos`.
    #[inline]
    pub(crate) fn end(&self, t: &[Code], mut pos: usize) -> usize {
        let mut need = 1usize;
        while need > 0 {
            need = need + self.arity(t[pos]) - 1;
            pos += 1;
        }
        pos
    }

    /// Canonical encoding of `term`, interning its symbols.
    pub(crate) fn encode(&mut self, term: &Term) -> Result<Vec<Code>, SpecError> {
        let mut vars: Vec<&str> = Vec::new();
        let mut out = Vec::with_capacity(term.weight());
        for t in term.subterms() {
            match t {
                Term::Var(v) => {
                    let k = match vars.iter().position(|w| w == v) {
                        Some(k) => k,
                        None => {
                            vars.push(v);
                            vars.len() - 1
                        }
                    };
                    out.push(VAR_BASE + k as Code);
                }
                Term::App(f, args) => out.push(self.intern(f, args.len())?),
            }
        }
        Ok(out)
    }

    pub(crate) fn decode(&self, t: &[Code]) -> Term {
        let mut pos = 0;
        self.decode_at(t, &mut pos)
    }

    fn decode_at(&self, t: &[Code], pos: &mut usize) -> Term {
        let c = t[*pos];
        *pos += 1;
        if is_var(c) {
            return Term::Var(canonical_var_name((c - VAR_BASE) as usize));
        }
        let args = (0..self.arity(c)).map(|_| self.decode_at(t, pos)).collect();
        Term::App(self.names[c as usize].clone(), args)
    }
}

/// Number of distinct variables of a canonical encoding.
pub(crate) fn var_count(t: &[Code]) -> usize {
    t.iter().filter(|&&c| is_var(c)).map(|&c| (c - VAR_BASE) as usize + 1).max().unwrap_or(0)
}

pub(crate) fn skeleton_key(t: &[Code]) -> Vec<Code> {
    t.iter().map(|&c| if is_var(c) { STAR } else { c }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Detached {
    Fail,
    Done,
    TooLong,
}

const UNBOUND: (u8, u32) = (u8::MAX, 0);

type Ref = (u8, u32);

/// Reusable scratch space for detachment and matching.
#[derive(Debug, Default)]
pub(crate) struct Engine {
    bind: Vec<Ref>,
    stack: Vec<(Ref, Ref)>,
    occ: Vec<Ref>,
    rename: Vec<Code>,
    pub(crate) out: Vec<Code>,
    matched: Vec<(u32, u32)>,
}

impl Engine {
    /// Condensed detachment on canonical encodings. On success the canonical
    /// conclusion is left in `self.out`, unless it is longer than `limit`, in
    /// which case [`Detached::TooLong`] is returned and `self.out` is partial.
    pub(crate) fn detach(
        &mut self,
        syms: &Symbols,
        detach: Code,
        major: &[Code],
        minor: &[Code],
        limit: usize,
    ) -> Detached {
        if major[0] != detach {
            return Detached::Fail;
        }
        let n0 = var_count(major);
        let slots = n0 + var_count(minor);
        self.bind.clear();
        self.bind.resize(slots, UNBOUND);
        self.stack.clear();
        let terms = [major, minor];
        self.stack.push(((0, 1), (1, 0)));
        while let Some((a, b)) = self.stack.pop() {
            let a = self.deref(&terms, n0, a);
            let b = self.deref(&terms, n0, b);
            if a == b {
                continue;
            }
            let ca = terms[a.0 as usize][a.1 as usize];
            let cb = terms[b.0 as usize][b.1 as usize];
            if is_var(ca) {
                let sa = slot(n0, a.0, ca);
                if is_var(cb) && slot(n0, b.0, cb) == sa {
                    continue;
                }
                if self.occurs(syms, &terms, n0, sa, b) {
                    return Detached::Fail;
                }
                self.bind[sa] = b;
            } else if is_var(cb) {
                let sb = slot(n0, b.0, cb);
                if self.occurs(syms, &terms, n0, sb, a) {
                    return Detached::Fail;
                }
                self.bind[sb] = a;
            } else if ca != cb {
                return Detached::Fail;
            } else {
                let ta = terms[a.0 as usize];
                let tb = terms[b.0 as usize];
                let (mut pa, mut pb) = (a.1 as usize + 1, b.1 as usize + 1);
                for _ in 0..syms.arity(ca) {
                    self.stack.push(((a.0, pa as u32), (b.0, pb as u32)));
                    pa = syms.end(ta, pa);
                    pb = syms.end(tb, pb);
                }
            }
        }
        self.rename.clear();
        self.rename.resize(slots, STAR);
        self.out.clear();
        let consequent = syms.end(major, 1) as u32;
        let mut next = 0;
        if self.emit(syms, &terms, n0, (0, consequent), &mut next, limit) {
            Detached::Done
        } else {
            Detached::TooLong
        }
    }

    #[inline]
    fn deref(&self, terms: &[&[Code]; 2], n0: usize, mut r: Ref) -> Ref {
        loop {
            let c = terms[r.0 as usize][r.1 as usize];
            if !is_var(c) {
                return r;
            }
            let b = self.bind[slot(n0, r.0, c)];
            if b == UNBOUND {
                return r;
            }
            r = b;
        }
    }

    fn occurs(&mut self, syms: &Symbols, terms: &[&[Code]; 2], n0: usize, s: usize, r: Ref) -> bool {
        self.occ.clear();
        self.occ.push(r);
        while let Some((side, pos)) = self.occ.pop() {
            let t = terms[side as usize];
            for &c in &t[pos as usize..syms.end(t, pos as usize)] {
                if is_var(c) {
                    let sl = slot(n0, side, c);
                    if sl == s {
                        return true;
                    }
                    if self.bind[sl] != UNBOUND {
                        self.occ.push(self.bind[sl]);
                    }
                }
            }
        }
        false
    }

    fn emit(&mut self, syms: &Symbols, terms: &[&[Code]; 2], n0: usize, r: Ref, next: &mut Code, limit: usize) -> bool {
        if self.out.len() >= limit {
            return false;
        }
        let r = self.deref(terms, n0, r);
        let t = terms[r.0 as usize];
        let c = t[r.1 as usize];
        if is_var(c) {
            let s = slot(n0, r.0, c);
            if self.rename[s] == STAR {
                self.rename[s] = VAR_BASE + *next;
                *next += 1;
            }
            self.out.push(self.rename[s]);
            return true;
        }
        self.out.push(c);
        let mut p = r.1 as usize + 1;
        for _ in 0..syms.arity(c) {
            if !self.emit(syms, terms, n0, (r.0, p as u32), next, limit) {
                return false;
            }
            p = syms.end(t, p);
        }
        true
    }

    /// One-way matching: is `inst` an instance of `pattern`?
    pub(crate) fn matches(&mut self, syms: &Symbols, pattern: &[Code], inst: &[Code]) -> bool {
        self.matched.clear();
        let mut q = 0;
        for &c in pattern {
            if q >= inst.len() {
                return false;
            }
            if is_var(c) {
                let k = (c - VAR_BASE) as usize;
                if k >= self.matched.len() {
                    self.matched.resize(k + 1, (u32::MAX, 0));
                }
                let e = syms.end(inst, q);
                let (s0, e0) = self.matched[k];
                if s0 == u32::MAX {
                    self.matched[k] = (q as u32, e as u32);
                } else if inst[s0 as usize..e0 as usize] != inst[q..e] {
                    return false;
                }
                q = e;
            } else {
                if inst[q] != c {
                    return false;
                }
                q += 1;
            }
        }
        q == inst.len()
    }

    /// Does some subterm of `t` match `pattern`?
    pub(crate) fn contains_instance(&mut self, syms: &Symbols, pattern: &[Code], t: &[Code]) -> bool {
        (0..t.len()).any(|p| {
            let e = syms.end(t, p);
            e - p >= pattern.len() && self.matches(syms, pattern, &t[p..e])
        })
    }
}

#[inline]
fn slot(n0: usize, side: u8, c: Code) -> usize {
    (c - VAR_BASE) as usize + if side == 0 { 0 } else { n0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::condensed_detachment;
    use crate::syntax::parse_formula;

    fn enc(syms: &mut Symbols, s: &str) -> Vec<Code> {
        syms.encode(&parse_formula(s).unwrap()).unwrap()
    }

    #[test]
    fn encode_decode_roundtrip() {
        let mut syms = Symbols::default();
        let t = parse_formula("i(i(y,x),n(i(y,z)))").unwrap();
        let f = syms.encode(&t).unwrap();
        assert_eq!(f.len(), 8);
        assert_eq!(var_count(&f), 3);
        assert_eq!(syms.decode(&f), t.canonicalize());
        assert_eq!(syms.end(&f, 1), 4);
        assert!(syms.intern("i", 1).is_err());
    }

    #[test]
    fn detachment_agrees_with_tree_version() {
        let mut syms = Symbols::default();
        let ax = ["i(i(x,y),i(i(y,z),i(x,z)))", "i(i(n(x),x),x)", "i(x,i(n(x),y))", "i(x,x)", "n(x)"];
        let flats: Vec<_> = ax.iter().map(|s| enc(&mut syms, s)).collect();
        let i = syms.lookup("i").unwrap().0;
        let mut e = Engine::default();
        for (a, fa) in ax.iter().zip(&flats) {
            for (b, fb) in ax.iter().zip(&flats) {
                let tree = condensed_detachment(&parse_formula(a).unwrap(), &parse_formula(b).unwrap(), "i").ok();
                let flat = (e.detach(&syms, i, fa, fb, usize::MAX) == Detached::Done).then(|| syms.decode(&e.out));
                assert_eq!(flat, tree, "{a} / {b}");
            }
        }
    }

    #[test]
    fn long_conclusions_are_cut_short() {
        let mut syms = Symbols::default();
        let major = enc(&mut syms, "i(x,i(x,x))");
        let minor = enc(&mut syms, "i(y,i(y,y))");
        let i = syms.lookup("i").unwrap().0;
        let mut e = Engine::default();
        assert_eq!(e.detach(&syms, i, &major, &minor, 11), Detached::Done);
        assert_eq!(e.out.len(), 11);
        assert_eq!(e.detach(&syms, i, &major, &minor, 10), Detached::TooLong);
        let neg = enc(&mut syms, "n(x)");
        assert_eq!(e.detach(&syms, i, &neg, &minor, 10), Detached::Fail);
    }

    #[test]
    fn matching_and_containment() {
        let mut syms = Symbols::default();
        let p = enc(&mut syms, "i(x,x)");
        let yes = enc(&mut syms, "i(n(y),n(y))");
        let no = enc(&mut syms, "i(n(y),n(z))");
        let mut e = Engine::default();
        assert!(e.matches(&syms, &p, &yes));
        assert!(!e.matches(&syms, &p, &no));
        assert!(!e.matches(&syms, &yes, &p));
        let nn = enc(&mut syms, "n(n(x))");
        let t = enc(&mut syms, "i(y,i(n(n(z)),z))");
        assert!(e.contains_instance(&syms, &nn, &t));
        assert!(!e.contains_instance(&syms, &nn, &yes));
    }

    fn random_term() -> impl proptest::strategy::Strategy<Value = crate::term::Term> {
        use crate::term::Term;
        use proptest::prelude::*;
        prop::sample::select(vec!["x", "y", "z"]).prop_map(Term::var).prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|t| Term::app("n", vec![t])),
                (inner.clone(), inner).prop_map(|(a, b)| Term::app("i", vec![a, b])),
            ]
        })
    }

    proptest::proptest! {
        #![proptest_config(proptest::test_runner::Config { cases: 1000, failure_persistence: None, ..Default::default() })]

        #[test]
        fn random_detachments_agree(a in random_term(), b in random_term(), c in random_term()) {
            let mut syms = Symbols::default();
            syms.intern("i", 2).unwrap();
            let (fa, fb, fc) = (syms.encode(&a).unwrap(), syms.encode(&b).unwrap(), syms.encode(&c).unwrap());
            let i = syms.lookup("i").unwrap().0;
            let mut e = Engine::default();
            let tree = condensed_detachment(&a, &b, "i").ok();
            let flat = (e.detach(&syms, i, &fa, &fb, usize::MAX) == Detached::Done).then(|| syms.decode(&e.out));
            proptest::prop_assert_eq!(flat, tree);
            let tree_match = crate::term::match_term(&a, &c).is_some();
            proptest::prop_assert_eq!(e.matches(&syms, &fa, &fc), tree_match);
        }
    }
}
