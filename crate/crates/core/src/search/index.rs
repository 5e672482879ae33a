//! Discrimination tree over flat terms, with variables collapsed to one
//! wildcard edge. Retrieval is imperfect for non-linear variables, so callers
//! confirm each candidate with an exact match.

use super::flat::{is_var, Code, Symbols, STAR};

#[derive(Debug, Clone)]
struct Node {
    edges: Vec<(Code, u32)>,
    /// Nodes reached from here by consuming exactly one complete subterm.
    jumps: Vec<u32>,
    leaves: Vec<u32>,
    /// Bounds on the length of the remaining suffix of any term stored below.
    min_rest: u32,
    max_rest: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct DiscTree {
    nodes: Vec<Node>,
}

impl Default for Node {
    fn default() -> Self {
        Node { edges: Vec::new(), jumps: Vec::new(), leaves: Vec::new(), min_rest: u32::MAX, max_rest: 0 }
    }
}

impl Default for DiscTree {
    fn default() -> Self {
        DiscTree { nodes: vec![Node::default()] }
    }
}

#[inline]
fn edge_code(c: Code) -> Code {
    if is_var(c) {
        STAR
    } else {
        c
    }
}

impl DiscTree {
    fn child(&self, node: u32, code: Code) -> Option<u32> {
        self.nodes[node as usize].edges.iter().find(|e| e.0 == code).map(|e| e.1)
    }

    pub(crate) fn insert(&mut self, syms: &Symbols, term: &[Code], id: u32) {
        let mut path = Vec::with_capacity(term.len() + 1);
        path.push(0u32);
        let mut first_new = usize::MAX;
        for (k, &c) in term.iter().enumerate() {
            let node = path[k];
            let code = edge_code(c);
            let next = match self.child(node, code) {
                Some(n) => n,
                None => {
                    let n = self.nodes.len() as u32;
                    self.nodes.push(Node::default());
                    self.nodes[node as usize].edges.push((code, n));
                    first_new = first_new.min(k + 1);
                    n
                }
            };
            path.push(next);
        }
        // A jump can only be missing if its target node was created just now:
        // an existing node means this exact prefix, and so this subterm, was
        // inserted before.
        for p in 0..term.len() {
            let e = syms.end(term, p);
            if e >= first_new {
                self.nodes[path[p] as usize].jumps.push(path[e]);
            }
        }
        for (k, &n) in path.iter().enumerate() {
            let rest = (term.len() - k) as u32;
            let node = &mut self.nodes[n as usize];
            node.min_rest = node.min_rest.min(rest);
            node.max_rest = node.max_rest.max(rest);
        }
        self.nodes[path[term.len()] as usize].leaves.push(id);
    }

    pub(crate) fn remove(&mut self, term: &[Code], id: u32) {
        let mut node = 0u32;
        for &c in term {
            match self.child(node, edge_code(c)) {
                Some(n) => node = n,
                None => return,
            }
        }
        self.nodes[node as usize].leaves.retain(|&l| l != id);
    }

    /// Candidates that may generalize `query`.
    pub(crate) fn generalizations(&self, syms: &Symbols, query: &[Code], out: &mut Vec<u32>) {
        self.gen_at(syms, query, 0, 0, out);
    }

    fn gen_at(&self, syms: &Symbols, query: &[Code], node: u32, pos: usize, out: &mut Vec<u32>) {
        let n = &self.nodes[node as usize];
        // each stored symbol covers at least one query symbol
        if n.min_rest as usize > query.len() - pos {
            return;
        }
        if pos == query.len() {
            out.extend_from_slice(&n.leaves);
            return;
        }
        for &(code, child) in &n.edges {
            if code == STAR {
                self.gen_at(syms, query, child, syms.end(query, pos), out);
            } else if code == query[pos] {
                self.gen_at(syms, query, child, pos + 1, out);
            }
        }
    }

    /// Candidates that may be instances of `query`.
    pub(crate) fn instances(&self, query: &[Code], out: &mut Vec<u32>) {
        self.inst_at(query, 0, 0, out);
    }

    fn inst_at(&self, query: &[Code], node: u32, pos: usize, out: &mut Vec<u32>) {
        let n = &self.nodes[node as usize];
        if (n.max_rest as usize) < query.len() - pos {
            return;
        }
        if pos == query.len() {
            out.extend_from_slice(&n.leaves);
            return;
        }
        let c = query[pos];
        if is_var(c) {
            for &j in &n.jumps {
                self.inst_at(query, j, pos + 1, out);
            }
        } else if let Some(child) = self.child(node, c) {
            self.inst_at(query, child, pos + 1, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    #[test]
    fn retrieval_is_a_superset_of_exact_answers() {
        let mut syms = Symbols::default();
        let stored = ["i(x,y)", "i(x,x)", "i(n(x),y)", "n(x)", "i(i(x,y),z)"];
        let flats: Vec<_> = stored.iter().map(|s| syms.encode(&parse_formula(s).unwrap()).unwrap()).collect();
        let mut tree = DiscTree::default();
        for (i, f) in flats.iter().enumerate() {
            tree.insert(&syms, f, i as u32);
        }
        let q = syms.encode(&parse_formula("i(n(y),y)").unwrap()).unwrap();
        let mut out = Vec::new();
        tree.generalizations(&syms, &q, &mut out);
        out.sort();
        assert_eq!(out, vec![0, 1, 2]);

        let q = syms.encode(&parse_formula("i(x,y)").unwrap()).unwrap();
        let mut out = Vec::new();
        tree.instances(&q, &mut out);
        out.sort();
        assert_eq!(out, vec![0, 1, 2, 4]);

        tree.remove(&flats[2], 2);
        let mut out = Vec::new();
        tree.instances(&q, &mut out);
        out.sort();
        assert_eq!(out, vec![0, 1, 4]);
    }
}
