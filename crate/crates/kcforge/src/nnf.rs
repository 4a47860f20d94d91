//! NNF circuit DAGs with decomposability and determinism checkers.

use crate::error::{Error, Result};
use crate::table::FunTable;
use crate::var::{Assignment, Universe, VarId};
use crate::Guard;
use std::collections::HashMap;
use std::fmt::Write as _;

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    False,
    True,
    Lit(VarId, bool),
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
}

/// A rooted DAG of fan-in-two AND/OR nodes over literal and constant leaves.
/// `dom` may strictly contain the variables occurring in the nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    nodes: Vec<Node>,
    root: NodeId,
    dom: Universe,
}

impl Circuit {
    /// Children must precede parents, which keeps the graph acyclic by
    /// construction; this is also what the file format requires.
    pub fn new(nodes: Vec<Node>, root: NodeId, dom: Universe) -> Result<Circuit> {
        for (i, n) in nodes.iter().enumerate() {
            match *n {
                Node::And(l, r) | Node::Or(l, r) => {
                    if l >= i || r >= i {
                        return Err(Error::Parse {
                            line: i,
                            msg: format!("node {i} references a not-yet-defined child"),
                        });
                    }
                }
                Node::Lit(v, _) => {
                    if !dom.contains(v) {
                        return Err(Error::VarNotInUniverse(v));
                    }
                }
                _ => {}
            }
        }
        if root >= nodes.len() {
            return Err(Error::Parse {
                line: 0,
                msg: format!("root {root} out of range"),
            });
        }
        Ok(Circuit { nodes, root, dom })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn dom(&self) -> &Universe {
        &self.dom
    }

    pub fn node(&self, id: NodeId) -> Node {
        self.nodes[id]
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            if seen[id] {
                continue;
            }
            seen[id] = true;
            if let Node::And(l, r) | Node::Or(l, r) = self.nodes[id] {
                stack.push(l);
                stack.push(r);
            }
        }
        seen
    }

    /// Number of nodes reachable from the root.
    pub fn size(&self) -> usize {
        self.reachable().iter().filter(|&&b| b).count()
    }

    /// Variables occurring in each reachable subcircuit, as bitmasks over
    /// dom positions (dom is limited to 128 variables here; circuits in this
    /// toolkit stay far below that).
    fn var_masks(&self) -> Vec<u128> {
        assert!(self.dom.len() <= 128, "circuit domain too large");
        let mut masks = vec![0u128; self.nodes.len()];
        for id in 0..self.nodes.len() {
            masks[id] = match self.nodes[id] {
                Node::False | Node::True => 0,
                Node::Lit(v, _) => 1 << self.dom.position(v).expect("lit var in dom"),
                Node::And(l, r) | Node::Or(l, r) => masks[l] | masks[r],
            };
        }
        masks
    }

    /// The set of variables occurring under each node, exposed for the
    /// structuredness checks.
    pub(crate) fn var_masks_reachable(&self) -> (Vec<u128>, Vec<bool>) {
        (self.var_masks(), self.reachable())
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool> {
        if a.universe() != &self.dom {
            return Err(Error::UniverseMismatch);
        }
        Ok(self.eval_nodes(a)?[self.root])
    }

    /// One bottom-up sweep valuing every node under `a`.
    pub fn eval_nodes(&self, a: &Assignment) -> Result<Vec<bool>> {
        let mut vals = vec![false; self.nodes.len()];
        for id in 0..self.nodes.len() {
            vals[id] = match self.nodes[id] {
                Node::False => false,
                Node::True => true,
                Node::Lit(v, pol) => a.get(v)? == pol,
                Node::And(l, r) => vals[l] && vals[r],
                Node::Or(l, r) => vals[l] || vals[r],
            };
        }
        Ok(vals)
    }

    /// First AND node (in index order) whose children share a variable.
    pub fn decomposability_violation(&self) -> Option<NodeId> {
        let masks = self.var_masks();
        let reach = self.reachable();
        (0..self.nodes.len()).find(|&id| {
            reach[id]
                && matches!(self.nodes[id], Node::And(l, r) if masks[l] & masks[r] != 0)
        })
    }

    pub fn is_decomposable(&self) -> bool {
        self.decomposability_violation().is_none()
    }

    /// Semantic determinism check: no OR node's children may share a
    /// satisfying assignment over the full domain. Exponential, guarded.
    pub fn determinism_violation(
        &self,
        guard: Guard,
    ) -> Result<Option<(NodeId, Assignment)>> {
        guard.check(self.dom.len(), "determinism check")?;
        let reach = self.reachable();
        for rank in 0..1usize << self.dom.len() {
            let a = Assignment::from_rank(self.dom.clone(), rank);
            let vals = self.eval_nodes(&a)?;
            for id in 0..self.nodes.len() {
                if reach[id] {
                    if let Node::Or(l, r) = self.nodes[id] {
                        if vals[l] && vals[r] {
                            return Ok(Some((id, a)));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn is_deterministic(&self, guard: Guard) -> Result<bool> {
        Ok(self.determinism_violation(guard)?.is_none())
    }

    /// Sufficient-only syntactic test: every OR node is a decision node,
    /// i.e. its children are conjunctions guarded by opposite literals of
    /// the same variable. Passing implies determinism; failing proves
    /// nothing.
    pub fn is_syntactically_deterministic(&self) -> bool {
        let reach = self.reachable();
        let guard_lit = |id: NodeId| -> Option<(VarId, bool)> {
            match self.nodes[id] {
                Node::Lit(v, p) => Some((v, p)),
                Node::And(l, _) => match self.nodes[l] {
                    Node::Lit(v, p) => Some((v, p)),
                    _ => None,
                },
                _ => None,
            }
        };
        (0..self.nodes.len()).all(|id| {
            if !reach[id] {
                return true;
            }
            match self.nodes[id] {
                Node::Or(l, r) => match (guard_lit(l), guard_lit(r)) {
                    (Some((v1, p1)), Some((v2, p2))) => v1 == v2 && p1 != p2,
                    _ => false,
                },
                _ => true,
            }
        })
    }

    pub fn to_table(&self, guard: Guard) -> Result<FunTable> {
        guard.check(self.dom.len(), "circuit tabulation")?;
        let mut t = FunTable::constant(self.dom.clone(), false);
        for rank in 0..1usize << self.dom.len() {
            let a = Assignment::from_rank(self.dom.clone(), rank);
            if self.eval(&a)? {
                t.set_rank(rank, true);
            }
        }
        Ok(t)
    }

    /// Drops unreachable nodes, remapping ids.
    pub fn pruned(&self) -> Circuit {
        let reach = self.reachable();
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for id in 0..self.nodes.len() {
            if reach[id] {
                remap[id] = nodes.len();
                nodes.push(match self.nodes[id] {
                    Node::And(l, r) => Node::And(remap[l], remap[r]),
                    Node::Or(l, r) => Node::Or(remap[l], remap[r]),
                    n => n,
                });
            }
        }
        Circuit {
            nodes,
            root: remap[self.root],
            dom: self.dom.clone(),
        }
    }

    /// Merges structurally identical subcircuits.
    pub fn deduplicated(&self) -> Circuit {
        let mut canon: HashMap<Node, NodeId> = HashMap::new();
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for id in 0..self.nodes.len() {
            let n = match self.nodes[id] {
                Node::And(l, r) => Node::And(remap[l], remap[r]),
                Node::Or(l, r) => Node::Or(remap[l], remap[r]),
                n => n,
            };
            remap[id] = *canon.entry(n).or_insert_with(|| {
                nodes.push(n);
                nodes.len() - 1
            });
        }
        Circuit {
            nodes,
            root: remap[self.root],
            dom: self.dom.clone(),
        }
        .pruned()
    }

    /// The expanded formula of the circuit, for fixtures and debugging only:
    /// expansion is exponential in general.
    pub fn expanded_formula(&self) -> String {
        fn go(c: &Circuit, id: NodeId, out: &mut String) {
            match c.nodes[id] {
                Node::False => out.push('0'),
                Node::True => out.push('1'),
                Node::Lit(v, true) => {
                    let _ = write!(out, "{v}");
                }
                Node::Lit(v, false) => {
                    let _ = write!(out, "~{v}");
                }
                Node::And(l, r) => {
                    out.push('(');
                    go(c, l, out);
                    out.push_str(" & ");
                    go(c, r, out);
                    out.push(')');
                }
                Node::Or(l, r) => {
                    out.push('(');
                    go(c, l, out);
                    out.push_str(" | ");
                    go(c, r, out);
                    out.push(')');
                }
            }
        }
        let mut s = String::new();
        go(self, self.root, &mut s);
        s
    }

    /// Line-oriented format: `nnf <nodeCount> <rootId> <domSize>`, then one
    /// node per line (`F`, `T`, `L <±var>`, `A <l> <r>`, `O <l> <r>`); ids
    /// are line positions from 0.
    pub fn parse(text: &str) -> Result<Circuit> {
        let mut lines = numbered_tokens(text);
        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "empty circuit file".into(),
        })?;
        if header.first().map(|s| s.as_str()) != Some("nnf") || header.len() != 4 {
            return Err(Error::Parse {
                line: line_no,
                msg: "expected `nnf <nodeCount> <rootId> <domSize>`".into(),
            });
        }
        let count: usize = parse_field(&header[1], line_no)?;
        let root: usize = parse_field(&header[2], line_no)?;
        let dom_size: u32 = parse_field(&header[3], line_no)?;
        let mut nodes = Vec::with_capacity(count);
        for (line_no, toks) in lines {
            let node = match toks[0].as_str() {
                "F" => Node::False,
                "T" => Node::True,
                "L" => {
                    let v: i64 = parse_field(toks.get(1).map_or("", |s| s), line_no)?;
                    if v == 0 || v.unsigned_abs() > dom_size as u64 {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("literal {v} out of range"),
                        });
                    }
                    Node::Lit(VarId(v.unsigned_abs() as u32), v > 0)
                }
                "A" | "O" => {
                    let l: usize = parse_field(toks.get(1).map_or("", |s| s), line_no)?;
                    let r: usize = parse_field(toks.get(2).map_or("", |s| s), line_no)?;
                    if toks[0] == "A" {
                        Node::And(l, r)
                    } else {
                        Node::Or(l, r)
                    }
                }
                other => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("unknown node kind `{other}`"),
                    })
                }
            };
            nodes.push(node);
        }
        if nodes.len() != count {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header declares {count} nodes, found {}", nodes.len()),
            });
        }
        Circuit::new(nodes, root, Universe::range(dom_size))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "nnf {} {} {}",
            self.nodes.len(),
            self.root,
            self.dom.len()
        );
        for n in &self.nodes {
            match *n {
                Node::False => s.push_str("F\n"),
                Node::True => s.push_str("T\n"),
                Node::Lit(v, pol) => {
                    let _ = writeln!(s, "L {}", v.0 as i64 * if pol { 1 } else { -1 });
                }
                Node::And(l, r) => {
                    let _ = writeln!(s, "A {l} {r}");
                }
                Node::Or(l, r) => {
                    let _ = writeln!(s, "O {l} {r}");
                }
            }
        }
        s
    }
}

pub(crate) fn numbered_tokens(
    text: &str,
) -> impl Iterator<Item = (usize, Vec<String>)> + '_ {
    text.lines().enumerate().filter_map(|(idx, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            None
        } else {
            Some((
                idx + 1,
                line.split_whitespace().map(|s| s.to_string()).collect(),
            ))
        }
    })
}

pub(crate) fn parse_field<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("malformed field `{tok}`"),
    })
}

/// Incremental construction with n-ary conveniences; n-ary gates are folded
/// into left-leaning fan-in-two trees.
pub struct CircuitBuilder {
    nodes: Vec<Node>,
    dom: Universe,
}

impl CircuitBuilder {
    pub fn new(dom: Universe) -> CircuitBuilder {
        CircuitBuilder {
            nodes: Vec::new(),
            dom,
        }
    }

    fn push(&mut self, n: Node) -> NodeId {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    pub fn constant(&mut self, b: bool) -> NodeId {
        self.push(if b { Node::True } else { Node::False })
    }

    pub fn lit(&mut self, v: VarId, positive: bool) -> NodeId {
        self.push(Node::Lit(v, positive))
    }

    pub fn and(&mut self, l: NodeId, r: NodeId) -> NodeId {
        self.push(Node::And(l, r))
    }

    pub fn or(&mut self, l: NodeId, r: NodeId) -> NodeId {
        self.push(Node::Or(l, r))
    }

    pub fn and_all(&mut self, ids: &[NodeId]) -> NodeId {
        match ids {
            [] => self.constant(true),
            [one] => *one,
            [first, rest @ ..] => {
                let mut acc = *first;
                for &id in rest {
                    acc = self.and(acc, id);
                }
                acc
            }
        }
    }

    pub fn or_all(&mut self, ids: &[NodeId]) -> NodeId {
        match ids {
            [] => self.constant(false),
            [one] => *one,
            [first, rest @ ..] => {
                let mut acc = *first;
                for &id in rest {
                    acc = self.or(acc, id);
                }
                acc
            }
        }
    }

    pub fn finish(self, root: NodeId) -> Circuit {
        Circuit::new(self.nodes, root, self.dom).expect("builder produces valid circuits")
    }
}

/// Direct OR-of-term-ANDs circuit for a DNF, without any v-tree structure.
pub fn dnf_circuit(d: &crate::dnf::Dnf) -> Circuit {
    let mut b = CircuitBuilder::new(d.universe().clone());
    let mut terms = Vec::new();
    for t in d.terms() {
        let lits: Vec<NodeId> = t
            .literals()
            .iter()
            .map(|l| b.lit(l.var, l.positive))
            .collect();
        terms.push(b.and_all(&lits));
    }
    let root = b.or_all(&terms);
    b.finish(root)
}

/// The structured five-variable circuit drawn next to [`crate::dnf::golden_dnf`]:
/// fifteen gates computing the same function, respecting the companion v-tree.
pub fn golden_circuit() -> Circuit {
    let (a, b, c, d, e) = (VarId(1), VarId(2), VarId(3), VarId(4), VarId(5));
    let mut cb = CircuitBuilder::new(Universe::range(5));
    let la = cb.lit(a, true);
    let lb = cb.lit(b, true);
    let w1 = cb.and(la, lb); // a ∧ b
    let lnc = cb.lit(c, false);
    let w2 = cb.and(w1, lnc); // (a ∧ b) ∧ ¬c
    let lc = cb.lit(c, true);
    let w3 = cb.and(w1, lc); // (a ∧ b) ∧ c
    let le = cb.lit(e, true);
    let w4 = cb.and(w3, le); // ((a ∧ b) ∧ c) ∧ e
    let ld = cb.lit(d, true);
    let lne = cb.lit(e, false);
    let g5 = cb.and(ld, lne); // d ∧ ¬e
    let g6 = cb.and(w3, g5); // ((a ∧ b) ∧ c) ∧ (d ∧ ¬e)
    let v = cb.or(g6, w4);
    let v2 = cb.or(v, w2);
    cb.finish(v2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dnf::golden_dnf;

    #[test]
    fn single_constant_evaluates() {
        let c = Circuit::new(vec![Node::True], 0, Universe::range(1)).unwrap();
        let a = Assignment::from_rank(Universe::range(1), 0);
        assert!(c.eval(&a).unwrap());
    }

    #[test]
    fn negative_literal_respects_polarity() {
        let c = Circuit::new(
            vec![Node::Lit(VarId(1), false)],
            0,
            Universe::range(1),
        )
        .unwrap();
        let a = Assignment::from_rank(Universe::range(1), 1); // x1 = 1
        assert!(!c.eval(&a).unwrap());
    }

    #[test]
    fn golden_circuit_satisfied_by_first_disjunct() {
        // a=b=1, c=0, d=e=0 satisfies (a ∧ b ∧ ¬c)
        let c = golden_circuit();
        let a = Assignment::from_pairs(
            Universe::range(5),
            &[
                (VarId(1), true),
                (VarId(2), true),
                (VarId(3), false),
                (VarId(4), false),
                (VarId(5), false),
            ],
        )
        .unwrap();
        assert!(c.eval(&a).unwrap());
    }

    #[test]
    fn size_counts_reachable_nodes() {
        assert_eq!(
            Circuit::new(vec![Node::True], 0, Universe::range(0))
                .unwrap()
                .size(),
            1
        );
        let mut b = CircuitBuilder::new(Universe::range(2));
        let x = b.lit(VarId(1), true);
        let y = b.lit(VarId(2), true);
        let and = b.and(x, y);
        assert_eq!(b.finish(and).size(), 3);
        assert_eq!(golden_circuit().size(), 15);
    }

    #[test]
    fn decomposability_witness() {
        let mut b = CircuitBuilder::new(Universe::range(2));
        let x = b.lit(VarId(1), true);
        let y = b.lit(VarId(2), true);
        let xy = b.or(x, y);
        let root = b.and(x, xy); // x ∧ (x ∨ y) shares x
        let c = b.finish(root);
        assert_eq!(c.decomposability_violation(), Some(root));

        let mut b = CircuitBuilder::new(Universe::range(2));
        let x = b.lit(VarId(1), true);
        let y = b.lit(VarId(2), true);
        let root = b.and(x, y);
        assert!(b.finish(root).is_decomposable());

        assert!(golden_circuit().is_decomposable());
    }

    #[test]
    fn determinism_witness() {
        let mut b = CircuitBuilder::new(Universe::range(1));
        let x = b.lit(VarId(1), true);
        let x2 = b.lit(VarId(1), true);
        let root = b.or(x, x2); // x ∨ x overlaps
        let c = b.finish(root);
        assert!(c.determinism_violation(Guard::TABLE).unwrap().is_some());

        let mut b = CircuitBuilder::new(Universe::range(1));
        let x = b.lit(VarId(1), true);
        let nx = b.lit(VarId(1), false);
        let root = b.or(x, nx); // x ∨ ¬x is deterministic
        assert!(b.finish(root).is_deterministic(Guard::TABLE).unwrap());

        assert!(golden_circuit().is_deterministic(Guard::TABLE).unwrap());
    }

    #[test]
    fn table_matches_dnf_and_counts_models() {
        let c = golden_circuit();
        let t = c.to_table(Guard::TABLE).unwrap();
        assert_eq!(t, golden_dnf().to_table(Guard::TABLE).unwrap());
        assert_eq!(t.sat_count(), 7);
    }

    #[test]
    fn constant_false_table() {
        let c = Circuit::new(vec![Node::False], 0, Universe::range(1)).unwrap();
        assert!(c.to_table(Guard::TABLE).unwrap().is_constant_false());
    }

    #[test]
    fn free_variable_doubles_models() {
        // Lit(x1) over dom {x1, x2}: x2 free
        let c = Circuit::new(
            vec![Node::Lit(VarId(1), true)],
            0,
            Universe::range(2),
        )
        .unwrap();
        assert_eq!(c.to_table(Guard::TABLE).unwrap().sat_count(), 2);
    }

    #[test]
    fn table_invariant_under_prune_and_dedup() {
        let mut b = CircuitBuilder::new(Universe::range(2));
        let x = b.lit(VarId(1), true);
        let x_dup = b.lit(VarId(1), true);
        let y = b.lit(VarId(2), true);
        let a1 = b.and(x, y);
        let a2 = b.and(x_dup, y);
        let _orphan = b.or(x, y); // unreachable
        let root = b.or(a1, a2);
        let c = b.finish(root);
        let t = c.to_table(Guard::TABLE).unwrap();
        assert_eq!(c.pruned().to_table(Guard::TABLE).unwrap(), t);
        let dd = c.deduplicated();
        assert_eq!(dd.to_table(Guard::TABLE).unwrap(), t);
        assert!(dd.size() < c.pruned().size());
    }

    #[test]
    fn syntactic_determinism_is_sufficient_only() {
        // decision-node pattern passes
        let mut b = CircuitBuilder::new(Universe::range(2));
        let x = b.lit(VarId(1), true);
        let nx = b.lit(VarId(1), false);
        let y = b.lit(VarId(2), true);
        let l = b.and(x, y);
        let r = b.and(nx, y);
        let root = b.or(l, r);
        let c = b.finish(root);
        assert!(c.is_syntactically_deterministic());
        assert!(c.is_deterministic(Guard::TABLE).unwrap());

        // semantically deterministic but not a decision node
        let mut b = CircuitBuilder::new(Universe::range(2));
        let x = b.lit(VarId(1), true);
        let y = b.lit(VarId(2), true);
        let nx = b.lit(VarId(1), false);
        let ny = b.lit(VarId(2), false);
        let l = b.and(x, y);
        let r = b.and(nx, ny);
        let root = b.or(l, r);
        let c = b.finish(root);
        assert!(!c.is_syntactically_deterministic());
        assert!(c.is_deterministic(Guard::TABLE).unwrap());
    }

    #[test]
    fn parse_print_round_trip() {
        let c = golden_circuit();
        let again = Circuit::parse(&c.to_text()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn parse_reports_line_numbers() {
        let bad = "nnf 2 1 1\nL 1\nA 0 5\n";
        match Circuit::parse(bad) {
            Err(Error::Parse { line, .. }) => assert!(line > 0),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn dnf_circuit_matches_dnf_table() {
        let d = golden_dnf();
        let c = dnf_circuit(&d);
        assert_eq!(
            c.to_table(Guard::TABLE).unwrap(),
            d.to_table(Guard::TABLE).unwrap()
        );
    }

    #[test]
    fn expanded_formula_prints() {
        let mut b = CircuitBuilder::new(Universe::range(2));
        let x = b.lit(VarId(1), true);
        let ny = b.lit(VarId(2), false);
        let root = b.and(x, ny);
        assert_eq!(b.finish(root).expanded_formula(), "(x1 & ~x2)");
    }
}
