//! V-trees, the respects relation, and v-tree-directed DNF compilation.

use crate::dnf::Dnf;
use crate::error::{Error, Result};
use crate::nnf::{parse_field, numbered_tokens, Circuit, CircuitBuilder, Node, NodeId};
use crate::var::{Universe, VarId};
use std::fmt::Write as _;

pub type VNodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VNode {
    Leaf(VarId),
    Internal(VNodeId, VNodeId),
}

/// A full rooted binary tree whose leaves are in 1-1 correspondence with a
/// variable universe. Children are ordered; the left/right distinction is
/// significant everywhere it is consumed.
///
/// Nodes are stored in post-order (children before parents), so the root is
/// always the highest id; this matches the file format convention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VTree {
    nodes: Vec<VNode>,
}

impl VTree {
    pub fn leaf(v: VarId) -> VTree {
        VTree {
            nodes: vec![VNode::Leaf(v)],
        }
    }

    /// Joins two v-trees under a fresh root.
    pub fn join(left: &VTree, right: &VTree) -> Result<VTree> {
        for v in left.leaf_universe().iter() {
            if right.leaf_universe().contains(v) {
                return Err(Error::VarCollision(v));
            }
        }
        let mut nodes = left.nodes.clone();
        let offset = nodes.len();
        for n in &right.nodes {
            nodes.push(match *n {
                VNode::Leaf(v) => VNode::Leaf(v),
                VNode::Internal(l, r) => VNode::Internal(l + offset, r + offset),
            });
        }
        let l_root = offset - 1;
        let r_root = nodes.len() - 1;
        nodes.push(VNode::Internal(l_root, r_root));
        Ok(VTree { nodes })
    }

    /// A balanced v-tree splitting the variable sequence in halves.
    pub fn balanced(vars: &[VarId]) -> Result<VTree> {
        match vars {
            [] => Err(Error::VtreeMismatch),
            [v] => Ok(VTree::leaf(*v)),
            _ => {
                let mid = vars.len() / 2;
                VTree::join(&VTree::balanced(&vars[..mid])?, &VTree::balanced(&vars[mid..])?)
            }
        }
    }

    /// A right-linear v-tree over the variable sequence.
    pub fn right_linear(vars: &[VarId]) -> Result<VTree> {
        match vars {
            [] => Err(Error::VtreeMismatch),
            [v] => Ok(VTree::leaf(*v)),
            [v, rest @ ..] => VTree::join(&VTree::leaf(*v), &VTree::right_linear(rest)?),
        }
    }

    pub fn root(&self) -> VNodeId {
        self.nodes.len() - 1
    }

    pub fn node(&self, id: VNodeId) -> VNode {
        self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_leaf(&self, id: VNodeId) -> bool {
        matches!(self.nodes[id], VNode::Leaf(_))
    }

    /// Leaves in left-to-right order.
    pub fn leaf_universe(&self) -> Universe {
        let mut vars = Vec::new();
        self.collect_leaves(self.root(), &mut vars);
        Universe::new(vars).expect("v-tree leaves are distinct")
    }

    fn collect_leaves(&self, id: VNodeId, out: &mut Vec<VarId>) {
        match self.nodes[id] {
            VNode::Leaf(v) => out.push(v),
            VNode::Internal(l, r) => {
                self.collect_leaves(l, out);
                self.collect_leaves(r, out);
            }
        }
    }

    /// Variable span of every node, as bitmasks over positions in the given
    /// universe. All leaf variables must belong to `space`.
    pub fn span_masks(&self, space: &Universe) -> Result<Vec<u128>> {
        assert!(space.len() <= 128, "universe too large for span masks");
        let mut masks = vec![0u128; self.nodes.len()];
        for id in 0..self.nodes.len() {
            masks[id] = match self.nodes[id] {
                VNode::Leaf(v) => {
                    let pos = space.position(v).ok_or(Error::VarNotInUniverse(v))?;
                    1 << pos
                }
                VNode::Internal(l, r) => masks[l] | masks[r],
            };
        }
        Ok(masks)
    }

    pub fn parents(&self) -> Vec<Option<VNodeId>> {
        let mut p = vec![None; self.nodes.len()];
        for (id, n) in self.nodes.iter().enumerate() {
            if let VNode::Internal(l, r) = *n {
                p[l] = Some(id);
                p[r] = Some(id);
            }
        }
        p
    }

    /// File format: `vtree <nodeCount>`, then `L <id> <var>` or
    /// `I <id> <leftId> <rightId>`; the root is the highest id.
    pub fn parse(text: &str) -> Result<VTree> {
        let mut lines = numbered_tokens(text);
        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "empty v-tree file".into(),
        })?;
        if header.first().map(|s| s.as_str()) != Some("vtree") || header.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                msg: "expected `vtree <nodeCount>`".into(),
            });
        }
        let count: usize = parse_field(&header[1], line_no)?;
        let mut nodes: Vec<Option<VNode>> = vec![None; count];
        for (line_no, toks) in lines {
            let id: usize = parse_field(toks.get(1).map_or("", |s| s), line_no)?;
            if id >= count {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("id {id} out of range"),
                });
            }
            if nodes[id].is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("duplicate id {id}"),
                });
            }
            nodes[id] = Some(match toks[0].as_str() {
                "L" => {
                    let v: u32 = parse_field(toks.get(2).map_or("", |s| s), line_no)?;
                    VNode::Leaf(VarId(v))
                }
                "I" => {
                    let l: usize = parse_field(toks.get(2).map_or("", |s| s), line_no)?;
                    let r: usize = parse_field(toks.get(3).map_or("", |s| s), line_no)?;
                    VNode::Internal(l, r)
                }
                other => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("unknown v-tree node kind `{other}`"),
                    })
                }
            });
        }
        let nodes: Vec<VNode> = nodes
            .into_iter()
            .enumerate()
            .map(|(id, n)| {
                n.ok_or(Error::Parse {
                    line: 0,
                    msg: format!("missing node {id}"),
                })
            })
            .collect::<Result<_>>()?;
        VTree::from_arena(nodes, count.checked_sub(1).ok_or(Error::Parse {
            line: 0,
            msg: "v-tree must contain at least one node".into(),
        })?)
    }

    /// Validates an arbitrary arena and renumbers it into post-order.
    pub fn from_arena(nodes: Vec<VNode>, root: VNodeId) -> Result<VTree> {
        let bad = |msg: String| Error::Parse { line: 0, msg };
        if root >= nodes.len() {
            return Err(bad(format!("root {root} out of range")));
        }
        // each node except the root must have exactly one parent
        let mut indeg = vec![0usize; nodes.len()];
        for n in &nodes {
            if let VNode::Internal(l, r) = *n {
                if l >= nodes.len() || r >= nodes.len() {
                    return Err(bad("child id out of range".into()));
                }
                indeg[l] += 1;
                indeg[r] += 1;
            }
        }
        for (id, d) in indeg.iter().enumerate() {
            let expect = usize::from(id != root);
            if *d != expect {
                return Err(bad(format!(
                    "node {id} has {d} parents, expected {expect}"
                )));
            }
        }
        // renumber post-order; recursion doubles as the acyclicity check
        fn emit(
            nodes: &[VNode],
            id: VNodeId,
            depth: usize,
            out: &mut Vec<VNode>,
        ) -> Result<VNodeId> {
            if depth > nodes.len() {
                return Err(Error::Parse {
                    line: 0,
                    msg: "v-tree contains a cycle".into(),
                });
            }
            let new = match nodes[id] {
                VNode::Leaf(v) => VNode::Leaf(v),
                VNode::Internal(l, r) => {
                    let nl = emit(nodes, l, depth + 1, out)?;
                    let nr = emit(nodes, r, depth + 1, out)?;
                    VNode::Internal(nl, nr)
                }
            };
            out.push(new);
            Ok(out.len() - 1)
        }
        let mut out = Vec::with_capacity(nodes.len());
        emit(&nodes, root, 0, &mut out)?;
        if out.len() != nodes.len() {
            return Err(bad("v-tree has unreachable nodes".into()));
        }
        let t = VTree { nodes: out };
        // leaf distinctness
        let mut vars = Vec::new();
        t.collect_leaves(t.root(), &mut vars);
        Universe::new(vars).map_err(|_| bad("duplicate leaf variable".into()))?;
        Ok(t)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "vtree {}", self.nodes.len());
        for (id, n) in self.nodes.iter().enumerate() {
            match *n {
                VNode::Leaf(v) => {
                    let _ = writeln!(s, "L {id} {}", v.0);
                }
                VNode::Internal(l, r) => {
                    let _ = writeln!(s, "I {id} {l} {r}");
                }
            }
        }
        s
    }
}

/// First AND node of `c` (in index order) that cannot be assigned to any
/// v-tree node `t'` with `var(left) ⊆ var(t'_left)` and
/// `var(right) ⊆ var(t'_right)`; `None` means the circuit respects `t`.
pub fn respects_violation(c: &Circuit, t: &VTree) -> Result<Option<NodeId>> {
    let space = c.dom().clone();
    for v in t.leaf_universe().iter() {
        if !space.contains(v) {
            // v-tree may structure variables outside the circuit; they get
            // fresh positions appended after dom for mask purposes
        }
    }
    // Build a combined space: circuit dom order, then any extra v-tree leaves.
    let mut combined: Vec<VarId> = space.vars().to_vec();
    for v in t.leaf_universe().iter() {
        if !combined.contains(&v) {
            combined.push(v);
        }
    }
    let combined = Universe::new(combined).expect("deduplicated");
    // Every circuit variable must appear in the v-tree.
    let tree_vars = t.leaf_universe();
    for n in c.nodes() {
        if let Node::Lit(v, _) = *n {
            if !tree_vars.contains(v) {
                return Err(Error::VarNotInUniverse(v));
            }
        }
    }
    let spans = t.span_masks(&combined)?;
    let internals: Vec<(u128, u128)> = (0..t.node_count())
        .filter_map(|id| match t.node(id) {
            VNode::Internal(l, r) => Some((spans[l], spans[r])),
            VNode::Leaf(_) => None,
        })
        .collect();
    Ok(and_placement_violation(c, &combined, &internals))
}

/// Shared core of the structuredness checks: finds the first conjunction
/// node whose child variable masks fit under no internal v-tree split.
pub(crate) fn and_placement_violation(
    c: &Circuit,
    space: &Universe,
    internal_spans: &[(u128, u128)],
) -> Option<NodeId> {
    let mut masks = vec![0u128; c.nodes().len()];
    for id in 0..c.nodes().len() {
        masks[id] = match c.node(id) {
            Node::False | Node::True => 0,
            Node::Lit(v, _) => 1 << space.position(v).expect("var in combined space"),
            Node::And(l, r) | Node::Or(l, r) => masks[l] | masks[r],
        };
    }
    let (_, reach) = c.var_masks_reachable();
    (0..c.nodes().len()).find(|&id| {
        if !reach[id] {
            return false;
        }
        match c.node(id) {
            Node::And(l, r) => !internal_spans
                .iter()
                .any(|&(sl, sr)| masks[l] & !sl == 0 && masks[r] & !sr == 0),
            _ => false,
        }
    })
}

pub fn respects(c: &Circuit, t: &VTree) -> Result<bool> {
    Ok(respects_violation(c, t)?.is_none())
}

/// Compiles an unambiguous DNF into a deterministic structured circuit.
///
/// Each term is compiled by walking the v-tree: at an internal node the
/// recursive compilations of the two sides are conjoined, and a side
/// containing no term variable is skipped rather than padded with constants.
/// Terms are disjoined along a left-leaning spine in list order.
pub fn compile_unambiguous_dnf(d: &Dnf, t: &VTree) -> Result<Circuit> {
    if let Some(w) = d.ambiguity_witness() {
        return Err(Error::AmbiguousDnf {
            term_a: w.term_a,
            term_b: w.term_b,
        });
    }
    let tree_vars = t.leaf_universe();
    if tree_vars.len() != d.universe().len()
        || d.universe().iter().any(|v| !tree_vars.contains(v))
    {
        return Err(Error::VtreeMismatch);
    }
    let mut b = CircuitBuilder::new(d.universe().clone());
    let mut term_roots = Vec::new();
    for term in d.terms() {
        fn walk(
            t: &VTree,
            id: VNodeId,
            term: &crate::dnf::Term,
            b: &mut CircuitBuilder,
        ) -> Option<NodeId> {
            match t.node(id) {
                VNode::Leaf(v) => term.polarity_of(v).map(|pol| b.lit(v, pol)),
                VNode::Internal(l, r) => {
                    match (walk(t, l, term, b), walk(t, r, term, b)) {
                        (Some(a), Some(c)) => Some(b.and(a, c)),
                        (Some(a), None) => Some(a),
                        (None, other) => other,
                    }
                }
            }
        }
        let root = walk(t, t.root(), term, &mut b).unwrap_or_else(|| b.constant(true));
        term_roots.push(root);
    }
    let root = b.or_all(&term_roots);
    Ok(b.finish(root))
}

/// Builds `(x ∧ cf) ∨ (¬x ∧ cg)` over a v-tree extended with a fresh root
/// whose left child is the new leaf `x`. The root disjunction is
/// deterministic because its children force `x` to opposite values, and
/// existentially quantifying `x` recovers `f ∨ g`.
pub fn shannon_join(
    cf: &Circuit,
    cg: &Circuit,
    x: VarId,
    t: &VTree,
) -> Result<(Circuit, VTree)> {
    if cf.dom() != cg.dom() {
        return Err(Error::UniverseMismatch);
    }
    if t.leaf_universe().contains(x) || cf.dom().contains(x) {
        return Err(Error::VarCollision(x));
    }
    if respects_violation(cf, t)?.is_some() || respects_violation(cg, t)?.is_some() {
        return Err(Error::VtreeMismatch);
    }
    let joined_tree = VTree::join(&VTree::leaf(x), t)?;

    let mut dom_vars = vec![x];
    dom_vars.extend(cf.dom().iter());
    let dom = Universe::new(dom_vars)?;

    let mut nodes: Vec<Node> = cf.nodes().to_vec();
    let f_root = cf.root();
    let offset = nodes.len();
    for n in cg.nodes() {
        nodes.push(match *n {
            Node::And(l, r) => Node::And(l + offset, r + offset),
            Node::Or(l, r) => Node::Or(l + offset, r + offset),
            n => n,
        });
    }
    let g_root = cg.root() + offset;
    let lit_x = nodes.len();
    nodes.push(Node::Lit(x, true));
    let lit_nx = nodes.len();
    nodes.push(Node::Lit(x, false));
    let and_f = nodes.len();
    nodes.push(Node::And(lit_x, f_root));
    let and_g = nodes.len();
    nodes.push(Node::And(lit_nx, g_root));
    let root = nodes.len();
    nodes.push(Node::Or(and_f, and_g));
    Ok((Circuit::new(nodes, root, dom)?, joined_tree))
}

fn catalan(n: usize) -> u64 {
    // n ≤ 6 here; direct recurrence
    let mut c = vec![1u64; n + 1];
    for i in 1..=n {
        c[i] = (0..i).map(|j| c[j] * c[i - 1 - j]).sum();
    }
    c[n]
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Number of distinct ordered v-trees over `n` variables:
/// every shape (Catalan(n-1) of them) times every leaf labeling (n!).
pub fn vtree_count(n: usize) -> u64 {
    factorial(n) * catalan(n.saturating_sub(1))
}

/// Streams every v-tree over the universe exactly once: all ordered shapes
/// crossed with all leaf labelings. Enumeration is by index, so ranges can
/// be consumed independently.
pub struct VTreeEnumerator {
    vars: Vec<VarId>,
    index: u64,
    total: u64,
}

pub fn enumerate_vtrees(universe: &Universe) -> Result<VTreeEnumerator> {
    if universe.is_empty() || universe.len() > 7 {
        return Err(Error::GuardExceeded {
            what: "v-tree enumeration",
            vars: universe.len(),
            guard: 7,
        });
    }
    Ok(VTreeEnumerator {
        vars: universe.vars().to_vec(),
        index: 0,
        total: vtree_count(universe.len()),
    })
}

impl VTreeEnumerator {
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn nth_vtree(&self, idx: u64) -> VTree {
        let n = self.vars.len();
        let shapes = catalan(n - 1);
        let (perm_idx, shape_idx) = (idx / shapes, idx % shapes);
        let leaves = permutation_unrank(&self.vars, perm_idx);
        build_shape(&leaves, shape_idx)
    }
}

impl Iterator for VTreeEnumerator {
    type Item = VTree;

    fn next(&mut self) -> Option<VTree> {
        if self.index >= self.total {
            return None;
        }
        let t = self.nth_vtree(self.index);
        self.index += 1;
        Some(t)
    }
}

fn permutation_unrank(vars: &[VarId], mut idx: u64) -> Vec<VarId> {
    let mut pool = vars.to_vec();
    let mut out = Vec::with_capacity(vars.len());
    for i in (0..vars.len()).rev() {
        let f = factorial(i);
        let pick = (idx / f) as usize;
        idx %= f;
        out.push(pool.remove(pick));
    }
    out
}

fn build_shape(leaves: &[VarId], idx: u64) -> VTree {
    if leaves.len() == 1 {
        return VTree::leaf(leaves[0]);
    }
    let mut idx = idx;
    for left_size in 1..leaves.len() {
        let right_size = leaves.len() - left_size;
        let left_shapes = catalan(left_size - 1);
        let right_shapes = catalan(right_size - 1);
        let block = left_shapes * right_shapes;
        if idx < block {
            let l = build_shape(&leaves[..left_size], idx / right_shapes);
            let r = build_shape(&leaves[left_size..], idx % right_shapes);
            return VTree::join(&l, &r).expect("disjoint leaf slices");
        }
        idx -= block;
    }
    unreachable!("shape index within Catalan bound")
}

/// The companion v-tree of the five-variable golden fixture:
/// (((a, b), c), (d, e)).
pub fn golden_vtree() -> VTree {
    let ab = VTree::join(&VTree::leaf(VarId(1)), &VTree::leaf(VarId(2))).unwrap();
    let abc = VTree::join(&ab, &VTree::leaf(VarId(3))).unwrap();
    let de = VTree::join(&VTree::leaf(VarId(4)), &VTree::leaf(VarId(5))).unwrap();
    VTree::join(&abc, &de).unwrap()
}
