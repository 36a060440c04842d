//! Static multi-level range tree.
//!
//! Level `l` is a balanced binary tree over points sorted by coordinate `l`
//! (ties by index). Every node of a non-final level owns a complete tree of
//! the next level over its own points. Trees are implicit: a tree over `m`
//! sorted entries has its root covering all of them, and a node covering
//! `len` entries splits them into `len / 2` on the left and the rest on the
//! right. Nodes are numbered in preorder, so a node's left child is `id + 1`
//! and its right child `id + 2 * (len / 2)`. A tree whose entries start at
//! arena offset `s` uses the id range `[2s, 2s + 2m - 1)`, which keeps ids
//! unique across all trees of a level.

use crate::error::{Error, Result};
use crate::geometry::{BoxRange, PointSet};

/// A node of the final level, identified by a dense id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeRef {
    id: u32,
    start: u32,
    len: u32,
}

impl NodeRef {
    #[inline]
    pub fn id(&self) -> usize {
        self.id as usize
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    fn children(self) -> Option<(NodeRef, NodeRef)> {
        if self.len < 2 {
            return None;
        }
        let half = self.len / 2;
        Some((
            NodeRef { id: self.id + 1, start: self.start, len: half },
            NodeRef { id: self.id + 2 * half, start: self.start + half, len: self.len - half },
        ))
    }

    #[inline]
    fn root(tree_start: u32, len: u32) -> NodeRef {
        NodeRef { id: 2 * tree_start, start: tree_start, len }
    }
}

#[derive(Debug, Clone)]
pub struct RangeTree {
    dim: usize,
    box_dims: usize,
    n: usize,
    /// Point ids per level, grouped by tree and sorted within each tree.
    ids: Vec<Vec<u32>>,
    /// `keys[l][x]` is coordinate `l` of `ids[l][x]`.
    keys: Vec<Vec<f64>>,
    /// For non-final levels: node id to the arena offset of its next-level tree.
    assoc: Vec<Vec<u32>>,
    /// `(start, len)` of every final-level tree.
    last_trees: Vec<(u32, u32)>,
}

impl RangeTree {
    /// Full-dimensional tree.
    pub fn build(ps: &PointSet) -> RangeTree {
        Self::build_on(ps, ps.dim()).expect("box_dims equals dim")
    }

    /// Tree that constrains only the first `box_dims` coordinates.
    pub fn build_on(ps: &PointSet, box_dims: usize) -> Result<RangeTree> {
        if box_dims == 0 || box_dims > ps.dim() {
            return Err(Error::InvalidParameter(format!(
                "range tree over {box_dims} of {} coordinates",
                ps.dim()
            )));
        }
        if ps.len() >= (u32::MAX / 2) as usize {
            return Err(Error::InvalidParameter("too many points for a range tree".into()));
        }
        let mut t = RangeTree {
            dim: ps.dim(),
            box_dims,
            n: ps.len(),
            ids: vec![Vec::new(); box_dims],
            keys: vec![Vec::new(); box_dims],
            assoc: vec![Vec::new(); box_dims - 1],
            last_trees: Vec::new(),
        };
        if ps.len() > 0 {
            let all: Vec<u32> = (0..ps.len() as u32).collect();
            t.build_tree(ps, 0, all);
        }
        Ok(t)
    }

    fn build_tree(&mut self, ps: &PointSet, level: usize, mut pts: Vec<u32>) -> u32 {
        pts.sort_unstable_by(|&a, &b| {
            ps.coord(a as usize, level).total_cmp(&ps.coord(b as usize, level)).then(a.cmp(&b))
        });
        let start = self.ids[level].len() as u32;
        let m = pts.len() as u32;
        self.keys[level].extend(pts.iter().map(|&p| ps.coord(p as usize, level)));
        self.ids[level].extend_from_slice(&pts);
        if level + 1 == self.box_dims {
            self.last_trees.push((start, m));
        } else {
            let need = 2 * (start + m) as usize;
            if self.assoc[level].len() < need {
                self.assoc[level].resize(need, u32::MAX);
            }
            let mut stack = vec![NodeRef::root(start, m)];
            while let Some(node) = stack.pop() {
                let sub = self.ids[level][node.start as usize..(node.start + node.len) as usize].to_vec();
                let child = self.build_tree(ps, level + 1, sub);
                self.assoc[level][node.id as usize] = child;
                if let Some((l, r)) = node.children() {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        start
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn box_dims(&self) -> usize {
        self.box_dims
    }

    /// Exclusive upper bound on final-level node ids, for dense per-node tables.
    pub fn node_id_bound(&self) -> usize {
        2 * self.ids[self.box_dims - 1].len()
    }

    /// Point ids owned by a final-level node.
    #[inline]
    pub fn subset(&self, node: NodeRef) -> &[u32] {
        &self.ids[self.box_dims - 1][node.start as usize..(node.start + node.len) as usize]
    }

    pub fn children(&self, node: NodeRef) -> Option<(NodeRef, NodeRef)> {
        node.children()
    }

    /// Calls `f` on each canonical node of `b`. Only the first `box_dims`
    /// coordinates of `b` are read.
    pub fn for_each_canonical(&self, b: &BoxRange, mut f: impl FnMut(NodeRef)) {
        assert!(b.dim() >= self.box_dims, "box dimension {} below tree dimension {}", b.dim(), self.box_dims);
        if self.n > 0 {
            self.visit_tree(0, 0, self.n as u32, b, &mut f);
        }
    }

    fn visit_tree(&self, level: usize, start: u32, m: u32, b: &BoxRange, f: &mut impl FnMut(NodeRef)) {
        let Some((a, z)) = self.span(level, start, m, b) else { return };
        if level + 1 == self.box_dims {
            self.cover(NodeRef::root(start, m), a, z, &mut |node| f(node));
        } else {
            self.cover(NodeRef::root(start, m), a, z, &mut |node| {
                self.visit_tree(level + 1, self.assoc[level][node.id as usize], node.len, b, f)
            });
        }
    }

    /// Arena positions `[a, z)` of the tree at `start` whose keys lie in
    /// the box's interval on coordinate `level`, or `None` if empty.
    #[inline]
    fn span(&self, level: usize, start: u32, m: u32, b: &BoxRange) -> Option<(u32, u32)> {
        let keys = &self.keys[level][start as usize..(start + m) as usize];
        let (lo, hi) = (b.lo[level], b.hi[level]);
        let a = keys.partition_point(|&k| k < lo) as u32;
        let z = keys.partition_point(|&k| k <= hi) as u32;
        (a < z).then_some((start + a, start + z))
    }

    /// Calls `f` on the maximal nodes below `node` covered by `[a, z)`.
    fn cover(&self, node: NodeRef, a: u32, z: u32, f: &mut impl FnMut(NodeRef)) {
        let (l, r) = (node.start, node.start + node.len);
        if r <= a || z <= l {
            return;
        }
        if a <= l && r <= z {
            f(node);
        } else if let Some((lc, rc)) = node.children() {
            self.cover(lc, a, z, f);
            self.cover(rc, a, z, f);
        }
    }

    /// Like `visit_tree`, but final-level trees hand over the matching run
    /// of their sorted arena as one slice instead of canonical nodes.
    fn visit_runs(&self, level: usize, start: u32, m: u32, b: &BoxRange, f: &mut impl FnMut(&[u32])) {
        let Some((a, z)) = self.span(level, start, m, b) else { return };
        if level + 1 == self.box_dims {
            f(&self.ids[level][a as usize..z as usize]);
        } else {
            self.cover(NodeRef::root(start, m), a, z, &mut |node| {
                self.visit_runs(level + 1, self.assoc[level][node.id as usize], node.len, b, f)
            });
        }
    }

    fn for_each_run(&self, b: &BoxRange, mut f: impl FnMut(&[u32])) {
        assert!(b.dim() >= self.box_dims, "box dimension {} below tree dimension {}", b.dim(), self.box_dims);
        if self.n > 0 {
            self.visit_runs(0, 0, self.n as u32, b, &mut f);
        }
    }

    /// Canonical decomposition of `S ∩ b`: disjoint final-level nodes whose
    /// subsets union to exactly the points in the box.
    pub fn canonical_nodes(&self, b: &BoxRange) -> Vec<NodeRef> {
        let mut out = Vec::new();
        self.for_each_canonical(b, |n| out.push(n));
        out
    }

    pub fn report_box(&self, b: &BoxRange) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_run(b, |run| out.extend(run.iter().map(|&i| i as usize)));
        out
    }

    pub(crate) fn report_box_into(&self, b: &BoxRange, out: &mut Vec<u32>) {
        self.for_each_run(b, |run| out.extend_from_slice(run));
    }

    pub fn count_box(&self, b: &BoxRange) -> usize {
        let mut c = 0;
        self.for_each_run(b, |run| c += run.len());
        c
    }

    /// `ceil(sqrt(n))`: final-level nodes at least this large are heavy.
    pub fn heavy_threshold(&self) -> usize {
        ceil_sqrt(self.n)
    }

    /// Final-level nodes holding at least [`RangeTree::heavy_threshold`] points,
    /// in increasing id order.
    pub fn heavy_nodes(&self) -> Vec<NodeRef> {
        let t = self.heavy_threshold().max(1) as u32;
        let mut out = Vec::new();
        for &(start, m) in &self.last_trees {
            let mut stack = vec![NodeRef::root(start, m)];
            while let Some(node) = stack.pop() {
                if node.len < t {
                    continue;
                }
                out.push(node);
                if let Some((l, r)) = node.children() {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Visits every final-level node.
    pub fn for_each_node(&self, mut f: impl FnMut(NodeRef)) {
        for &(start, m) in &self.last_trees {
            let mut stack = vec![NodeRef::root(start, m)];
            while let Some(node) = stack.pop() {
                f(node);
                if let Some((l, r)) = node.children() {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
    }

    /// Sum of subset sizes over all final-level nodes.
    pub fn total_canonical_size(&self) -> usize {
        fn size(len: usize) -> usize {
            if len <= 1 {
                len
            } else {
                len + size(len / 2) + size(len - len / 2)
            }
        }
        self.last_trees.iter().map(|&(_, m)| size(m as usize)).sum()
    }
}

pub(crate) fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

#[cfg(test)]
fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}
