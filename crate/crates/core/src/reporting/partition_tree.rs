//! Partition trees: each node splits its points in two at the median of its
//! widest coordinate and keeps a bounding cell per half. A query prunes
//! cells outside the range, reports cells inside it wholesale and tests
//! points one by one only in crossed leaves.
//!
//! Many trees can share one [`Forest`] arena, which is how the multi-level
//! reporter stores a secondary tree per range-tree node.

use std::sync::Arc;

use crate::geometry::{HalfspaceRange, PointSet, Region, Shape, SimplexRange};
use crate::partition::simplicial::split_classes;

pub(crate) const BRANCH: usize = 2;
pub(crate) const LEAF: usize = 8;

/// Work done by a reporting query.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Touch {
    /// Cells classified against the range.
    pub nodes: usize,
    /// Points tested individually.
    pub points: usize,
}

impl std::ops::AddAssign for Touch {
    fn add_assign(&mut self, o: Touch) {
        self.nodes += o.nodes;
        self.points += o.points;
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    start: u32,
    len: u32,
    first_child: u32,
    children: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct Forest {
    dim: usize,
    ids: Vec<u32>,
    nodes: Vec<Node>,
    /// `2 * dim` floats per node: low corner then high corner.
    boxes: Vec<f64>,
}

impl Forest {
    pub(crate) fn new(dim: usize) -> Forest {
        Forest { dim, ids: Vec::new(), nodes: Vec::new(), boxes: Vec::new() }
    }

    /// Builds a tree over `pts` (nonempty) and returns its root.
    pub(crate) fn add_tree(&mut self, ps: &PointSet, pts: &[u32]) -> u32 {
        debug_assert!(!pts.is_empty());
        let start = self.ids.len() as u32;
        self.ids.extend_from_slice(pts);
        let root = self.push_node(ps, start, pts.len() as u32);
        let mut stack = vec![root];
        let mut lens = Vec::with_capacity(BRANCH);
        while let Some(v) = stack.pop() {
            let Node { start, len, .. } = self.nodes[v as usize];
            if len as usize <= LEAF {
                continue;
            }
            let parts = (len as usize).div_ceil(LEAF).clamp(2, BRANCH);
            let axis = {
                let (lo, hi) = self.cell(v);
                (0..self.dim).max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])).then(b.cmp(&a))).unwrap_or(0)
            };
            lens.clear();
            split_classes(ps, &mut self.ids[start as usize..(start + len) as usize], parts, axis, &mut lens);
            let first = self.nodes.len() as u32;
            let mut at = start;
            for &l in &lens {
                let c = self.push_node(ps, at, l as u32);
                stack.push(c);
                at += l as u32;
            }
            let node = &mut self.nodes[v as usize];
            node.first_child = first;
            node.children = lens.len() as u32;
        }
        root
    }

    fn push_node(&mut self, ps: &PointSet, start: u32, len: u32) -> u32 {
        let d = self.dim;
        let first = self.ids[start as usize] as usize;
        let at = self.boxes.len();
        self.boxes.extend_from_slice(ps.point(first));
        self.boxes.extend_from_slice(ps.point(first));
        for &i in &self.ids[start as usize + 1..(start + len) as usize] {
            for (k, &x) in ps.point(i as usize).iter().enumerate() {
                let lo = &mut self.boxes[at + k];
                *lo = lo.min(x);
                let hi = &mut self.boxes[at + d + k];
                *hi = hi.max(x);
            }
        }
        self.nodes.push(Node { start, len, first_child: 0, children: 0 });
        (self.nodes.len() - 1) as u32
    }

    #[inline]
    fn cell(&self, v: u32) -> (&[f64], &[f64]) {
        let at = v as usize * 2 * self.dim;
        (&self.boxes[at..at + self.dim], &self.boxes[at + self.dim..at + 2 * self.dim])
    }

    #[inline]
    fn ids_of(&self, n: &Node) -> &[u32] {
        &self.ids[n.start as usize..(n.start + n.len) as usize]
    }

    pub(crate) fn report<S: Shape + ?Sized>(
        &self,
        ps: &PointSet,
        v: u32,
        q: &S,
        out: &mut Vec<u32>,
        touch: &mut Touch,
    ) {
        touch.nodes += 1;
        let node = &self.nodes[v as usize];
        let (lo, hi) = self.cell(v);
        match q.classify(lo, hi) {
            Region::Outside => {}
            Region::Inside => out.extend_from_slice(self.ids_of(node)),
            Region::Crossing if node.children == 0 => {
                touch.points += node.len as usize;
                out.extend(self.ids_of(node).iter().filter(|&&i| q.contains(ps.point(i as usize))));
            }
            Region::Crossing => {
                for c in node.first_child..node.first_child + node.children {
                    self.report(ps, c, q, out, touch);
                }
            }
        }
    }

    pub(crate) fn count<S: Shape + ?Sized>(&self, ps: &PointSet, v: u32, q: &S) -> usize {
        let node = &self.nodes[v as usize];
        let (lo, hi) = self.cell(v);
        match q.classify(lo, hi) {
            Region::Outside => 0,
            Region::Inside => node.len as usize,
            Region::Crossing if node.children == 0 => {
                self.ids_of(node).iter().filter(|&&i| q.contains(ps.point(i as usize))).count()
            }
            Region::Crossing => {
                (node.first_child..node.first_child + node.children).map(|c| self.count(ps, c, q)).sum()
            }
        }
    }

    pub(crate) fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Checks that children partition their parent and every cell holds its points.
    #[cfg(test)]
    fn check(&self, ps: &PointSet, root: u32) {
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            let node = self.nodes[v as usize];
            let (lo, hi) = self.cell(v);
            for &i in self.ids_of(&node) {
                let p = ps.point(i as usize);
                assert!((0..self.dim).all(|k| lo[k] <= p[k] && p[k] <= hi[k]));
            }
            if node.children > 0 {
                let kids: Vec<Node> = (node.first_child..node.first_child + node.children).map(|c| self.nodes[c as usize]).collect();
                assert_eq!(kids[0].start, node.start);
                let total: u32 = kids.iter().map(|k| k.len).sum();
                assert_eq!(total, node.len);
                for w in kids.windows(2) {
                    assert_eq!(w[0].start + w[0].len, w[1].start);
                }
                stack.extend(node.first_child..node.first_child + node.children);
            } else {
                assert!(node.len as usize <= LEAF);
            }
        }
    }
}

/// Simplex and halfspace reporting over one point set.
#[derive(Debug, Clone)]
pub struct PartitionTree {
    points: Arc<PointSet>,
    forest: Forest,
    root: Option<u32>,
}

impl PartitionTree {
    pub fn build(points: Arc<PointSet>) -> PartitionTree {
        let mut forest = Forest::new(points.dim());
        let root = if points.is_empty() {
            None
        } else {
            let all: Vec<u32> = (0..points.len() as u32).collect();
            Some(forest.add_tree(&points, &all))
        };
        PartitionTree { points, forest, root }
    }

    pub fn points(&self) -> &Arc<PointSet> {
        &self.points
    }

    pub fn node_count(&self) -> usize {
        self.forest.node_count()
    }

    /// Indices of the points inside `q`, in no particular order.
    pub fn report<S: Shape + ?Sized>(&self, q: &S) -> Vec<usize> {
        self.report_counted(q).0
    }

    pub fn report_counted<S: Shape + ?Sized>(&self, q: &S) -> (Vec<usize>, Touch) {
        let mut out = Vec::new();
        let mut touch = Touch::default();
        if let Some(root) = self.root {
            self.forest.report(&self.points, root, q, &mut out, &mut touch);
        }
        (out.into_iter().map(|i| i as usize).collect(), touch)
    }

    pub(crate) fn report_into<S: Shape + ?Sized>(&self, q: &S, out: &mut Vec<u32>, touch: &mut Touch) {
        if let Some(root) = self.root {
            self.forest.report(&self.points, root, q, out, touch);
        }
    }

    /// Number of points inside `q`.
    pub fn count<S: Shape + ?Sized>(&self, q: &S) -> usize {
        self.root.map_or(0, |root| self.forest.count(&self.points, root, q))
    }

    pub fn report_simplex(&self, s: &SimplexRange) -> Vec<usize> {
        self.report(s)
    }

    pub fn report_halfspace(&self, h: &HalfspaceRange) -> Vec<usize> {
        self.report(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoxRange, Hyperplane, Side};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(n: usize, d: usize, seed: u64) -> Arc<PointSet> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Arc::new(PointSet::new(d, (0..n * d).map(|_| rng.random()).collect()).unwrap())
    }

    fn sorted(mut v: Vec<usize>) -> Vec<usize> {
        v.sort_unstable();
        v
    }

    fn scan<S: Shape>(ps: &PointSet, q: &S) -> Vec<usize> {
        (0..ps.len()).filter(|&i| q.contains(ps.point(i))).collect()
    }

    #[test]
    fn structure_invariants() {
        let ps = uniform(3000, 3, 2);
        let t = PartitionTree::build(ps.clone());
        t.forest.check(&ps, t.root.unwrap());
    }

    #[test]
    fn trivial_queries() {
        let ps = uniform(500, 2, 1);
        let t = PartitionTree::build(ps.clone());
        let big = SimplexRange::new(vec![vec![-1.0, -1.0], vec![5.0, -1.0], vec![-1.0, 5.0]]).unwrap();
        assert_eq!(sorted(t.report_simplex(&big)), (0..500).collect::<Vec<_>>());
        let away = SimplexRange::new(vec![vec![3.0, 3.0], vec![4.0, 3.0], vec![3.0, 4.0]]).unwrap();
        assert!(t.report_simplex(&away).is_empty());
        let all = HalfspaceRange::below(Hyperplane::new(vec![0.0], -2.0).unwrap());
        assert_eq!(t.report_halfspace(&all).len(), 500);
        let none = HalfspaceRange::below(Hyperplane::new(vec![0.0], 2.0).unwrap());
        assert!(t.report_halfspace(&none).is_empty());
        assert!(PartitionTree::build(Arc::new(PointSet::empty(2))).report(&big).is_empty());
    }

    #[test]
    fn simplex_queries_match_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for d in [2usize, 3] {
            let ps = uniform(1000, d, 3 + d as u64);
            let t = PartitionTree::build(ps.clone());
            for _ in 0..100 {
                let v: Vec<Vec<f64>> = (0..=d).map(|_| (0..d).map(|_| rng.random_range(-0.2..1.2)).collect()).collect();
                let s = SimplexRange::new(v).unwrap();
                assert_eq!(sorted(t.report_simplex(&s)), scan(&ps, &s));
            }
        }
    }

    #[test]
    fn halfspace_and_box_queries_match_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [2usize, 3] {
            let ps = uniform(1000, d, 30 + d as u64);
            let t = PartitionTree::build(ps.clone());
            for _ in 0..100 {
                let coeffs: Vec<f64> = (0..d - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
                let side = if rng.random_bool(0.5) { Side::Below } else { Side::Above };
                let h = HalfspaceRange::new(Hyperplane::new(coeffs, rng.random_range(-1.0..1.0)).unwrap(), side);
                assert_eq!(sorted(t.report_halfspace(&h)), scan(&ps, &h));
                let c: Vec<f64> = (0..d).map(|_| rng.random()).collect();
                let b = BoxRange::new(c.iter().map(|x| x - 0.1).collect(), c.iter().map(|x| x + 0.2).collect()).unwrap();
                assert_eq!(sorted(t.report(&b)), scan(&ps, &b));
                assert_eq!(t.count(&b), scan(&ps, &b).len());
                let w = crate::geometry::Within { window: &b, range: &h };
                assert_eq!(sorted(t.report(&w)), scan(&ps, &w));
            }
        }
    }

    #[test]
    fn duplicates_and_ties() {
        let pts: Vec<[f64; 2]> = (0..400).map(|i| [(i % 5) as f64, (i % 3) as f64]).collect();
        let ps = Arc::new(PointSet::from_points(2, &pts).unwrap());
        let t = PartitionTree::build(ps.clone());
        t.forest.check(&ps, t.root.unwrap());
        let s = SimplexRange::new(vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert_eq!(sorted(t.report(&s)), scan(&ps, &s));
    }
}
