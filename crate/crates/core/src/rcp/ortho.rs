//! Orthogonal range closest-pair.
//!
//! A range tree splits a query box into canonical nodes. For every pair of
//! heavy nodes (at least `ceil(sqrt n)` points) the closest pair of their
//! union is stored, so the part of the answer inside heavy nodes is a table
//! lookup. Points of light nodes are few; each is matched against the
//! points of the box lying in a small window around it.

use std::sync::Arc;

use super::common::{finish, QueryStats};
use crate::geometry::pair::{box_gap2, bounds, closest_pair_u32, merge_closest};
use crate::geometry::{closer, BoxRange, Metric, Pair, PairResult, PointSet};
use crate::reporting::{NodeRef, RangeTree};

const NONE: u32 = u32::MAX;

/// Inputs smaller than this are answered by a direct scan.
pub const DIRECT_BELOW: usize = 16;

#[derive(Debug, Clone, Copy)]
struct Slot {
    i: u32,
    j: u32,
    dist2: f64,
}

impl Slot {
    const EMPTY: Slot = Slot { i: NONE, j: NONE, dist2: f64::INFINITY };

    fn get(self) -> PairResult {
        (self.i != NONE).then(|| Pair { i: self.i as usize, j: self.j as usize, dist2: self.dist2 })
    }

    fn from(p: PairResult) -> Slot {
        p.map_or(Slot::EMPTY, |p| Slot { i: p.i as u32, j: p.j as u32, dist2: p.dist2 })
    }
}

#[derive(Debug, Clone)]
pub struct OrthoRcpIndex {
    points: Arc<PointSet>,
    tree: RangeTree,
    /// Heavy nodes ordered by size, then id.
    heavy: Vec<NodeRef>,
    rank_of: Vec<u32>,
    /// Lower-triangular table over heavy ranks.
    phi: Vec<Slot>,
}

#[inline]
fn tri(a: usize, b: usize) -> usize {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    hi * (hi + 1) / 2 + lo
}

impl OrthoRcpIndex {
    pub fn build(points: impl Into<Arc<PointSet>>) -> OrthoRcpIndex {
        let points = points.into();
        let tree = RangeTree::build(&points);
        let mut idx = OrthoRcpIndex { points, tree, heavy: Vec::new(), rank_of: Vec::new(), phi: Vec::new() };
        if idx.points.len() >= DIRECT_BELOW {
            idx.build_phi();
        }
        idx
    }

    fn build_phi(&mut self) {
        let ps = &*self.points;
        let metric = Metric::Euclidean;
        let mut heavy = self.tree.heavy_nodes();
        heavy.sort_unstable_by_key(|h| (h.len(), h.id()));
        let mut rank_of = vec![NONE; self.tree.node_id_bound()];
        for (r, h) in heavy.iter().enumerate() {
            rank_of[h.id()] = r as u32;
        }
        let big = 2 * self.tree.heavy_threshold();
        let d = ps.dim();
        let boxes: Vec<(Vec<f64>, Vec<f64>)> =
            heavy.iter().map(|&h| bounds(ps, self.tree.subset(h), d).expect("heavy nodes are nonempty")).collect();
        let kids = |u: NodeRef| -> (usize, usize) {
            let (a, b) = self.tree.children(u).expect("large node has children");
            (rank_of[a.id()] as usize, rank_of[b.id()] as usize)
        };
        let h = heavy.len();
        let mut phi = vec![Slot::EMPTY; h * (h + 1) / 2];
        for r in 0..h {
            let u = heavy[r];
            let diag = if u.len() >= big {
                let (a, b) = kids(u);
                closer(closer(phi[tri(a, a)].get(), phi[tri(b, b)].get()), phi[tri(a, b)].get())
            } else {
                closest_pair_u32(ps, self.tree.subset(u), metric)
            };
            phi[tri(r, r)] = Slot::from(diag);
            for c in 0..r {
                let value = if u.len() >= big {
                    let (a, b) = kids(u);
                    closer(closer(phi[tri(a, c)].get(), phi[tri(b, c)].get()), phi[tri(a, b)].get())
                } else {
                    let inner = closer(diag, phi[tri(c, c)].get());
                    let (ul, uh) = (&boxes[r].0, &boxes[r].1);
                    let (vl, vh) = (&boxes[c].0, &boxes[c].1);
                    if inner.is_some_and(|p| box_gap2(ul, uh, vl, vh) > p.dist2) {
                        inner
                    } else {
                        merge_closest(ps, self.tree.subset(u), self.tree.subset(heavy[c]), metric, inner)
                    }
                };
                phi[tri(r, c)] = Slot::from(value);
            }
        }
        self.heavy = heavy;
        self.rank_of = rank_of;
        self.phi = phi;
    }

    pub fn points(&self) -> &Arc<PointSet> {
        &self.points
    }

    pub fn tree(&self) -> &RangeTree {
        &self.tree
    }

    /// True when queries bypass the index (fewer than 16 points).
    pub fn is_direct(&self) -> bool {
        self.points.len() < DIRECT_BELOW
    }

    pub fn heavy_nodes(&self) -> &[NodeRef] {
        &self.heavy
    }

    pub fn heavy_count(&self) -> usize {
        self.heavy.len()
    }

    /// Number of stored heavy pairs, diagonal included.
    pub fn phi_len(&self) -> usize {
        self.phi.len()
    }

    /// Stored closest pair of `S(u) ∪ S(v)`; `None` unless both are heavy.
    pub fn phi(&self, u: NodeRef, v: NodeRef) -> Option<PairResult> {
        let ru = *self.rank_of.get(u.id())?;
        let rv = *self.rank_of.get(v.id())?;
        (ru != NONE && rv != NONE).then(|| self.phi[tri(ru as usize, rv as usize)].get())
    }

    pub fn query(&self, b: &BoxRange) -> PairResult {
        self.query_with_stats(b, false).0
    }

    /// Query plus counters; `count_windows` also counts all data points in
    /// each window, which costs an extra box count per light point.
    pub fn query_with_stats(&self, b: &BoxRange, count_windows: bool) -> (PairResult, QueryStats) {
        assert_eq!(b.dim(), self.points.dim(), "query box dimension");
        let mut stats = QueryStats::default();
        let ps = &*self.points;
        if self.is_direct() {
            stats.fallback = true;
            let inside: Vec<u32> = (0..ps.len() as u32).filter(|&i| b.contains(ps.point(i as usize))).collect();
            return (closest_pair_u32(ps, &inside, Metric::Euclidean), stats);
        }
        let mut ranks = Vec::new();
        let mut light = Vec::new();
        self.tree.for_each_canonical(b, |node| {
            stats.pieces += 1;
            match self.rank_of[node.id()] {
                NONE => light.extend_from_slice(self.tree.subset(node)),
                r => ranks.push(r as usize),
            }
        });
        stats.precomputed = ranks.len();
        let mut phi = None;
        for (x, &a) in ranks.iter().enumerate() {
            for &c in &ranks[..=x] {
                phi = closer(phi, self.phi[tri(a, c)].get());
            }
        }
        let mut count = |w: &BoxRange| self.tree.count_box(w);
        let counter: Option<&mut dyn FnMut(&BoxRange) -> usize> = if count_windows { Some(&mut count) } else { None };
        let answer = finish(
            ps,
            Metric::Euclidean,
            phi,
            &light,
            |w, out| self.tree.report_box_into(&w.intersection(b), out),
            counter,
            &mut stats,
        );
        (answer, stats)
    }
}
