//! Simplex (and constant-complexity polytope) range closest-pair.
//!
//! The points are split into `r` classes, each with a bounding cell, and the
//! closest pair of every union of two classes is stored. A query takes the
//! stored answer over the classes whose cells lie inside the range, gathers
//! the points of crossed classes that lie in the range, and matches each of
//! those against the range's points in a small window around it. Windows
//! are reported by a partition tree, as the window cut by the range is
//! itself a polytope of constant complexity.

use std::sync::Arc;

use rayon::prelude::*;

use super::common::{finish, QueryStats};
use super::ortho::DIRECT_BELOW;
use crate::error::{Error, Result};
use crate::geometry::pair::{box_gap2, closest_pair_u32, merge_closest};
use crate::geometry::{closer, BoxRange, Metric, PairResult, PointSet, Region, Shape, Within};
use crate::partition::{build_partition, SimplicialPartition};
use crate::reporting::PartitionTree;

/// `ceil(n^(d^2 / (2d^2 + 1)))`, clamped to `1..=n`.
pub fn default_simplex_r(n: usize, d: usize) -> usize {
    let d2 = (d * d) as f64;
    let r = (n as f64).powf(d2 / (2.0 * d2 + 1.0)).ceil() as usize;
    r.clamp(1, n.max(1))
}

#[derive(Debug, Clone)]
pub struct SimplexRcpIndex {
    points: Arc<PointSet>,
    metric: Metric,
    partition: Option<SimplicialPartition>,
    class_ids: Vec<Vec<u32>>,
    /// Lower-triangular `r x r` table.
    pair_phi: Vec<PairResult>,
    tree: Arc<PartitionTree>,
}

#[inline]
fn tri(a: usize, b: usize) -> usize {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    hi * (hi + 1) / 2 + lo
}

impl SimplexRcpIndex {
    /// Euclidean index with the default `r`.
    pub fn build(points: impl Into<Arc<PointSet>>) -> SimplexRcpIndex {
        Self::build_with(points.into(), Metric::Euclidean, None, None).expect("euclidean build cannot fail")
    }

    /// Index under `metric`, with an optional `r` and an optional prebuilt
    /// partition tree over the same points.
    pub fn build_with(
        points: Arc<PointSet>,
        metric: Metric,
        r: Option<usize>,
        tree: Option<Arc<PartitionTree>>,
    ) -> Result<SimplexRcpIndex> {
        metric.check(points.dim())?;
        let n = points.len();
        let k = metric.compared_dims(points.dim());
        let tree = match tree {
            Some(t) if !Arc::ptr_eq(t.points(), &points) => {
                return Err(Error::InvalidParameter("partition tree built for a different point set".into()));
            }
            Some(t) => t,
            None => Arc::new(PartitionTree::build(points.clone())),
        };
        let mut idx =
            SimplexRcpIndex { points, metric, partition: None, class_ids: Vec::new(), pair_phi: Vec::new(), tree };
        if n < DIRECT_BELOW {
            return Ok(idx);
        }
        let r = r.unwrap_or_else(|| default_simplex_r(n, idx.points.dim()));
        let sp = build_partition(&idx.points, r)?;
        let class_ids: Vec<Vec<u32>> = sp.classes().iter().map(|c| c.iter().map(|&i| i as u32).collect()).collect();
        let ps = &*idx.points;
        let diag: Vec<PairResult> = class_ids.par_iter().map(|c| closest_pair_u32(ps, c, metric)).collect();
        let cells = sp.cells();
        let rows: Vec<Vec<PairResult>> = (0..class_ids.len())
            .into_par_iter()
            .map(|a| {
                (0..=a)
                    .map(|c| {
                        if a == c {
                            return diag[a];
                        }
                        let inner = closer(diag[a], diag[c]);
                        let far = inner.is_some_and(|p| {
                            box_gap2(&cells[a].lo[..k], &cells[a].hi[..k], &cells[c].lo[..k], &cells[c].hi[..k]) > p.dist2
                        });
                        if far {
                            inner
                        } else {
                            merge_closest(ps, &class_ids[a], &class_ids[c], metric, inner)
                        }
                    })
                    .collect()
            })
            .collect();
        idx.pair_phi = rows.into_iter().flatten().collect();
        idx.class_ids = class_ids;
        idx.partition = Some(sp);
        Ok(idx)
    }

    pub fn points(&self) -> &Arc<PointSet> {
        &self.points
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn tree(&self) -> &Arc<PartitionTree> {
        &self.tree
    }

    pub fn is_direct(&self) -> bool {
        self.partition.is_none()
    }

    pub fn partition(&self) -> Option<&SimplicialPartition> {
        self.partition.as_ref()
    }

    /// Number of classes (`0` for a direct-scan index).
    pub fn r(&self) -> usize {
        self.class_ids.len()
    }

    /// Stored closest pair of classes `i ∪ j`.
    pub fn pair_phi(&self, i: usize, j: usize) -> PairResult {
        self.pair_phi[tri(i, j)]
    }

    pub fn query<S: Shape + ?Sized>(&self, q: &S) -> PairResult {
        self.query_with_stats(q, false).0
    }

    pub fn query_with_stats<S: Shape + ?Sized>(&self, q: &S, count_windows: bool) -> (PairResult, QueryStats) {
        assert_eq!(q.dim(), self.points.dim(), "query range dimension");
        let ps = &*self.points;
        let mut stats = QueryStats::default();
        let Some(sp) = &self.partition else {
            stats.fallback = true;
            let inside: Vec<u32> = (0..ps.len() as u32).filter(|&i| q.contains(ps.point(i as usize))).collect();
            return (closest_pair_u32(ps, &inside, self.metric), stats);
        };
        let mut inner = Vec::new();
        let mut light = Vec::new();
        for (i, cell) in sp.cells().iter().enumerate() {
            match q.classify_box(cell) {
                Region::Outside => {}
                Region::Inside => inner.push(i),
                Region::Crossing => {
                    stats.pieces += 1;
                    light.extend(self.class_ids[i].iter().copied().filter(|&a| q.contains(ps.point(a as usize))));
                }
            }
        }
        stats.precomputed = inner.len();
        stats.pieces += inner.len();
        let mut phi = None;
        for (x, &a) in inner.iter().enumerate() {
            for &c in &inner[..=x] {
                phi = closer(phi, self.pair_phi[tri(a, c)]);
            }
        }
        let tree = &*self.tree;
        let mut count = |w: &BoxRange| tree.count(w);
        let counter: Option<&mut dyn FnMut(&BoxRange) -> usize> = if count_windows { Some(&mut count) } else { None };
        let mut touch = Default::default();
        let answer = finish(
            ps,
            self.metric,
            phi,
            &light,
            |w, out| tree.report_into(&Within { window: w, range: q }, out, &mut touch),
            counter,
            &mut stats,
        );
        (answer, stats)
    }

    /// Sizes of the classes crossed by a range, for budget checks.
    pub fn crossed_class_sizes<S: Shape + ?Sized>(&self, q: &S) -> Vec<usize> {
        match &self.partition {
            None => Vec::new(),
            Some(sp) => sp
                .cells()
                .iter()
                .enumerate()
                .filter(|(_, c)| q.classify_box(c) == Region::Crossing)
                .map(|(i, _)| self.class_ids[i].len())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{closest_pair, Pair, Polytope, SimplexRange};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute<S: Shape>(ps: &PointSet, q: &S, m: Metric) -> PairResult {
        let inside: Vec<usize> = (0..ps.len()).filter(|&i| q.contains(ps.point(i))).collect();
        let mut best = None;
        for (x, &p) in inside.iter().enumerate() {
            for &c in &inside[x + 1..] {
                best = closer(best, Some(Pair::new(p, c, m.dist2(ps.point(p), ps.point(c)))));
            }
        }
        best
    }

    fn uniform(n: usize, d: usize, seed: u64) -> PointSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PointSet::new(d, (0..n * d).map(|_| rng.random()).collect()).unwrap()
    }

    #[test]
    fn default_r() {
        assert_eq!(default_simplex_r(1500, 2), (1500f64.powf(4.0 / 9.0)).ceil() as usize);
        assert_eq!(default_simplex_r(1, 3), 1);
    }

    #[test]
    fn single_class_holds_global_pair() {
        let ps = uniform(100, 2, 1);
        let idx = SimplexRcpIndex::build_with(Arc::new(ps.clone()), Metric::Euclidean, Some(1), None).unwrap();
        let all: Vec<usize> = (0..100).collect();
        assert_eq!(idx.pair_phi(0, 0), closest_pair(&ps, &all, Metric::Euclidean));
    }

    #[test]
    fn two_clusters() {
        let mut pts: Vec<[f64; 2]> = (0..20).map(|i| [(i % 5) as f64 * 0.1, (i / 5) as f64 * 0.1]).collect();
        pts.extend((0..20).map(|i| [10.0 + (i % 5) as f64 * 0.2, (i / 5) as f64 * 0.2]));
        let ps = PointSet::from_points(2, &pts).unwrap();
        let idx = SimplexRcpIndex::build_with(Arc::new(ps.clone()), Metric::Euclidean, Some(2), None).unwrap();
        let sp = idx.partition().unwrap();
        assert!(sp.class(0).iter().all(|&i| i < 20));
        let p = idx.pair_phi(0, 1).unwrap();
        // the tighter cluster wins; no cross pair is anywhere near
        assert!(p.i < 20 && p.j < 20);
        assert!((p.dist() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn table_matches_direct() {
        let ps = uniform(1500, 2, 2);
        let idx = SimplexRcpIndex::build(ps.clone());
        let sp = idx.partition().unwrap();
        for i in 0..idx.r() {
            for j in 0..=i {
                let mut u: Vec<usize> = sp.class(i).iter().chain(sp.class(j)).copied().collect();
                u.sort_unstable();
                u.dedup();
                assert_eq!(idx.pair_phi(i, j), closest_pair(&ps, &u, Metric::Euclidean));
            }
        }
    }

    #[test]
    fn simplex_queries_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [2usize, 3] {
            let ps = uniform(1500, d, 10 + d as u64);
            let idx = SimplexRcpIndex::build(ps.clone());
            let big = SimplexRange::new(
                (0..=d).map(|v| (0..d).map(|k| if v == k + 1 { 10.0 } else { -3.0 }).collect()).collect(),
            )
            .unwrap();
            let all: Vec<usize> = (0..ps.len()).collect();
            assert_eq!(idx.query(&big), closest_pair(&ps, &all, Metric::Euclidean));
            for _ in 0..150 {
                let s = SimplexRange::new((0..=d).map(|_| (0..d).map(|_| rng.random_range(-0.3..1.3)).collect()).collect()).unwrap();
                let (got, stats) = idx.query_with_stats(&s, true);
                assert_eq!(got, brute(&ps, &s, Metric::Euclidean));
                let crossed: usize = idx.crossed_class_sizes(&s).iter().sum();
                assert!(stats.light <= crossed);
                assert!(stats.sum_window_all.unwrap() <= 51 * ps.len());
            }
        }
    }

    #[test]
    fn polytopes_and_projected_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ps = Arc::new(uniform(900, 3, 5));
        let tree = Arc::new(PartitionTree::build(ps.clone()));
        let idx = SimplexRcpIndex::build_with(ps.clone(), Metric::Projected(2), None, Some(tree)).unwrap();
        for _ in 0..60 {
            let hs = (0..3).map(|_| {
                crate::geometry::HalfspaceRange::new(
                    crate::geometry::Hyperplane::new(vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)], rng.random_range(-1.0..0.5))
                        .unwrap(),
                    if rng.random_bool(0.5) { crate::geometry::Side::Below } else { crate::geometry::Side::Above },
                )
            });
            let q = Polytope::from_halfspaces(3, hs);
            assert_eq!(idx.query(&q), brute(&ps, &q, Metric::Projected(2)));
        }
    }
}
