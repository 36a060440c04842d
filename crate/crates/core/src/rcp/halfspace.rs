//! Halfspace and ball range closest-pair.
//!
//! The data points double as the dual hyperplanes `a*`. A cutting of the dual
//! space stores, per cell, the closest pair of the points whose duals pass
//! above the whole cell; those points lie in every halfspace whose dual point
//! falls in the cell. A query locates its dual point, takes that stored pair,
//! and collects the remaining points of the halfspace (their duals cross the
//! cell) with one wedge query per cell corner.
//!
//! Floating-point evaluation is made safe by a margin `tau`: stored sets use
//! constraints tightened by `tau`, and collection queries are loosened by it
//! before an exact membership filter.
//!
//! Balls are answered on lifted points `(x, |x|^2)` with distances taken on
//! the first `d` coordinates.

use std::sync::Arc;

use rayon::prelude::*;

use super::common::{finish, QueryStats};
use super::ortho::DIRECT_BELOW;
use super::simplex::SimplexRcpIndex;
use crate::error::{Error, Result};
use crate::geometry::pair::closest_pair_u32;
use crate::geometry::{
    ball_to_lifted_halfspace, BallRange, BoxRange, HalfspaceRange, Hyperplane, Metric, PairResult, PointSet,
    Polytope, Region, Shape, Side, Within,
};
use crate::partition::cutting::{build_cutting_of, default_clip};
use crate::partition::Cutting;
use crate::reporting::PartitionTree;

/// Cells whose stored set is smaller than this get a direct closest-pair
/// computation during the build.
pub const SMALL_CELL: usize = 32;

/// `ceil(n^(1/d))`, clamped to `1..=n`.
pub fn default_halfspace_r(n: usize, d: usize) -> usize {
    let r = (n as f64).powf(1.0 / d as f64).ceil() as usize;
    r.clamp(1, n.max(1))
}

#[derive(Debug, Clone)]
struct Cut {
    cutting: Cutting,
    cell_phi: Vec<PairResult>,
    tau: f64,
    data_box: BoxRange,
}

/// Halfspace index over points in `R^D`, `D >= 2`.
#[derive(Debug, Clone)]
pub struct HalfspaceRcpIndex {
    points: Arc<PointSet>,
    metric: Metric,
    r: usize,
    seed: u64,
    cut: Option<Cut>,
    tree: Arc<PartitionTree>,
    /// Same index on points with the last coordinate negated, for queries
    /// above a hyperplane.
    mirror: Option<Box<HalfspaceRcpIndex>>,
}

/// Parts of a located halfspace query, for inspection in tests.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub cell: usize,
    /// Stored set of the cell.
    pub stored: Vec<usize>,
    /// Points of the range collected at query time.
    pub light: Vec<usize>,
}

impl HalfspaceRcpIndex {
    /// Euclidean index answering both below and above queries.
    pub fn build(points: impl Into<Arc<PointSet>>, r: Option<usize>, seed: u64) -> Result<HalfspaceRcpIndex> {
        Self::build_mirrored(points.into(), Metric::Euclidean, r, seed)
    }

    /// Index answering both below and above queries under `metric`. Above
    /// queries go to a twin built on the points with the last coordinate
    /// negated, which every metric leaves unchanged.
    pub fn build_mirrored(points: Arc<PointSet>, metric: Metric, r: Option<usize>, seed: u64) -> Result<HalfspaceRcpIndex> {
        let mut idx = Self::build_with(points.clone(), metric, r, seed)?;
        let d = points.dim();
        let flipped = points.map(d, |p, out| {
            out.extend_from_slice(&p[..d - 1]);
            out.push(-p[d - 1]);
        })?;
        idx.mirror = Some(Box::new(Self::build_with(Arc::new(flipped), metric, r, seed)?));
        Ok(idx)
    }

    /// Index for queries below a hyperplane only, under `metric`.
    pub fn build_with(points: Arc<PointSet>, metric: Metric, r: Option<usize>, seed: u64) -> Result<HalfspaceRcpIndex> {
        let n = points.len();
        let d = points.dim();
        if d < 2 {
            return Err(Error::InvalidParameter("halfspace queries need dimension >= 2".into()));
        }
        metric.check(d)?;
        let tree = Arc::new(PartitionTree::build(points.clone()));
        let forced = r.is_some();
        let r = r.unwrap_or_else(|| default_halfspace_r(n, d));
        let mut idx = HalfspaceRcpIndex { points, metric, r, seed, cut: None, tree, mirror: None };
        // an explicit r builds the cutting even for tiny inputs
        if n >= DIRECT_BELOW || (forced && n > 0) {
            idx.cut = Some(idx.build_cut()?);
        }
        Ok(idx)
    }

    fn build_cut(&self) -> Result<Cut> {
        let ps = &*self.points;
        let d = ps.dim();
        let clip = default_clip(ps);
        let a = ps.max_abs();
        let v = clip.lo.iter().chain(&clip.hi).fold(0.0f64, |m, x| m.max(x.abs()));
        let df = d as f64;
        let tau = 16.0 * (df + 4.0) * f64::EPSILON * (1.0 + a + v + df * a * v + df * v * v);
        let mut cutting = build_cutting_of(ps, self.r, clip, 3.0 * tau, self.seed)?;
        cutting.drop_conflicts();
        let (lo, hi) = ps.bounds().expect("nonempty");
        let data_box = BoxRange::raw(lo, hi);
        let simplex =
            SimplexRcpIndex::build_with(self.points.clone(), self.metric, None, Some(self.tree.clone()))?;
        let mut cut = Cut { cutting, cell_phi: Vec::new(), tau, data_box };
        let cell_phi: Vec<PairResult> = (0..cut.cutting.cell_count())
            .into_par_iter()
            .map(|i| {
                let q = cut.stored_polytope(i);
                let members: Vec<u32> = self.tree.report(&q).into_iter().map(|x| x as u32).collect();
                if members.len() < SMALL_CELL {
                    closest_pair_u32(ps, &members, self.metric)
                } else {
                    simplex.query(&q)
                }
            })
            .collect();
        cut.cell_phi = cell_phi;
        Ok(cut)
    }

    pub fn points(&self) -> &Arc<PointSet> {
        &self.points
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_direct(&self) -> bool {
        self.cut.is_none()
    }

    pub fn cutting(&self) -> Option<&Cutting> {
        self.cut.as_ref().map(|c| &c.cutting)
    }

    /// Margin used to keep stored sets and collection queries exact.
    pub fn margin(&self) -> Option<f64> {
        self.cut.as_ref().map(|c| c.tau)
    }

    pub fn mirror(&self) -> Option<&HalfspaceRcpIndex> {
        self.mirror.as_deref()
    }

    /// Stored closest pair of cell `i`.
    pub fn cell_phi(&self, i: usize) -> PairResult {
        self.cut.as_ref().expect("index has no cutting").cell_phi[i]
    }

    /// Members of cell `i`'s stored set, by scanning its definition.
    pub fn stored_set(&self, i: usize) -> Vec<usize> {
        let cut = self.cut.as_ref().expect("index has no cutting");
        let q = cut.stored_polytope(i);
        (0..self.points.len()).filter(|&a| q.contains(self.points.point(a))).collect()
    }

    pub fn query(&self, h: &HalfspaceRange) -> PairResult {
        self.query_with_stats(h, false).0
    }

    pub fn query_with_stats(&self, h: &HalfspaceRange, count_windows: bool) -> (PairResult, QueryStats) {
        assert_eq!(h.dim(), self.points.dim(), "query range dimension");
        match h.side {
            Side::Below => self.query_below(&h.plane, h, count_windows),
            Side::Above => {
                let m = self.mirror.as_ref().expect("index was built for queries below a hyperplane only");
                let flipped = HalfspaceRange::below(Hyperplane {
                    coeffs: h.plane.coeffs.iter().map(|c| -c).collect(),
                    offset: -h.plane.offset,
                });
                m.query_below(&flipped.plane, &flipped, count_windows)
            }
        }
    }

    /// Locates `plane` and splits the range into its stored and collected parts.
    /// `None` when the query is answered without the cutting.
    pub fn decompose(&self, h: &HalfspaceRange) -> Option<Decomposition> {
        if h.side == Side::Above {
            return self.mirror.as_ref()?.decompose(&HalfspaceRange::below(Hyperplane {
                coeffs: h.plane.coeffs.iter().map(|c| -c).collect(),
                offset: -h.plane.offset,
            }));
        }
        let cut = self.cut.as_ref()?;
        let cell = cut.cutting.locate(&dual_of(&h.plane))?;
        let mut light = self.collect(cut, cell, &h.plane, h);
        light.sort_unstable();
        Some(Decomposition {
            cell,
            stored: self.stored_set(cell),
            light: light.into_iter().map(|a| a as usize).collect(),
        })
    }

    /// Query below `plane`, with membership decided by `exact`.
    fn query_below<S: Shape + ?Sized>(&self, plane: &Hyperplane, exact: &S, count_windows: bool) -> (PairResult, QueryStats) {
        let ps = &*self.points;
        let mut stats = QueryStats::default();
        let located = self.cut.as_ref().and_then(|cut| Some((cut, cut.cutting.locate(&dual_of(plane))?)));
        let Some((cut, cell)) = located else {
            stats.fallback = true;
            let inside: Vec<u32> = self.tree.report(exact).into_iter().map(|x| x as u32).collect();
            return (closest_pair_u32(ps, &inside, self.metric), stats);
        };
        stats.cell = Some(cell);
        stats.pieces = 1 << ps.dim();
        let phi = cut.cell_phi[cell];
        stats.precomputed = usize::from(phi.is_some());
        let light = self.collect(cut, cell, plane, exact);
        let tree = &*self.tree;
        let mut count = |w: &BoxRange| tree.count(w);
        let counter: Option<&mut dyn FnMut(&BoxRange) -> usize> = if count_windows { Some(&mut count) } else { None };
        let mut touch = Default::default();
        let answer = finish(
            ps,
            self.metric,
            phi,
            &light,
            |w, out| tree.report_into(&Within { window: w, range: exact }, out, &mut touch),
            counter,
            &mut stats,
        );
        (answer, stats)
    }

    /// Points of the range outside the cell's stored set (plus possibly some
    /// inside it), deduplicated.
    fn collect<S: Shape + ?Sized>(&self, cut: &Cut, cell: usize, plane: &Hyperplane, exact: &S) -> Vec<u32> {
        let loose = HalfspaceRange::below(plane.shifted(cut.tau));
        let mut out = Vec::new();
        let mut touch = Default::default();
        let mut buf = Vec::new();
        for v in cut.cutting.vertices(cell) {
            let (coeffs, last) = v.split_at(v.len() - 1);
            let wedge = Polytope::new(v.len())
                .with_halfspace(loose.clone())
                .with_halfspace(HalfspaceRange::above(Hyperplane { coeffs: coeffs.to_vec(), offset: last[0] + 2.0 * cut.tau }))
                .clipped(cut.data_box.clone());
            buf.clear();
            self.tree.report_into(&wedge, &mut buf, &mut touch);
            out.extend(buf.iter().copied().filter(|&a| exact.contains(self.points.point(a as usize))));
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl Cut {
    /// Points whose duals pass above every corner of cell `i` by the margin.
    fn stored_polytope(&self, i: usize) -> Polytope {
        let verts = self.cutting.vertices(i);
        let d = self.cutting.dim();
        Polytope::from_halfspaces(
            d,
            verts.into_iter().map(|v| {
                HalfspaceRange::below(Hyperplane { coeffs: v[..d - 1].to_vec(), offset: v[d - 1] + self.tau })
            }),
        )
        .clipped(self.data_box.clone())
    }
}

fn dual_of(plane: &Hyperplane) -> Vec<f64> {
    let mut p = plane.coeffs.clone();
    p.push(plane.offset);
    p
}

/// Ball as a range over lifted points: membership looks at the first `d`
/// coordinates only.
struct LiftedBall<'a>(&'a BallRange);

impl Shape for LiftedBall<'_> {
    fn dim(&self) -> usize {
        self.0.dim() + 1
    }

    #[inline]
    fn contains(&self, p: &[f64]) -> bool {
        self.0.contains(&p[..p.len() - 1])
    }

    fn classify(&self, lo: &[f64], hi: &[f64]) -> Region {
        let d = self.0.dim();
        self.0.classify(&lo[..d], &hi[..d])
    }
}

/// Ball index over points in `R^d`, `d >= 1`.
#[derive(Debug, Clone)]
pub struct BallRcpIndex {
    original: Arc<PointSet>,
    inner: HalfspaceRcpIndex,
}

impl BallRcpIndex {
    pub fn build(points: impl Into<Arc<PointSet>>, r: Option<usize>, seed: u64) -> Result<BallRcpIndex> {
        let original = points.into();
        let d = original.dim();
        let lifted = original.map(d + 1, |p, out| out.extend(crate::geometry::lift(p)))?;
        let inner = HalfspaceRcpIndex::build_with(Arc::new(lifted), Metric::Projected(d), r, seed)?;
        Ok(BallRcpIndex { original, inner })
    }

    pub fn points(&self) -> &Arc<PointSet> {
        &self.original
    }

    /// Halfspace index over the lifted points.
    pub fn inner(&self) -> &HalfspaceRcpIndex {
        &self.inner
    }

    pub fn query(&self, ball: &BallRange) -> PairResult {
        self.query_with_stats(ball, false).0
    }

    pub fn query_with_stats(&self, ball: &BallRange, count_windows: bool) -> (PairResult, QueryStats) {
        assert_eq!(ball.dim(), self.original.dim(), "query range dimension");
        let h = ball_to_lifted_halfspace(ball);
        self.inner.query_below(&h.plane, &LiftedBall(ball), count_windows)
    }
}
