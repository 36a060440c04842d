//! Reductions from set intersection queries to 3-d orthogonal range
//! closest-pair queries.
//!
//! Sets `S_0..S_{m-1}` of positive reals become a colored point set in the
//! plane: the elements of `S_k` sit in a small cluster at `(k+1, k+1)` and
//! again at `(m+k+1, k+1)`, one color per distinct value. The rectangle for
//! `(i, j)`, `j < i`, holds exactly the first cluster of `S_i` and the second
//! cluster of `S_j`, so the sets meet iff some color repeats in it.
//!
//! Colors are then separated along a third axis far enough that only
//! same-colored pairs can be at most `dmax` apart, turning "some color
//! repeats" into "the closest pair in the box is within `dmax`".

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{BoxRange, PairResult, PointSet};
use crate::rcp::OrthoRcpIndex;

#[derive(Debug, Clone, PartialEq)]
pub struct SetIntersectionInstance {
    sets: Vec<Vec<f64>>,
}

impl SetIntersectionInstance {
    /// Sets are deduplicated and sorted. Elements must be finite and positive.
    pub fn new(sets: Vec<Vec<f64>>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::InvalidParameter("need at least one set".into()));
        }
        let mut out = Vec::with_capacity(sets.len());
        for s in sets {
            if let Some(x) = s.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return Err(Error::InvalidParameter(format!("set elements must be positive reals, got {x}")));
            }
            let mut s = s;
            s.sort_by(f64::total_cmp);
            s.dedup();
            out.push(s);
        }
        Ok(SetIntersectionInstance { sets: out })
    }

    /// `m` sets with sizes summing to `n`, drawn from `1..=universe`.
    pub fn random(m: usize, n: usize, universe: usize, seed: u64) -> Result<Self> {
        if m == 0 || universe == 0 {
            return Err(Error::InvalidParameter("need m >= 1 and a nonempty universe".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sets = vec![Vec::new(); m];
        for _ in 0..n {
            let k = rng.random_range(0..m);
            sets[k].push(rng.random_range(1..=universe) as f64);
        }
        Self::new(sets)
    }

    pub fn sets(&self) -> &[Vec<f64>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Total number of elements.
    pub fn size(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    pub fn disjoint(&self, i: usize, j: usize) -> bool {
        let a: HashSet<u64> = self.sets[i].iter().map(|x| x.to_bits()).collect();
        !self.sets[j].iter().any(|x| a.contains(&x.to_bits()))
    }
}

/// Colored points in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorUniquenessInstance {
    pub points: PointSet,
    pub colors: Vec<usize>,
    pub color_count: usize,
}

impl ColorUniquenessInstance {
    pub fn new(points: PointSet, colors: Vec<usize>, color_count: usize) -> Result<Self> {
        if points.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: points.dim() });
        }
        if colors.len() != points.len() {
            return Err(Error::InvalidParameter(format!("{} colors for {} points", colors.len(), points.len())));
        }
        if let Some(c) = colors.iter().find(|&&c| c >= color_count) {
            return Err(Error::InvalidParameter(format!("color {c} out of range 0..{color_count}")));
        }
        Ok(ColorUniquenessInstance { points, colors, color_count })
    }

    /// Whether two points in `q` share a color, by counting.
    pub fn repeats_in(&self, q: &BoxRange) -> bool {
        let mut seen = vec![false; self.color_count];
        for (i, p) in self.points.iter().enumerate() {
            if q.contains(p) {
                let c = self.colors[i];
                if seen[c] {
                    return true;
                }
                seen[c] = true;
            }
        }
        false
    }
}

/// Result of mapping a set intersection instance to colored points.
#[derive(Debug, Clone)]
pub struct SetIntersectionReduction {
    pub instance: ColorUniquenessInstance,
    m: usize,
    eps: f64,
    /// Point indices of the first and second cluster of each set.
    clusters: Vec<(Vec<usize>, Vec<usize>)>,
}

impl SetIntersectionReduction {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Rectangle for the pair of sets `(i, j)`, `j < i`.
    pub fn rectangle(&self, i: usize, j: usize) -> BoxRange {
        assert!(j < i && i < self.m, "need j < i < m");
        let (i, j, m, e) = ((i + 1) as f64, (j + 1) as f64, self.m as f64, self.eps);
        BoxRange::raw(vec![i - e, j - e], vec![m + j + e, i + e])
    }

    /// Points expected in the rectangle for `(i, j)`: the first cluster of
    /// `S_i` and the second of `S_j`.
    pub fn expected_in(&self, i: usize, j: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.clusters[i].0.iter().chain(&self.clusters[j].1).copied().collect();
        v.sort_unstable();
        v
    }
}

/// Maps sets to colored clusters, `0 < eps < 1/2`.
pub fn reduce_si_to_cu(inst: &SetIntersectionInstance, eps: f64) -> Result<SetIntersectionReduction> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    let mut values: Vec<f64> = inst.sets.iter().flatten().copied().collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let color_of = |x: f64| values.binary_search_by(|v| v.total_cmp(&x)).expect("value was collected");
    let m = inst.len();
    let mut coords = Vec::new();
    let mut colors = Vec::new();
    let mut clusters = Vec::with_capacity(m);
    for (k, set) in inst.sets.iter().enumerate() {
        let s = set.len();
        let y = (k + 1) as f64;
        let mut firsts = Vec::with_capacity(s);
        let mut seconds = Vec::with_capacity(s);
        for (x0, out) in [((k + 1) as f64, &mut firsts), ((m + k + 1) as f64, &mut seconds)] {
            for (u, &val) in set.iter().enumerate() {
                out.push(colors.len());
                coords.extend_from_slice(&[x0 + eps / (2 * s) as f64 * u as f64, y]);
                colors.push(color_of(val));
            }
        }
        clusters.push((firsts, seconds));
    }
    let points = PointSet::new(2, coords)?;
    let instance = ColorUniquenessInstance::new(points, colors, values.len())?;
    Ok(SetIntersectionReduction { instance, m, eps, clusters })
}

/// Colored planar points lifted to 3-d with colors far apart.
#[derive(Debug, Clone)]
pub struct RcpEmbedding3D {
    pub points: PointSet,
    pub color_of: Vec<usize>,
    /// Largest distance between two points of the planar instance.
    pub dmax: f64,
    dmax2: f64,
    /// Height step per color: the smallest power of two at least `dmax`
    /// (1 when all points coincide). Heights `2 * color * step` are then
    /// exact, so colors stay at least `2 * dmax` apart in floating point.
    pub step: f64,
    /// Half-height of mapped query boxes.
    pub height: f64,
}

impl RcpEmbedding3D {
    /// `q x [-height, height]`.
    pub fn map_query(&self, q: &BoxRange) -> BoxRange {
        BoxRange::raw(vec![q.lo[0], q.lo[1], -self.height], vec![q.hi[0], q.hi[1], self.height])
    }

    /// A color repeats iff the closest pair is within `dmax`.
    pub fn repeats(&self, closest: PairResult) -> bool {
        closest.is_some_and(|p| p.dist2 <= self.dmax2)
    }
}

pub fn reduce_cu_to_rcp(inst: &ColorUniquenessInstance) -> Result<RcpEmbedding3D> {
    let ps = &inst.points;
    if ps.is_empty() {
        return Err(Error::InvalidParameter("need at least one point".into()));
    }
    let mut dmax2 = 0.0f64;
    for a in 0..ps.len() {
        let pa = ps.point(a);
        for b in a + 1..ps.len() {
            let pb = ps.point(b);
            let (dx, dy) = (pa[0] - pb[0], pa[1] - pb[1]);
            dmax2 = dmax2.max(dx * dx + dy * dy);
        }
    }
    let dmax = dmax2.sqrt();
    let step = if dmax > 0.0 { pow2_at_least(dmax) } else { 1.0 };
    let mut coords = Vec::with_capacity(3 * ps.len());
    for (p, &c) in ps.iter().zip(&inst.colors) {
        coords.extend_from_slice(&[p[0], p[1], 2.0 * c as f64 * step]);
    }
    Ok(RcpEmbedding3D {
        points: PointSet::new(3, coords)?,
        color_of: inst.colors.clone(),
        dmax,
        dmax2,
        step,
        height: 2.0 * (inst.color_count as f64 + 1.0) * step,
    })
}

fn pow2_at_least(x: f64) -> f64 {
    let mut p = 2f64.powi(x.log2().floor() as i32);
    while p < x {
        p *= 2.0;
    }
    while p / 2.0 >= x {
        p /= 2.0;
    }
    p
}

/// Both reductions and the index over the embedded points.
#[derive(Debug, Clone)]
pub struct SetIntersectionSolver {
    pub reduction: SetIntersectionReduction,
    pub embedding: RcpEmbedding3D,
    pub index: OrthoRcpIndex,
}

impl SetIntersectionSolver {
    pub fn build(inst: &SetIntersectionInstance, eps: f64) -> Result<Self> {
        let reduction = reduce_si_to_cu(inst, eps)?;
        let embedding = if reduction.instance.points.is_empty() {
            // every set is empty; a lone dummy point keeps the pipeline uniform
            let dummy = ColorUniquenessInstance::new(PointSet::new(2, vec![-1.0, -1.0])?, vec![0], 1)?;
            reduce_cu_to_rcp(&dummy)?
        } else {
            reduce_cu_to_rcp(&reduction.instance)?
        };
        let index = OrthoRcpIndex::build(embedding.points.clone());
        Ok(SetIntersectionSolver { reduction, embedding, index })
    }

    /// Whether `S_i` and `S_j` are disjoint, `j < i`.
    pub fn disjoint(&self, i: usize, j: usize) -> bool {
        solve_si_via_rcp(&self.reduction, &self.embedding, &self.index, i, j)
    }
}

/// Answers one set intersection query through a range closest-pair query.
pub fn solve_si_via_rcp(
    red: &SetIntersectionReduction,
    emb: &RcpEmbedding3D,
    index: &OrthoRcpIndex,
    i: usize,
    j: usize,
) -> bool {
    let q = emb.map_query(&red.rectangle(i, j));
    !emb.repeats(index.query(&q))
}
