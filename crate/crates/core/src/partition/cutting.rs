//! Cuttings of a clip box by a set of hyperplanes.
//!
//! The box is subdivided kd-style: a cell meeting more than `8n/r` of the
//! hyperplanes is halved across its longest side (measured relative to the
//! clip box) until every cell meets at most that many. Cells are numbered in
//! depth-first order, left half first, and point location descends the same
//! splits, sending points on a split plane to the lower-numbered side.
//!
//! Hyperplanes are passed as their dual points (`coeffs..., offset`), so a
//! point set can be cut by the duals of its own points without copying.

use crate::error::{Error, Result};
use crate::geometry::range::gap_bounds;
use crate::geometry::{BoxRange, Hyperplane, PointSet};

/// Conflict-list cap is `CONFLICT_FACTOR * n / r`.
pub const CONFLICT_FACTOR: usize = 8;

/// Splits allowed along one root-to-cell path, per dimension.
const DEPTH_PER_DIM: usize = 48;

#[derive(Debug, Clone, Copy)]
enum KdNode {
    Split { axis: u32, at: f64, right: u32 },
    Leaf { cell: u32 },
}

#[derive(Debug, Clone)]
pub struct Cutting {
    dim: usize,
    clip: BoxRange,
    seed: u64,
    cap: usize,
    slack: f64,
    /// Preorder kd nodes; a split's left child follows it directly.
    kd: Vec<KdNode>,
    /// `2 * dim` floats per cell.
    boxes: Vec<f64>,
    conflict_ids: Vec<u32>,
    conflict_offsets: Vec<usize>,
}

/// Cutting of the default clip box by `hs`, with exact touching as conflict.
///
/// The subdivision is deterministic; `seed` is recorded for provenance.
pub fn build_cutting(hs: &[Hyperplane], r: usize, seed: u64) -> Result<Cutting> {
    let d = hs.first().map_or(0, Hyperplane::dim);
    if d < 2 {
        return Err(Error::InvalidParameter("cutting needs at least one hyperplane in dimension >= 2".into()));
    }
    if let Some(h) = hs.iter().find(|h| h.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: h.dim() });
    }
    let mut coords = Vec::with_capacity(hs.len() * d);
    for h in hs {
        coords.extend_from_slice(&h.coeffs);
        coords.push(h.offset);
    }
    let duals = PointSet::new(d, coords)?;
    let clip = default_clip(&duals);
    build_cutting_of(&duals, r, clip, 0.0, seed)
}

/// Data bounding box with half-widths tripled plus one.
pub fn default_clip(ps: &PointSet) -> BoxRange {
    let (lo, hi) = ps.bounds().unwrap_or((vec![0.0; ps.dim()], vec![0.0; ps.dim()]));
    let mut a = Vec::with_capacity(lo.len());
    let mut b = Vec::with_capacity(lo.len());
    for (l, h) in lo.iter().zip(&hi) {
        let c = l + (h - l) / 2.0;
        let w = 3.0 * (h - l) / 2.0 + 1.0;
        a.push(c - w);
        b.push(c + w);
    }
    BoxRange::raw(a, b)
}

/// Cutting of `clip` by the hyperplanes whose dual points are `duals`.
/// A hyperplane conflicts with a cell when it passes within `slack` (in
/// vertical gap) of it.
pub(crate) fn build_cutting_of(duals: &PointSet, r: usize, clip: BoxRange, slack: f64, seed: u64) -> Result<Cutting> {
    let n = duals.len();
    let d = duals.dim();
    if r == 0 || r > n.max(1) {
        return Err(Error::InvalidParameter(format!("cutting parameter r = {r} must lie in 1..={}", n.max(1))));
    }
    if clip.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: clip.dim() });
    }
    let cap = (CONFLICT_FACTOR * n / r).max(1);
    let mut c = Cutting {
        dim: d,
        clip: clip.clone(),
        seed,
        cap,
        slack,
        kd: Vec::new(),
        boxes: Vec::new(),
        conflict_ids: Vec::new(),
        conflict_offsets: vec![0],
    };
    let all: Vec<u32> = (0..n as u32).filter(|&i| c.conflicts_with(duals, i, &clip.lo, &clip.hi)).collect();
    c.subdivide(duals, clip.lo.clone(), clip.hi.clone(), all, 0)?;
    Ok(c)
}

impl Cutting {
    #[inline]
    fn conflicts_with(&self, duals: &PointSet, i: u32, lo: &[f64], hi: &[f64]) -> bool {
        self.meets_box(duals.point(i as usize), lo, hi)
    }

    #[inline]
    fn meets_box(&self, dual: &[f64], lo: &[f64], hi: &[f64]) -> bool {
        let (a, b, err) = gap_bounds(&dual[..self.dim - 1], dual[self.dim - 1], lo, hi);
        a - err <= self.slack && b + err >= -self.slack
    }

    /// Whether the hyperplane with dual point `dual` conflicts with cell `i`.
    pub fn meets(&self, dual: &[f64], i: usize) -> bool {
        let (lo, hi) = self.cell_bounds(i);
        self.meets_box(dual, lo, hi)
    }

    fn subdivide(&mut self, duals: &PointSet, lo: Vec<f64>, hi: Vec<f64>, list: Vec<u32>, depth: usize) -> Result<()> {
        if list.len() <= self.cap {
            let cell = self.cell_count() as u32;
            self.boxes.extend_from_slice(&lo);
            self.boxes.extend_from_slice(&hi);
            self.conflict_ids.extend_from_slice(&list);
            self.conflict_offsets.push(self.conflict_ids.len());
            self.kd.push(KdNode::Leaf { cell });
            return Ok(());
        }
        if depth >= DEPTH_PER_DIM * self.dim {
            return Err(Error::CuttingFailed(format!(
                "a cell still meets {} hyperplanes (cap {}) after {depth} splits; too many hyperplanes share a point",
                list.len(),
                self.cap
            )));
        }
        let axis = (0..self.dim)
            .max_by(|&a, &b| {
                let wa = (hi[a] - lo[a]) / (self.clip.hi[a] - self.clip.lo[a]);
                let wb = (hi[b] - lo[b]) / (self.clip.hi[b] - self.clip.lo[b]);
                wa.total_cmp(&wb).then(b.cmp(&a))
            })
            .expect("dimension >= 1");
        let at = lo[axis] + (hi[axis] - lo[axis]) / 2.0;
        let me = self.kd.len();
        self.kd.push(KdNode::Split { axis: axis as u32, at, right: 0 });
        let mut left_hi = hi.clone();
        left_hi[axis] = at;
        let mut right_lo = lo.clone();
        right_lo[axis] = at;
        let left: Vec<u32> = list.iter().copied().filter(|&i| self.conflicts_with(duals, i, &lo, &left_hi)).collect();
        let right: Vec<u32> = list.iter().copied().filter(|&i| self.conflicts_with(duals, i, &right_lo, &hi)).collect();
        drop(list);
        self.subdivide(duals, lo, left_hi, left, depth + 1)?;
        let right_at = self.kd.len() as u32;
        if let KdNode::Split { right: r, .. } = &mut self.kd[me] {
            *r = right_at;
        }
        self.subdivide(duals, right_lo, hi, right, depth + 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn clip(&self) -> &BoxRange {
        &self.clip
    }

    /// Conflict-list cap `max(1, 8n/r)`.
    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn slack(&self) -> f64 {
        self.slack
    }

    /// Always zero: the subdivision never resamples.
    pub fn resamples(&self) -> usize {
        0
    }

    pub fn cell_count(&self) -> usize {
        self.conflict_offsets.len() - 1
    }

    #[inline]
    pub fn cell_bounds(&self, i: usize) -> (&[f64], &[f64]) {
        let at = 2 * self.dim * i;
        (&self.boxes[at..at + self.dim], &self.boxes[at + self.dim..at + 2 * self.dim])
    }

    pub fn cell(&self, i: usize) -> BoxRange {
        let (lo, hi) = self.cell_bounds(i);
        BoxRange::raw(lo.to_vec(), hi.to_vec())
    }

    /// The `2^d` corners of cell `i`.
    pub fn vertices(&self, i: usize) -> Vec<Vec<f64>> {
        self.cell(i).vertices()
    }

    /// Indices of the hyperplanes meeting cell `i`.
    pub fn conflicts(&self, i: usize) -> &[u32] {
        &self.conflict_ids[self.conflict_offsets[i]..self.conflict_offsets[i + 1]]
    }

    pub fn max_conflict(&self) -> usize {
        (0..self.cell_count()).map(|i| self.conflicts(i).len()).max().unwrap_or(0)
    }

    /// Frees the conflict lists, keeping cells and point location.
    pub fn drop_conflicts(&mut self) {
        let cells = self.cell_count();
        self.conflict_ids = Vec::new();
        self.conflict_offsets = vec![0; cells + 1];
    }

    /// Lowest-numbered cell containing `p`, or `None` outside the clip box.
    pub fn locate(&self, p: &[f64]) -> Option<usize> {
        if !self.clip.contains(p) {
            return None;
        }
        let mut v = 0usize;
        loop {
            match self.kd[v] {
                KdNode::Leaf { cell } => return Some(cell as usize),
                KdNode::Split { axis, at, right } => {
                    v = if p[axis as usize] <= at { v + 1 } else { right as usize };
                }
            }
        }
    }
}
