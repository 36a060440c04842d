//! Partition of a point set into `r` classes of nearly equal size by
//! recursive median splits on alternating coordinates. Each class is
//! enclosed in its tight axis-aligned bounding box, a constant-complexity
//! polytope that contains every point of the class.

use crate::error::{Error, Result};
use crate::geometry::{BoxRange, Hyperplane, PointSet};

#[derive(Debug, Clone)]
pub struct SimplicialPartition {
    classes: Vec<Vec<usize>>,
    cells: Vec<BoxRange>,
}

impl SimplicialPartition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class(&self, i: usize) -> &[usize] {
        &self.classes[i]
    }

    pub fn cells(&self) -> &[BoxRange] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &BoxRange {
        &self.cells[i]
    }

    pub fn max_class_size(&self) -> usize {
        self.classes.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Number of cells met by `h`; touching counts as crossing.
    pub fn crossing_count(&self, h: &Hyperplane) -> usize {
        self.cells.iter().filter(|c| crosses(h, c)).count()
    }
}

/// Whether `h` meets the closed box `c`.
pub fn crosses(h: &Hyperplane, c: &BoxRange) -> bool {
    let (lo, hi, _) = h.eval_bounds(&c.lo, &c.hi);
    lo <= 0.0 && 0.0 <= hi
}

pub fn build_partition(ps: &PointSet, r: usize) -> Result<SimplicialPartition> {
    let all: Vec<usize> = (0..ps.len()).collect();
    build_partition_of(ps, &all, r)
}

/// Partition of the listed points only. Deterministic in `(ps, subset, r)`.
pub fn build_partition_of(ps: &PointSet, subset: &[usize], r: usize) -> Result<SimplicialPartition> {
    if r == 0 || r > subset.len() {
        return Err(Error::InvalidParameter(format!(
            "partition parameter r = {r} must lie in 1..={}",
            subset.len()
        )));
    }
    let mut ids: Vec<u32> = subset.iter().map(|&i| i as u32).collect();
    let mut lens = Vec::with_capacity(r);
    split_classes(ps, &mut ids, r, 0, &mut lens);
    let mut classes = Vec::with_capacity(r);
    let mut cells = Vec::with_capacity(r);
    let mut at = 0;
    for len in lens {
        let class: Vec<usize> = ids[at..at + len].iter().map(|&i| i as usize).collect();
        at += len;
        let (lo, hi) = bounds_of(ps, class.iter().copied());
        cells.push(BoxRange::raw(lo, hi));
        classes.push(class);
    }
    Ok(SimplicialPartition { classes, cells })
}

pub(crate) fn bounds_of(ps: &PointSet, mut it: impl Iterator<Item = usize>) -> (Vec<f64>, Vec<f64>) {
    let first = it.next().expect("nonempty class");
    let mut lo = ps.point(first).to_vec();
    let mut hi = lo.clone();
    for i in it {
        for (k, &x) in ps.point(i).iter().enumerate() {
            lo[k] = lo[k].min(x);
            hi[k] = hi[k].max(x);
        }
    }
    (lo, hi)
}

/// Reorders `ids` into `parts` consecutive classes and appends their
/// lengths to `out`. Requires `1 <= parts <= ids.len()`.
pub(crate) fn split_classes(ps: &PointSet, ids: &mut [u32], parts: usize, axis: usize, out: &mut Vec<usize>) {
    if parts <= 1 {
        out.push(ids.len());
        return;
    }
    let left_parts = parts / 2;
    let cut = ids.len() * left_parts / parts;
    ids.select_nth_unstable_by(cut, |&a, &b| {
        ps.coord(a as usize, axis).total_cmp(&ps.coord(b as usize, axis)).then(a.cmp(&b))
    });
    let next = (axis + 1) % ps.dim();
    let (l, r) = ids.split_at_mut(cut);
    split_classes(ps, l, left_parts, next, out);
    split_classes(ps, r, parts - left_parts, next, out);
}
