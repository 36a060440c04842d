use crate::geometry::pair::{closest_pair_u32, dist2_or_inf, nearest_to, window};
use crate::geometry::{closer, BoxRange, Metric, PairResult, PointSet};

/// Per-query counters, filled by the `*_with_stats` query methods.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct QueryStats {
    /// Pieces the range was split into: canonical nodes, partition classes
    /// met by the range, or vertices of the located cutting cell.
    pub pieces: usize,
    /// Pieces answered from precomputed pairs (heavy nodes, inner classes).
    pub precomputed: usize,
    /// Size of the explicitly collected point set `L`.
    pub light: usize,
    /// Largest `|P_a|` over `a` in `L`.
    pub max_window: usize,
    /// Sum of `|P_a|` over `a` in `L`.
    pub sum_window: usize,
    /// Sum over `a` in `L` of the number of data points in the window
    /// around `a`, ignoring the query range. Only filled when counting was
    /// requested.
    pub sum_window_all: Option<usize>,
    /// Cutting cell located by a halfspace or ball query.
    pub cell: Option<usize>,
    /// The query was answered without the index (tiny input, or a query
    /// outside the cutting's clip box).
    pub fallback: bool,
}

/// Sets `b` to the window around `p`: a cube of half-width `half` on the
/// compared coordinates, unbounded on the rest.
pub(crate) fn set_window(b: &mut BoxRange, p: &[f64], metric: Metric, half: f64) {
    let k = metric.compared_dims(p.len());
    b.lo.clear();
    b.hi.clear();
    for (t, &x) in p.iter().enumerate() {
        if t < k {
            b.lo.push(x - half);
            b.hi.push(x + half);
        } else {
            b.lo.push(f64::NEG_INFINITY);
            b.hi.push(f64::INFINITY);
        }
    }
}

/// Finishes a query once the precomputed candidate `phi` and the explicit
/// set `light` are known: the answer is the better of `phi` and, for each
/// `a` in `light`, the nearest point to `a` inside `a`'s window.
///
/// `report` lists the points of the window that lie in the query range;
/// `count_all`, when given, counts the window's points ignoring the range.
pub(crate) fn finish(
    ps: &PointSet,
    metric: Metric,
    phi: PairResult,
    light: &[u32],
    mut report: impl FnMut(&BoxRange, &mut Vec<u32>),
    mut count_all: Option<&mut dyn FnMut(&BoxRange) -> usize>,
    stats: &mut QueryStats,
) -> PairResult {
    stats.light = light.len();
    if count_all.is_some() {
        stats.sum_window_all = Some(0);
    }
    if light.is_empty() {
        return phi;
    }
    let phi_light = closest_pair_u32(ps, light, metric);
    let half = window(dist2_or_inf(&phi).min(dist2_or_inf(&phi_light)));
    let mut best = closer(phi, phi_light);
    let mut buf = Vec::new();
    let mut all = 0;
    let mut b = BoxRange::raw(Vec::with_capacity(ps.dim()), Vec::with_capacity(ps.dim()));
    // Neighbouring windows share tree paths, so visiting them in
    // coordinate order keeps those paths in cache.
    let mut order = light.to_vec();
    order.sort_unstable_by(|&x, &y| ps.coord(x as usize, 0).total_cmp(&ps.coord(y as usize, 0)).then(x.cmp(&y)));
    for &a in &order {
        set_window(&mut b, ps.point(a as usize), metric, half);
        buf.clear();
        report(&b, &mut buf);
        stats.max_window = stats.max_window.max(buf.len());
        stats.sum_window += buf.len();
        if let Some(count) = count_all.as_mut() {
            all += count(&b);
        }
        best = closer(best, nearest_to(ps, a as usize, &buf, metric));
    }
    if count_all.is_some() {
        stats.sum_window_all = Some(all);
    }
    best
}
