//! Reference answers.

use crate::geometry::{closer, closest_pair, Metric, Pair, PairResult, PointSet, Shape};

/// Closest pair inside `range` by filtering and checking every pair.
pub fn brute_rcp<S: Shape + ?Sized>(ps: &PointSet, range: &S, metric: Metric) -> PairResult {
    let inside: Vec<usize> = (0..ps.len()).filter(|&i| range.contains(ps.point(i))).collect();
    let mut best = None;
    for (x, &a) in inside.iter().enumerate() {
        let pa = ps.point(a);
        for &b in &inside[x + 1..] {
            best = closer(best, Some(Pair::new(a, b, metric.dist2(pa, ps.point(b)))));
        }
    }
    best
}

/// Closest pair inside `range` by filtering and a plane sweep: the timing
/// baseline for benchmarks.
pub fn baseline_rcp<S: Shape + ?Sized>(ps: &PointSet, range: &S, metric: Metric) -> PairResult {
    let inside: Vec<usize> = (0..ps.len()).filter(|&i| range.contains(ps.point(i))).collect();
    closest_pair(ps, &inside, metric)
}

/// Most points a cube of side `2t` can hold when they are pairwise at least
/// `t` apart, by volume: `floor(3^d / vol(ball of radius 1/2))`.
pub fn pack_bound(d: usize) -> usize {
    // unit ball volumes: V_0 = 1, V_1 = 2, V_d = V_{d-2} * 2 pi / d
    let mut v = [1.0f64, 2.0];
    for k in 2..=d {
        v[k % 2] *= 2.0 * std::f64::consts::PI / k as f64;
    }
    let ball = v[d % 2] * 0.5f64.powi(d as i32);
    (3f64.powi(d as i32) / ball).floor() as usize
}
