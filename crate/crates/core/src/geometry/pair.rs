use std::cmp::Ordering;
use std::collections::BTreeSet;

use ordered_float::OrderedFloat;

use super::metric::Metric;
use super::point::PointSet;

/// Two point indices (`i < j`) and their squared distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair {
    pub i: usize,
    pub j: usize,
    pub dist2: f64,
}

/// The closest pair inside a range, or `None` when the range holds fewer than two points.
pub type PairResult = Option<Pair>;

impl Pair {
    /// Builds a pair with its indices in ascending order.
    #[inline]
    pub fn new(a: usize, b: usize, dist2: f64) -> Self {
        if a <= b {
            Pair { i: a, j: b, dist2 }
        } else {
            Pair { i: b, j: a, dist2 }
        }
    }

    #[inline]
    pub fn dist(&self) -> f64 {
        self.dist2.sqrt()
    }

    /// Total order used everywhere a "closest" pair is chosen: distance first,
    /// then the sorted index pair lexicographically.
    #[inline]
    pub fn key_cmp(&self, other: &Pair) -> Ordering {
        self.dist2
            .total_cmp(&other.dist2)
            .then(self.i.cmp(&other.i))
            .then(self.j.cmp(&other.j))
    }
}

/// The closer of two optional pairs under [`Pair::key_cmp`].
#[inline]
pub fn closer(a: PairResult, b: PairResult) -> PairResult {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(p), Some(q)) => {
            if q.key_cmp(&p) == Ordering::Less {
                Some(q)
            } else {
                Some(p)
            }
        }
    }
}

/// Squared distance of a pair result, `+inf` when absent.
#[inline]
pub fn dist2_or_inf(p: &PairResult) -> f64 {
    p.map_or(f64::INFINITY, |p| p.dist2)
}

/// Half-width of a search window guaranteed to cover every coordinate
/// difference of a pair at squared distance `dist2`.
#[inline]
pub(crate) fn window(dist2: f64) -> f64 {
    if dist2.is_infinite() {
        f64::INFINITY
    } else {
        let w = dist2.sqrt();
        w + w * 1e-12 + f64::MIN_POSITIVE
    }
}

/// Closest pair among `subset` under `metric`, by plane sweep.
///
/// Sweeps along the coordinate with the largest spread, keeping the active
/// strip ordered by the second-largest one. Ties are broken by the sorted
/// index pair, so the result matches a quadratic scan exactly.
pub fn closest_pair(ps: &PointSet, subset: &[usize], metric: Metric) -> PairResult {
    if subset.len() < 2 {
        return None;
    }
    if subset.len() <= 8 {
        return scan_pairs(ps, subset, metric);
    }
    let k = metric.compared_dims(ps.dim());
    let (a0, a1) = sweep_axes(ps, subset, k);

    let mut order: Vec<(f64, f64, usize)> = subset.iter().map(|&p| (ps.coord(p, a0), ps.coord(p, a1), p)).collect();
    order.sort_unstable_by(|p, q| p.0.total_cmp(&q.0).then(p.2.cmp(&q.2)));

    let mut active: BTreeSet<(OrderedFloat<f64>, usize)> = BTreeSet::new();
    let mut best: PairResult = None;
    let mut w = f64::INFINITY;
    let mut left = 0;
    for (pos, &(x, y, p)) in order.iter().enumerate() {
        while left < pos && x - order[left].0 > w {
            active.remove(&(OrderedFloat(order[left].1), order[left].2));
            left += 1;
        }
        let pp = ps.point(p);
        let lo = (OrderedFloat(y - w), 0usize);
        let hi = (OrderedFloat(y + w), usize::MAX);
        let mut improved = false;
        for &(_, q) in active.range(lo..=hi) {
            let d2 = metric.dist2(pp, ps.point(q));
            let cand = closer(best, Some(Pair::new(p, q, d2)));
            improved |= cand != best;
            best = cand;
        }
        if improved {
            w = window(dist2_or_inf(&best));
        }
        active.insert((OrderedFloat(y), p));
    }
    best
}

/// Closest pair among a handful of points by checking every pair.
pub(crate) fn scan_pairs(ps: &PointSet, subset: &[usize], metric: Metric) -> PairResult {
    let mut best = None;
    for (x, &p) in subset.iter().enumerate() {
        let pp = ps.point(p);
        for &q in &subset[x + 1..] {
            best = closer(best, Some(Pair::new(p, q, metric.dist2(pp, ps.point(q)))));
        }
    }
    best
}

/// [`closest_pair`] over a compact index list.
pub(crate) fn closest_pair_u32(ps: &PointSet, subset: &[u32], metric: Metric) -> PairResult {
    let wide: Vec<usize> = subset.iter().map(|&i| i as usize).collect();
    closest_pair(ps, &wide, metric)
}

/// The pair `(a, b)` minimizing the pair key over `b` in `candidates`, `b != a`.
pub(crate) fn nearest_to(ps: &PointSet, a: usize, candidates: &[u32], metric: Metric) -> PairResult {
    let pa = ps.point(a);
    let mut best = None;
    for &b in candidates {
        let b = b as usize;
        if b != a {
            best = closer(best, Some(Pair::new(a, b, metric.dist2(pa, ps.point(b)))));
        }
    }
    best
}

/// Closest pair of `a ∪ b` given `best`, the closest pair inside `a` and
/// inside `b` combined. Only pairs at distance at most `best` can improve
/// it, so the search hashes nearby points into a grid of that cell size.
/// Index lists may overlap; a point is never paired with itself.
pub(crate) fn merge_closest(ps: &PointSet, a: &[u32], b: &[u32], metric: Metric, best: PairResult) -> PairResult {
    let Some(cur) = best else {
        let mut all: Vec<usize> = a.iter().chain(b).map(|&i| i as usize).collect();
        all.sort_unstable();
        all.dedup();
        return closest_pair(ps, &all, metric);
    };
    let k = metric.compared_dims(ps.dim());
    let (Some(ba), Some(bb)) = (bounds(ps, a, k), bounds(ps, b, k)) else {
        return best;
    };
    if box_gap2(&ba.0, &ba.1, &bb.0, &bb.1) > cur.dist2 {
        return best;
    }
    let w = window(cur.dist2);
    let near = |list: &[u32], other: &(Vec<f64>, Vec<f64>)| -> Vec<u32> {
        list.iter()
            .copied()
            .filter(|&i| {
                let p = ps.point(i as usize);
                (0..k).all(|t| other.0[t] - w <= p[t] && p[t] <= other.1[t] + w)
            })
            .collect()
    };
    let na = near(a, &bb);
    let nb = near(b, &ba);
    if na.is_empty() || nb.is_empty() {
        return best;
    }
    let mut best = best;
    let consider = |best: &mut PairResult, x: u32, y: u32| {
        if x != y {
            let d2 = metric.dist2(ps.point(x as usize), ps.point(y as usize));
            if d2 <= dist2_or_inf(best) {
                *best = closer(*best, Some(Pair::new(x as usize, y as usize, d2)));
            }
        }
    };
    if cur.dist2 == 0.0 {
        // Only exact coincidences on the compared coordinates can compete.
        let key = |i: u32| -> Vec<u64> { ps.point(i as usize)[..k].iter().map(|x| (x + 0.0).to_bits()).collect() };
        let mut keyed: Vec<(Vec<u64>, u32)> = na.iter().map(|&i| (key(i), i)).collect();
        keyed.sort_unstable();
        for &y in &nb {
            let ky = key(y);
            let from = keyed.partition_point(|(kx, _)| *kx < ky);
            for (kx, x) in &keyed[from..] {
                if *kx != ky {
                    break;
                }
                consider(&mut best, *x, y);
            }
        }
        return best;
    }
    let side = w * (1.0 + 1e-6);
    let origin: Vec<f64> = (0..k).map(|t| ba.0[t].min(bb.0[t])).collect();
    let cell = |i: u32| -> Vec<i64> {
        let p = ps.point(i as usize);
        (0..k).map(|t| ((p[t] - origin[t]) / side).floor() as i64).collect()
    };
    let mut grid: Vec<(u64, u32)> = na.iter().map(|&i| (cell_hash(&cell(i)), i)).collect();
    grid.sort_unstable();
    let mut probe = vec![0i64; k];
    for &y in &nb {
        let c = cell(y);
        for off in 0..3usize.pow(k as u32) {
            let mut o = off;
            for t in 0..k {
                probe[t] = c[t] + (o % 3) as i64 - 1;
                o /= 3;
            }
            let h = cell_hash(&probe);
            let from = grid.partition_point(|&(g, _)| g < h);
            for &(g, x) in &grid[from..] {
                if g != h {
                    break;
                }
                consider(&mut best, x, y);
            }
        }
    }
    best
}

fn cell_hash(c: &[i64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &x in c {
        h = (h ^ x as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15).rotate_left(29);
    }
    h
}

pub(crate) fn bounds(ps: &PointSet, list: &[u32], k: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    let first = ps.point(*list.first()? as usize);
    let mut lo = first[..k].to_vec();
    let mut hi = lo.clone();
    for &i in &list[1..] {
        let p = ps.point(i as usize);
        for t in 0..k {
            lo[t] = lo[t].min(p[t]);
            hi[t] = hi[t].max(p[t]);
        }
    }
    Some((lo, hi))
}

/// Squared distance between two boxes over their common leading
/// coordinates, rounded down so it never exceeds the computed distance of
/// any pair of their points.
pub(crate) fn box_gap2(alo: &[f64], ahi: &[f64], blo: &[f64], bhi: &[f64]) -> f64 {
    let mut s = 0.0;
    for t in 0..alo.len().min(blo.len()) {
        let g = (blo[t] - ahi[t]).max(alo[t] - bhi[t]).max(0.0);
        s += g * g;
    }
    s * (1.0 - 1e-12)
}

fn sweep_axes(ps: &PointSet, subset: &[usize], k: usize) -> (usize, usize) {
    if k == 1 {
        return (0, 0);
    }
    let mut spread: Vec<(f64, usize)> = (0..k)
        .map(|t| {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &p in subset {
                let c = ps.coord(p, t);
                lo = lo.min(c);
                hi = hi.max(c);
            }
            (hi - lo, t)
        })
        .collect();
    spread.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    (spread[0].1, spread[1].1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quadratic(ps: &PointSet, subset: &[usize], m: Metric) -> PairResult {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..subset.len() {
            for b in a + 1..subset.len() {
                let (p, q) = (subset[a].min(subset[b]), subset[a].max(subset[b]));
                let d2 = m.dist2(ps.point(p), ps.point(q));
                let cand = (d2, p, q);
                if best.is_none_or(|bst| cand.0 < bst.0 || (cand.0 == bst.0 && (cand.1, cand.2) < (bst.1, bst.2))) {
                    best = Some(cand);
                }
            }
        }
        best.map(|(d2, i, j)| Pair { i, j, dist2: d2 })
    }

    #[test]
    fn small_example() {
        let ps = PointSet::from_points(2, &[[0.0, 0.0], [3.0, 4.0], [0.0, 1.0]]).unwrap();
        let p = closest_pair(&ps, &[0, 1, 2], Metric::Euclidean).unwrap();
        assert_eq!((p.i, p.j, p.dist()), (0, 2, 1.0));
    }

    #[test]
    fn singleton_and_empty() {
        let ps = PointSet::from_points(2, &[[5.0, 5.0]]).unwrap();
        assert_eq!(closest_pair(&ps, &[0], Metric::Euclidean), None);
        assert_eq!(closest_pair(&ps, &[], Metric::Euclidean), None);
    }

    #[test]
    fn uniform_200_matches_quadratic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<[f64; 2]> = (0..200).map(|_| [rng.random(), rng.random()]).collect();
        let ps = PointSet::from_points(2, &pts).unwrap();
        let all: Vec<usize> = (0..200).collect();
        assert_eq!(closest_pair(&ps, &all, Metric::Euclidean), quadratic(&ps, &all, Metric::Euclidean));
    }

    #[test]
    fn matches_quadratic_with_ties_and_duplicates() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..60 {
            let d = 2 + trial % 2;
            let n = 20 + trial * 13;
            let coords: Vec<f64> = (0..n * d).map(|_| rng.random_range(0..6) as f64).collect();
            let ps = PointSet::new(d, coords).unwrap();
            let subset: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.7)).collect();
            for m in [Metric::Euclidean, Metric::Projected(d - 1)] {
                assert_eq!(closest_pair(&ps, &subset, m), quadratic(&ps, &subset, m), "trial {trial}");
            }
        }
    }

    #[test]
    fn merge_matches_union_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for trial in 0..300 {
            let d = 2 + trial % 2;
            let n = 30 + trial % 50;
            let grid = trial % 3 == 0;
            let coords: Vec<f64> = (0..n * d)
                .map(|_| if grid { rng.random_range(0..5) as f64 } else { rng.random_range(0.0..1.0) })
                .collect();
            let ps = PointSet::new(d, coords).unwrap();
            let a: Vec<u32> = (0..n as u32).filter(|_| rng.random_bool(0.4)).collect();
            let b: Vec<u32> = (0..n as u32).filter(|_| rng.random_bool(0.4)).collect();
            let ua: Vec<usize> = a.iter().map(|&i| i as usize).collect();
            let ub: Vec<usize> = b.iter().map(|&i| i as usize).collect();
            let mut union: Vec<usize> = ua.iter().chain(&ub).copied().collect();
            union.sort_unstable();
            union.dedup();
            for m in [Metric::Euclidean, Metric::Projected(d - 1)] {
                let inner = closer(closest_pair(&ps, &ua, m), closest_pair(&ps, &ub, m));
                assert_eq!(merge_closest(&ps, &a, &b, m, inner), quadratic(&ps, &union, m), "trial {trial}");
            }
        }
    }

    #[test]
    fn key_order() {
        let a = Pair::new(4, 2, 1.0);
        assert_eq!((a.i, a.j), (2, 4));
        let b = Pair::new(1, 9, 1.0);
        assert_eq!(closer(Some(a), Some(b)), Some(b));
        assert_eq!(closer(None, Some(a)), Some(a));
    }
}
