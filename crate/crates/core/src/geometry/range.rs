//! Query ranges and their closed containment predicates.
//!
//! Every range exposes `contains`, the single membership predicate used by
//! both the brute-force oracle and the indexes. Pruning inside the indexes
//! goes through [`Region`] classification, which only answers `Inside` or
//! `Outside` when floating-point error cannot flip a point-level decision.

use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;

/// Axis-aligned box, closed on every face. Bounds may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRange {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxRange {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
        }
        if lo.iter().chain(&hi).any(|c| c.is_nan()) {
            return Err(Error::InvalidParameter("box bound is NaN".into()));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::InvalidParameter("box has lo > hi".into()));
        }
        Ok(BoxRange { lo, hi })
    }

    /// The box `[lo, hi]` without validation.
    pub(crate) fn raw(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        BoxRange { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    #[inline]
    pub fn contains(&self, p: &[f64]) -> bool {
        self.lo.iter().zip(&self.hi).zip(p).all(|((l, h), x)| l <= x && x <= h)
    }

    /// Smallest box holding all listed points of `pts`.
    pub fn bounding(pts: &[&[f64]]) -> Option<Self> {
        let first = pts.first()?;
        let mut lo = first.to_vec();
        let mut hi = first.to_vec();
        for p in &pts[1..] {
            for k in 0..lo.len() {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        Some(BoxRange { lo, hi })
    }

    pub fn intersects(&self, other: &BoxRange) -> bool {
        (0..self.dim()).all(|k| self.lo[k] <= other.hi[k] && other.lo[k] <= self.hi[k])
    }

    pub fn contains_box(&self, other: &BoxRange) -> bool {
        (0..self.dim()).all(|k| self.lo[k] <= other.lo[k] && other.hi[k] <= self.hi[k])
    }

    pub fn intersection(&self, other: &BoxRange) -> BoxRange {
        BoxRange {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect(),
        }
    }

    /// All `2^d` corners, in binary counting order over the coordinates.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..1usize << d)
            .map(|mask| (0..d).map(|k| if mask >> k & 1 == 1 { self.hi[k] } else { self.lo[k] }).collect())
            .collect()
    }

}

/// Non-vertical hyperplane `x_d = c_1 x_1 + ... + c_{d-1} x_{d-1} - offset`.
///
/// It is stored by its dual point `(c_1, ..., c_{d-1}, offset)`, which makes
/// point/hyperplane duality a relabeling of the same numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    pub coeffs: Vec<f64>,
    pub offset: f64,
}

impl Hyperplane {
    pub fn new(coeffs: Vec<f64>, offset: f64) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) || !offset.is_finite() {
            return Err(Error::InvalidParameter("hyperplane coefficients must be finite".into()));
        }
        Ok(Hyperplane { coeffs, offset })
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        self.coeffs.len() + 1
    }

    /// Signed vertical gap `p_d - (c . p' - offset)`; positive above, zero on.
    ///
    /// Computed as `(p_d + offset) - sum_k c_k p_k`, which is symmetric in the
    /// two dual roles: `h.eval(p) == p_dual.eval(h_dual)` bit for bit.
    #[inline]
    pub fn eval(&self, p: &[f64]) -> f64 {
        gap(p, &self.coeffs, self.offset)
    }

    /// Minimum and maximum of [`Hyperplane::eval`] over the box `[lo, hi]`,
    /// plus a bound on the rounding error of `eval` at any point of the box
    /// that also covers the error of the bounds themselves.
    pub fn eval_bounds(&self, lo: &[f64], hi: &[f64]) -> (f64, f64, f64) {
        gap_bounds(&self.coeffs, self.offset, lo, hi)
    }

    /// The same hyperplane moved so that `eval` grows by `-delta` everywhere
    /// (that is, raised by `delta`).
    pub fn shifted(&self, delta: f64) -> Hyperplane {
        Hyperplane { coeffs: self.coeffs.clone(), offset: self.offset - delta }
    }
}

/// Bounds of [`gap`] over the box `[lo, hi]` and an error allowance; see
/// [`Hyperplane::eval_bounds`].
#[inline]
pub(crate) fn gap_bounds(coeffs: &[f64], offset: f64, lo: &[f64], hi: &[f64]) -> (f64, f64, f64) {
    let d = coeffs.len() + 1;
    let mut lo_sum = lo[d - 1] + offset;
    let mut hi_sum = hi[d - 1] + offset;
    let mut mag = lo[d - 1].abs().max(hi[d - 1].abs()) + offset.abs();
    for k in 0..d - 1 {
        let u = coeffs[k] * lo[k];
        let v = coeffs[k] * hi[k];
        lo_sum -= u.max(v);
        hi_sum -= u.min(v);
        mag += u.abs().max(v.abs());
    }
    (lo_sum, hi_sum, 4.0 * (d as f64 + 2.0) * EPS * mag)
}

#[inline]
pub(crate) fn gap(p: &[f64], coeffs: &[f64], offset: f64) -> f64 {
    let d = coeffs.len() + 1;
    let mut s = 0.0;
    for k in 0..d - 1 {
        s += coeffs[k] * p[k];
    }
    (p[d - 1] + offset) - s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

/// Closed halfspace below or above a non-vertical hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfspaceRange {
    pub plane: Hyperplane,
    pub side: Side,
}

impl HalfspaceRange {
    pub fn new(plane: Hyperplane, side: Side) -> Self {
        HalfspaceRange { plane, side }
    }

    pub fn below(plane: Hyperplane) -> Self {
        HalfspaceRange { plane, side: Side::Below }
    }

    pub fn above(plane: Hyperplane) -> Self {
        HalfspaceRange { plane, side: Side::Above }
    }

    pub fn dim(&self) -> usize {
        self.plane.dim()
    }

    /// Signed value that is `<= 0` exactly on the halfspace.
    #[inline]
    pub fn value(&self, p: &[f64]) -> f64 {
        match self.side {
            Side::Below => self.plane.eval(p),
            Side::Above => -self.plane.eval(p),
        }
    }

    #[inline]
    pub fn contains(&self, p: &[f64]) -> bool {
        self.value(p) <= 0.0
    }

}

impl Shape for HalfspaceRange {
    fn dim(&self) -> usize {
        self.plane.dim()
    }

    #[inline]
    fn contains(&self, p: &[f64]) -> bool {
        HalfspaceRange::contains(self, p)
    }

    fn classify(&self, lo: &[f64], hi: &[f64]) -> Region {
        let (a, b, err) = self.plane.eval_bounds(lo, hi);
        let (a, b) = match self.side {
            Side::Below => (a, b),
            Side::Above => (-b, -a),
        };
        Region::from_bounds(a, b, err)
    }
}

/// `normal . x <= bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub normal: Vec<f64>,
    pub bound: f64,
}

impl LinearConstraint {
    #[inline]
    pub fn value(&self, p: &[f64]) -> f64 {
        let mut s = 0.0;
        for (n, x) in self.normal.iter().zip(p) {
            s += n * x;
        }
        s - self.bound
    }

    #[inline]
    pub fn contains(&self, p: &[f64]) -> bool {
        self.value(p) <= 0.0
    }

    fn classify(&self, lo: &[f64], hi: &[f64]) -> Region {
        let (mut a, mut b, mut mag) = (-self.bound, -self.bound, self.bound.abs());
        for k in 0..self.normal.len() {
            let u = self.normal[k] * lo[k];
            let v = self.normal[k] * hi[k];
            a += u.min(v);
            b += u.max(v);
            mag += u.abs().max(v.abs());
        }
        let err = 4.0 * (self.normal.len() as f64 + 2.0) * EPS * mag;
        Region::from_bounds(a, b, err)
    }
}

/// How a box relates to a range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Every point of the box is certainly contained.
    Inside,
    /// No point of the box is contained.
    Outside,
    /// Undecided; points must be tested one by one.
    Crossing,
}

impl Region {
    pub(crate) fn from_bounds(lo: f64, hi: f64, err: f64) -> Region {
        if !(lo.is_finite() && hi.is_finite()) {
            return Region::Crossing;
        }
        if hi <= -err {
            Region::Inside
        } else if lo > err {
            Region::Outside
        } else {
            Region::Crossing
        }
    }

    pub(crate) fn and(self, other: Region) -> Region {
        match (self, other) {
            (Region::Outside, _) | (_, Region::Outside) => Region::Outside,
            (Region::Inside, Region::Inside) => Region::Inside,
            _ => Region::Crossing,
        }
    }
}

/// A closed range that indexes can prune against.
///
/// `classify` must be conservative: `Inside` and `Outside` are only returned
/// when `contains` agrees for every point of the box.
pub trait Shape {
    fn dim(&self) -> usize;
    fn contains(&self, p: &[f64]) -> bool;
    fn classify(&self, lo: &[f64], hi: &[f64]) -> Region;

    fn classify_box(&self, b: &BoxRange) -> Region {
        self.classify(&b.lo, &b.hi)
    }
}

impl Shape for BoxRange {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    #[inline]
    fn contains(&self, p: &[f64]) -> bool {
        BoxRange::contains(self, p)
    }

    fn classify(&self, lo: &[f64], hi: &[f64]) -> Region {
        let mut inside = true;
        for k in 0..self.lo.len() {
            if hi[k] < self.lo[k] || lo[k] > self.hi[k] {
                return Region::Outside;
            }
            inside &= self.lo[k] <= lo[k] && hi[k] <= self.hi[k];
        }
        if inside {
            Region::Inside
        } else {
            Region::Crossing
        }
    }
}

/// One closed halfspace of a polytope.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    Linear(LinearConstraint),
    Halfspace(HalfspaceRange),
}

impl Constraint {
    #[inline]
    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Constraint::Linear(c) => c.contains(p),
            Constraint::Halfspace(h) => h.contains(p),
        }
    }

    fn classify(&self, lo: &[f64], hi: &[f64]) -> Region {
        match self {
            Constraint::Linear(c) => c.classify(lo, hi),
            Constraint::Halfspace(h) => Shape::classify(h, lo, hi),
        }
    }
}

/// Intersection of a constant number of closed halfspaces, optionally
/// clipped to an axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    pub dim: usize,
    pub constraints: Vec<Constraint>,
    pub clip: Option<BoxRange>,
}

impl Polytope {
    pub fn new(dim: usize) -> Self {
        Polytope { dim, constraints: Vec::new(), clip: None }
    }

    pub fn with(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn with_halfspace(self, h: HalfspaceRange) -> Self {
        self.with(Constraint::Halfspace(h))
    }

    pub fn clipped(mut self, b: BoxRange) -> Self {
        self.clip = Some(match self.clip {
            Some(c) => c.intersection(&b),
            None => b,
        });
        self
    }

    pub fn from_halfspaces(dim: usize, hs: impl IntoIterator<Item = HalfspaceRange>) -> Self {
        hs.into_iter().fold(Polytope::new(dim), Polytope::with_halfspace)
    }

    #[inline]
    pub fn contains(&self, p: &[f64]) -> bool {
        self.clip.as_ref().is_none_or(|c| c.contains(p)) && self.constraints.iter().all(|c| c.contains(p))
    }

}

impl Shape for Polytope {
    fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn contains(&self, p: &[f64]) -> bool {
        Polytope::contains(self, p)
    }

    fn classify(&self, lo: &[f64], hi: &[f64]) -> Region {
        let mut r = match &self.clip {
            Some(c) => c.classify(lo, hi),
            None => Region::Inside,
        };
        if r == Region::Outside {
            return r;
        }
        for c in &self.constraints {
            r = r.and(c.classify(lo, hi));
            if r == Region::Outside {
                break;
            }
        }
        r
    }
}

/// A box intersected with another range.
///
/// Classification only consults the range for cells inside the box, which
/// keeps small-box queries cheap; cells crossing the box are reported as
/// crossing.
#[derive(Debug, Clone, Copy)]
pub struct Within<'a, S: ?Sized> {
    pub window: &'a BoxRange,
    pub range: &'a S,
}

impl<S: Shape + ?Sized> Shape for Within<'_, S> {
    fn dim(&self) -> usize {
        self.window.dim()
    }

    #[inline]
    fn contains(&self, p: &[f64]) -> bool {
        self.window.contains(p) && self.range.contains(p)
    }

    fn classify(&self, lo: &[f64], hi: &[f64]) -> Region {
        match self.window.classify(lo, hi) {
            Region::Inside => self.range.classify(lo, hi),
            r => r,
        }
    }
}

/// Closed simplex given by `d + 1` vertices.
///
/// Containment is "inside every facet halfspace and inside the vertex
/// bounding box". For a flat simplex, facets whose opposite vertex lies on
/// them become equalities.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexRange {
    vertices: Vec<Vec<f64>>,
    poly: Polytope,
}

impl SimplexRange {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let d = vertices.first().map_or(0, Vec::len);
        if d == 0 || vertices.len() != d + 1 {
            return Err(Error::InvalidParameter(format!(
                "a simplex in R^{d} needs {} vertices, got {}",
                d + 1,
                vertices.len()
            )));
        }
        if let Some(v) = vertices.iter().find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: v.len() });
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("simplex vertex is not finite".into()));
        }
        let refs: Vec<&[f64]> = vertices.iter().map(Vec::as_slice).collect();
        let mut poly = Polytope::new(d).clipped(BoxRange::bounding(&refs).expect("nonempty"));
        for skip in 0..=d {
            let facet: Vec<&[f64]> = (0..=d).filter(|&t| t != skip).map(|t| refs[t]).collect();
            let normal = facet_normal(&facet);
            if normal.iter().all(|&c| c == 0.0) {
                continue;
            }
            let bound = dot(&normal, facet[0]);
            let side = dot(&normal, refs[skip]) - bound;
            if side <= 0.0 {
                poly.constraints.push(Constraint::Linear(LinearConstraint { normal: normal.clone(), bound }));
            }
            if side >= 0.0 {
                let neg: Vec<f64> = normal.iter().map(|c| -c).collect();
                poly.constraints.push(Constraint::Linear(LinearConstraint { normal: neg, bound: -bound }));
            }
        }
        Ok(SimplexRange { vertices, poly })
    }

    pub fn dim(&self) -> usize {
        self.poly.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn polytope(&self) -> &Polytope {
        &self.poly
    }

    #[inline]
    pub fn contains(&self, p: &[f64]) -> bool {
        self.poly.contains(p)
    }
}

impl Shape for SimplexRange {
    fn dim(&self) -> usize {
        self.poly.dim
    }

    #[inline]
    fn contains(&self, p: &[f64]) -> bool {
        self.poly.contains(p)
    }

    fn classify(&self, lo: &[f64], hi: &[f64]) -> Region {
        self.poly.classify(lo, hi)
    }
}

/// Closed Euclidean ball.
#[derive(Debug, Clone, PartialEq)]
pub struct BallRange {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl BallRange {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("ball radius must be finite and nonnegative, got {radius}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("ball center must be finite".into()));
        }
        Ok(BallRange { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    #[inline]
    pub fn contains(&self, p: &[f64]) -> bool {
        let mut s = 0.0;
        for (x, c) in p.iter().zip(&self.center) {
            let t = x - c;
            s += t * t;
        }
        s <= self.radius * self.radius
    }
}

impl Shape for BallRange {
    fn dim(&self) -> usize {
        self.center.len()
    }

    #[inline]
    fn contains(&self, p: &[f64]) -> bool {
        BallRange::contains(self, p)
    }

    fn classify(&self, lo: &[f64], hi: &[f64]) -> Region {
        let (mut near, mut far, mut mag) = (0.0, 0.0, 0.0);
        for k in 0..self.center.len() {
            let c = self.center[k];
            let n = if c < lo[k] { lo[k] - c } else if c > hi[k] { c - hi[k] } else { 0.0 };
            let f = (c - lo[k]).abs().max((hi[k] - c).abs());
            near += n * n;
            far += f * f;
            mag += f * f;
        }
        let r2 = self.radius * self.radius;
        let err = 4.0 * (self.center.len() as f64 + 2.0) * EPS * (mag + r2);
        Region::from_bounds(near - r2, far - r2, err)
    }
}

/// Any query range the indexes and the oracle understand.
#[derive(Debug, Clone, PartialEq)]
pub enum Range {
    Box(BoxRange),
    Simplex(SimplexRange),
    Halfspace(HalfspaceRange),
    Ball(BallRange),
    Polytope(Polytope),
}

impl Range {
    pub fn dim(&self) -> usize {
        match self {
            Range::Box(b) => b.dim(),
            Range::Simplex(s) => s.dim(),
            Range::Halfspace(h) => h.dim(),
            Range::Ball(b) => b.dim(),
            Range::Polytope(p) => p.dim,
        }
    }

    #[inline]
    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Range::Box(b) => b.contains(p),
            Range::Simplex(s) => s.contains(p),
            Range::Halfspace(h) => h.contains(p),
            Range::Ball(b) => b.contains(p),
            Range::Polytope(q) => q.contains(p),
        }
    }
}

impl Shape for Range {
    fn dim(&self) -> usize {
        Range::dim(self)
    }

    #[inline]
    fn contains(&self, p: &[f64]) -> bool {
        Range::contains(self, p)
    }

    fn classify(&self, lo: &[f64], hi: &[f64]) -> Region {
        match self {
            Range::Box(b) => b.classify(lo, hi),
            Range::Simplex(s) => s.classify(lo, hi),
            Range::Halfspace(h) => Shape::classify(h, lo, hi),
            Range::Ball(b) => b.classify(lo, hi),
            Range::Polytope(q) => q.classify(lo, hi),
        }
    }
}

/// Checked containment.
pub fn contains(range: &Range, p: &[f64]) -> Result<bool> {
    if range.dim() != p.len() {
        return Err(Error::DimensionMismatch { expected: range.dim(), got: p.len() });
    }
    Ok(range.contains(p))
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

/// Normal of the hyperplane through `d` points in R^d (generalized cross
/// product of the edge vectors from the first point). Zero when degenerate.
fn facet_normal(pts: &[&[f64]]) -> Vec<f64> {
    let d = pts[0].len();
    if d == 1 {
        return vec![1.0];
    }
    let edges: Vec<Vec<f64>> = pts[1..].iter().map(|p| p.iter().zip(pts[0]).map(|(a, b)| a - b).collect()).collect();
    (0..d)
        .map(|col| {
            let minor: Vec<Vec<f64>> = edges
                .iter()
                .map(|e| e.iter().enumerate().filter(|&(c, _)| c != col).map(|(_, v)| *v).collect())
                .collect();
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            sign * determinant(minor)
        })
        .collect()
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for c in 0..n {
        let piv = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        if m[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            m.swap(piv, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Barycentric coordinates of `p` with respect to `verts` by solving the
    /// (d+1)x(d+1) system [v_0 .. v_d; 1 .. 1] lambda = [p; 1] with Cramer's rule.
    fn barycentric(verts: &[Vec<f64>], p: &[f64]) -> Vec<f64> {
        let d = p.len();
        let mat = |replace: Option<usize>| -> Vec<Vec<f64>> {
            (0..=d)
                .map(|row| {
                    (0..=d)
                        .map(|col| {
                            let v: Vec<f64> = if Some(col) == replace { p.to_vec() } else { verts[col].clone() };
                            if row < d { v[row] } else { 1.0 }
                        })
                        .collect()
                })
                .collect()
        };
        let det = determinant(mat(None));
        (0..=d).map(|c| determinant(mat(Some(c))) / det).collect()
    }

    #[test]
    fn closed_unit_box() {
        let b = BoxRange::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(b.contains(&[1.0, 1.0]));
        assert!(!b.contains(&[1.0, 1.0 + 1e-12]));
    }

    #[test]
    fn halfspace_below_diagonal() {
        let h = HalfspaceRange::below(Hyperplane::new(vec![1.0], 0.0).unwrap());
        assert!(h.contains(&[2.0, 1.0]));
        assert!(h.contains(&[1.0, 1.0]));
        assert!(!h.contains(&[0.0, 1.0]));
        let a = HalfspaceRange::above(h.plane.clone());
        assert!(a.contains(&[1.0, 1.0]));
        assert!(a.contains(&[0.0, 1.0]));
    }

    #[test]
    fn simplex_matches_barycentric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        for d in [2usize, 3] {
            for _ in 0..300 {
                let verts: Vec<Vec<f64>> = (0..=d).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
                let s = SimplexRange::new(verts.clone()).unwrap();
                for _ in 0..20 {
                    let p: Vec<f64> = (0..d).map(|_| rng.random_range(-1.2..1.2)).collect();
                    let lam = barycentric(&verts, &p);
                    let min = lam.iter().cloned().fold(f64::INFINITY, f64::min);
                    if min.abs() < 1e-9 {
                        continue;
                    }
                    assert_eq!(s.contains(&p), min > 0.0, "d={d} p={p:?} lam={lam:?}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 10_000);
    }

    #[test]
    fn flat_triangle_is_a_segment() {
        let s = SimplexRange::new(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert!(s.contains(&[0.5, 0.5]));
        assert!(s.contains(&[2.0, 2.0]));
        assert!(!s.contains(&[2.5, 2.5]));
        assert!(!s.contains(&[0.5, 0.6]));
    }

    #[test]
    fn classification_is_conservative() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let verts: Vec<Vec<f64>> = (0..3).map(|_| (0..2).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
            let s = SimplexRange::new(verts).unwrap();
            let c: Vec<f64> = (0..2).map(|_| rng.random_range(0.0..1.0)).collect();
            let w = rng.random_range(0.0..0.3);
            let b = BoxRange::new(c.iter().map(|x| x - w).collect(), c.iter().map(|x| x + w).collect()).unwrap();
            let region = s.classify_box(&b);
            for _ in 0..30 {
                let p: Vec<f64> = (0..2).map(|k| rng.random_range(b.lo[k]..=b.hi[k])).collect();
                match region {
                    Region::Inside => assert!(s.contains(&p)),
                    Region::Outside => assert!(!s.contains(&p)),
                    Region::Crossing => {}
                }
            }
        }
    }

    #[test]
    fn ball_and_halfspace_classification_is_conservative() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..500 {
            let ball = BallRange::new(vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)], rng.random_range(0.0..0.6)).unwrap();
            let h = HalfspaceRange::new(
                Hyperplane::new(vec![rng.random_range(-1.0..1.0)], rng.random_range(-1.0..1.0)).unwrap(),
                if rng.random_bool(0.5) { Side::Below } else { Side::Above },
            );
            let c: Vec<f64> = (0..2).map(|_| rng.random_range(0.0..1.0)).collect();
            let w = rng.random_range(0.0..0.3);
            let b = BoxRange::new(c.iter().map(|x| x - w).collect(), c.iter().map(|x| x + w).collect()).unwrap();
            let shapes: [&dyn Shape; 2] = [&ball, &h];
            for s in shapes {
                let region = s.classify_box(&b);
                for _ in 0..30 {
                    let p: Vec<f64> = (0..2).map(|k| rng.random_range(b.lo[k]..=b.hi[k])).collect();
                    match region {
                        Region::Inside => assert!(s.contains(&p)),
                        Region::Outside => assert!(!s.contains(&p)),
                        Region::Crossing => {}
                    }
                }
            }
        }
    }

    #[test]
    fn ball_closed() {
        let b = BallRange::new(vec![0.0, 0.0], 5.0).unwrap();
        assert!(b.contains(&[3.0, 4.0]));
        assert!(!b.contains(&[3.0, 4.1]));
        assert!(BallRange::new(vec![0.0], -1.0).is_err());
    }

    #[test]
    fn checked_contains_rejects_mismatch() {
        let r = Range::Box(BoxRange::new(vec![0.0], vec![1.0]).unwrap());
        assert!(contains(&r, &[0.5, 0.5]).is_err());
        assert!(contains(&r, &[0.5]).unwrap());
    }
}
