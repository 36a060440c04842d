//! Point/hyperplane duality and the paraboloid lifting map.
//!
//! A point `p = (p_1, ..., p_d)` corresponds to the hyperplane
//! `x_d = p_1 x_1 + ... + p_{d-1} x_{d-1} - p_d`, and a hyperplane stored as
//! `(coeffs, offset)` corresponds to the point `(coeffs..., offset)`. Both
//! directions copy coordinates, so round trips are exact.

use super::range::{BallRange, HalfspaceRange, Hyperplane};

pub fn dualize_point(p: &[f64]) -> Hyperplane {
    let d = p.len();
    assert!(d >= 2, "duality needs dimension at least 2");
    Hyperplane { coeffs: p[..d - 1].to_vec(), offset: p[d - 1] }
}

pub fn dualize_hyperplane(h: &Hyperplane) -> Vec<f64> {
    let mut p = h.coeffs.clone();
    p.push(h.offset);
    p
}

/// `p` lies strictly above `h`.
#[inline]
pub fn above(p: &[f64], h: &Hyperplane) -> bool {
    h.eval(p) > 0.0
}

/// `p` lies strictly below `h`.
#[inline]
pub fn below(p: &[f64], h: &Hyperplane) -> bool {
    h.eval(p) < 0.0
}

#[inline]
pub fn on(p: &[f64], h: &Hyperplane) -> bool {
    h.eval(p) == 0.0
}

/// `(x, |x|^2)`.
pub fn lift(p: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(p.len() + 1);
    out.extend_from_slice(p);
    out.push(sum_squares(p));
    out
}

#[inline]
pub(crate) fn sum_squares(p: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in p {
        s += x * x;
    }
    s
}

/// Lower halfspace in `R^{d+1}` whose lifted points are the lifts of the ball:
/// `x_{d+1} <= 2c.x - |c|^2 + r^2`.
pub fn ball_to_lifted_halfspace(ball: &BallRange) -> HalfspaceRange {
    let coeffs = ball.center.iter().map(|c| 2.0 * c).collect();
    let offset = sum_squares(&ball.center) - ball.radius * ball.radius;
    HalfspaceRange::below(Hyperplane { coeffs, offset })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::metric::{distance, Metric};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dual_of_point() {
        let h = dualize_point(&[2.0, 3.0]);
        assert_eq!(h.coeffs, vec![2.0]);
        assert_eq!(h.offset, 3.0);
        // x_2 = 2 x_1 - 3 passes through (0, -3) and (2, 1)
        assert!(on(&[0.0, -3.0], &h));
        assert!(on(&[2.0, 1.0], &h));
    }

    #[test]
    fn incidence_and_order() {
        let h = Hyperplane::new(vec![1.0], 0.0).unwrap();
        let hs = dualize_hyperplane(&h);
        assert_eq!(hs, vec![1.0, 0.0]);
        assert!(on(&[1.0, 1.0], &h));
        assert!(on(&hs, &dualize_point(&[1.0, 1.0])));
        assert!(above(&[0.0, 5.0], &h));
        assert!(above(&hs, &dualize_point(&[0.0, 5.0])));
    }

    #[test]
    fn order_preserved_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in 2..=4 {
            for _ in 0..2000 {
                let p: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
                let mut q: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
                if rng.random_bool(0.1) {
                    // force incidence on small integers
                    for x in q.iter_mut() {
                        *x = x.round();
                    }
                }
                let h = dualize_point(&q);
                let ps = dualize_point(&p);
                let hs = dualize_hyperplane(&h);
                assert_eq!(above(&p, &h), above(&hs, &ps));
                assert_eq!(below(&p, &h), below(&hs, &ps));
                assert_eq!(on(&p, &h), on(&hs, &ps));
                assert_eq!(dualize_hyperplane(&dualize_point(&p)), p);
            }
        }
    }

    #[test]
    fn lift_examples() {
        assert_eq!(lift(&[1.0, 2.0]), vec![1.0, 2.0, 5.0]);
        assert_eq!(lift(&[0.0, 0.0, 0.0]), vec![0.0; 4]);
    }

    #[test]
    fn projected_distance_of_lifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let a: Vec<f64> = (0..3).map(|_| rng.random_range(-10.0..10.0)).collect();
            let b: Vec<f64> = (0..3).map(|_| rng.random_range(-10.0..10.0)).collect();
            assert_eq!(
                distance(&lift(&a), &lift(&b), Metric::Projected(3)).unwrap(),
                distance(&a, &b, Metric::Euclidean).unwrap()
            );
        }
    }

    #[test]
    fn ball_matches_lifted_halfspace() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let c: Vec<f64> = (0..2).map(|_| rng.random_range(0.0..1.0)).collect();
            let ball = BallRange::new(c, rng.random_range(0.05..0.5)).unwrap();
            let h = ball_to_lifted_halfspace(&ball);
            let p: Vec<f64> = (0..2).map(|_| rng.random_range(0.0..1.0)).collect();
            assert_eq!(ball.contains(&p), h.contains(&lift(&p)));
        }
    }
}
