//! Box-simplex and box-halfspace reporting: a range tree whose final-level
//! nodes each carry a partition tree over their own points. A query splits
//! the box into canonical nodes and asks each node's partition tree for the
//! points inside the second range, so no point outside the box is examined.

use std::sync::Arc;

use super::partition_tree::{Forest, Touch, LEAF};
use super::range_tree::RangeTree;
use crate::error::Result;
use crate::geometry::{BoxRange, HalfspaceRange, PointSet, Shape, SimplexRange};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct MultiLevelReporter {
    points: Arc<PointSet>,
    tree: RangeTree,
    forest: Forest,
    /// Final-level node id to its partition-tree root; nodes of at most
    /// `LEAF` points are scanned instead.
    secondary: Vec<u32>,
}

impl MultiLevelReporter {
    pub fn build(points: Arc<PointSet>) -> MultiLevelReporter {
        let d = points.dim();
        Self::build_on(points, d).expect("box dims equal point dims")
    }

    /// Reporter whose boxes constrain only the first `box_dims` coordinates.
    pub fn build_on(points: Arc<PointSet>, box_dims: usize) -> Result<MultiLevelReporter> {
        let tree = RangeTree::build_on(&points, box_dims)?;
        let mut forest = Forest::new(points.dim());
        let mut secondary = vec![NONE; tree.node_id_bound()];
        tree.for_each_node(|node| {
            if node.len() > LEAF {
                secondary[node.id()] = forest.add_tree(&points, tree.subset(node));
            }
        });
        Ok(MultiLevelReporter { points, tree, forest, secondary })
    }

    pub fn points(&self) -> &Arc<PointSet> {
        &self.points
    }

    pub fn tree(&self) -> &RangeTree {
        &self.tree
    }

    /// Points in `b ∩ q`.
    pub fn report<S: Shape + ?Sized>(&self, b: &BoxRange, q: &S) -> Vec<usize> {
        self.report_counted(b, q).0
    }

    pub fn report_counted<S: Shape + ?Sized>(&self, b: &BoxRange, q: &S) -> (Vec<usize>, Touch) {
        let mut out = Vec::new();
        let mut touch = Touch::default();
        self.report_into(b, q, &mut out, &mut touch);
        (out.into_iter().map(|i| i as usize).collect(), touch)
    }

    pub(crate) fn report_into<S: Shape + ?Sized>(&self, b: &BoxRange, q: &S, out: &mut Vec<u32>, touch: &mut Touch) {
        self.tree.for_each_canonical(b, |node| {
            let root = self.secondary[node.id()];
            if root == NONE {
                touch.nodes += 1;
                touch.points += node.len();
                out.extend(self.tree.subset(node).iter().filter(|&&i| q.contains(self.points.point(i as usize))));
            } else {
                self.forest.report(&self.points, root, q, out, touch);
            }
        });
    }

    pub fn report_box_simplex(&self, b: &BoxRange, s: &SimplexRange) -> Vec<usize> {
        self.report(b, s)
    }

    pub fn report_box_halfspace(&self, b: &BoxRange, h: &HalfspaceRange) -> Vec<usize> {
        self.report(b, h)
    }

    pub fn secondary_node_count(&self) -> usize {
        self.forest.node_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Hyperplane, Side};
    use crate::reporting::PartitionTree;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(n: usize, d: usize, seed: u64) -> Arc<PointSet> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Arc::new(PointSet::new(d, (0..n * d).map(|_| rng.random()).collect()).unwrap())
    }

    fn sorted(mut v: Vec<usize>) -> Vec<usize> {
        v.sort_unstable();
        v
    }

    fn random_box(rng: &mut ChaCha8Rng, d: usize) -> BoxRange {
        let a: Vec<f64> = (0..d).map(|_| rng.random_range(-0.1..1.1)).collect();
        let b: Vec<f64> = (0..d).map(|_| rng.random_range(-0.1..1.1)).collect();
        BoxRange::new(a.iter().zip(&b).map(|(x, y)| x.min(*y)).collect(), a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect()).unwrap()
    }

    #[test]
    fn box_simplex_matches_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in [2usize, 3] {
            let ps = uniform(800, d, d as u64);
            let r = MultiLevelReporter::build(ps.clone());
            for _ in 0..100 {
                let b = random_box(&mut rng, d);
                let s = SimplexRange::new((0..=d).map(|_| (0..d).map(|_| rng.random_range(-0.2..1.2)).collect()).collect()).unwrap();
                let want: Vec<usize> = (0..ps.len()).filter(|&i| b.contains(ps.point(i)) && s.contains(ps.point(i))).collect();
                let (got, touch) = r.report_counted(&b, &s);
                assert_eq!(sorted(got), want);
                assert!(touch.points <= r.tree().count_box(&b));
            }
        }
    }

    #[test]
    fn box_halfspace_matches_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in [2usize, 3] {
            let ps = uniform(800, d, 10 + d as u64);
            let r = MultiLevelReporter::build(ps.clone());
            for _ in 0..100 {
                let b = random_box(&mut rng, d);
                let coeffs = (0..d - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
                let side = if rng.random_bool(0.5) { Side::Below } else { Side::Above };
                let h = HalfspaceRange::new(Hyperplane::new(coeffs, rng.random_range(-1.0..0.5)).unwrap(), side);
                let want: Vec<usize> = (0..ps.len()).filter(|&i| b.contains(ps.point(i)) && h.contains(ps.point(i))).collect();
                assert_eq!(sorted(r.report_box_halfspace(&b, &h)), want);
            }
        }
    }

    #[test]
    fn trivial_cases() {
        let ps = uniform(300, 2, 5);
        let r = MultiLevelReporter::build(ps.clone());
        let big = SimplexRange::new(vec![vec![-5.0, -5.0], vec![20.0, -5.0], vec![-5.0, 20.0]]).unwrap();
        let b = BoxRange::new(vec![0.2, 0.3], vec![0.7, 0.9]).unwrap();
        assert_eq!(sorted(r.report_box_simplex(&b, &big)), sorted(r.tree().report_box(&b)));
        let p = ps.point(17).to_vec();
        let single = BoxRange::new(p.clone(), p.clone()).unwrap();
        assert_eq!(r.report_box_simplex(&single, &big), vec![17]);
        let away = SimplexRange::new(vec![vec![3.0, 3.0], vec![4.0, 3.0], vec![3.0, 4.0]]).unwrap();
        assert!(r.report_box_simplex(&single, &away).is_empty());
        let _ = PartitionTree::build(ps);
    }

    #[test]
    fn projected_boxes_leave_tail_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ps = uniform(500, 3, 9);
        let r = MultiLevelReporter::build_on(ps.clone(), 2).unwrap();
        for _ in 0..50 {
            let mut b = random_box(&mut rng, 3);
            b.lo[2] = f64::NEG_INFINITY;
            b.hi[2] = f64::INFINITY;
            let h = HalfspaceRange::below(Hyperplane::new(vec![rng.random_range(-1.0..1.0), 0.3], -0.5).unwrap());
            let want: Vec<usize> = (0..ps.len()).filter(|&i| b.contains(ps.point(i)) && h.contains(ps.point(i))).collect();
            assert_eq!(sorted(r.report(&b, &h)), want);
        }
    }
}
