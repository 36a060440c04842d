pub mod dual;
pub mod metric;
pub mod pair;
pub mod point;
pub mod range;

pub use dual::{above, ball_to_lifted_halfspace, below, dualize_hyperplane, dualize_point, lift, on};
pub use metric::{distance, Metric};
pub use pair::{closer, closest_pair, Pair, PairResult};
pub use point::{Point, PointSet};
pub use range::{
    contains, BallRange, BoxRange, Constraint, HalfspaceRange, Hyperplane, LinearConstraint, Polytope, Range, Region,
    Shape, Side, SimplexRange, Within,
};
