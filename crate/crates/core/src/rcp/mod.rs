pub mod common;
pub mod halfspace;
pub mod ortho;
pub mod simplex;

pub use common::QueryStats;
pub use halfspace::{default_halfspace_r, BallRcpIndex, Decomposition, HalfspaceRcpIndex};
pub use ortho::OrthoRcpIndex;
pub use simplex::{default_simplex_r, SimplexRcpIndex};
