pub mod multilevel;
pub mod partition_tree;
pub mod range_tree;

pub use multilevel::MultiLevelReporter;
pub use partition_tree::{PartitionTree, Touch};
pub use range_tree::{NodeRef, RangeTree};
