pub mod cutting;
pub mod simplicial;

pub use cutting::{build_cutting, Cutting};
pub use simplicial::{build_partition, build_partition_of, crosses, SimplicialPartition};
