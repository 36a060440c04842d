//! Oracles, instance generation, file formats, verification and
//! benchmarking around the range closest-pair indexes.

pub mod bench;
pub mod brute;
pub mod format;
pub mod generate;
pub mod index;
pub mod verify;

pub use bench::{fit_slope, run_bench, BenchConfig, BenchReport, BenchRow};
pub use brute::{baseline_rcp, brute_rcp, pack_bound};
pub use format::{parse_points, parse_queries, parse_sets, write_points, write_queries, write_sets};
pub use generate::{generate, generate_queries, Distribution, QueryKind};
pub use index::{AnyIndex, BuildOptions, Structure};
pub use verify::{run_verify, Mismatch, VerifyReport};
