//! Succinct codes for interval graphs in universal interval representation.
//!
//! Vertex `i` of an `n`-vertex graph owns the interval `[i, e_i]`, so a graph
//! is the endpoint list `e_1..e_n` and there are exactly `n!` of them. Three
//! structures store that list close to `log₂(n!)` bits:
//!
//! * [`AdjCode`]: adjacency in O(1) with `O(√n log n)` redundancy,
//! * [`DegCode`]: degree in O(1) with `O(n^{2/3} log n)` redundancy,
//! * [`CellProbeCode`]: adjacency with `O(1)` redundant data bits, plus a
//!   separately reported plan table.
//!
//! All of them are built on the spill encoding in [`spill`], [`chain`] and
//! [`fixed`].

pub mod adj;
pub mod audit;
pub mod bits;
pub mod cellprobe;
pub mod chain;
pub mod cli;
pub mod deg;
pub mod error;
pub mod fixed;
pub mod model;
pub mod spill;

pub use adj::AdjCode;
pub use audit::{log_factorial_bits, redundancy_curve, redundancy_report, AuditReport, Kind};
pub use bits::{ProbeSink, WordProbes};
pub use cellprobe::CellProbeCode;
pub use chain::{GroupPlan, SpillCode};
pub use deg::DegCode;
pub use error::{Error, Result};
pub use fixed::FixedArray;
pub use model::{
    classic_to_universal, normalize_to_classic, reconstruct_from_degrees, sample_uniform,
    ClassicRep, UniversalRep,
};
pub use spill::SpillParams;
