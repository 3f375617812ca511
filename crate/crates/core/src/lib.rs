//! Computational geometry of nilpotent Lie groups with dilatations.
//!
//! * [`algebra`]: exact structure constants, axiom validation, brackets.
//! * [`group`]: Campbell–Hausdorff products, inverses and dilatations.
//! * [`similarity`]: the similarity group acting on the nilpotent group.
//! * [`metric`]: homogeneous gauge norm, left-invariant distance, balls.
//! * [`geodesy`]: left-invariant geodesics and convexity checks.
//! * [`dynamics`]: contraction dynamics on radiant models.
//! * [`catalog`]: built-in groups.
//! * [`report`]: the JSON report format shared by the command line.

pub mod algebra;
pub mod bch;
pub mod catalog;
#[cfg(feature = "cli")]
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod geodesy;
pub mod group;
pub mod linalg;
pub mod metric;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod similarity;

pub use algebra::{AlgebraVector, LieAlgebra, LieAlgebraSpec, ValidationReport};
pub use error::{Error, Result};
pub use group::{Group, GroupPoint};
pub use metric::{Ball, HomogeneousNorm};
pub use scalar::{Constant, Rational, Scalar};
pub use similarity::Similarity;
