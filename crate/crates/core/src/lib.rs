//! Numerical laboratory for the Eguchi-Hanson gluing construction of
//! Kahler-Einstein metrics on smoothings of nodal surfaces.
//!
//! The local model of a node is the family of quadrics
//! `V_t = {w1^2 + w2^2 + w3^2 = t}` with `t = delta^4`. [`charts`] provides
//! coordinates and pointwise operators on it, [`models`] the explicit
//! potentials, [`weighted`] the weighted norms and decay regressions,
//! [`decay`] the δ-sweeps, [`solver`] the Monge-Ampere Newton solve on the radial reduction and
//! [`gh`] the Gromov-Hausdorff experiments. [`nodes`] holds the node-count bound.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charts;
pub mod decay;
pub mod error;
pub mod gh;
pub mod models;
pub mod nodes;
pub mod params;
pub mod solver;
pub mod weighted;

pub use charts::{ChartId, HermitianForm2, HessianMode, Potential, SurfacePoint};
pub use error::{LabError, Result};
pub use models::{PotentialKind, PotentialSpec, RegionTag};
pub use nodes::node_bound;
pub use params::GluingParams;
pub use weighted::{DecayFit, WeightFunction};
pub use num_complex::Complex64;
