//! Maximal-distance minimizers in the plane.
//!
//! Given a compact set `M ⊂ ℝ²` (represented here by a finite sample) and a
//! radius `r > 0`, a *maximal-distance minimizer* is a closed connected set Σ
//! of minimal length among all sets whose maximal distance to `M`,
//! `F_M(Σ) = max_{y∈M} dist(y, Σ)`, does not exceed `r`.
//!
//! This crate provides:
//!
//! * planar primitives ([`geometry`]),
//! * embedded polyline graphs modelling candidate sets Σ ([`sigma`]),
//! * the maximal-distance functional and energetic-point detection ([`energy`]),
//! * exact small-instance Euclidean Steiner trees and related certificates
//!   ([`steiner`]),
//! * explicit minimizer constructions and the finite-`M` certificate
//!   ([`minlab`]),
//! * a machine-checkable rule set of necessary conditions for minimizers
//!   ([`validator`]),
//! * a numerical length-descent optimizer under the coverage constraint
//!   ([`optimizer`]).

pub mod energy;
pub mod error;
pub mod geometry;
pub mod minlab;
pub mod optimizer;
pub mod sigma;
pub mod steiner;
pub mod validator;

pub use energy::{EnergeticWitness, EnergyResult, PointCloud};
pub use error::{Error, Result};
pub use geometry::{CircularArc, Orientation, Point, Segment};
pub use minlab::{CriterionReport, CriterionVerdict, HorseshoeParams};
pub use optimizer::{InitStrategy, OptimizerConfig, OptimizerTrace};
pub use sigma::{OrderReport, SigmaGraph};
pub use steiner::{RoseOfWinds, SteinerTree};
pub use validator::{Classification, PointLabel, ValidationReport};
