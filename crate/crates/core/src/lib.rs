//! Numerical toolkit for statistical manifolds `(M, g, ∇, ∇*)`.
//!
//! Geodesics of both connections, exponential and logarithm maps, parallel
//! transport, and the family of geodesic divergences: the Ay-Amari
//! divergence `D`, the canonical divergence `𝒟` with its dual `𝒟*`, and the
//! pseudo-norm `r`. The `eguchi` module recovers the geometry back from a
//! divergence and classifies models by their curvature.

pub mod closed_form;
pub mod config;
pub mod curve;
pub mod divergence;
pub mod eguchi;
pub mod error;
pub mod geodesic;
pub mod manifold;
pub mod parse;
mod ode;
mod quadrature;
pub mod sampling;
pub mod tensor;
pub mod verify;

pub use config::ToleranceConfig;
pub use curve::Curve;
pub use divergence::{
    ay_divergence, canonical_divergence, divergence, divergence_gradient, dual_canonical_divergence,
    oracle_divergence, path_functional, pi_field, pseudo_norm, DivergenceKind, PathFunctionalResult,
};
pub use eguchi::{
    classify_manifold, curvature_tensor, recover_structure, symmetry_probe, ClassificationReport,
    RecoveredStructure, SymmetryProbe, Verdict,
};
pub use error::{Error, Result};
pub use geodesic::{exp_map, integrate_geodesic, log_map, parallel_transport};
pub use manifold::{ConnectionKind, ManifoldModel, ModelSpec, Point, Tangent};
pub use tensor::{Tensor3, Tensor4};
