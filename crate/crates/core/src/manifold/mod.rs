//! Statistical manifolds described in a single working chart.
//!
//! A [`ManifoldModel`] carries the metric `g_ij` and the lower-index
//! Christoffel symbols `Γ_ijk = g(∇_i ∂_j, ∂_k)` of two torsion-free
//! connections that are dual with respect to `g`.

mod catalog;
mod spec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

pub use catalog::{info_for, ModelInfo, BUILTIN_NAMES};
pub use spec::ModelSpec;
pub(crate) use catalog::gaussian_moments;

/// Coordinates of a point in the model's working chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: impl Into<Vec<f64>>) -> Self {
        Self { coords: coords.into() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Self { coords }
    }
}

/// A tangent vector in the coordinate basis `∂_i` at `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tangent {
    pub base: Point,
    pub components: Vec<f64>,
}

impl Tangent {
    pub fn new(base: Point, components: impl Into<Vec<f64>>) -> Self {
        Self { base, components: components.into() }
    }

    pub fn zero(base: Point) -> Self {
        let n = base.dim();
        Self { base, components: vec![0.0; n] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConnectionKind {
    Primal,
    Dual,
}

impl ConnectionKind {
    pub fn dual(self) -> Self {
        match self {
            ConnectionKind::Primal => ConnectionKind::Dual,
            ConnectionKind::Dual => ConnectionKind::Primal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Family {
    Euclidean,
    Sphere { radius: f64 },
    Categorical,
    Gaussian1d,
    AlphaCategorical { alpha: f64 },
}

/// An immutable statistical manifold `(M, g, ∇, ∇*)` from the builtin catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldModel {
    pub(crate) family: Family,
    dim: usize,
}

impl ManifoldModel {
    /// Builds a catalog model. `params[0]` is the dimension; further entries
    /// are family parameters (sphere radius, alpha).
    pub fn builtin(name: &str, params: &[f64]) -> Result<Self> {
        catalog::build(name, params)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::Euclidean => "euclidean",
            Family::Sphere { .. } => "sphere",
            Family::Categorical => "categorical",
            Family::Gaussian1d => "gaussian1d",
            Family::AlphaCategorical { .. } => "alpha_categorical",
        }
    }

    /// Canonical `name:dim[:param...]` form of this model.
    pub fn spec_string(&self) -> String {
        match self.family {
            Family::Sphere { radius } => format!("sphere:2:{radius}"),
            Family::AlphaCategorical { alpha } => {
                format!("alpha_categorical:{}:{alpha}", self.dim)
            }
            _ => format!("{}:{}", self.name(), self.dim),
        }
    }

    pub fn is_self_dual(&self) -> bool {
        match self.family {
            Family::Euclidean | Family::Sphere { .. } => true,
            Family::AlphaCategorical { alpha } => alpha == 0.0,
            _ => false,
        }
    }

    pub fn is_dually_flat(&self) -> bool {
        matches!(self.family, Family::Euclidean | Family::Categorical | Family::Gaussian1d)
    }

    pub fn has_oracle(&self) -> bool {
        self.is_dually_flat()
    }

    /// Domain predicate of the working chart.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim && x.iter().all(|c| c.is_finite()) && catalog::in_domain(self, x)
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: p.dim() });
        }
        if !self.contains(&p.coords) {
            return Err(Error::PointOutOfDomain {
                model: self.spec_string(),
                coords: p.coords.clone(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_tangent(&self, v: &Tangent) -> Result<()> {
        self.check_point(&v.base)?;
        if v.components.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.components.len() });
        }
        Ok(())
    }

    /// Metric components `g_ij(p)`.
    pub fn metric_at(&self, p: &Point) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        Ok(self.metric_unchecked(&p.coords))
    }

    /// Lower-index Christoffel symbols `Γ_ijk` of the chosen connection.
    pub fn christoffel_at(&self, p: &Point, kind: ConnectionKind) -> Result<Tensor3> {
        self.check_point(p)?;
        Ok(self.christoffel_unchecked(&p.coords, kind))
    }

    /// Raised symbols `Γ^k_ij = g^{kl} Γ_ijl`, stored as `[i][j][k]`.
    pub fn christoffel_raised_at(&self, p: &Point, kind: ConnectionKind) -> Result<Tensor3> {
        self.check_point(p)?;
        Ok(self.christoffel_raised_unchecked(&p.coords, kind))
    }

    /// `u^T g(p) v`.
    pub fn inner_product(&self, p: &Point, u: &Tangent, v: &Tangent) -> Result<f64> {
        if u.base != *p || v.base != *p {
            return Err(Error::BaseMismatch);
        }
        self.check_tangent(u)?;
        self.check_tangent(v)?;
        Ok(self.inner_unchecked(&p.coords, &u.components, &v.components))
    }

    pub fn norm(&self, v: &Tangent) -> Result<f64> {
        self.check_tangent(v)?;
        Ok(self.inner_unchecked(&v.base.coords, &v.components, &v.components).max(0.0).sqrt())
    }

    pub(crate) fn metric_unchecked(&self, x: &[f64]) -> DMatrix<f64> {
        catalog::metric(self, x)
    }

    pub(crate) fn inverse_metric_unchecked(&self, x: &[f64]) -> DMatrix<f64> {
        catalog::inverse_metric(self, x)
    }

    pub(crate) fn christoffel_unchecked(&self, x: &[f64], kind: ConnectionKind) -> Tensor3 {
        catalog::christoffel_lower(self, x, kind)
    }

    pub(crate) fn christoffel_raised_unchecked(&self, x: &[f64], kind: ConnectionKind) -> Tensor3 {
        let lower = self.christoffel_unchecked(x, kind);
        let ginv = self.inverse_metric_unchecked(x);
        let n = self.dim;
        Tensor3::from_fn(n, |i, j, k| (0..n).map(|l| ginv[(k, l)] * lower[(i, j, l)]).sum())
    }

    pub(crate) fn inner_unchecked(&self, x: &[f64], u: &[f64], v: &[f64]) -> f64 {
        catalog::inner(self, x, u, v)
    }

    /// `out^k = Γ^k_ij a^i b^j` for the chosen connection. This is the hot
    /// path of every geodesic and transport integration.
    pub(crate) fn contract(
        &self,
        kind: ConnectionKind,
        x: &[f64],
        a: &[f64],
        b: &[f64],
        out: &mut [f64],
    ) {
        catalog::contract(self, kind, x, a, b, out)
    }

    /// Closed-form value of the model's canonical divergence, available on
    /// the dually flat builtins. On the exponential families this is the
    /// Bregman divergence of the log-partition in natural coordinates,
    /// i.e. `KL(q || p)` between the distributions (see crate docs for the
    /// orientation convention).
    pub fn oracle_divergence(&self, p: &Point, q: &Point) -> Result<f64> {
        if !self.has_oracle() {
            return Err(Error::OracleUnavailable(self.spec_string()));
        }
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(catalog::oracle(self, &p.coords, &q.coords))
    }

    /// Converts a probability description to chart coordinates on the
    /// categorical families. Accepts either the full vector
    /// `(p_0, p_1, ..., p_n)` (reference category first) or the `n`
    /// mixture coordinates `(p_1, ..., p_n)`.
    pub fn point_from_mixture(&self, probs: &[f64]) -> Result<Point> {
        catalog::from_mixture(self, probs)
    }

    /// Inverse of [`point_from_mixture`](Self::point_from_mixture): the full
    /// probability vector `(p_0, ..., p_n)` of a categorical-family point.
    pub fn mixture_of(&self, p: &Point) -> Result<Vec<f64>> {
        self.check_point(p)?;
        catalog::to_mixture(self, &p.coords)
    }

    pub fn info(&self) -> ModelInfo {
        catalog::info_for(self.name())
    }
}
