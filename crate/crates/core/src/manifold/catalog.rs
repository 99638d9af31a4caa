//! Closed-form geometry of the builtin families.
//!
//! * `euclidean(n)`: flat and self-dual.
//! * `sphere(2, r)`: spherical chart `(θ, φ)`, Levi-Civita connection for both.
//! * `categorical(n)`: natural chart `θ`, potential `ψ(θ) = ln(1 + Σ e^θi)`.
//!   The primal connection is flat in this chart (`Γ ≡ 0`) and
//!   `Γ*_ijk = ∂_i∂_j∂_k ψ`.
//! * `gaussian1d`: natural chart `(μ/σ², -1/(2σ²))`, same construction with the
//!   Gaussian log-partition.
//! * `alpha_categorical(n, α)`: mixture chart `η = (p_1..p_n)`, Fisher metric,
//!   `Γ^(±α) = Γ^LC ∓ (α/2) T` with `T` the Amari-Chentsov tensor.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{ConnectionKind, Family, ManifoldModel, Point};
use crate::error::{Error, Result};
use crate::tensor::Tensor3;

pub const BUILTIN_NAMES: [&str; 5] =
    ["euclidean", "sphere", "categorical", "gaussian1d", "alpha_categorical"];

/// Smallest probability admitted on the categorical families.
pub(crate) const MIN_PROB: f64 = 1e-3;
/// Polar caps excluded from the sphere chart.
pub(crate) const POLAR_MARGIN: f64 = 0.1;
const MAX_DIM: usize = 64;

/// Human-readable description of a catalog entry.
#[derive(Debug, Clone, Serialize)]
pub struct ModelInfo {
    pub name: &'static str,
    pub params: &'static str,
    pub chart: &'static str,
    pub domain: &'static str,
    pub structure: &'static str,
}

pub fn info_for(name: &str) -> ModelInfo {
    match name {
        "euclidean" => ModelInfo {
            name: "euclidean",
            params: "dim >= 1",
            chart: "Cartesian coordinates",
            domain: "all of R^dim",
            structure: "self-dual, flat",
        },
        "sphere" => ModelInfo {
            name: "sphere",
            params: "dim = 2, optional radius r > 0 (default 1)",
            chart: "spherical (theta, phi)",
            domain: "0.1 < theta < pi - 0.1",
            structure: "self-dual, constant curvature 1/r^2",
        },
        "categorical" => ModelInfo {
            name: "categorical",
            params: "dim n >= 1 (n + 1 categories)",
            chart: "natural parameters theta_i = ln(p_i / p_0)",
            domain: "all probabilities >= 1e-3",
            structure: "dually flat (primal connection flat in theta)",
        },
        "gaussian1d" => ModelInfo {
            name: "gaussian1d",
            params: "dim = 2",
            chart: "natural parameters (mu / sigma^2, -1 / (2 sigma^2))",
            domain: "theta_2 < 0",
            structure: "dually flat (primal connection flat in theta)",
        },
        _ => ModelInfo {
            name: "alpha_categorical",
            params: "dim n >= 1, alpha in (-1, 1)",
            chart: "mixture coordinates eta_i = p_i, p_0 = 1 - sum(eta)",
            domain: "all probabilities >= 1e-3",
            structure: "alpha-connections of the Fisher metric (curved, non-self-dual for alpha != 0)",
        },
    }
}

fn as_dim(value: f64, name: &str) -> Result<usize> {
    if !value.is_finite() || value.fract() != 0.0 || value < 1.0 {
        return Err(Error::InvalidModelSpec(format!(
            "{name}: dimension must be a positive integer, got {value}"
        )));
    }
    if value > MAX_DIM as f64 {
        return Err(Error::InvalidModelSpec(format!(
            "{name}: dimension {value} exceeds the supported maximum {MAX_DIM}"
        )));
    }
    Ok(value as usize)
}

fn arity(name: &str, params: &[f64], min: usize, max: usize) -> Result<()> {
    if params.len() < min || params.len() > max {
        return Err(Error::InvalidModelSpec(format!(
            "{name}: expected {min}..={max} parameters, got {}",
            params.len()
        )));
    }
    Ok(())
}

pub(super) fn build(name: &str, params: &[f64]) -> Result<ManifoldModel> {
    let (family, dim) = match name {
        "euclidean" => {
            arity(name, params, 1, 1)?;
            (Family::Euclidean, as_dim(params[0], name)?)
        }
        "sphere" => {
            arity(name, params, 1, 2)?;
            if as_dim(params[0], name)? != 2 {
                return Err(Error::InvalidModelSpec("sphere: only dimension 2 is supported".into()));
            }
            let radius = params.get(1).copied().unwrap_or(1.0);
            if !(radius.is_finite() && radius > 0.0) {
                return Err(Error::InvalidModelSpec(format!(
                    "sphere: radius must be positive, got {radius}"
                )));
            }
            (Family::Sphere { radius }, 2)
        }
        "categorical" => {
            arity(name, params, 1, 1)?;
            (Family::Categorical, as_dim(params[0], name)?)
        }
        "gaussian1d" => {
            arity(name, params, 0, 1)?;
            if let Some(&d) = params.first() {
                if as_dim(d, name)? != 2 {
                    return Err(Error::InvalidModelSpec("gaussian1d: dimension must be 2".into()));
                }
            }
            (Family::Gaussian1d, 2)
        }
        "alpha_categorical" => {
            arity(name, params, 2, 2)?;
            let dim = as_dim(params[0], name)?;
            let alpha = params[1];
            if !(alpha.is_finite() && alpha > -1.0 && alpha < 1.0) {
                return Err(Error::InvalidModelSpec(format!(
                    "alpha_categorical: alpha must lie in (-1, 1), got {alpha}"
                )));
            }
            (Family::AlphaCategorical { alpha }, dim)
        }
        other => {
            return Err(Error::InvalidModelSpec(format!(
                "unknown model '{other}' (expected one of {})",
                BUILTIN_NAMES.join(", ")
            )))
        }
    };
    Ok(ManifoldModel { family, dim })
}

/// Probabilities `(p_0, p_1..p_n)` of a natural-parameter point, computed
/// with a max shift so large `θ` does not overflow.
pub(crate) fn softmax(theta: &[f64]) -> (f64, Vec<f64>) {
    let m = theta.iter().copied().fold(0.0, f64::max);
    let e0 = (-m).exp();
    let es: Vec<f64> = theta.iter().map(|t| (t - m).exp()).collect();
    let z = e0 + es.iter().sum::<f64>();
    (e0 / z, es.into_iter().map(|e| e / z).collect())
}

fn log_partition_categorical(theta: &[f64]) -> f64 {
    let m = theta.iter().copied().fold(0.0, f64::max);
    m + ((-m).exp() + theta.iter().map(|t| (t - m).exp()).sum::<f64>()).ln()
}

pub(super) fn in_domain(model: &ManifoldModel, x: &[f64]) -> bool {
    match model.family {
        Family::Euclidean => true,
        Family::Sphere { .. } => {
            x[0] > POLAR_MARGIN && x[0] < std::f64::consts::PI - POLAR_MARGIN
        }
        Family::Categorical => {
            let (p0, p) = softmax(x);
            p0 >= MIN_PROB && p.iter().all(|&pi| pi >= MIN_PROB)
        }
        Family::Gaussian1d => x[1] < 0.0,
        Family::AlphaCategorical { .. } => {
            let p0 = 1.0 - x.iter().sum::<f64>();
            p0 >= MIN_PROB && x.iter().all(|&pi| pi >= MIN_PROB)
        }
    }
}

pub(super) fn metric(model: &ManifoldModel, x: &[f64]) -> DMatrix<f64> {
    let n = model.dim;
    match model.family {
        Family::Euclidean => DMatrix::identity(n, n),
        Family::Sphere { radius } => {
            let r2 = radius * radius;
            let s = x[0].sin();
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![r2, r2 * s * s]))
        }
        Family::Categorical => {
            let (_, p) = softmax(x);
            DMatrix::from_fn(n, n, |i, j| if i == j { p[i] - p[i] * p[j] } else { -p[i] * p[j] })
        }
        Family::Gaussian1d => {
            let (a, b) = (x[0], x[1]);
            let g01 = a / (2.0 * b * b);
            DMatrix::from_row_slice(
                2,
                2,
                &[-1.0 / (2.0 * b), g01, g01, -a * a / (2.0 * b * b * b) + 1.0 / (2.0 * b * b)],
            )
        }
        Family::AlphaCategorical { .. } => {
            let p0 = 1.0 - x.iter().sum::<f64>();
            DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 / x[i] + 1.0 / p0 } else { 1.0 / p0 })
        }
    }
}

pub(super) fn inverse_metric(model: &ManifoldModel, x: &[f64]) -> DMatrix<f64> {
    let n = model.dim;
    match model.family {
        Family::Euclidean => DMatrix::identity(n, n),
        Family::Sphere { radius } => {
            let r2 = radius * radius;
            let s = x[0].sin();
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0 / r2, 1.0 / (r2 * s * s)]))
        }
        Family::Categorical => {
            // Sherman-Morrison: (diag(p) - p p^T)^{-1} = diag(1/p) + 1 1^T / p_0.
            let (p0, p) = softmax(x);
            DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 / p[i] + 1.0 / p0 } else { 1.0 / p0 })
        }
        Family::Gaussian1d => {
            let g = metric(model, x);
            let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
            DMatrix::from_row_slice(
                2,
                2,
                &[g[(1, 1)] / det, -g[(0, 1)] / det, -g[(1, 0)] / det, g[(0, 0)] / det],
            )
        }
        Family::AlphaCategorical { .. } => {
            DMatrix::from_fn(n, n, |i, j| if i == j { x[i] - x[i] * x[j] } else { -x[i] * x[j] })
        }
    }
}

pub(super) fn inner(model: &ManifoldModel, x: &[f64], u: &[f64], v: &[f64]) -> f64 {
    match model.family {
        Family::Euclidean => u.iter().zip(v).map(|(a, b)| a * b).sum(),
        Family::Sphere { radius } => {
            let s = x[0].sin();
            radius * radius * (u[0] * v[0] + s * s * u[1] * v[1])
        }
        Family::Categorical => {
            let (_, p) = softmax(x);
            let pu: f64 = p.iter().zip(u).map(|(a, b)| a * b).sum();
            let pv: f64 = p.iter().zip(v).map(|(a, b)| a * b).sum();
            let puv: f64 = p.iter().zip(u.iter().zip(v)).map(|(a, (b, c))| a * b * c).sum();
            puv - pu * pv
        }
        Family::AlphaCategorical { .. } => {
            let p0 = 1.0 - x.iter().sum::<f64>();
            let su: f64 = u.iter().sum();
            let sv: f64 = v.iter().sum();
            let diag: f64 = x.iter().zip(u.iter().zip(v)).map(|(p, (a, b))| a * b / p).sum();
            diag + su * sv / p0
        }
        Family::Gaussian1d => {
            let g = metric(model, x);
            let mut acc = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    acc += u[i] * g[(i, j)] * v[j];
                }
            }
            acc
        }
    }
}

/// Third derivatives of the categorical log-partition.
fn categorical_third(x: &[f64]) -> Tensor3 {
    let (_, p) = softmax(x);
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    Tensor3::from_fn(x.len(), |i, j, k| {
        p[i] * d(i, j) * d(j, k)
            - p[i] * p[k] * d(i, j)
            - p[i] * p[j] * d(i, k)
            - p[i] * p[j] * d(j, k)
            + 2.0 * p[i] * p[j] * p[k]
    })
}

/// Third derivatives of the Gaussian log-partition
/// `ψ(a, b) = -a² / (4b) - ln(-2b) / 2`.
fn gaussian_third(x: &[f64]) -> Tensor3 {
    let (a, b) = (x[0], x[1]);
    let aab = 1.0 / (2.0 * b * b);
    let abb = -a / (b * b * b);
    let bbb = 3.0 * a * a / (2.0 * b.powi(4)) - 1.0 / (b * b * b);
    Tensor3::from_fn(2, |i, j, k| match i + j + k {
        0 => 0.0,
        1 => aab,
        2 => abb,
        _ => bbb,
    })
}

/// Amari-Chentsov tensor in mixture coordinates:
/// `T_ijk = δ_ijk / p_i² - 1 / p_0²`.
fn amari_chentsov(x: &[f64]) -> Tensor3 {
    let p0 = 1.0 - x.iter().sum::<f64>();
    let c = 1.0 / (p0 * p0);
    Tensor3::from_fn(x.len(), |i, j, k| {
        if i == j && j == k {
            1.0 / (x[i] * x[i]) - c
        } else {
            -c
        }
    })
}

fn alpha_coefficient(alpha: f64, kind: ConnectionKind) -> f64 {
    match kind {
        ConnectionKind::Primal => -(1.0 + alpha) / 2.0,
        ConnectionKind::Dual => -(1.0 - alpha) / 2.0,
    }
}

pub(super) fn christoffel_lower(model: &ManifoldModel, x: &[f64], kind: ConnectionKind) -> Tensor3 {
    let n = model.dim;
    match (model.family, kind) {
        (Family::Euclidean, _) => Tensor3::zeros(n),
        (Family::Sphere { radius }, _) => {
            let sc = radius * radius * x[0].sin() * x[0].cos();
            let mut t = Tensor3::zeros(2);
            t[(1, 1, 0)] = -sc;
            t[(0, 1, 1)] = sc;
            t[(1, 0, 1)] = sc;
            t
        }
        (Family::Categorical | Family::Gaussian1d, ConnectionKind::Primal) => Tensor3::zeros(n),
        (Family::Categorical, ConnectionKind::Dual) => categorical_third(x),
        (Family::Gaussian1d, ConnectionKind::Dual) => gaussian_third(x),
        (Family::AlphaCategorical { alpha }, kind) => {
            let c = alpha_coefficient(alpha, kind);
            let t = amari_chentsov(x);
            Tensor3::from_fn(n, |i, j, k| c * t[(i, j, k)])
        }
    }
}

pub(super) fn contract(
    model: &ManifoldModel,
    kind: ConnectionKind,
    x: &[f64],
    a: &[f64],
    b: &[f64],
    out: &mut [f64],
) {
    match (model.family, kind) {
        (Family::Euclidean, _)
        | (Family::Categorical | Family::Gaussian1d, ConnectionKind::Primal) => out.fill(0.0),
        (Family::Sphere { .. }, _) => {
            let (s, c) = x[0].sin_cos();
            out[0] = -s * c * a[1] * b[1];
            out[1] = (c / s) * (a[0] * b[1] + a[1] * b[0]);
        }
        (Family::Categorical, ConnectionKind::Dual) => {
            let (p0, p) = softmax(x);
            let pa: f64 = p.iter().zip(a).map(|(u, v)| u * v).sum();
            let pb: f64 = p.iter().zip(b).map(|(u, v)| u * v).sum();
            let sab: f64 = p.iter().zip(a.iter().zip(b)).map(|(u, (v, w))| u * v * w).sum();
            // c_m = Σ_ij ψ_ijm a^i b^j; raise with diag(1/p) + 1 1^T / p_0.
            let mut csum = 0.0;
            for m in 0..p.len() {
                let cm = p[m] * (a[m] * b[m] - sab - a[m] * pb - b[m] * pa + 2.0 * pa * pb);
                out[m] = cm / p[m];
                csum += cm;
            }
            for o in out.iter_mut() {
                *o += csum / p0;
            }
        }
        (Family::Gaussian1d, ConnectionKind::Dual) => {
            let t = gaussian_third(x);
            let ginv = inverse_metric(model, x);
            let mut c = [0.0; 2];
            for (m, cm) in c.iter_mut().enumerate() {
                for i in 0..2 {
                    for j in 0..2 {
                        *cm += t[(i, j, m)] * a[i] * b[j];
                    }
                }
            }
            for (k, o) in out.iter_mut().enumerate() {
                *o = ginv[(k, 0)] * c[0] + ginv[(k, 1)] * c[1];
            }
        }
        (Family::AlphaCategorical { alpha }, kind) => {
            let coef = alpha_coefficient(alpha, kind);
            let p0 = 1.0 - x.iter().sum::<f64>();
            let sa: f64 = a.iter().sum();
            let sb: f64 = b.iter().sum();
            let cross = sa * sb / (p0 * p0);
            let mut pc = 0.0;
            for m in 0..x.len() {
                let cm = a[m] * b[m] / (x[m] * x[m]) - cross;
                out[m] = cm;
                pc += x[m] * cm;
            }
            // raise with diag(p) - p p^T
            for m in 0..x.len() {
                out[m] = coef * x[m] * (out[m] - pc);
            }
        }
    }
}

pub(super) fn oracle(model: &ManifoldModel, p: &[f64], q: &[f64]) -> f64 {
    match model.family {
        Family::Euclidean => 0.5 * p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(),
        Family::Categorical => {
            // Bregman divergence of ψ: ψ(θp) - ψ(θq) - η_q·(θp - θq) = KL(q || p).
            let (_, eta_q) = softmax(q);
            log_partition_categorical(p) - log_partition_categorical(q)
                - eta_q.iter().zip(p.iter().zip(q)).map(|(e, (a, b))| e * (a - b)).sum::<f64>()
        }
        Family::Gaussian1d => {
            let (mp, vp) = gaussian_moments(p);
            let (mq, vq) = gaussian_moments(q);
            0.5 * (vp / vq).ln() + (vq + (mq - mp) * (mq - mp)) / (2.0 * vp) - 0.5
        }
        _ => unreachable!("oracle requested on a model without one"),
    }
}

/// Mean and variance of a natural-parameter Gaussian point.
pub(crate) fn gaussian_moments(x: &[f64]) -> (f64, f64) {
    let var = -1.0 / (2.0 * x[1]);
    (x[0] * var, var)
}

pub(super) fn from_mixture(model: &ManifoldModel, probs: &[f64]) -> Result<Point> {
    let n = model.dim;
    let full: Vec<f64> = if probs.len() == n + 1 {
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Parse(format!("probabilities sum to {total}, expected 1")));
        }
        probs.to_vec()
    } else if probs.len() == n {
        let mut v = vec![1.0 - probs.iter().sum::<f64>()];
        v.extend_from_slice(probs);
        v
    } else {
        return Err(Error::DimensionMismatch { expected: n, got: probs.len() });
    };
    if full.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
        return Err(Error::Parse("mixture coordinates must be positive probabilities".into()));
    }
    let point = match model.family {
        Family::Categorical => Point::new(full[1..].iter().map(|p| (p / full[0]).ln()).collect::<Vec<_>>()),
        Family::AlphaCategorical { .. } => Point::new(full[1..].to_vec()),
        _ => {
            return Err(Error::InvalidConfig(format!(
                "mixture coordinates are only defined on categorical models, not {}",
                model.name()
            )))
        }
    };
    model.check_point(&point)?;
    Ok(point)
}

pub(super) fn to_mixture(model: &ManifoldModel, x: &[f64]) -> Result<Vec<f64>> {
    match model.family {
        Family::Categorical => {
            let (p0, p) = softmax(x);
            let mut v = vec![p0];
            v.extend(p);
            Ok(v)
        }
        Family::AlphaCategorical { .. } => {
            let mut v = vec![1.0 - x.iter().sum::<f64>()];
            v.extend_from_slice(x);
            Ok(v)
        }
        _ => Err(Error::InvalidConfig(format!(
            "mixture coordinates are only defined on categorical models, not {}",
            model.name()
        ))),
    }
}
