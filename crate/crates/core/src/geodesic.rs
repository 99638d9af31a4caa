//! Geodesics of either connection, exponential and logarithm maps, and
//! parallel transport.
//!
//! The logarithm is computed by shooting: Newton iteration on
//! `v ↦ exp_p(v) - q` with a central finite-difference Jacobian, started from
//! the chart difference `q - p`. Convergence is only expected when the
//! chart-straight segment from `p` to `q` stays inside the domain; outside
//! that basin [`Error::ShootingNoConvergence`] is a legitimate outcome.

use nalgebra::{DMatrix, DVector};

use crate::config::ToleranceConfig;
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::manifold::{ConnectionKind, ManifoldModel, Point, Tangent};
use crate::ode::{integrate, DenseStep, OdeOptions, Solution};
use crate::tensor::{norm_inf, scaled, sub};

pub(crate) fn ode_options(cfg: &ToleranceConfig) -> OdeOptions {
    OdeOptions::new(cfg.ode_rel_tol, cfg.ode_abs_tol)
}

/// Aborts on the first step whose end leaves the chart, locating the exit
/// time by bisection on the step interpolant.
fn domain_guard<'a>(model: &'a ManifoldModel) -> impl FnMut(&DenseStep) -> Result<()> + 'a {
    move |step| {
        let mut y = vec![0.0; step.dim()];
        let n = model.dim();
        step.eval_into(step.t1(), &mut y);
        if model.contains(&y[..n]) {
            return Ok(());
        }
        let (mut lo, mut hi) = (step.t0, step.t1());
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            step.eval_into(mid, &mut y);
            if model.contains(&y[..n]) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::DomainExit { t: hi })
    }
}

/// Integrates the geodesic state `[x, ẋ]` over `[0, t_end]`.
pub(crate) fn geodesic_solution(
    model: &ManifoldModel,
    kind: ConnectionKind,
    x0: &[f64],
    v0: &[f64],
    t_end: f64,
    cfg: &ToleranceConfig,
    keep_dense: bool,
) -> Result<Solution> {
    let n = model.dim();
    let mut y0 = Vec::with_capacity(2 * n);
    y0.extend_from_slice(x0);
    y0.extend_from_slice(v0);
    integrate(
        |_, y, dy| {
            let (x, v) = y.split_at(n);
            dy[..n].copy_from_slice(v);
            model.contract(kind, x, v, v, &mut dy[n..]);
            for a in &mut dy[n..] {
                *a = -*a;
            }
        },
        0.0,
        t_end,
        &y0,
        &ode_options(cfg),
        keep_dense,
        domain_guard(model),
    )
}

/// Endpoint position and velocity of the geodesic with initial data
/// `(x0, v0)` at time `t_end`.
pub(crate) fn geodesic_endpoint(
    model: &ManifoldModel,
    kind: ConnectionKind,
    x0: &[f64],
    v0: &[f64],
    t_end: f64,
    cfg: &ToleranceConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut y = geodesic_solution(model, kind, x0, v0, t_end, cfg, false)?.y_end;
    let v = y.split_off(model.dim());
    Ok((y, v))
}

/// The geodesic `σ` with `σ(0) = p`, `σ̇(0) = v` on `t ∈ [0, 1]`.
pub fn integrate_geodesic(
    model: &ManifoldModel,
    kind: ConnectionKind,
    p: &Point,
    v: &Tangent,
    cfg: &ToleranceConfig,
) -> Result<Curve> {
    model.check_point(p)?;
    model.check_tangent(v)?;
    if v.base != *p {
        return Err(Error::BaseMismatch);
    }
    let sol = geodesic_solution(model, kind, &p.coords, &v.components, 1.0, cfg, true)?;
    Ok(Curve::from_dense(model.dim(), sol.dense))
}

pub fn exp_map(
    model: &ManifoldModel,
    kind: ConnectionKind,
    p: &Point,
    v: &Tangent,
    cfg: &ToleranceConfig,
) -> Result<Point> {
    model.check_point(p)?;
    model.check_tangent(v)?;
    if v.base != *p {
        return Err(Error::BaseMismatch);
    }
    let (x, _) = geodesic_endpoint(model, kind, &p.coords, &v.components, 1.0, cfg)?;
    Ok(Point::new(x))
}

/// Initial velocity of the geodesic from `p` to `q`.
pub fn log_map(
    model: &ManifoldModel,
    kind: ConnectionKind,
    p: &Point,
    q: &Point,
    cfg: &ToleranceConfig,
) -> Result<Tangent> {
    model.check_point(p)?;
    model.check_point(q)?;
    let v = Shooter::new(model, kind, &p.coords, cfg).solve(&q.coords, None)?;
    Ok(Tangent::new(p.clone(), v))
}

/// Stage counts tried by the continuation fallback of [`Shooter::solve`].
const CONTINUATION_STAGES: [usize; 2] = [4, 16];

/// Newton shooting solver for `exp_p^{-1}` from a fixed base point.
///
/// Keeps the last Jacobian between solves, so a sequence of nearby targets
/// (quadrature nodes along a path) is solved with warm starts.
pub(crate) struct Shooter<'a> {
    model: &'a ManifoldModel,
    kind: ConnectionKind,
    p: &'a [f64],
    cfg: &'a ToleranceConfig,
    jacobian: Option<DMatrix<f64>>,
    pub(crate) integrations: usize,
}

impl<'a> Shooter<'a> {
    pub fn new(
        model: &'a ManifoldModel,
        kind: ConnectionKind,
        p: &'a [f64],
        cfg: &'a ToleranceConfig,
    ) -> Self {
        Self { model, kind, p, cfg, jacobian: None, integrations: 0 }
    }

    fn endpoint(&mut self, v: &[f64]) -> Result<Vec<f64>> {
        self.integrations += 1;
        Ok(geodesic_endpoint(self.model, self.kind, self.p, v, 1.0, self.cfg)?.0)
    }

    fn residual(&mut self, v: &[f64], q: &[f64]) -> Option<Vec<f64>> {
        self.endpoint(v).ok().map(|x| sub(&x, q))
    }

    fn fd_jacobian(&mut self, v: &[f64]) -> Result<DMatrix<f64>> {
        let n = v.len();
        let h = self.cfg.fd_step;
        let mut jac = DMatrix::zeros(n, n);
        let mut vp = v.to_vec();
        for j in 0..n {
            vp[j] = v[j] + h;
            let plus = self.endpoint(&vp)?;
            vp[j] = v[j] - h;
            let minus = self.endpoint(&vp)?;
            vp[j] = v[j];
            for i in 0..n {
                jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
            }
        }
        Ok(jac)
    }

    fn newton_step(jac: &DMatrix<f64>, f: &[f64]) -> Option<Vec<f64>> {
        let rhs = DVector::from_iterator(f.len(), f.iter().map(|x| -x));
        jac.clone().lu().solve(&rhs).map(|d| d.iter().copied().collect())
    }

    /// Solves `exp_p(v) = q`, starting from `guess` (default `q - p`).
    ///
    /// If Newton fails from the default start, falls back to continuation
    /// along the chart segment from `p` to `q`: targets `p + (k/K)(q - p)`
    /// are solved in turn, each warm-started from the previous solution.
    pub fn solve(&mut self, q: &[f64], guess: Option<&[f64]>) -> Result<Vec<f64>> {
        match self.newton(q, guess) {
            Err(e) if guess.is_none() && e.is_shooting_failure() => {
                for stages in CONTINUATION_STAGES {
                    if let Ok(v) = self.continuation(q, stages) {
                        return Ok(v);
                    }
                }
                Err(e)
            }
            r => r,
        }
    }

    fn continuation(&mut self, q: &[f64], stages: usize) -> Result<Vec<f64>> {
        let delta = sub(q, self.p);
        let mut v: Vec<f64> = vec![0.0; delta.len()];
        for k in 1..=stages {
            let s = k as f64 / stages as f64;
            let target: Vec<f64> = self.p.iter().zip(&delta).map(|(a, d)| a + s * d).collect();
            let guess: Vec<f64> = if k == 1 {
                scaled(&delta, s)
            } else {
                scaled(&v, k as f64 / (k - 1) as f64)
            };
            self.jacobian = None;
            v = self.newton(&target, Some(&guess))?;
        }
        Ok(v)
    }

    fn newton(&mut self, q: &[f64], guess: Option<&[f64]>) -> Result<Vec<f64>> {
        let tol = self.cfg.shoot_tol;
        let max_iter = self.cfg.shoot_max_iter;
        let mut v = guess.map(<[f64]>::to_vec).unwrap_or_else(|| sub(q, self.p));

        // Shrink the initial guess until its geodesic stays in the domain.
        let mut f = None;
        for _ in 0..12 {
            if let Some(r) = self.residual(&v, q) {
                f = Some(r);
                break;
            }
            v.iter_mut().for_each(|x| *x *= 0.5);
        }
        let Some(mut f) = f else {
            return Err(Error::ShootingNoConvergence { iterations: 0, residual: f64::INFINITY });
        };
        let mut fnorm = norm_inf(&f);
        let mut fresh = false;

        for iter in 0..max_iter {
            if fnorm <= tol {
                // One polishing step with the current Jacobian; quadratic
                // convergence takes the error well below the tolerance.
                if let Some(jac) = &self.jacobian {
                    if let Some(d) = Self::newton_step(jac, &f) {
                        let trial: Vec<f64> = v.iter().zip(&d).map(|(a, b)| a + b).collect();
                        if let Some(ft) = self.residual(&trial, q) {
                            if norm_inf(&ft) < fnorm {
                                v = trial;
                            }
                        }
                    }
                }
                return Ok(v);
            }
            if self.jacobian.is_none() {
                self.jacobian = Some(self.fd_jacobian(&v)?);
                fresh = true;
            }
            let jac = self.jacobian.clone().expect("jacobian present");
            let step = Self::newton_step(&jac, &f);
            let mut accepted = None;
            if let Some(d) = step {
                let mut lambda = 1.0;
                for _ in 0..10 {
                    let trial: Vec<f64> = v.iter().zip(&d).map(|(a, b)| a + lambda * b).collect();
                    if let Some(ft) = self.residual(&trial, q) {
                        let n = norm_inf(&ft);
                        if n < fnorm {
                            accepted = Some((trial, ft, n));
                            break;
                        }
                    }
                    lambda *= 0.5;
                }
            }
            match accepted {
                Some((trial, ft, n)) => {
                    // A stale Jacobian that contracts poorly is refreshed.
                    if !fresh && n > 0.25 * fnorm {
                        self.jacobian = None;
                    }
                    fresh = false;
                    v = trial;
                    f = ft;
                    fnorm = n;
                }
                None if !fresh => {
                    self.jacobian = None;
                }
                None => {
                    return Err(Error::ShootingNoConvergence { iterations: iter + 1, residual: fnorm });
                }
            }
        }
        if fnorm <= tol {
            return Ok(v);
        }
        Err(Error::ShootingNoConvergence { iterations: max_iter, residual: fnorm })
    }
}

/// Transports `w0` with `transport_kind` along the `geodesic_kind` geodesic
/// from `x0` with initial velocity `v0`, integrating both together.
/// Returns endpoint, endpoint velocity and transported vector.
pub(crate) fn transport_along_geodesic(
    model: &ManifoldModel,
    geodesic_kind: ConnectionKind,
    transport_kind: ConnectionKind,
    x0: &[f64],
    v0: &[f64],
    w0: &[f64],
    cfg: &ToleranceConfig,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let n = model.dim();
    let mut y0 = Vec::with_capacity(3 * n);
    y0.extend_from_slice(x0);
    y0.extend_from_slice(v0);
    y0.extend_from_slice(w0);
    let sol = integrate(
        |_, y, dy| {
            let (x, rest) = y.split_at(n);
            let (v, w) = rest.split_at(n);
            dy[..n].copy_from_slice(v);
            let (_, drest) = dy.split_at_mut(n);
            let (dv, dw) = drest.split_at_mut(n);
            model.contract(geodesic_kind, x, v, v, dv);
            model.contract(transport_kind, x, v, w, dw);
            for a in dv.iter_mut().chain(dw.iter_mut()) {
                *a = -*a;
            }
        },
        0.0,
        1.0,
        &y0,
        &ode_options(cfg),
        false,
        domain_guard(model),
    )?;
    let mut x = sol.y_end;
    let mut v = x.split_off(n);
    let w = v.split_off(n);
    Ok((x, v, w))
}

/// Parallel transport of `v` (attached at the start of `curve`) to the end
/// of the curve, solving `ẇ^k + Γ^k_ij γ̇^i w^j = 0`.
pub fn parallel_transport(
    model: &ManifoldModel,
    kind: ConnectionKind,
    curve: &Curve,
    v: &Tangent,
    cfg: &ToleranceConfig,
) -> Result<Tangent> {
    model.check_tangent(v)?;
    if curve.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: curve.dim() });
    }
    let start = curve.start();
    if norm_inf(&sub(&start.coords, &v.base.coords)) > 1e-12 {
        return Err(Error::BaseMismatch);
    }
    let n = model.dim();
    let mut w = v.components.clone();
    let mut a_out = vec![0.0; n];
    for (a, b) in curve.smooth_intervals() {
        let sol = integrate(
            |t, y, dy| {
                let (x, xdot) = curve.eval_one_sided(t, t == a);
                model.contract(kind, &x, &xdot, y, &mut a_out);
                for (d, g) in dy.iter_mut().zip(&a_out) {
                    *d = -g;
                }
            },
            a,
            b,
            &w,
            &ode_options(cfg),
            false,
            |_| Ok(()),
        )?;
        w = sol.y_end;
    }
    Ok(Tangent::new(curve.end(), w))
}
