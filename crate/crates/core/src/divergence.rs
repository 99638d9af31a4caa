//! Divergence functionals built from geodesics and parallel transport:
//! the Ay-Amari divergence `D`, the canonical divergence `𝒟` and its dual
//! `𝒟*`, the pseudo-norm `r`, the vector fields `Π`/`Π*` and their line
//! integrals along arbitrary paths.
//!
//! Orientation: on the exponential families the primal connection is flat
//! in natural coordinates, so `𝒟(p, q) = D(p, q)` is the Bregman divergence
//! `ψ(θ_p) - ψ(θ_q) - η_q·(θ_p - θ_q)`, which equals `KL(q || p)` between
//! the distributions. `𝒟*(p, q) = KL(p || q) = 𝒟(q, p)`.

use serde::{Deserialize, Serialize};

use crate::config::ToleranceConfig;
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::geodesic::{geodesic_solution, transport_along_geodesic, Shooter};
use crate::manifold::{ConnectionKind, ManifoldModel, Point, Tangent};
use crate::quadrature::Rule;
use crate::tensor::{norm_inf, scaled, sub};

/// Pairs closer than this (Euclidean chart distance) are evaluated with the
/// second-order form `½ Δᵀ g(p) Δ`.
pub const DIAGONAL_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivergenceKind {
    /// `D(p,q) = ∫ t ‖σ̇(t)‖² dt` along the primal geodesic.
    Ay,
    /// `𝒟(p,q) = ∫ ⟨Π_t(p), σ̇(t)⟩ dt` along the primal geodesic.
    Canonical,
    /// `𝒟*(p,q) = ∫ ⟨Π*_t(p), σ̇*(t)⟩ dt` along the dual geodesic.
    #[serde(rename = "dual")]
    CanonicalDual,
    /// `r(p,q) = ⟨exp_p^{-1} q, *exp_p^{-1} q⟩_p`.
    PseudoNorm,
    /// Closed-form value on the dually flat builtins.
    #[serde(rename = "oracle")]
    OracleKL,
}

impl DivergenceKind {
    pub const ALL: [DivergenceKind; 5] = [
        DivergenceKind::Ay,
        DivergenceKind::Canonical,
        DivergenceKind::CanonicalDual,
        DivergenceKind::PseudoNorm,
        DivergenceKind::OracleKL,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DivergenceKind::Ay => "ay",
            DivergenceKind::Canonical => "canonical",
            DivergenceKind::CanonicalDual => "dual",
            DivergenceKind::PseudoNorm => "pseudonorm",
            DivergenceKind::OracleKL => "oracle",
        }
    }
}

impl std::str::FromStr for DivergenceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ay" => Ok(DivergenceKind::Ay),
            "canonical" => Ok(DivergenceKind::Canonical),
            "dual" | "canonicaldual" | "canonical_dual" => Ok(DivergenceKind::CanonicalDual),
            "pseudonorm" | "pseudo_norm" | "r" => Ok(DivergenceKind::PseudoNorm),
            "oracle" | "oraclekl" | "kl" => Ok(DivergenceKind::OracleKL),
            other => Err(Error::Parse(format!("unknown divergence kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for DivergenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Line integrals of `Π` and `Π*` along a path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathFunctionalResult {
    pub primal_integral: f64,
    pub dual_integral: f64,
    pub sum: f64,
}

fn quadratic_form(model: &ManifoldModel, p: &[f64], q: &[f64]) -> Option<f64> {
    let d = sub(q, p);
    let dist = d.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dist < DIAGONAL_GUARD).then(|| model.inner_unchecked(p, &d, &d))
}

fn check_pair(model: &ManifoldModel, p: &Point, q: &Point, cfg: &ToleranceConfig) -> Result<()> {
    cfg.validate()?;
    model.check_point(p)?;
    model.check_point(q)
}

/// `D(p, q) = ∫₀¹ t ‖σ̇(t)‖² dt` with `σ` the primal geodesic from `p` to `q`.
pub fn ay_divergence(model: &ManifoldModel, p: &Point, q: &Point, cfg: &ToleranceConfig) -> Result<f64> {
    check_pair(model, p, q, cfg)?;
    if let Some(qf) = quadratic_form(model, &p.coords, &q.coords) {
        return Ok(0.5 * qf);
    }
    let v = Shooter::new(model, ConnectionKind::Primal, &p.coords, cfg).solve(&q.coords, None)?;
    let curve = Curve::from_dense(
        model.dim(),
        geodesic_solution(model, ConnectionKind::Primal, &p.coords, &v, 1.0, cfg, true)?.dense,
    );
    let rule = Rule::new(cfg.quad_nodes, 0.0, 1.0);
    let mut total = 0.0;
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let (x, xdot) = curve.eval(t);
        if !model.contains(&x) {
            return Err(Error::DomainExit { t }.at_node(t));
        }
        total += w * t * model.inner_unchecked(&x, &xdot, &xdot);
    }
    Ok(total)
}

/// Evaluates `Π_t(p)` and `Π*_t(p)` at successive points of a path, reusing
/// each shooting solution as the next warm start.
struct PiFieldSolver<'a> {
    model: &'a ManifoldModel,
    cfg: &'a ToleranceConfig,
    p: &'a [f64],
    shooters: [Shooter<'a>; 2],
    history: [Vec<(f64, Vec<f64>)>; 2],
    warm: bool,
}

impl<'a> PiFieldSolver<'a> {
    fn new(model: &'a ManifoldModel, p: &'a [f64], cfg: &'a ToleranceConfig, warm: bool) -> Self {
        Self {
            model,
            cfg,
            p,
            shooters: [
                Shooter::new(model, ConnectionKind::Primal, p, cfg),
                Shooter::new(model, ConnectionKind::Dual, p, cfg),
            ],
            history: [Vec::new(), Vec::new()],
            warm,
        }
    }

    fn slot(kind: ConnectionKind) -> usize {
        match kind {
            ConnectionKind::Primal => 0,
            ConnectionKind::Dual => 1,
        }
    }

    /// Guess for the log at parameter `t`, extrapolated from the previous
    /// solutions along the path.
    fn guess(&self, kind: ConnectionKind, t: f64, x: &[f64]) -> Option<Vec<f64>> {
        if !self.warm {
            return None;
        }
        let h = &self.history[Self::slot(kind)];
        match h.as_slice() {
            [] => None,
            [(t0, v0)] if *t0 > 0.0 => Some(scaled(v0, t / t0)),
            [.., (t0, v0), (t1, v1)] if t1 > t0 => {
                let r = (t - t1) / (t1 - t0);
                Some(v1.iter().zip(v0).map(|(b, a)| b + r * (b - a)).collect())
            }
            _ => Some(sub(x, self.p)),
        }
    }

    fn log(&mut self, kind: ConnectionKind, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        let guess = self.guess(kind, t, x);
        let slot = Self::slot(kind);
        let v = if self.warm {
            self.shooters[slot].solve(x, guess.as_deref())?
        } else {
            Shooter::new(self.model, kind, self.p, self.cfg).solve(x, None)?
        };
        self.history[slot].push((t, v.clone()));
        if self.history[slot].len() > 2 {
            self.history[slot].remove(0);
        }
        Ok(v)
    }

    /// Records a log computed elsewhere (e.g. known in closed form).
    fn record(&mut self, kind: ConnectionKind, t: f64, v: Vec<f64>) {
        let slot = Self::slot(kind);
        self.history[slot].push((t, v));
        if self.history[slot].len() > 2 {
            self.history[slot].remove(0);
        }
    }

    /// `kind`-transport of the `kind`-log of `x` along the opposite geodesic.
    fn pi(&self, kind: ConnectionKind, log_kind: &[f64], log_other: &[f64]) -> Result<Vec<f64>> {
        Ok(transport_along_geodesic(self.model, kind.dual(), kind, self.p, log_other, log_kind, self.cfg)?.2)
    }

    fn both(&mut self, t: f64, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.model.dim();
        if norm_inf(&sub(x, self.p)) == 0.0 {
            return Ok((vec![0.0; n], vec![0.0; n]));
        }
        let lp = self.log(ConnectionKind::Primal, t, x)?;
        let ld = self.log(ConnectionKind::Dual, t, x)?;
        let pi = self.pi(ConnectionKind::Primal, &lp, &ld)?;
        let pi_star = self.pi(ConnectionKind::Dual, &ld, &lp)?;
        Ok((pi, pi_star))
    }
}

/// `(Π_t(p), Π*_t(p))` attached at `γ(t)`.
pub fn pi_field(
    model: &ManifoldModel,
    p: &Point,
    gamma: &Curve,
    t: f64,
    cfg: &ToleranceConfig,
) -> Result<(Tangent, Tangent)> {
    cfg.validate()?;
    model.check_point(p)?;
    let x = gamma.point(t);
    model.check_point(&x)?;
    let mut solver = PiFieldSolver::new(model, &p.coords, cfg, true);
    let (pi, pi_star) = solver.both(t, &x.coords)?;
    Ok((Tangent::new(x.clone(), pi), Tangent::new(x, pi_star)))
}

/// Geodesic integral of `Π` (kind = Primal, giving `𝒟`) or of `Π*`
/// (kind = Dual, giving `𝒟*`).
pub(crate) fn canonical_integral(
    model: &ManifoldModel,
    kind: ConnectionKind,
    p: &Point,
    q: &Point,
    cfg: &ToleranceConfig,
    warm: bool,
) -> Result<f64> {
    check_pair(model, p, q, cfg)?;
    if let Some(qf) = quadratic_form(model, &p.coords, &q.coords) {
        return Ok(0.5 * qf);
    }
    let v = Shooter::new(model, kind, &p.coords, cfg).solve(&q.coords, None)?;
    let curve = Curve::from_dense(
        model.dim(),
        geodesic_solution(model, kind, &p.coords, &v, 1.0, cfg, true)?.dense,
    );
    let rule = Rule::new(cfg.quad_nodes, 0.0, 1.0);
    let mut solver = PiFieldSolver::new(model, &p.coords, cfg, warm);
    let mut total = 0.0;
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let (x, xdot) = curve.eval(t);
        // Along its own geodesic the log is known exactly: σ_t(s) = σ(ts).
        let own = scaled(&v, t);
        solver.record(kind, t, own.clone());
        let value = solver
            .log(kind.dual(), t, &x)
            .and_then(|other| solver.pi(kind, &own, &other))
            .map(|pi| model.inner_unchecked(&x, &pi, &xdot))
            .map_err(|e| e.at_node(t))?;
        total += w * value;
    }
    Ok(total)
}

/// `𝒟(p, q)`: geodesic integral of `Π_t(p)` along the primal geodesic.
pub fn canonical_divergence(model: &ManifoldModel, p: &Point, q: &Point, cfg: &ToleranceConfig) -> Result<f64> {
    canonical_integral(model, ConnectionKind::Primal, p, q, cfg, true)
}

/// `𝒟*(p, q)`: geodesic integral of `Π*_t(p)` along the dual geodesic.
pub fn dual_canonical_divergence(
    model: &ManifoldModel,
    p: &Point,
    q: &Point,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    canonical_integral(model, ConnectionKind::Dual, p, q, cfg, true)
}

/// `r(p, q) = ⟨exp_p^{-1}(q), *exp_p^{-1}(q)⟩_p`.
pub fn pseudo_norm(model: &ManifoldModel, p: &Point, q: &Point, cfg: &ToleranceConfig) -> Result<f64> {
    check_pair(model, p, q, cfg)?;
    if let Some(qf) = quadratic_form(model, &p.coords, &q.coords) {
        // Both logs agree with Δ to first order.
        return Ok(qf);
    }
    let lp = Shooter::new(model, ConnectionKind::Primal, &p.coords, cfg).solve(&q.coords, None)?;
    let ld = Shooter::new(model, ConnectionKind::Dual, &p.coords, cfg).solve(&q.coords, None)?;
    Ok(model.inner_unchecked(&p.coords, &lp, &ld))
}

/// Both line integrals `∫⟨Π_t, γ̇⟩dt` and `∫⟨Π*_t, γ̇⟩dt` along `gamma`,
/// which must start at `p`. Piecewise-smooth paths are integrated piece by
/// piece.
pub fn path_functional(
    model: &ManifoldModel,
    p: &Point,
    gamma: &Curve,
    cfg: &ToleranceConfig,
) -> Result<PathFunctionalResult> {
    cfg.validate()?;
    model.check_point(p)?;
    if norm_inf(&sub(&gamma.start().coords, &p.coords)) > 1e-12 {
        return Err(Error::BaseMismatch);
    }
    let mut solver = PiFieldSolver::new(model, &p.coords, cfg, true);
    let (mut primal, mut dual) = (0.0, 0.0);
    for (a, b) in gamma.smooth_intervals() {
        let rule = Rule::new(cfg.quad_nodes, a, b);
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let (x, xdot) = gamma.eval(t);
            if !model.contains(&x) {
                return Err(Error::DomainExit { t }.at_node(t));
            }
            let (pi, pi_star) = solver.both(t, &x).map_err(|e| e.at_node(t))?;
            primal += w * model.inner_unchecked(&x, &pi, &xdot);
            dual += w * model.inner_unchecked(&x, &pi_star, &xdot);
        }
    }
    Ok(PathFunctionalResult { primal_integral: primal, dual_integral: dual, sum: primal + dual })
}

/// Evaluates the requested divergence.
pub fn divergence(
    model: &ManifoldModel,
    which: DivergenceKind,
    p: &Point,
    q: &Point,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    match which {
        DivergenceKind::Ay => ay_divergence(model, p, q, cfg),
        DivergenceKind::Canonical => canonical_divergence(model, p, q, cfg),
        DivergenceKind::CanonicalDual => dual_canonical_divergence(model, p, q, cfg),
        DivergenceKind::PseudoNorm => pseudo_norm(model, p, q, cfg),
        DivergenceKind::OracleKL => oracle_divergence(model, p, q),
    }
}

/// Closed-form divergence of the dually flat builtins (acceptance oracle).
pub fn oracle_divergence(model: &ManifoldModel, p: &Point, q: &Point) -> Result<f64> {
    model.oracle_divergence(p, q)
}

/// Riemannian gradient at `q` of `x ↦ Div(p, x)`: Richardson-extrapolated
/// central differences (steps `h` and `h/2`) raised with `g(q)^{-1}`.
pub fn divergence_gradient(
    model: &ManifoldModel,
    which: DivergenceKind,
    p: &Point,
    q: &Point,
    cfg: &ToleranceConfig,
) -> Result<Tangent> {
    check_pair(model, p, q, cfg)?;
    let n = model.dim();
    let h = cfg.fd_step;
    let central = |i: usize, h: f64| -> Result<f64> {
        let mut plus = q.coords.clone();
        plus[i] += h;
        let mut minus = q.coords.clone();
        minus[i] -= h;
        if !model.contains(&plus) || !model.contains(&minus) {
            return Err(Error::StencilOutOfDomain { coords: q.coords.clone() });
        }
        let fp = divergence(model, which, p, &Point::new(plus), cfg)?;
        let fm = divergence(model, which, p, &Point::new(minus), cfg)?;
        Ok((fp - fm) / (2.0 * h))
    };
    let mut grad = vec![0.0; n];
    for (i, gi) in grad.iter_mut().enumerate() {
        let coarse = central(i, h)?;
        let fine = central(i, 0.5 * h)?;
        *gi = (4.0 * fine - coarse) / 3.0;
    }
    let ginv = model.inverse_metric_unchecked(&q.coords);
    let raised = (0..n).map(|k| (0..n).map(|l| ginv[(k, l)] * grad[l]).sum()).collect::<Vec<f64>>();
    Ok(Tangent::new(q.clone(), raised))
}
