//! Seeded verification suites over the structural identities of a model.
//!
//! Every check evaluates one quantity on a batch of sampled points or pairs
//! and records the largest error seen against a fixed tolerance. Samples
//! whose geodesic solves fail are counted as failures of the check.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::great_circle_angle;
use crate::config::ToleranceConfig;
use crate::curve::Curve;
use crate::divergence::{
    ay_divergence, canonical_divergence, divergence_gradient, dual_canonical_divergence, path_functional,
    pi_field, pseudo_norm, DivergenceKind,
};
use crate::eguchi::{
    classify_manifold, duality_residual, recover_structure, sectional_curvature, symmetry_probe, Verdict,
};
use crate::error::{Error, Result};
use crate::geodesic::{integrate_geodesic, log_map};
use crate::manifold::{ConnectionKind, Family, ManifoldModel, Point};
use crate::sampling::{in_safe_box, rng_from_seed, sample_near, sample_pair, sample_point, SampleRng};

/// Models checked when no model is named: one instance of every builtin.
pub const DEFAULT_MODELS: [&str; 5] =
    ["euclidean:3", "sphere:2:1", "categorical:2", "gaussian1d", "alpha_categorical:2:0.5"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Eguchi,
    PathIndep,
    Gradient,
    Collapse,
    Symmetry,
    Classification,
    All,
}

impl Suite {
    pub const INDIVIDUAL: [Suite; 6] =
        [Suite::Eguchi, Suite::PathIndep, Suite::Gradient, Suite::Collapse, Suite::Symmetry, Suite::Classification];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Eguchi => "eguchi",
            Suite::PathIndep => "pathindep",
            Suite::Gradient => "gradient",
            Suite::Collapse => "collapse",
            Suite::Symmetry => "symmetry",
            Suite::Classification => "classification",
            Suite::All => "all",
        }
    }

    /// Sample count used when none is requested.
    pub fn default_samples(self) -> usize {
        match self {
            Suite::Eguchi | Suite::Classification => 10,
            Suite::PathIndep | Suite::Gradient => 20,
            Suite::Collapse | Suite::Symmetry => 50,
            Suite::All => 0,
        }
    }

    fn salt(self) -> u64 {
        match self {
            Suite::Eguchi => 0x01,
            Suite::PathIndep => 0x02,
            Suite::Gradient => 0x03,
            Suite::Collapse => 0x04,
            Suite::Symmetry => 0x05,
            Suite::Classification => 0x06,
            Suite::All => 0x00,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::INDIVIDUAL
            .iter()
            .chain(&[Suite::All])
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// Largest error over the samples that could be evaluated.
    pub max_error: f64,
    /// `None` for informational checks, which always pass.
    pub tolerance: Option<f64>,
    pub samples: usize,
    /// Samples that could not be evaluated.
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: Suite,
    pub model: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
    /// Wall-clock time; only filled in on request so that reports stay
    /// reproducible byte for byte.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub duration_seconds: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Overrides every suite's default sample count.
    pub samples: Option<usize>,
    pub cfg: ToleranceConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 0, samples: None, cfg: ToleranceConfig::default() }
    }
}

/// Accumulates per-sample errors of one check.
struct Check {
    id: &'static str,
    tolerance: Option<f64>,
    max_error: f64,
    samples: usize,
    failures: usize,
    allowed_failures: usize,
    detail: Option<String>,
}

impl Check {
    fn new(id: &'static str, tolerance: f64) -> Self {
        Self { id, tolerance: Some(tolerance), max_error: 0.0, samples: 0, failures: 0, allowed_failures: 0, detail: None }
    }

    fn add(&mut self, r: &Result<f64>) {
        self.samples += 1;
        match r {
            Ok(e) if e.is_finite() => self.max_error = self.max_error.max(*e),
            _ => self.failures += 1,
        }
    }

    fn finish(self) -> CheckRecord {
        let pass = self.failures <= self.allowed_failures
            && self.tolerance.is_none_or(|t| self.max_error <= t)
            && self.samples > self.failures;
        CheckRecord {
            id: self.id.to_string(),
            max_error: self.max_error,
            tolerance: self.tolerance,
            samples: self.samples,
            failures: self.failures,
            detail: self.detail,
            pass,
        }
    }
}

/// Runs a suite on one model. `Suite::All` concatenates every suite's checks.
pub fn run_suite(model: &ManifoldModel, suite: Suite, opts: &VerifyOptions) -> Result<VerificationReport> {
    opts.cfg.validate()?;
    if opts.samples == Some(0) {
        return Err(Error::InvalidConfig("samples must be at least 1".into()));
    }
    let suites: Vec<Suite> = if suite == Suite::All { Suite::INDIVIDUAL.to_vec() } else { vec![suite] };
    let mut checks = Vec::new();
    for s in suites {
        let n = opts.samples.unwrap_or_else(|| s.default_samples());
        let mut rng = rng_from_seed(opts.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(s.salt()));
        let cfg = &opts.cfg;
        let records = match s {
            Suite::Eguchi => eguchi_suite(model, n, &mut rng, cfg)?,
            Suite::PathIndep => pathindep_suite(model, n, &mut rng, cfg),
            Suite::Gradient => gradient_suite(model, n, &mut rng, cfg),
            Suite::Collapse => collapse_suite(model, n, &mut rng, cfg),
            Suite::Symmetry => symmetry_suite(model, n, &mut rng, cfg)?,
            Suite::Classification => classification_suite(model, n, &mut rng, cfg)?,
            Suite::All => unreachable!(),
        };
        checks.extend(records);
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(VerificationReport {
        suite,
        model: model.spec_string(),
        seed: opts.seed,
        checks,
        pass,
        duration_seconds: None,
    })
}

fn points(model: &ManifoldModel, n: usize, rng: &mut SampleRng) -> Vec<Point> {
    (0..n).map(|_| sample_point(model, rng)).collect()
}

fn pairs(model: &ManifoldModel, n: usize, rng: &mut SampleRng) -> Vec<(Point, Point)> {
    (0..n).map(|_| sample_pair(model, rng)).collect()
}

fn max_abs_rel(a: &[Vec<f64>], b: &nalgebra::DMatrix<f64>) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut worst: f64 = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            worst = worst.max((v - b[(i, j)]).abs());
        }
    }
    worst / scale
}

/// Recovery of `(g, Γ, Γ*)` from the canonical divergence, and the duality
/// relation `∂_k g_ij = Γ_kij + Γ*_kji` (on ten times as many points).
fn eguchi_suite(
    model: &ManifoldModel,
    n: usize,
    rng: &mut SampleRng,
    cfg: &ToleranceConfig,
) -> Result<Vec<CheckRecord>> {
    let pts = points(model, n, rng);
    let dual_pts = points(model, 10 * n, rng);
    let recovered: Vec<Result<[f64; 5]>> = pts
        .par_iter()
        .map(|p| {
            let r = recover_structure(model, DivergenceKind::Canonical, p, cfg)?;
            let g = model.metric_at(p)?;
            let gamma = model.christoffel_at(p, ConnectionKind::Primal)?;
            let gamma_star = model.christoffel_at(p, ConnectionKind::Dual)?;
            Ok([
                max_abs_rel(&r.metric, &g),
                r.gamma.max_abs_diff(&gamma),
                r.gamma_star.max_abs_diff(&gamma_star),
                r.first_derivative_residual,
                r.mixed_identity_residual,
            ])
        })
        .collect();
    let mut checks = [
        Check::new("eguchi.metric", 1e-4),
        Check::new("eguchi.gamma", 1e-3),
        Check::new("eguchi.gamma_star", 1e-3),
        Check::new("eguchi.first_derivative", 1e-6),
        Check::new("eguchi.mixed_identity", 1e-4),
    ];
    for r in &recovered {
        for (i, c) in checks.iter_mut().enumerate() {
            c.add(&r.as_ref().map(|v| v[i]).map_err(Clone::clone));
        }
    }
    let mut duality = Check::new("eguchi.duality", 1e-6);
    for r in dual_pts.par_iter().map(|p| duality_residual(model, p, cfg)).collect::<Vec<_>>() {
        duality.add(&r);
    }
    let mut out: Vec<CheckRecord> = checks.into_iter().map(Check::finish).collect();
    out.push(duality.finish());
    Ok(out)
}

/// Paths per pair in the path-independence suite.
pub const PATHS_PER_PAIR: usize = 5;

/// A polyline from `p` to `q` through two intermediate points, each a
/// point of the chord displaced by up to 30% of the chord per coordinate
/// and kept inside the sampling safe box.
fn random_polyline(model: &ManifoldModel, p: &Point, q: &Point, rng: &mut SampleRng) -> Curve {
    use rand::Rng;
    let mut verts = vec![p.clone()];
    for s in [1.0 / 3.0, 2.0 / 3.0] {
        let mut amp = 0.3;
        let mid = loop {
            let m: Vec<f64> = p
                .coords
                .iter()
                .zip(&q.coords)
                .map(|(a, b)| a + s * (b - a) + amp * (b - a) * rng.random_range(-1.0..1.0))
                .collect();
            if in_safe_box(model, &m) {
                break m;
            }
            amp *= 0.9;
        };
        verts.push(Point::new(mid));
    }
    verts.push(q.clone());
    Curve::polyline(&verts).expect("polyline of valid points")
}

fn pathindep_suite(model: &ManifoldModel, n: usize, rng: &mut SampleRng, cfg: &ToleranceConfig) -> Vec<CheckRecord> {
    let work: Vec<(Point, Point, Vec<Curve>)> = pairs(model, n, rng)
        .into_iter()
        .map(|(p, q)| {
            let paths = (0..PATHS_PER_PAIR).map(|_| random_polyline(model, &p, &q, rng)).collect();
            (p, q, paths)
        })
        .collect();
    let results: Vec<Result<(f64, f64)>> = work
        .par_iter()
        .map(|(p, q, paths)| {
            let r = pseudo_norm(model, p, q, cfg)?;
            let sums = paths
                .iter()
                .map(|c| path_functional(model, p, c, cfg).map(|f| f.sum))
                .collect::<Result<Vec<f64>>>()?;
            let lo = sums.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let scale = 1.0 + r.abs();
            let gap = sums.iter().map(|s| (s - r).abs()).fold(0.0, f64::max);
            Ok(((hi - lo) / scale, gap / scale))
        })
        .collect();
    let mut spread = Check::new("pathindep.spread", 1e-5);
    let mut agree = Check::new("pathindep.pseudo_norm", 1e-5);
    for r in &results {
        spread.add(&r.as_ref().map(|v| v.0).map_err(Clone::clone));
        agree.add(&r.as_ref().map(|v| v.1).map_err(Clone::clone));
    }
    vec![spread.finish(), agree.finish()]
}

/// Angle between two tangent vectors at `x`, stable for small angles.
fn angle(model: &ManifoldModel, x: &Point, a: &[f64], b: &[f64]) -> f64 {
    let ip = |u: &[f64], v: &[f64]| model.inner_unchecked(&x.coords, u, v);
    let nb = ip(b, b).sqrt();
    let along = ip(a, b) / nb;
    let perp: Vec<f64> = a.iter().zip(b).map(|(ai, bi)| ai - along * bi / nb).collect();
    ip(&perp, &perp).max(0.0).sqrt().atan2(along)
}

/// Gradient identity `Π + Π* = grad r` and the orthogonal decompositions
/// `Π = grad 𝒟_p + V` with `V ⟂ σ̇(1)` (and dually), all at `q`.
fn gradient_suite(model: &ManifoldModel, n: usize, rng: &mut SampleRng, cfg: &ToleranceConfig) -> Vec<CheckRecord> {
    let work = pairs(model, n, rng);
    let results: Vec<Result<[f64; 5]>> = work
        .par_iter()
        .map(|(p, q)| {
            let seg = Curve::polyline(&[p.clone(), q.clone()])?;
            let (pi, pi_star) = pi_field(model, p, &seg, 1.0, cfg)?;
            let x = &q.coords;
            let norm = |v: &[f64]| model.inner_unchecked(x, v, v).sqrt();
            let grad_r = divergence_gradient(model, DivergenceKind::PseudoNorm, p, q, cfg)?;
            let resid: Vec<f64> = (0..model.dim())
                .map(|i| pi.components[i] + pi_star.components[i] - grad_r.components[i])
                .collect();
            let identity = norm(&resid);

            let mut orth = [0.0; 2];
            let mut align = [0.0; 2];
            for (slot, (kind, which, field)) in [
                (ConnectionKind::Primal, DivergenceKind::Canonical, &pi.components),
                (ConnectionKind::Dual, DivergenceKind::CanonicalDual, &pi_star.components),
            ]
            .into_iter()
            .enumerate()
            {
                let v = log_map(model, kind, p, q, cfg)?;
                let end_vel = integrate_geodesic(model, kind, p, &v, cfg)?.velocity(1.0).components;
                let grad = divergence_gradient(model, which, p, q, cfg)?.components;
                let diff: Vec<f64> = field.iter().zip(&grad).map(|(a, b)| a - b).collect();
                orth[slot] = model.inner_unchecked(x, &diff, &end_vel).abs() / (norm(field) * norm(&end_vel));
                align[slot] = angle(model, q, &grad, &end_vel);
            }
            Ok([identity, orth[0], orth[1], align[0], align[1]])
        })
        .collect();
    let mut checks = [
        Check::new("gradient.identity", 1e-4),
        Check::new("gradient.orthogonal", 1e-4),
        Check::new("gradient.orthogonal_dual", 1e-4),
        Check::new("gradient.alignment", 1e-3),
        Check::new("gradient.alignment_dual", 1e-3),
    ];
    for r in &results {
        for (i, c) in checks.iter_mut().enumerate() {
            c.add(&r.as_ref().map(|v| v[i]).map_err(Clone::clone));
        }
    }
    checks.into_iter().map(Check::finish).collect()
}

/// Positivity everywhere, plus the closed forms each model class implies:
/// `½‖Δ‖²` on euclidean, `r²θ²/2` on the sphere, `𝒟 = D` on self-dual
/// models and `𝒟 = KL` on dually flat ones.
fn collapse_suite(model: &ManifoldModel, n: usize, rng: &mut SampleRng, cfg: &ToleranceConfig) -> Vec<CheckRecord> {
    let work = pairs(model, n, rng);
    let results: Vec<Result<(f64, f64, f64)>> = work
        .par_iter()
        .map(|(p, q)| {
            let d = canonical_divergence(model, p, q, cfg)?;
            let at_p = canonical_divergence(model, p, p, cfg)?;
            let ay = if model.is_self_dual() { ay_divergence(model, p, q, cfg)? } else { f64::NAN };
            Ok((d, at_p, ay))
        })
        .collect();

    let mut positivity = Check::new("collapse.positivity", 0.0);
    positivity.detail = Some("error = number of pairs with non-positive value".into());
    let mut diagonal = Check::new("collapse.diagonal", 1e-10);
    let closed: Option<(&'static str, f64, Box<dyn Fn(&Point, &Point) -> f64 + Sync>)> = match model.family {
        Family::Euclidean => Some((
            "collapse.closed_form",
            1e-8,
            Box::new(|p: &Point, q: &Point| {
                0.5 * p.coords.iter().zip(&q.coords).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
            }),
        )),
        Family::Sphere { radius } => Some((
            "collapse.closed_form",
            1e-6,
            Box::new(move |p: &Point, q: &Point| {
                let a = radius * great_circle_angle(&p.coords, &q.coords);
                0.5 * a * a
            }),
        )),
        _ => None,
    };
    let mut closed_check = closed.as_ref().map(|(id, tol, _)| Check::new(id, *tol));
    let mut ay_check = model.is_self_dual().then(|| Check::new("collapse.ay_equivalence", 1e-6));
    let mut oracle_check = model.is_dually_flat().then(|| Check::new("collapse.oracle", 1e-6));
    let mut euclid_ay = matches!(model.family, Family::Euclidean).then(|| Check::new("collapse.closed_form_ay", 1e-8));

    for ((p, q), r) in work.iter().zip(&results) {
        positivity.add(&r.as_ref().map(|v| if v.0 > 0.0 { 0.0 } else { 1.0 }).map_err(Clone::clone));
        diagonal.add(&r.as_ref().map(|v| v.1.abs()).map_err(Clone::clone));
        if let (Some(c), Some((_, _, f))) = (closed_check.as_mut(), closed.as_ref()) {
            c.add(&r.as_ref().map(|v| (v.0 - f(p, q)).abs()).map_err(Clone::clone));
        }
        if let (Some(c), Some((_, _, f))) = (euclid_ay.as_mut(), closed.as_ref()) {
            c.add(&r.as_ref().map(|v| (v.2 - f(p, q)).abs()).map_err(Clone::clone));
        }
        if let Some(c) = ay_check.as_mut() {
            c.add(&r.as_ref().map(|v| (v.0 - v.2).abs() / (1.0 + v.2.abs())).map_err(Clone::clone));
        }
        if let Some(c) = oracle_check.as_mut() {
            let e = r.as_ref().map_err(Clone::clone).and_then(|v| {
                let o = model.oracle_divergence(p, q)?;
                Ok((v.0 - o).abs() / (1.0 + o.abs()))
            });
            c.add(&e);
        }
    }
    let mut out = vec![positivity.finish(), diagonal.finish()];
    out.extend([closed_check, euclid_ay, ay_check, oracle_check].into_iter().flatten().map(Check::finish));
    out
}

/// `𝒟(q,p) = 𝒟*(p,q)` pointwise where the model class guarantees it, and
/// the rank agreement of the two sides over `2n` partners of one point.
fn symmetry_suite(
    model: &ManifoldModel,
    n: usize,
    rng: &mut SampleRng,
    cfg: &ToleranceConfig,
) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    if model.is_dually_flat() || model.is_self_dual() {
        let work = pairs(model, n, rng);
        let mut eq = Check::new("symmetry.equality", 1e-6);
        let res: Vec<Result<f64>> = work
            .par_iter()
            .map(|(p, q)| {
                let fwd = dual_canonical_divergence(model, p, q, cfg)?;
                let rev = canonical_divergence(model, q, p, cfg)?;
                Ok((rev - fwd).abs() / (1.0 + fwd.abs()))
            })
            .collect();
        for r in &res {
            eq.add(r);
        }
        out.push(eq.finish());
    }
    let p = sample_point(model, rng);
    let qs: Vec<Point> = (0..2 * n).map(|_| sample_near(model, &p, rng)).collect();
    let probe = symmetry_probe(model, &p, &qs, cfg)?;
    let mut rank = Check::new("symmetry.rank_agreement", 0.0);
    rank.samples = qs.len();
    rank.failures = probe.skipped;
    rank.allowed_failures = (crate::eguchi::MAX_SKIPPED_FRACTION * qs.len() as f64).floor() as usize;
    rank.max_error = 1.0 - probe.rank_agreement;
    rank.detail = Some(format!(
        "rank agreement {:.6}, max relative gap {:.3e}",
        probe.rank_agreement, probe.max_relative_gap
    ));
    out.push(rank.finish());
    Ok(out)
}

fn expected_verdict(model: &ManifoldModel) -> Option<Verdict> {
    if model.is_self_dual() {
        Some(Verdict::SelfDual)
    } else if model.is_dually_flat() {
        Some(Verdict::DuallyFlat)
    } else {
        None
    }
}

/// Classification residuals and verdict; on the sphere also its sectional
/// curvature `1/r²`.
fn classification_suite(
    model: &ManifoldModel,
    n: usize,
    rng: &mut SampleRng,
    cfg: &ToleranceConfig,
) -> Result<Vec<CheckRecord>> {
    let pts = points(model, n, rng);
    let report = classify_manifold(model, &pts, cfg)?;
    let mut out = Vec::new();
    let expected = expected_verdict(model);
    let mut verdict = Check::new("classification.verdict", 0.0);
    verdict.samples = n;
    verdict.max_error = match expected {
        Some(v) if v != report.verdict => 1.0,
        _ => 0.0,
    };
    verdict.detail = Some(match expected {
        Some(v) => format!("measured {:?}, expected {:?}", report.verdict, v),
        None => format!("measured {:?}", report.verdict),
    });
    out.push(verdict.finish());

    let mut record = |id: &'static str, value: f64, applies: bool| {
        let mut c = Check::new(id, report.threshold);
        c.samples = n;
        c.max_error = value;
        if !applies {
            c.tolerance = None;
            c.detail = Some("informational".into());
        }
        out.push(c.finish());
    };
    record("classification.self_dual_residual", report.self_dual_residual, expected == Some(Verdict::SelfDual));
    let flat_expected = model.is_dually_flat();
    record("classification.flatness_residual", report.flatness_residual, flat_expected);
    record("classification.nabla_r", report.symmetry_residuals.0, false);
    record("classification.rxxx", report.symmetry_residuals.1, false);

    if let Family::Sphere { radius } = model.family {
        let mut c = Check::new("classification.sectional_curvature", 1e-5);
        let res: Vec<Result<f64>> = pts
            .par_iter()
            .map(|p| {
                let k = sectional_curvature(model, ConnectionKind::Primal, p, &[1.0, 0.0], &[0.0, 1.0], cfg)?;
                Ok((k - 1.0 / (radius * radius)).abs())
            })
            .collect();
        for r in &res {
            c.add(r);
        }
        out.push(c.finish());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::INDIVIDUAL.iter().chain(&[Suite::All]) {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), *s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn euclidean_all_passes() {
        let m: ManifoldModel = "euclidean:2".parse().unwrap();
        let opts = VerifyOptions { seed: 3, samples: Some(3), ..Default::default() };
        let r = run_suite(&m, Suite::All, &opts).unwrap();
        assert!(r.pass, "{r:#?}");
        assert!(r.checks.iter().all(|c| c.max_error < 1e-8 || c.id.starts_with("classification")));
    }

    #[test]
    fn same_seed_same_report() {
        let m: ManifoldModel = "categorical:1".parse().unwrap();
        let opts = VerifyOptions { seed: 11, samples: Some(3), ..Default::default() };
        let a = serde_json::to_string(&run_suite(&m, Suite::Collapse, &opts).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(&m, Suite::Collapse, &opts).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(!a.contains("duration"));
    }

    #[test]
    fn zero_samples_rejected() {
        let m: ManifoldModel = "euclidean:2".parse().unwrap();
        let opts = VerifyOptions { samples: Some(0), ..Default::default() };
        assert!(matches!(run_suite(&m, Suite::Collapse, &opts), Err(Error::InvalidConfig(_))));
    }
}
