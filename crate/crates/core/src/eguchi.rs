//! Recovering `(g, Γ, Γ*)` from a divergence by differentiation at the
//! diagonal, curvature tensors, classification of models by their
//! curvature, and the `𝒟(q,p)` vs `𝒟*(p,q)` symmetry probe.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ToleranceConfig;
use crate::divergence::{canonical_divergence, divergence, dual_canonical_divergence, DivergenceKind};
use crate::error::{Error, Result};
use crate::manifold::{ConnectionKind, ManifoldModel, Point};
use crate::tensor::{Tensor3, Tensor4};

/// Residual below which a curvature condition counts as satisfied.
pub const CLASSIFICATION_THRESHOLD: f64 = 1e-5;
/// Random `(X, Y)` probes of `R(Y,X,X,X)` per sample point.
pub const CURVATURE_PROBES: usize = 20;
/// Differences below this are ties when comparing rankings.
pub const RANK_TIE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveredStructure {
    pub metric: Vec<Vec<f64>>,
    pub gamma: Tensor3,
    pub gamma_star: Tensor3,
    /// Largest `|∂_i 𝒟|` or `|∂'_i 𝒟|` on the diagonal.
    pub first_derivative_residual: f64,
    /// Largest disagreement among `∂_i∂_j 𝒟`, `-∂_i∂'_j 𝒟` and `∂'_i∂'_j 𝒟`.
    pub mixed_identity_residual: f64,
}

/// Memoized evaluation of `F(x, y) = Div(x, y)` on a lattice around `(p, p)`.
struct Stencil<'a> {
    model: &'a ManifoldModel,
    which: DivergenceKind,
    cfg: &'a ToleranceConfig,
    base: Vec<f64>,
    values: HashMap<(u64, Vec<i8>), f64>,
}

impl<'a> Stencil<'a> {
    fn point(&self, h: f64, offs: &[i8]) -> Vec<f64> {
        self.base.iter().zip(offs).map(|(b, &o)| b + h * f64::from(o)).collect()
    }

    /// Evaluates every requested lattice point (in parallel) and caches it.
    fn fill(&mut self, requests: Vec<(f64, Vec<i8>)>) -> Result<()> {
        let n = self.model.dim();
        let mut todo: Vec<(f64, Vec<i8>)> = Vec::new();
        for (h, o) in requests {
            let key = (h.to_bits(), o.clone());
            if !self.values.contains_key(&key) && !todo.iter().any(|(th, to)| th.to_bits() == key.0 && *to == o) {
                todo.push((h, o));
            }
        }
        let results: Vec<Result<f64>> = todo
            .par_iter()
            .map(|(h, o)| {
                let z = self.point(*h, o);
                let (x, y) = z.split_at(n);
                if !self.model.contains(x) || !self.model.contains(y) {
                    return Err(Error::StencilOutOfDomain { coords: self.base[..n].to_vec() });
                }
                divergence(self.model, self.which, &Point::new(x.to_vec()), &Point::new(y.to_vec()), self.cfg)
            })
            .collect();
        for ((h, o), r) in todo.into_iter().zip(results) {
            self.values.insert((h.to_bits(), o), r?);
        }
        Ok(())
    }

    fn get(&self, h: f64, offs: &[i8]) -> f64 {
        self.values[&(h.to_bits(), offs.to_vec())]
    }

    /// Offsets of the nested central difference `D_a D_b ... f`.
    fn offsets(&self, axes: &[usize]) -> Vec<(Vec<i8>, f64)> {
        let m = self.base.len();
        let mut out = Vec::new();
        for signs in 0..(1u32 << axes.len()) {
            let mut o = vec![0i8; m];
            let mut sign = 1.0;
            for (bit, &a) in axes.iter().enumerate() {
                if signs >> bit & 1 == 1 {
                    o[a] -= 1;
                    sign = -sign;
                } else {
                    o[a] += 1;
                }
            }
            out.push((o, sign));
        }
        out
    }

    fn requests(&self, h: f64, axes: &[usize]) -> Vec<(f64, Vec<i8>)> {
        self.offsets(axes).into_iter().map(|(o, _)| (h, o)).collect()
    }

    fn derivative(&self, h: f64, axes: &[usize]) -> f64 {
        let denom = (2.0 * h).powi(axes.len() as i32);
        self.offsets(axes).iter().map(|(o, s)| s * self.get(h, o)).sum::<f64>() / denom
    }
}

/// Derivatives of `Div(ξ_p, ξ_q)` at `p = q`: the metric from second
/// derivatives, `Γ_ijk = -∂_i∂_j∂'_k Div` and `Γ*_ijk = -∂'_i∂'_j∂_k Div`.
///
/// Central differences with steps `fd_step` (first derivatives),
/// `10·fd_step` (second) and `fd_step^(2/3)` (third), each refined by one
/// Richardson halving.
pub fn recover_structure(
    model: &ManifoldModel,
    which: DivergenceKind,
    p: &Point,
    cfg: &ToleranceConfig,
) -> Result<RecoveredStructure> {
    cfg.validate()?;
    model.check_point(p)?;
    let n = model.dim();
    let mut base = p.coords.clone();
    base.extend_from_slice(&p.coords);
    let mut st = Stencil { model, which, cfg, base, values: HashMap::new() };

    let h1 = cfg.fd_step;
    let h2 = 10.0 * cfg.fd_step;
    let h2b = h2 / 2.0;
    let h3 = cfg.fd_step.powf(2.0 / 3.0);
    let h3b = h3 / 2.0;
    let x = |i: usize| i;
    let y = |i: usize| n + i;

    let mut req = Vec::new();
    for a in 0..2 * n {
        req.extend(st.requests(h1, &[a]));
        req.extend(st.requests(h1 / 2.0, &[a]));
    }
    for a in 0..2 * n {
        for b in a..2 * n {
            req.extend(st.requests(h2, &[a, b]));
            req.extend(st.requests(h2b, &[a, b]));
        }
    }
    for i in 0..n {
        for j in i..n {
            for k in 0..n {
                for h in [h3, h3b] {
                    req.extend(st.requests(h, &[x(i), x(j), y(k)]));
                    req.extend(st.requests(h, &[y(i), y(j), x(k)]));
                }
            }
        }
    }
    st.fill(req)?;

    let first = |a: usize| (4.0 * st.derivative(h1 / 2.0, &[a]) - st.derivative(h1, &[a])) / 3.0;
    let first_derivative_residual = (0..2 * n).map(|a| first(a).abs()).fold(0.0, f64::max);
    let second = |a: usize, b: usize| (4.0 * st.derivative(h2b, &[a, b]) - st.derivative(h2, &[a, b])) / 3.0;
    let third = |axes: &[usize]| (4.0 * st.derivative(h3b, axes) - st.derivative(h3, axes)) / 3.0;

    let mut metric = vec![vec![0.0; n]; n];
    let mut mixed_identity_residual: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let xx = second(x(i.min(j)), x(i.max(j)));
            let xy = second(x(i), y(j));
            let yy = second(y(i.min(j)), y(i.max(j)));
            metric[i][j] = xx;
            mixed_identity_residual = mixed_identity_residual.max((xx + xy).abs()).max((xx - yy).abs());
        }
    }
    let mut gamma = Tensor3::zeros(n);
    let mut gamma_star = Tensor3::zeros(n);
    for i in 0..n {
        for j in i..n {
            for k in 0..n {
                let g = -third(&[x(i), x(j), y(k)]);
                let gs = -third(&[y(i), y(j), x(k)]);
                gamma[(i, j, k)] = g;
                gamma[(j, i, k)] = g;
                gamma_star[(i, j, k)] = gs;
                gamma_star[(j, i, k)] = gs;
            }
        }
    }
    Ok(RecoveredStructure {
        metric,
        gamma,
        gamma_star,
        first_derivative_residual,
        mixed_identity_residual,
    })
}

fn stencil_ok(model: &ManifoldModel, x: &[f64], h: f64) -> Result<()> {
    for i in 0..x.len() {
        for s in [-1.0, 1.0] {
            let mut z = x.to_vec();
            z[i] += s * h;
            if !model.contains(&z) {
                return Err(Error::StencilOutOfDomain { coords: x.to_vec() });
            }
        }
    }
    Ok(())
}

/// Curvature `R(∂_i, ∂_j)∂_k = R^l_{kij} ∂_l`, stored as `[l][k][i][j]`
/// (antisymmetric in the last two indices), with the derivative terms from
/// Richardson-extrapolated central differences of the Christoffel symbols:
/// `R^l_{kij} = ∂_i Γ^l_{jk} - ∂_j Γ^l_{ik} + Γ^l_{im} Γ^m_{jk} - Γ^l_{jm} Γ^m_{ik}`.
pub fn curvature_tensor(
    model: &ManifoldModel,
    kind: ConnectionKind,
    p: &Point,
    cfg: &ToleranceConfig,
) -> Result<Tensor4> {
    model.check_point(p)?;
    curvature_at(model, kind, &p.coords, cfg.fd_step)
}

fn curvature_at(model: &ManifoldModel, kind: ConnectionKind, x: &[f64], h: f64) -> Result<Tensor4> {
    stencil_ok(model, x, h)?;
    let n = model.dim();
    // raised[(j, k, l)] = Γ^l_{jk}
    let raised = model.christoffel_raised_unchecked(x, kind);
    let dgamma: Vec<Tensor3> = (0..n)
        .map(|i| {
            let diff = |step: f64| {
                let mut xp = x.to_vec();
                xp[i] += step;
                let mut xm = x.to_vec();
                xm[i] -= step;
                let gp = model.christoffel_raised_unchecked(&xp, kind);
                let gm = model.christoffel_raised_unchecked(&xm, kind);
                Tensor3::from_fn(n, |a, b, c| (gp[(a, b, c)] - gm[(a, b, c)]) / (2.0 * step))
            };
            let (coarse, fine) = (diff(h), diff(h / 2.0));
            Tensor3::from_fn(n, |a, b, c| (4.0 * fine[(a, b, c)] - coarse[(a, b, c)]) / 3.0)
        })
        .collect();
    let mut r = Tensor4::zeros(n);
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let mut v = dgamma[i][(j, k, l)] - dgamma[j][(i, k, l)];
                    for m in 0..n {
                        v += raised[(i, m, l)] * raised[(j, k, m)] - raised[(j, m, l)] * raised[(i, k, m)];
                    }
                    r[(l, k, i, j)] = v;
                }
            }
        }
    }
    Ok(r)
}

/// Sectional curvature of the plane spanned by `u, v`:
/// `⟨R(u,v)v, u⟩ / (⟨u,u⟩⟨v,v⟩ - ⟨u,v⟩²)`.
pub fn sectional_curvature(
    model: &ManifoldModel,
    kind: ConnectionKind,
    p: &Point,
    u: &[f64],
    v: &[f64],
    cfg: &ToleranceConfig,
) -> Result<f64> {
    let r = curvature_tensor(model, kind, p, cfg)?;
    let x = &p.coords;
    let n = model.dim();
    let mut ruvv = vec![0.0; n];
    for (l, out) in ruvv.iter_mut().enumerate() {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    *out += r[(l, k, i, j)] * u[i] * v[j] * v[k];
                }
            }
        }
    }
    let num = model.inner_unchecked(x, &ruvv, u);
    let den = model.inner_unchecked(x, u, u) * model.inner_unchecked(x, v, v)
        - model.inner_unchecked(x, u, v).powi(2);
    Ok(num / den)
}

/// Largest `|∂_k g_ij - Γ_kij - Γ*_kji|` at `p`, with `∂g` from
/// Richardson-extrapolated central differences of the metric.
pub fn duality_residual(model: &ManifoldModel, p: &Point, cfg: &ToleranceConfig) -> Result<f64> {
    model.check_point(p)?;
    let x = &p.coords;
    let h = cfg.fd_step;
    stencil_ok(model, x, h)?;
    let n = model.dim();
    let gamma = model.christoffel_unchecked(x, ConnectionKind::Primal);
    let gamma_star = model.christoffel_unchecked(x, ConnectionKind::Dual);
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let diff = |step: f64| {
            let mut xp = x.to_vec();
            xp[k] += step;
            let mut xm = x.to_vec();
            xm[k] -= step;
            (model.metric_unchecked(&xp) - model.metric_unchecked(&xm)) / (2.0 * step)
        };
        let dg = (diff(h / 2.0) * 4.0 - diff(h)) / 3.0;
        for i in 0..n {
            for j in 0..n {
                let r = dg[(i, j)] - gamma[(k, i, j)] - gamma_star[(k, j, i)];
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    SelfDual,
    DuallyFlat,
    Symmetric,
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    /// Largest `|Γ_ijk - Γ*_ijk|`.
    pub self_dual_residual: f64,
    /// Largest component of `R` or `R*`.
    pub flatness_residual: f64,
    /// Largest component of `∇R`, and largest `|R(Y,X,X,X)|` over unit probes.
    pub symmetry_residuals: (f64, f64),
    pub threshold: f64,
    pub verdict: Verdict,
    pub sample_count: usize,
}

impl ClassificationReport {
    fn decide(self_dual: f64, flat: f64, sym: (f64, f64), threshold: f64) -> Verdict {
        if self_dual < threshold {
            Verdict::SelfDual
        } else if flat < threshold {
            Verdict::DuallyFlat
        } else if sym.0 < threshold && sym.1 < threshold {
            Verdict::Symmetric
        } else {
            Verdict::General
        }
    }
}

/// `(∇_a R)^l_{kij}` for all `a`, as the largest absolute component.
fn covariant_derivative_residual(model: &ManifoldModel, x: &[f64], cfg: &ToleranceConfig) -> Result<f64> {
    let n = model.dim();
    let kind = ConnectionKind::Primal;
    let h_out = 10.0 * cfg.fd_step;
    stencil_ok(model, x, h_out + cfg.fd_step)?;
    let r = curvature_at(model, kind, x, cfg.fd_step)?;
    let g = model.christoffel_raised_unchecked(x, kind);
    let mut worst: f64 = 0.0;
    for a in 0..n {
        let mut xp = x.to_vec();
        xp[a] += h_out;
        let mut xm = x.to_vec();
        xm[a] -= h_out;
        let rp = curvature_at(model, kind, &xp, cfg.fd_step)?;
        let rm = curvature_at(model, kind, &xm, cfg.fd_step)?;
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut v = (rp[(l, k, i, j)] - rm[(l, k, i, j)]) / (2.0 * h_out);
                        for m in 0..n {
                            v += g[(a, m, l)] * r[(m, k, i, j)]
                                - g[(a, k, m)] * r[(l, m, i, j)]
                                - g[(a, i, m)] * r[(l, k, m, j)]
                                - g[(a, j, m)] * r[(l, k, i, m)];
                        }
                        worst = worst.max(v.abs());
                    }
                }
            }
        }
    }
    Ok(worst)
}

fn unit_probe(model: &ManifoldModel, x: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = model.dim();
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = model.inner_unchecked(x, &v, &v).sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Largest `|⟨R(Y,X)X, X⟩|` over random unit probes.
fn rxxx_residual(model: &ManifoldModel, x: &[f64], r: &Tensor4, rng: &mut ChaCha8Rng) -> f64 {
    let n = model.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..CURVATURE_PROBES {
        let xv = unit_probe(model, x, rng);
        let yv = unit_probe(model, x, rng);
        let mut out = vec![0.0; n];
        for (l, o) in out.iter_mut().enumerate() {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        *o += r[(l, k, i, j)] * yv[i] * xv[j] * xv[k];
                    }
                }
            }
        }
        worst = worst.max(model.inner_unchecked(x, &out, &xv).abs());
    }
    worst
}

/// Measures the curvature conditions at every sample point and assigns the
/// first satisfied class in the order SelfDual, DuallyFlat, Symmetric.
pub fn classify_manifold(
    model: &ManifoldModel,
    sample_points: &[Point],
    cfg: &ToleranceConfig,
) -> Result<ClassificationReport> {
    if sample_points.is_empty() {
        return Err(Error::InvalidConfig("classification needs at least one sample point".into()));
    }
    let per_point: Vec<Result<(f64, f64, f64, f64)>> = sample_points
        .par_iter()
        .enumerate()
        .map(|(idx, p)| {
            model.check_point(p)?;
            let x = &p.coords;
            let g = model.christoffel_unchecked(x, ConnectionKind::Primal);
            let gs = model.christoffel_unchecked(x, ConnectionKind::Dual);
            let self_dual = g.max_abs_diff(&gs);
            let r = curvature_at(model, ConnectionKind::Primal, x, cfg.fd_step)?;
            let rs = curvature_at(model, ConnectionKind::Dual, x, cfg.fd_step)?;
            let flat = r.max_abs().max(rs.max_abs());
            let nabla_r = covariant_derivative_residual(model, x, cfg)?;
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + idx as u64);
            let rxxx = rxxx_residual(model, x, &r, &mut rng);
            Ok((self_dual, flat, nabla_r, rxxx))
        })
        .collect();
    let (mut sd, mut fl, mut nr, mut rx) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for r in per_point {
        let (a, b, c, d) = r?;
        sd = sd.max(a);
        fl = fl.max(b);
        nr = nr.max(c);
        rx = rx.max(d);
    }
    let threshold = CLASSIFICATION_THRESHOLD;
    Ok(ClassificationReport {
        self_dual_residual: sd,
        flatness_residual: fl,
        symmetry_residuals: (nr, rx),
        threshold,
        verdict: ClassificationReport::decide(sd, fl, (nr, rx), threshold),
        sample_count: sample_points.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryRow {
    pub q: Vec<f64>,
    /// `𝒟*(p, q)`
    pub dual_forward: Option<f64>,
    /// `𝒟(q, p)`
    pub primal_reverse: Option<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryProbe {
    pub rows: Vec<SymmetryRow>,
    pub skipped: usize,
    /// Fraction of concordant pairs between the two rankings (1 = identical).
    pub rank_agreement: f64,
    /// Largest `|𝒟(q,p) - 𝒟*(p,q)| / (1 + 𝒟*(p,q))`.
    pub max_relative_gap: f64,
    /// Pointwise equality verdict, checked on dually flat models only.
    pub equality_holds: Option<bool>,
    pub passed: bool,
}

pub const SYMMETRY_EQUALITY_TOL: f64 = 1e-6;
pub const MAX_SKIPPED_FRACTION: f64 = 0.2;

/// Fraction of concordant pairs between two score lists; near-ties count as
/// concordant.
pub fn rank_agreement(a: &[f64], b: &[f64]) -> f64 {
    let m = a.len();
    if m < 2 {
        return 1.0;
    }
    let mut total = 0usize;
    let mut concordant = 0usize;
    for i in 0..m {
        for j in i + 1..m {
            total += 1;
            let da = a[i] - a[j];
            let db = b[i] - b[j];
            if da.abs() <= RANK_TIE_TOL || db.abs() <= RANK_TIE_TOL || da.signum() == db.signum() {
                concordant += 1;
            }
        }
    }
    concordant as f64 / total as f64
}

/// Tabulates `(𝒟*(p,q), 𝒟(q,p))` and checks that both rank the samples
/// identically (a strictly increasing `f` with `𝒟(q,p) = f(𝒟*(p,q))`
/// preserves order). Non-converged pairs are skipped and flagged.
pub fn symmetry_probe(
    model: &ManifoldModel,
    p: &Point,
    sample_qs: &[Point],
    cfg: &ToleranceConfig,
) -> Result<SymmetryProbe> {
    model.check_point(p)?;
    let rows: Vec<Result<SymmetryRow>> = sample_qs
        .par_iter()
        .map(|q| {
            let fwd = dual_canonical_divergence(model, p, q, cfg);
            let rev = canonical_divergence(model, q, p, cfg);
            match (fwd, rev) {
                (Ok(a), Ok(b)) => Ok(SymmetryRow {
                    q: q.coords.clone(),
                    dual_forward: Some(a),
                    primal_reverse: Some(b),
                    converged: true,
                }),
                (Err(e), _) | (_, Err(e)) if !e.is_shooting_failure() => Err(e),
                (a, b) => Ok(SymmetryRow {
                    q: q.coords.clone(),
                    dual_forward: a.ok(),
                    primal_reverse: b.ok(),
                    converged: false,
                }),
            }
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let ok: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| Some((r.dual_forward?, r.primal_reverse?)).filter(|_| r.converged))
        .collect();
    let skipped = rows.len() - ok.len();
    let (a, b): (Vec<f64>, Vec<f64>) = ok.iter().copied().unzip();
    let agreement = rank_agreement(&a, &b);
    let gap = ok.iter().map(|(x, y)| (y - x).abs() / (1.0 + x.abs())).fold(0.0, f64::max);
    let equality_holds = model.is_dually_flat().then_some(gap <= SYMMETRY_EQUALITY_TOL);
    let skip_ok = (skipped as f64) <= MAX_SKIPPED_FRACTION * rows.len() as f64;
    let passed = skip_ok && agreement == 1.0 && equality_holds.unwrap_or(true);
    Ok(SymmetryProbe { rows, skipped, rank_agreement: agreement, max_relative_gap: gap, equality_holds, passed })
}

#[cfg(test)]
mod tests;
