//! Dormand-Prince 5(4) with step-size control and continuous (dense) output.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, max_steps: 200_000 }
    }
}

/// Continuous extension over one accepted step `[t0, t0 + h]`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct DenseStep {
    pub t0: f64,
    pub h: f64,
    /// Five coefficient vectors of length `n`, concatenated.
    coeffs: Vec<f64>,
}

impl DenseStep {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len() / 5
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let n = self.dim();
        let s = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let s1 = 1.0 - s;
        let c = &self.coeffs;
        for i in 0..n {
            out[i] = c[i]
                + s * (c[n + i] + s1 * (c[2 * n + i] + s * (c[3 * n + i] + s1 * c[4 * n + i])));
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub y_end: Vec<f64>,
    pub dense: Vec<DenseStep>,
}

fn rms_scaled(v: &[f64], y: &[f64], opts: &OdeOptions) -> f64 {
    let n = v.len() as f64;
    (v.iter()
        .zip(y)
        .map(|(a, b)| {
            let sc = opts.atol + opts.rtol * b.abs();
            (a / sc) * (a / sc)
        })
        .sum::<f64>()
        / n)
        .sqrt()
}

fn initial_step<F>(rhs: &mut F, t0: f64, y0: &[f64], f0: &[f64], span: f64, opts: &OdeOptions) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let d0 = rms_scaled(y0, y0, opts);
    let d1 = rms_scaled(f0, y0, opts);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + h0 * f).collect();
    let mut f1 = vec![0.0; y0.len()];
    rhs(t0 + h0, &y1, &mut f1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms_scaled(&diff, y0, opts) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 || !dm.is_finite() {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dm).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t1 > t0`.
///
/// `on_accept` sees every accepted step and may abort the integration (the
/// geodesic code uses it to detect domain exits). Non-finite stage values are
/// treated as a rejected step.
pub(crate) fn integrate<F, A>(
    mut rhs: F,
    t0: f64,
    t1: f64,
    y0: &[f64],
    opts: &OdeOptions,
    keep_dense: bool,
    mut on_accept: A,
) -> Result<Solution>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    A: FnMut(&DenseStep) -> Result<()>,
{
    let n = y0.len();
    let mut y = y0.to_vec();
    if t1 <= t0 {
        return Ok(Solution { y_end: y, dense: Vec::new() });
    }
    let span = t1 - t0;
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut ys = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];

    rhs(t0, &y, &mut k1);
    if k1.iter().any(|v| !v.is_finite()) {
        return Err(Error::IntegrationFailure { t: t0, reason: "non-finite derivative at start".into() });
    }
    let mut h = initial_step(&mut rhs, t0, &y, &k1, span, opts);
    let mut t = t0;
    let mut dense = Vec::new();
    let mut steps = 0usize;
    let mut rejected_last = false;

    while t < t1 {
        if steps >= opts.max_steps {
            return Err(Error::IntegrationFailure { t, reason: "too many steps".into() });
        }
        let last = t + h >= t1 - 1e-14 * span;
        if last {
            h = t1 - t;
        }
        if h <= 1e-14 * span.max(t.abs()) {
            return Err(Error::IntegrationFailure { t, reason: "step size collapsed".into() });
        }

        for i in 0..n {
            ys[i] = y[i] + h * A21 * k1[i];
        }
        rhs(t + C2 * h, &ys, &mut k2);
        for i in 0..n {
            ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs(t + C3 * h, &ys, &mut k3);
        for i in 0..n {
            ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(t + C4 * h, &ys, &mut k4);
        for i in 0..n {
            ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(t + C5 * h, &ys, &mut k5);
        for i in 0..n {
            ys[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        rhs(t + h, &ys, &mut k6);
        for i in 0..n {
            y_new[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        rhs(t + h, &y_new, &mut k7);
        for i in 0..n {
            err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }

        let finite = y_new.iter().chain(k7.iter()).all(|v| v.is_finite());
        let err_norm = if finite {
            let mut acc = 0.0;
            for i in 0..n {
                let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                acc += (err[i] / sc) * (err[i] / sc);
            }
            (acc / n as f64).sqrt()
        } else {
            f64::INFINITY
        };

        if err_norm <= 1.0 {
            let mut coeffs = vec![0.0; 5 * n];
            for i in 0..n {
                let dy = y_new[i] - y[i];
                let bspl = h * k1[i] - dy;
                coeffs[i] = y[i];
                coeffs[n + i] = dy;
                coeffs[2 * n + i] = bspl;
                coeffs[3 * n + i] = dy - h * k7[i] - bspl;
                coeffs[4 * n + i] = h
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                        + D7 * k7[i]);
            }
            let step = DenseStep { t0: t, h, coeffs };
            on_accept(&step)?;
            if keep_dense {
                dense.push(step);
            }
            t = if last { t1 } else { t + h };
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            steps += 1;
            let fac = if err_norm == 0.0 { 10.0 } else { (0.9 * err_norm.powf(-0.2)).clamp(0.2, 10.0) };
            h *= if rejected_last { fac.min(1.0) } else { fac };
            rejected_last = false;
        } else {
            let fac = if err_norm.is_finite() { (0.9 * err_norm.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
            h *= fac;
            rejected_last = true;
        }
    }
    Ok(Solution { y_end: y, dense })
}
