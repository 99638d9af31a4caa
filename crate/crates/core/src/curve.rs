//! Continuously evaluable paths `t ∈ [0, 1] → M`.

use crate::error::{Error, Result};
use crate::manifold::{Point, Tangent};
use crate::ode::DenseStep;

#[derive(Debug, Clone, PartialEq)]
enum Piece {
    /// Cubic Hermite interpolation between two samples.
    Hermite { x0: Vec<f64>, v0: Vec<f64>, x1: Vec<f64>, v1: Vec<f64> },
    /// Integrator continuous extension of the state `[x, ẋ]`.
    Dense(DenseStep),
}

#[derive(Debug, Clone, PartialEq)]
struct Segment {
    t0: f64,
    t1: f64,
    piece: Piece,
}

/// A path on `[0, 1]`, either integrated (dense output of a geodesic ODE) or
/// interpolated through samples. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    dim: usize,
    segments: Vec<Segment>,
    /// Interior times where the velocity may jump (polyline corners).
    corners: Vec<f64>,
}

impl Curve {
    /// Piecewise-linear path through `points` at uniformly spaced times.
    pub fn polyline(points: &[Point]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidConfig("a polyline needs at least two points".into()));
        }
        let dim = points[0].dim();
        if let Some(bad) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: bad.dim() });
        }
        let m = points.len() - 1;
        let mut segments = Vec::with_capacity(m);
        for (k, w) in points.windows(2).enumerate() {
            let t0 = k as f64 / m as f64;
            let t1 = (k + 1) as f64 / m as f64;
            let chord: Vec<f64> =
                w[1].coords.iter().zip(&w[0].coords).map(|(b, a)| (b - a) / (t1 - t0)).collect();
            segments.push(Segment {
                t0,
                t1,
                piece: Piece::Hermite {
                    x0: w[0].coords.clone(),
                    v0: chord.clone(),
                    x1: w[1].coords.clone(),
                    v1: chord,
                },
            });
        }
        let corners = (1..m).map(|k| k as f64 / m as f64).collect();
        Ok(Self { dim, segments, corners })
    }

    /// C¹ cubic Hermite curve through `(t, point, velocity)` samples.
    pub fn hermite(samples: &[(f64, Tangent)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidConfig("a curve needs at least two samples".into()));
        }
        let dim = samples[0].1.base.dim();
        let first = samples[0].0;
        let last = samples[samples.len() - 1].0;
        if first != 0.0 || last != 1.0 {
            return Err(Error::InvalidConfig("curve samples must start at t = 0 and end at t = 1".into()));
        }
        for w in samples.windows(2) {
            if w[1].0.partial_cmp(&w[0].0) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::InvalidConfig("curve sample times must be strictly increasing".into()));
            }
        }
        for (_, v) in samples {
            if v.base.dim() != dim || v.components.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.components.len() });
            }
        }
        let segments = samples
            .windows(2)
            .map(|w| Segment {
                t0: w[0].0,
                t1: w[1].0,
                piece: Piece::Hermite {
                    x0: w[0].1.base.coords.clone(),
                    v0: w[0].1.components.clone(),
                    x1: w[1].1.base.coords.clone(),
                    v1: w[1].1.components.clone(),
                },
            })
            .collect();
        Ok(Self { dim, segments, corners: Vec::new() })
    }

    /// The constant path at `p`.
    pub fn constant(p: &Point) -> Self {
        let zero = vec![0.0; p.dim()];
        Self {
            dim: p.dim(),
            segments: vec![Segment {
                t0: 0.0,
                t1: 1.0,
                piece: Piece::Hermite {
                    x0: p.coords.clone(),
                    v0: zero.clone(),
                    x1: p.coords.clone(),
                    v1: zero,
                },
            }],
            corners: Vec::new(),
        }
    }

    pub(crate) fn from_dense(dim: usize, steps: Vec<DenseStep>) -> Self {
        let segments = steps
            .into_iter()
            .map(|s| Segment { t0: s.t0, t1: s.t1(), piece: Piece::Dense(s) })
            .collect();
        Self { dim, segments, corners: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn segment(&self, t: f64) -> &Segment {
        let idx = self.segments.partition_point(|s| s.t1 < t);
        &self.segments[idx.min(self.segments.len() - 1)]
    }

    /// Position and velocity at `t` (clamped to `[0, 1]`).
    pub fn eval(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let t = t.clamp(0.0, 1.0);
        let seg = self.segment(t);
        let n = self.dim;
        match &seg.piece {
            Piece::Dense(step) => {
                let mut state = vec![0.0; 2 * n];
                step.eval_into(t, &mut state);
                let v = state.split_off(n);
                (state, v)
            }
            Piece::Hermite { x0, v0, x1, v1 } => {
                let h = seg.t1 - seg.t0;
                let s = (t - seg.t0) / h;
                let (s2, s3) = (s * s, s * s * s);
                let (h00, h10, h01, h11) =
                    (2.0 * s3 - 3.0 * s2 + 1.0, s3 - 2.0 * s2 + s, -2.0 * s3 + 3.0 * s2, s3 - s2);
                let (d00, d10, d01, d11) =
                    (6.0 * s2 - 6.0 * s, 3.0 * s2 - 4.0 * s + 1.0, -6.0 * s2 + 6.0 * s, 3.0 * s2 - 2.0 * s);
                let x = (0..n)
                    .map(|i| h00 * x0[i] + h10 * h * v0[i] + h01 * x1[i] + h11 * h * v1[i])
                    .collect();
                let v = (0..n)
                    .map(|i| (d00 * x0[i] + d01 * x1[i]) / h + d10 * v0[i] + d11 * v1[i])
                    .collect();
                (x, v)
            }
        }
    }

    pub fn point(&self, t: f64) -> Point {
        Point::new(self.eval(t).0)
    }

    pub fn velocity(&self, t: f64) -> Tangent {
        let (x, v) = self.eval(t);
        Tangent::new(Point::new(x), v)
    }

    pub fn start(&self) -> Point {
        self.point(0.0)
    }

    pub fn end(&self) -> Point {
        self.point(1.0)
    }

    /// Stored samples: every segment boundary with its position and velocity.
    /// At a polyline corner the velocity of the outgoing segment is reported.
    pub fn samples(&self) -> Vec<(f64, Tangent)> {
        let mut out: Vec<(f64, Tangent)> = self
            .segments
            .iter()
            .map(|s| (s.t0, self.velocity_on(s, s.t0)))
            .collect();
        let last = self.segments.last().expect("curve has segments");
        out.push((last.t1, self.velocity_on(last, last.t1)));
        out
    }

    fn velocity_on(&self, seg: &Segment, t: f64) -> Tangent {
        let single = Curve { dim: self.dim, segments: vec![seg.clone()], corners: Vec::new() };
        single.velocity(t)
    }

    /// Sub-intervals of `[0, 1]` on which the curve is smooth.
    pub fn smooth_intervals(&self) -> Vec<(f64, f64)> {
        let mut knots = vec![0.0];
        knots.extend(self.corners.iter().copied());
        knots.push(1.0);
        knots.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Position and one-sided velocity at `t`, taking the velocity of the
    /// piece that contains `(t, t + ε)` when `from_right` is set.
    pub(crate) fn eval_one_sided(&self, t: f64, from_right: bool) -> (Vec<f64>, Vec<f64>) {
        if self.corners.iter().any(|&c| c == t) {
            let idx = self.segments.partition_point(|s| s.t1 <= t);
            let seg = if from_right { &self.segments[idx] } else { &self.segments[idx - 1] };
            let single = Curve { dim: self.dim, segments: vec![seg.clone()], corners: Vec::new() };
            return single.eval(t);
        }
        self.eval(t)
    }
}
