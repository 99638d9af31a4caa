//! Seeded sampling of points and pairs inside per-model safe boxes.
//!
//! Safe boxes (all strictly inside the chart domains):
//! * euclidean: `[-2, 2]^n`; pairs are independent.
//! * sphere: `θ ∈ [0.6, π - 0.6]`; pairs at great-circle angle in `[0.05, 1]`.
//! * categorical: probabilities `≥ min(0.05, 0.5/(n+1))`; pairs independent.
//! * gaussian1d: `μ ∈ [-2, 2]`, `σ ∈ [0.5, 2]`; the means of a pair differ
//!   by at most 1.
//! * alpha_categorical: probabilities `≥ min(0.1, 0.5/(n+1))`; the second
//!   point of a pair lies within 0.25 (max-norm) of the first.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closed_form::great_circle_destination;
use crate::manifold::{Family, ManifoldModel, Point};

pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn simplex_point(rng: &mut SampleRng, n: usize, min_prob: f64) -> Vec<f64> {
    loop {
        // Uniform on the simplex via normalized exponentials.
        let e: Vec<f64> = (0..=n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let s: f64 = e.iter().sum();
        let p: Vec<f64> = e.iter().map(|x| x / s).collect();
        if p.iter().all(|&x| x >= min_prob) {
            return p;
        }
    }
}

fn categorical_floor(n: usize, cap: f64) -> f64 {
    cap.min(0.5 / (n as f64 + 1.0))
}

/// A random point in the model's safe box.
pub fn sample_point(model: &ManifoldModel, rng: &mut SampleRng) -> Point {
    let n = model.dim();
    match model.family {
        Family::Euclidean => Point::new((0..n).map(|_| rng.random_range(-2.0..2.0)).collect::<Vec<_>>()),
        Family::Sphere { .. } => Point::new(vec![
            rng.random_range(0.6..PI - 0.6),
            rng.random_range(-PI..PI),
        ]),
        Family::Categorical => {
            let p = simplex_point(rng, n, categorical_floor(n, 0.05));
            Point::new(p[1..].iter().map(|x| (x / p[0]).ln()).collect::<Vec<_>>())
        }
        Family::Gaussian1d => {
            let mu: f64 = rng.random_range(-2.0..2.0);
            let sigma: f64 = rng.random_range(0.5..2.0);
            let var = sigma * sigma;
            Point::new(vec![mu / var, -1.0 / (2.0 * var)])
        }
        Family::AlphaCategorical { .. } => {
            let p = simplex_point(rng, n, categorical_floor(n, 0.1));
            Point::new(p[1..].to_vec())
        }
    }
}

/// Whether `x` lies in the region the samplers draw from (for pair partners,
/// the looser of the two boxes).
pub fn in_safe_box(model: &ManifoldModel, x: &[f64]) -> bool {
    if x.len() != model.dim() || !model.contains(x) {
        return false;
    }
    let n = model.dim();
    match model.family {
        Family::Euclidean => x.iter().all(|c| c.abs() <= 2.0),
        Family::Sphere { .. } => x[0] >= 0.3 && x[0] <= PI - 0.3,
        Family::Categorical => {
            let floor = categorical_floor(n, 0.05);
            let m = x.iter().copied().fold(0.0, f64::max);
            let z = (-m).exp() + x.iter().map(|t| (t - m).exp()).sum::<f64>();
            (-m).exp() / z >= floor && x.iter().all(|t| (t - m).exp() / z >= floor)
        }
        Family::Gaussian1d => {
            let var = -1.0 / (2.0 * x[1]);
            let mu = x[0] * var;
            mu.abs() <= 2.0 && (0.25..=4.0).contains(&var)
        }
        Family::AlphaCategorical { .. } => {
            let floor = categorical_floor(n, 0.1) / 2.0;
            1.0 - x.iter().sum::<f64>() >= floor && x.iter().all(|&p| p >= floor)
        }
    }
}

/// A random pair of distinct points suitable for divergence evaluation.
pub fn sample_pair(model: &ManifoldModel, rng: &mut SampleRng) -> (Point, Point) {
    let p = sample_point(model, rng);
    let q = sample_near(model, &p, rng);
    (p, q)
}

/// A random partner for `p`, drawn as the second point of [`sample_pair`].
pub fn sample_near(model: &ManifoldModel, p: &Point, rng: &mut SampleRng) -> Point {
    match model.family {
        Family::Sphere { .. } => loop {
            let bearing = rng.random_range(0.0..2.0 * PI);
            let angle = rng.random_range(0.05..1.0);
            let q = great_circle_destination(&p.coords, bearing, angle);
            if q[0] > 0.3 && q[0] < PI - 0.3 {
                break Point::new(q.to_vec());
            }
        },
        Family::AlphaCategorical { .. } => {
            let floor = categorical_floor(model.dim(), 0.1) / 2.0;
            loop {
                let q: Vec<f64> =
                    p.coords.iter().map(|x| x + rng.random_range(-0.25..0.25)).collect();
                let q0 = 1.0 - q.iter().sum::<f64>();
                if q0 >= floor && q.iter().all(|&x| x >= floor) {
                    break Point::new(q);
                }
            }
        }
        Family::Gaussian1d => loop {
            let (mu_p, _) = crate::manifold::gaussian_moments(&p.coords);
            let q = sample_point(model, rng);
            let (mu_q, _) = crate::manifold::gaussian_moments(&q.coords);
            if (mu_q - mu_p).abs() <= 1.0 {
                break q;
            }
        },
        _ => sample_point(model, rng),
    }
}
