use super::*;
use crate::sampling::{rng_from_seed, sample_near, sample_point};
use approx::assert_abs_diff_eq;

fn model(spec: &str) -> ManifoldModel {
    spec.parse().unwrap()
}

fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

#[test]
fn euclidean_ay_recovery() {
    let m = model("euclidean:2");
    let p = Point::new(vec![0.4, -1.2]);
    let r = recover_structure(&m, DivergenceKind::Ay, &p, &cfg()).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            assert_abs_diff_eq!(r.metric[i][j], if i == j { 1.0 } else { 0.0 }, epsilon = 1e-6);
        }
    }
    assert!(r.gamma.max_abs() < 1e-4 && r.gamma_star.max_abs() < 1e-4);
}

#[test]
fn bernoulli_metric_from_canonical_divergence() {
    let m = model("categorical:1");
    let r = recover_structure(&m, DivergenceKind::Canonical, &Point::new(vec![0.0]), &cfg()).unwrap();
    assert_abs_diff_eq!(r.metric[0][0], 0.25, epsilon = 1e-4);
}

#[test]
fn oracle_recovery_matches_analytic_connections() {
    let mut rng = rng_from_seed(41);
    for spec in ["categorical:2", "gaussian1d"] {
        let m = model(spec);
        let p = sample_point(&m, &mut rng);
        let r = recover_structure(&m, DivergenceKind::OracleKL, &p, &cfg()).unwrap();
        let g = m.christoffel_at(&p, ConnectionKind::Primal).unwrap();
        let gs = m.christoffel_at(&p, ConnectionKind::Dual).unwrap();
        assert!(r.gamma.max_abs_diff(&g) < 1e-3, "{spec}");
        assert!(r.gamma_star.max_abs_diff(&gs) < 1e-3, "{spec}");
        assert!(r.first_derivative_residual < 1e-6);
        assert!(r.mixed_identity_residual < 1e-4);
        let metric = m.metric_at(&p).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(r.metric[i][j], r.metric[j][i]);
                assert!((r.metric[i][j] - metric[(i, j)]).abs() < 1e-6 * (1.0 + metric[(i, j)].abs()));
            }
        }
    }
}

#[test]
fn recovery_needs_room_for_the_stencil() {
    let m = model("sphere:2:1");
    let p = Point::new(vec![0.1005, 0.0]);
    let r = recover_structure(&m, DivergenceKind::Canonical, &p, &cfg());
    assert!(matches!(r, Err(Error::StencilOutOfDomain { .. })), "{r:?}");
}

#[test]
fn euclidean_curvature_vanishes() {
    let m = model("euclidean:3");
    let r = curvature_tensor(&m, ConnectionKind::Primal, &Point::new(vec![0.1, 0.2, 0.3]), &cfg()).unwrap();
    assert_eq!(r.max_abs(), 0.0);
}

#[test]
fn unit_sphere_has_unit_sectional_curvature() {
    let m = model("sphere:2:1");
    let mut rng = rng_from_seed(42);
    for _ in 0..10 {
        let p = sample_point(&m, &mut rng);
        let r = curvature_tensor(&m, ConnectionKind::Primal, &p, &cfg()).unwrap();
        let g = m.metric_at(&p).unwrap();
        // R_{1212} = g_{0l} R^l_{101} (0-based), divided by det g.
        let r1212: f64 = (0..2).map(|l| g[(0, l)] * r[(l, 1, 0, 1)]).sum();
        assert_abs_diff_eq!(r1212 / g.determinant(), 1.0, epsilon = 1e-5);
        let k = sectional_curvature(&m, ConnectionKind::Primal, &p, &[0.3, 0.1], &[-0.2, 0.7], &cfg()).unwrap();
        assert_abs_diff_eq!(k, 1.0, epsilon = 1e-5);
    }
    let big = model("sphere:2:2");
    let p = Point::new(vec![1.2, 0.0]);
    let k = sectional_curvature(&big, ConnectionKind::Primal, &p, &[1.0, 0.0], &[0.0, 1.0], &cfg()).unwrap();
    assert_abs_diff_eq!(k, 0.25, epsilon = 1e-5);
}

#[test]
fn curvature_is_antisymmetric_in_last_pair() {
    let m = model("alpha_categorical:2:0.5");
    let p = Point::new(vec![0.3, 0.25]);
    for kind in [ConnectionKind::Primal, ConnectionKind::Dual] {
        let r = curvature_tensor(&m, kind, &p, &cfg()).unwrap();
        for l in 0..2 {
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        assert_eq!(r[(l, k, i, j)], -r[(l, k, j, i)]);
                    }
                }
            }
        }
    }
}

#[test]
fn categorical_primal_curvature_vanishes() {
    let m = model("categorical:3");
    let p = Point::new(vec![0.2, -0.4, 0.1]);
    let r = curvature_tensor(&m, ConnectionKind::Primal, &p, &cfg()).unwrap();
    assert!(r.max_abs() < 1e-6);
    let rs = curvature_tensor(&m, ConnectionKind::Dual, &p, &cfg()).unwrap();
    assert!(rs.max_abs() < 1e-6);
}

#[test]
fn classification_verdicts() {
    let mut rng = rng_from_seed(43);
    for (spec, expect) in [
        ("euclidean:3", Verdict::SelfDual),
        ("sphere:2:1", Verdict::SelfDual),
        ("categorical:2", Verdict::DuallyFlat),
        ("gaussian1d", Verdict::DuallyFlat),
    ] {
        let m = model(spec);
        let pts: Vec<Point> = (0..5).map(|_| sample_point(&m, &mut rng)).collect();
        let rep = classify_manifold(&m, &pts, &cfg()).unwrap();
        assert_eq!(rep.verdict, expect, "{spec}: {rep:?}");
        assert_eq!(rep.sample_count, 5);
    }
    let m = model("alpha_categorical:2:0.5");
    let pts: Vec<Point> = (0..3).map(|_| sample_point(&m, &mut rng)).collect();
    let rep = classify_manifold(&m, &pts, &cfg()).unwrap();
    assert!(rep.self_dual_residual > rep.threshold && rep.flatness_residual > rep.threshold);
    assert!(matches!(rep.verdict, Verdict::Symmetric | Verdict::General));
}

#[test]
fn verdict_follows_thresholds_in_order() {
    let t = CLASSIFICATION_THRESHOLD;
    assert_eq!(ClassificationReport::decide(0.0, 0.0, (0.0, 0.0), t), Verdict::SelfDual);
    assert_eq!(ClassificationReport::decide(1.0, 0.0, (1.0, 1.0), t), Verdict::DuallyFlat);
    assert_eq!(ClassificationReport::decide(1.0, 1.0, (0.0, 0.0), t), Verdict::Symmetric);
    assert_eq!(ClassificationReport::decide(1.0, 1.0, (0.0, 1.0), t), Verdict::General);
}

#[test]
fn classification_needs_points() {
    let m = model("euclidean:2");
    assert!(matches!(classify_manifold(&m, &[], &cfg()), Err(Error::InvalidConfig(_))));
}

#[test]
fn rank_agreement_counts_concordant_pairs() {
    assert_eq!(rank_agreement(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), 1.0);
    assert_eq!(rank_agreement(&[1.0, 2.0, 3.0], &[30.0, 20.0, 10.0]), 0.0);
    assert_abs_diff_eq!(rank_agreement(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]), 2.0 / 3.0, epsilon = 1e-15);
    assert_eq!(rank_agreement(&[1.0, 1.0 + 1e-10], &[2.0, 1.0]), 1.0);
    assert_eq!(rank_agreement(&[5.0], &[1.0]), 1.0);
}

#[test]
fn bernoulli_symmetry_probe() {
    let m = model("categorical:1");
    let mut rng = rng_from_seed(44);
    let p = sample_point(&m, &mut rng);
    let qs: Vec<Point> = (0..20).map(|_| sample_near(&m, &p, &mut rng)).collect();
    let probe = symmetry_probe(&m, &p, &qs, &cfg()).unwrap();
    assert_eq!(probe.rows.len(), 20);
    assert_eq!(probe.skipped, 0);
    assert_eq!(probe.rank_agreement, 1.0);
    assert_eq!(probe.equality_holds, Some(true));
    assert!(probe.max_relative_gap <= SYMMETRY_EQUALITY_TOL);
    assert!(probe.passed);
}

#[test]
fn euclidean_probe_rows_are_equal() {
    let m = model("euclidean:2");
    let p = Point::new(vec![0.0, 0.0]);
    let qs: Vec<Point> = (0..10).map(|i| Point::new(vec![0.1 * i as f64, -0.05 * i as f64])).collect();
    let probe = symmetry_probe(&m, &p, &qs, &cfg()).unwrap();
    for row in &probe.rows {
        assert_abs_diff_eq!(row.dual_forward.unwrap(), row.primal_reverse.unwrap(), epsilon = 1e-12);
    }
}

#[test]
fn probe_flags_failed_pairs() {
    let m = model("categorical:1");
    let p = Point::new(vec![0.0]);
    let strict = ToleranceConfig { shoot_max_iter: 1, ..cfg() };
    let qs = vec![Point::new(vec![4.0]), Point::new(vec![-4.0]), Point::new(vec![3.5])];
    let probe = symmetry_probe(&m, &p, &qs, &strict).unwrap();
    assert_eq!(probe.skipped, 3);
    assert!(probe.rows.iter().all(|r| !r.converged));
    assert!(!probe.passed);
}

#[test]
fn duality_residual_is_small_everywhere() {
    let mut rng = rng_from_seed(45);
    for spec in ["euclidean:2", "sphere:2:1", "categorical:2", "gaussian1d", "alpha_categorical:2:0.5"] {
        let m = model(spec);
        for _ in 0..20 {
            let p = sample_point(&m, &mut rng);
            assert!(duality_residual(&m, &p, &cfg()).unwrap() < 1e-6, "{spec}");
        }
    }
}
