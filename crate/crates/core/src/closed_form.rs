//! Reference values that do not go through the integrator: great-circle
//! geometry on the round sphere. Used by the verification suites.

use std::f64::consts::PI;

pub fn sphere_to_cartesian(x: &[f64]) -> [f64; 3] {
    let (st, ct) = x[0].sin_cos();
    let (sp, cp) = x[1].sin_cos();
    [st * cp, st * sp, ct]
}

/// Angle between two sphere-chart points, computed with `atan2` for
/// accuracy at small and large separations.
pub fn great_circle_angle(p: &[f64], q: &[f64]) -> f64 {
    let a = sphere_to_cartesian(p);
    let b = sphere_to_cartesian(q);
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let sin = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    let cos = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    sin.atan2(cos)
}

/// Point reached from `p` by travelling `angle` along the great circle that
/// leaves `p` at heading `bearing` (0 = increasing θ, π/2 = increasing φ).
/// The returned `φ` is unwrapped to lie within π of `p`'s.
pub fn great_circle_destination(p: &[f64], bearing: f64, angle: f64) -> [f64; 2] {
    let x = sphere_to_cartesian(p);
    let (st, ct) = p[0].sin_cos();
    let (sp, cp) = p[1].sin_cos();
    let e_theta = [ct * cp, ct * sp, -st];
    let e_phi = [-sp, cp, 0.0];
    let (sb, cb) = bearing.sin_cos();
    let (sa, ca) = angle.sin_cos();
    let y: Vec<f64> = (0..3)
        .map(|i| ca * x[i] + sa * (cb * e_theta[i] + sb * e_phi[i]))
        .collect();
    let theta = y[2].clamp(-1.0, 1.0).acos();
    let mut dphi = y[1].atan2(y[0]) - p[1];
    dphi -= 2.0 * PI * ((dphi + PI) / (2.0 * PI)).floor();
    [theta, p[1] + dphi]
}
