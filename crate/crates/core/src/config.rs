use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical knobs shared by the integrator, the shooting solver, quadrature
/// and finite differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub ode_rel_tol: f64,
    pub ode_abs_tol: f64,
    /// Convergence threshold of the shooting solver, in chart coordinates.
    pub shoot_tol: f64,
    pub shoot_max_iter: usize,
    /// Gauss-Legendre node count.
    pub quad_nodes: usize,
    pub fd_step: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            ode_rel_tol: 1e-10,
            ode_abs_tol: 1e-12,
            shoot_tol: 1e-9,
            shoot_max_iter: 50,
            quad_nodes: 32,
            fd_step: 1e-4,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let reals = [
            ("ode_rel_tol", self.ode_rel_tol),
            ("ode_abs_tol", self.ode_abs_tol),
            ("shoot_tol", self.shoot_tol),
            ("fd_step", self.fd_step),
        ];
        for (name, value) in reals {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {value}")));
            }
        }
        if self.shoot_max_iter == 0 {
            return Err(Error::InvalidConfig("shoot_max_iter must be at least 1".into()));
        }
        if self.quad_nodes == 0 {
            return Err(Error::InvalidConfig("quad_nodes must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_quad_nodes(mut self, nodes: usize) -> Self {
        self.quad_nodes = nodes;
        self
    }
}
