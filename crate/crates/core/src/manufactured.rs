//! The manufactured solution `u(x, t) = 1 + exp(0.8 x - 0.35 t)` and the
//! source terms derived from it analytically.

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::scheme::SolutionField;

pub const SPATIAL_RATE: f64 = 0.8;
pub const TEMPORAL_RATE: f64 = -0.35;

/// The advection problem `u_t + a u_x = s` on `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    a: f64,
}

impl ProblemSpec {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::AdvectionSpeed(a));
        }
        Ok(ProblemSpec { a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
}

#[inline]
fn growth(x: f64, t: f64) -> f64 {
    (SPATIAL_RATE * x + TEMPORAL_RATE * t).exp()
}

pub fn u_exact(x: f64, t: f64) -> f64 {
    1.0 + growth(x, t)
}

/// `s = u_t + a u_x` for the exact solution.
pub fn forcing(spec: &ProblemSpec, x: f64, t: f64) -> f64 {
    (SPATIAL_RATE * spec.a + TEMPORAL_RATE) * growth(x, t)
}

/// `a u_x` at `t = 0`: the source that makes `u_exact(x, 0)` a steady
/// solution.
pub fn steady_forcing(spec: &ProblemSpec, x: f64) -> f64 {
    SPATIAL_RATE * spec.a * growth(x, 0.0)
}

/// `u_t`: the source for integrating `du/dt = s` with the spatial residual
/// switched off, so that the ODE solution is `u_exact`.
pub fn time_derivative(x: f64, t: f64) -> f64 {
    TEMPORAL_RATE * growth(x, t)
}

/// `u_exact(x, t) - u_exact(x, 0)`, evaluated without cancellation.
pub fn exact_change(x: f64, t: f64) -> f64 {
    (SPATIAL_RATE * x).exp() * (TEMPORAL_RATE * t).exp_m1()
}

/// Cell-center samples of the exact solution at `t = 0`.
pub fn initial_field(grid: &Grid1D) -> SolutionField<'_> {
    exact_field(grid, 0.0)
}

pub fn exact_field(grid: &Grid1D, t: f64) -> SolutionField<'_> {
    let values = grid.centers().iter().map(|&x| u_exact(x, t)).collect();
    SolutionField::new(grid, values, t).expect("one value per cell")
}
