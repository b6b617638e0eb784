//! Analytical model of the discretization error in the first cell of a
//! uniform grid, and the time-step schedule that removes its first-order
//! part.
//!
//! The model scheme at the inflow cell is
//!
//! ```text
//! (u1^{n+1} - u1^n)/dt + a (u1^n - u_exact(x1 - h, t^n))/h = s(x1, t^n)
//! ```
//!
//! Its truncation error is first order, `E = C1 (dt + h)` when treated as
//! constant in time, and the error obeys `e^{n+1} = (1 - mu) e^n + dt E` with
//! `mu = a dt / h`. Summing the geometric series gives
//!
//! ```text
//! e^n = dt C1 (dt + h) / mu * (1 - (1 - mu)^n)
//! ```
//!
//! With `dt = mu h / a` and a fixed final time this expands into a term of
//! size `h * exp(-a T_f / h)` and a term of size `h^2`. The first-order term
//! only disappears under refinement if `exp(-a T_f / h)` does, which is what
//! [`remedy_schedule`] arranges.

use crate::error::{Error, Result};
use crate::manufactured::{forcing, u_exact, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorModelParams {
    pub a: f64,
    pub h: f64,
    /// CFL number `a dt / h`.
    pub mu: f64,
    /// Truncation error constant; the model predicts orders, not magnitudes.
    pub c1: f64,
    pub t_final: f64,
}

impl ErrorModelParams {
    pub fn new(a: f64, h: f64, mu: f64, c1: f64, t_final: f64) -> Result<Self> {
        let bad = |what: &str, v: f64| Err(Error::ModelParameter(format!("{what} = {v}")));
        if !(a > 0.0 && a.is_finite()) {
            return bad("a", a);
        }
        if !(h > 0.0 && h.is_finite()) {
            return bad("h", h);
        }
        if !(mu > 0.0 && mu <= 1.0) {
            return bad("mu", mu);
        }
        if !c1.is_finite() {
            return bad("c1", c1);
        }
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return bad("t_final", t_final);
        }
        Ok(ErrorModelParams {
            a,
            h,
            mu,
            c1,
            t_final,
        })
    }

    pub fn dt(&self) -> f64 {
        self.mu * self.h / self.a
    }

    /// Modeled truncation error `C1 (dt + h)`.
    pub fn truncation_error(&self) -> f64 {
        self.c1 * (self.dt() + self.h)
    }

    /// Error after a single step, `dt * C1 (dt + h)`.
    pub fn single_step_error(&self) -> f64 {
        self.dt() * self.truncation_error()
    }

    /// `a T_f / (mu h)`, the (generally non-integer) number of steps to the
    /// final time.
    pub fn steps_to_final_time(&self) -> f64 {
        self.a * self.t_final / (self.mu * self.h)
    }
}

/// Local truncation error of the model inflow-cell scheme for the
/// manufactured solution: what is left of the scheme when the exact solution
/// is substituted.
pub fn truncation_error_special(a: f64, h: f64, dt: f64, x1: f64, t: f64) -> Result<f64> {
    let spec = ProblemSpec::new(a)?;
    truncation_error_special_with(u_exact, |x, t| forcing(&spec, x, t), a, h, dt, x1, t)
}

/// [`truncation_error_special`] for an arbitrary solution `u` and source `s`.
pub fn truncation_error_special_with(
    u: impl Fn(f64, f64) -> f64,
    s: impl Fn(f64, f64) -> f64,
    a: f64,
    h: f64,
    dt: f64,
    x1: f64,
    t: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::ModelParameter(format!("h = {h}")));
    }
    if !(dt > 0.0) {
        return Err(Error::TimeStep(dt));
    }
    let time_difference = (u(x1, t + dt) - u(x1, t)) / dt;
    let space_difference = a * (u(x1, t) - u(x1 - h, t)) / h;
    Ok(s(x1, t) - (time_difference + space_difference))
}

/// Steps `e^{k+1} = (1 - mu) e^k + dt E` from `e^0 = 0`.
pub fn recurrence_simulate(params: &ErrorModelParams, n_steps: u64) -> f64 {
    let decay = 1.0 - params.mu;
    let forcing = params.single_step_error();
    let mut e = 0.0;
    for _ in 0..n_steps {
        e = decay * e + forcing;
    }
    e
}

/// `(1 - (1 - mu)^n) / mu` for real `n >= 0`, computed without cancellation.
fn geometric_gain(mu: f64, n: f64) -> f64 {
    if n == 0.0 {
        0.0
    } else if n == 1.0 || mu == 1.0 {
        1.0
    } else {
        -(n * (-mu).ln_1p()).exp_m1() / mu
    }
}

/// Closed-form error after `n_steps` steps.
pub fn closed_form(params: &ErrorModelParams, n_steps: u64) -> f64 {
    params.single_step_error() * geometric_gain(params.mu, n_steps as f64)
}

/// Closed-form error at `T_f` with the real exponent `a T_f / (mu h)`.
pub fn closed_form_at_final_time(params: &ErrorModelParams) -> f64 {
    params.single_step_error() * geometric_gain(params.mu, params.steps_to_final_time())
}

/// `exp(-a T_f / h)`, the factor multiplying the first-order error term.
pub fn exp_factor(a: f64, t_final: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::ModelParameter(format!("h = {h}")));
    }
    Ok((-a * t_final / h).exp())
}

/// The two leading terms of the small-`mu` expansion of the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionTerms {
    /// `(mu C1 T_f / 2)(mu/a + 1) exp(-a T_f/h) h`
    pub first_order: f64,
    /// `(C1/a)(1 - exp(-a T_f/h))(mu/a + 1) h^2`
    pub second_order: f64,
}

impl ExpansionTerms {
    pub fn total(&self) -> f64 {
        self.first_order + self.second_order
    }
}

pub fn expansion_error(params: &ErrorModelParams) -> ExpansionTerms {
    let ErrorModelParams {
        a,
        h,
        mu,
        c1,
        t_final,
    } = *params;
    let factor = (-a * t_final / h).exp();
    let stretch = mu / a + 1.0;
    ExpansionTerms {
        first_order: (mu * c1 * t_final / 2.0) * stretch * factor * h,
        second_order: (c1 / a) * (1.0 - factor) * stretch * h * h,
    }
}

/// Time steps `dt = mu h / a` with the final time tied to the coarsest
/// level's step: `T_f = multiplier * mu * h_coarsest / a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemedySchedule {
    pub a: f64,
    pub mu: f64,
    pub h_coarsest: f64,
    pub multiplier: f64,
    pub t_final: f64,
}

impl RemedySchedule {
    pub fn dt(&self, h: f64) -> f64 {
        self.mu * h / self.a
    }

    /// Steps on level `k` (spacing `h_coarsest / 2^k`).
    pub fn steps(&self, level: u32) -> f64 {
        self.multiplier * f64::from(1u32 << level)
    }

    /// Predicted `exp(-a T_f / h)` on level `k`: `exp(-2^k mu m)`.
    pub fn predicted_factor(&self, level: u32) -> f64 {
        (-f64::from(1u32 << level) * self.mu * self.multiplier).exp()
    }
}

pub fn remedy_schedule(
    a: f64,
    mu: f64,
    h_coarsest: f64,
    t_final_multiplier: f64,
) -> Result<RemedySchedule> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::AdvectionSpeed(a));
    }
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::ModelParameter(format!("mu = {mu} outside (0, 1]")));
    }
    if !(h_coarsest > 0.0) {
        return Err(Error::ModelParameter(format!("h_coarsest = {h_coarsest}")));
    }
    if !(t_final_multiplier >= 1.0 && t_final_multiplier.is_finite()) {
        return Err(Error::ModelParameter(format!(
            "final-time multiplier {t_final_multiplier} below 1"
        )));
    }
    Ok(RemedySchedule {
        a,
        mu,
        h_coarsest,
        multiplier: t_final_multiplier,
        t_final: t_final_multiplier * mu * h_coarsest / a,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorRow {
    pub n_cells: usize,
    pub h: f64,
    pub a_tf_over_h: f64,
    pub factor: f64,
}

/// `exp(-a T_f / h)` over a refinement family under a schedule.
pub fn factor_table(
    schedule: &RemedySchedule,
    base_cells: usize,
    n_levels: usize,
) -> Vec<FactorRow> {
    (0..n_levels)
        .map(|k| {
            let n_cells = base_cells << k;
            let h = schedule.h_coarsest / (1u64 << k) as f64;
            let ratio = schedule.a * schedule.t_final / h;
            FactorRow {
                n_cells,
                h,
                a_tf_over_h: ratio,
                factor: (-ratio).exp(),
            }
        })
        .collect()
}
