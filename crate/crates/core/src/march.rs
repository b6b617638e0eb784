//! Two-stage SSP Runge-Kutta time integration of the semi-discrete scheme.
//!
//! ```text
//! u1      = u^n - dt/h_j [Res(u^n, t^n)        - s(x_j, t^n) h_j]
//! u^{n+1} = (u^n + u1)/2 - dt/(2 h_j) [Res(u1, t^n + dt) - s(x_j, t^n + dt) h_j]
//! ```
//!
//! The second line is evaluated as `u^n + (k1 + k2) / 2` with stage
//! increments `k = dt (s - Res/h)`, which is the same update but rounds the
//! O(1) solution value once per step instead of three times.

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::manufactured::{forcing, initial_field, time_derivative, u_exact, ProblemSpec};
use crate::scheme::{ResidualWorkspace, SolutionField};

/// Relative tolerance for `t_final / dt` to count as an integer.
pub const STEP_RATIO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarchMode {
    /// Spatial residual active.
    Full,
    /// Residual forced to zero: integrates `du/dt = s` cell by cell.
    OdeOnly,
}

type InflowFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;
type SourceFn = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Advection speed, inflow boundary value `g(t)` and source `s(x, t)`.
pub struct Advection {
    a: f64,
    inflow: InflowFn,
    source: SourceFn,
}

impl std::fmt::Debug for Advection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Advection")
            .field("a", &self.a)
            .finish_non_exhaustive()
    }
}

impl Advection {
    pub fn new(
        a: f64,
        inflow: impl Fn(f64) -> f64 + Send + Sync + 'static,
        source: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let spec = ProblemSpec::new(a)?;
        Ok(Advection {
            a: spec.a(),
            inflow: Box::new(inflow),
            source: Box::new(source),
        })
    }

    /// The manufactured problem: inflow `u_exact(0, t)`, full forcing.
    pub fn manufactured(spec: &ProblemSpec) -> Self {
        let spec = *spec;
        Advection {
            a: spec.a(),
            inflow: Box::new(|t| u_exact(0.0, t)),
            source: Box::new(move |x, t| forcing(&spec, x, t)),
        }
    }

    /// Source `u_t` only, for [`MarchMode::OdeOnly`] runs whose exact answer
    /// is `u_exact`.
    pub fn manufactured_ode(spec: &ProblemSpec) -> Self {
        Advection {
            a: spec.a(),
            inflow: Box::new(|t| u_exact(0.0, t)),
            source: Box::new(time_derivative),
        }
    }

    /// The problem a [`MarchMode`] integrates for the manufactured solution.
    pub fn for_mode(spec: &ProblemSpec, mode: MarchMode) -> Self {
        match mode {
            MarchMode::Full => Advection::manufactured(spec),
            MarchMode::OdeOnly => Advection::manufactured_ode(spec),
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn inflow(&self, t: f64) -> f64 {
        (self.inflow)(t)
    }

    pub fn source(&self, x: f64, t: f64) -> f64 {
        (self.source)(x, t)
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::TimeStep(dt));
    }
    Ok(())
}

struct Stepper<'p, 'g> {
    problem: &'p Advection,
    grid: &'g Grid1D,
    mode: MarchMode,
    work: ResidualWorkspace,
    res: Vec<f64>,
    k1: Vec<f64>,
    k2: Vec<f64>,
    stage: Vec<f64>,
}

impl<'p, 'g> Stepper<'p, 'g> {
    fn new(problem: &'p Advection, grid: &'g Grid1D, mode: MarchMode) -> Self {
        let n = grid.n_cells();
        Stepper {
            problem,
            grid,
            mode,
            work: ResidualWorkspace::default(),
            res: vec![0.0; n],
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            stage: vec![0.0; n],
        }
    }

    /// `k_j = dt (s(x_j, t) - Res_j(u, t) / h_j)`.
    fn increment(&mut self, u: &[f64], t: f64, dt: f64, out: &mut [f64]) {
        match self.mode {
            MarchMode::Full => {
                let inflow = self.problem.inflow(t);
                self.work
                    .residual_into(self.grid, self.problem.a, u, inflow, &mut self.res);
            }
            MarchMode::OdeOnly => self.res.fill(0.0),
        }
        let x = self.grid.centers();
        let h = self.grid.volumes();
        for j in 0..u.len() {
            out[j] = dt * (self.problem.source(x[j], t) - self.res[j] / h[j]);
        }
    }

    fn step(&mut self, u: &mut [f64], t: f64, t_next: f64, dt: f64) {
        let mut k1 = std::mem::take(&mut self.k1);
        let mut k2 = std::mem::take(&mut self.k2);
        let mut stage = std::mem::take(&mut self.stage);
        self.increment(u, t, dt, &mut k1);
        for ((s, &un), &k) in stage.iter_mut().zip(u.iter()).zip(&k1) {
            *s = un + k;
        }
        self.increment(&stage, t_next, dt, &mut k2);
        for ((un, &a), &b) in u.iter_mut().zip(&k1).zip(&k2) {
            *un += 0.5 * (a + b);
        }
        self.k1 = k1;
        self.k2 = k2;
        self.stage = stage;
    }
}

/// One SSP-RK2 step from the field's time stamp.
pub fn ssprk2_step<'g>(
    field: &SolutionField<'g>,
    problem: &Advection,
    dt: f64,
    mode: MarchMode,
) -> Result<SolutionField<'g>> {
    check_dt(dt)?;
    let grid = field.grid();
    if mode == MarchMode::Full && grid.n_cells() < crate::grid::MIN_CELLS {
        return Err(Error::TooFewCells {
            got: grid.n_cells(),
            min: crate::grid::MIN_CELLS,
        });
    }
    let mut u = field.values().to_vec();
    let t = field.time();
    Stepper::new(problem, grid, mode).step(&mut u, t, t + dt, dt);
    Ok(SolutionField::with_values(grid, u, t + dt))
}

/// Number of steps of size `dt` that land on `t_final`, rejecting ratios that
/// are not integers.
pub fn step_count(t_final: f64, dt: f64) -> Result<u64> {
    check_dt(dt)?;
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::NonDivisibleFinalTime {
            t_final,
            dt,
            ratio: t_final / dt,
        });
    }
    let ratio = t_final / dt;
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > STEP_RATIO_TOLERANCE * n {
        return Err(Error::NonDivisibleFinalTime { t_final, dt, ratio });
    }
    Ok(n as u64)
}

/// Marches `initial` to `t_final` in equal steps. Step `k` starts at
/// `k * dt` (no accumulated sums) and the result is stamped `n_steps * dt`.
pub fn integrate_with<'g>(
    problem: &Advection,
    initial: SolutionField<'g>,
    t_final: f64,
    dt: f64,
    mode: MarchMode,
) -> Result<SolutionField<'g>> {
    let n_steps = step_count(t_final, dt)?;
    let grid = initial.grid();
    if mode == MarchMode::Full && grid.n_cells() < crate::grid::MIN_CELLS {
        return Err(Error::TooFewCells {
            got: grid.n_cells(),
            min: crate::grid::MIN_CELLS,
        });
    }
    let t0 = initial.time();
    let mut u = initial.into_values();
    let mut stepper = Stepper::new(problem, grid, mode);
    for k in 0..n_steps {
        let t = t0 + k as f64 * dt;
        let t_next = t0 + (k + 1) as f64 * dt;
        stepper.step(&mut u, t, t_next, dt);
    }
    Ok(SolutionField::with_values(
        grid,
        u,
        t0 + n_steps as f64 * dt,
    ))
}

/// Integrates the manufactured problem from its exact initial data.
pub fn integrate<'g>(
    spec: &ProblemSpec,
    grid: &'g Grid1D,
    t_final: f64,
    dt: f64,
    mode: MarchMode,
) -> Result<SolutionField<'g>> {
    let problem = Advection::for_mode(spec, mode);
    integrate_with(&problem, initial_field(grid), t_final, dt, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_irregular, make_regular};

    #[test]
    fn ode_constant_source_is_exact() {
        let g = make_regular(8).unwrap();
        let c = 0.37;
        let p = Advection::new(1.0, |_| 0.0, move |_, _| c).unwrap();
        let f = SolutionField::from_fn(&g, 0.5, |x| 1.0 + x);
        let dt = 0.125;
        let next = ssprk2_step(&f, &p, dt, MarchMode::OdeOnly).unwrap();
        for (a, b) in next.values().iter().zip(f.values()) {
            assert_eq!(*a, b + dt * c);
        }
        assert_eq!(next.time(), 0.625);
    }

    #[test]
    fn ode_linear_in_time_source_is_exact() {
        let g = make_regular(8).unwrap();
        let p = Advection::new(1.0, |_| 0.0, |_, t| t).unwrap();
        let (t, dt) = (0.75, 0.25);
        let f = SolutionField::from_fn(&g, t, |x| 2.0 * x);
        let next = ssprk2_step(&f, &p, dt, MarchMode::OdeOnly).unwrap();
        for (a, b) in next.values().iter().zip(f.values()) {
            assert_eq!(*a, b + dt * (t + dt / 2.0));
        }
    }

    #[test]
    fn linear_state_is_an_equilibrium() {
        let (alpha, beta, a) = (1.2, 0.9, 1.5);
        let g = make_irregular(32, 8, 0.3).unwrap();
        let p = Advection::new(a, move |_| alpha, move |_, _| a * beta).unwrap();
        let f = SolutionField::from_fn(&g, 0.0, |x| alpha + beta * x);
        let next = ssprk2_step(&f, &p, 0.01, MarchMode::Full).unwrap();
        for (u, v) in next.values().iter().zip(f.values()) {
            assert!((u - v).abs() <= 1e-13);
        }
    }

    #[test]
    fn rejects_bad_time_steps() {
        let g = make_regular(8).unwrap();
        let p = Advection::manufactured(&ProblemSpec::new(1.0).unwrap());
        let f = initial_field(&g);
        assert!(matches!(
            ssprk2_step(&f, &p, 0.0, MarchMode::Full),
            Err(Error::TimeStep(_))
        ));
        assert!(matches!(
            ssprk2_step(&f, &p, -1e-3, MarchMode::Full),
            Err(Error::TimeStep(_))
        ));
    }

    #[test]
    fn step_counts() {
        assert_eq!(step_count(1e-8, 1e-8).unwrap(), 1);
        let hc = 0.125;
        for k in 1..=6u32 {
            let h = hc / 2f64.powi(k as i32 - 1);
            assert_eq!(step_count(0.01 * hc, 0.01 * h).unwrap(), 1 << (k - 1));
        }
        assert!(matches!(
            step_count(1.0, 0.3),
            Err(Error::NonDivisibleFinalTime { .. })
        ));
        assert!(step_count(0.1, 0.3).is_err());
        assert!(step_count(0.0, 0.1).is_err());
    }

    #[test]
    fn integrate_stamps_time_as_product() {
        let g = make_regular(16).unwrap();
        let spec = ProblemSpec::new(1.0).unwrap();
        let dt = 0.1 / 16.0;
        let out = integrate(&spec, &g, 7.0 * dt, dt, MarchMode::Full).unwrap();
        assert_eq!(out.time(), 7.0 * dt);
        let again = integrate(&spec, &g, 7.0 * dt, dt, MarchMode::Full).unwrap();
        let bits = |f: &SolutionField| f.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&out), bits(&again));
    }

    #[test]
    fn single_step_matches_integrate() {
        let g = make_irregular(16, 3, 0.3).unwrap();
        let spec = ProblemSpec::new(1.0).unwrap();
        let p = Advection::manufactured(&spec);
        let dt = 1e-3;
        let one = ssprk2_step(&initial_field(&g), &p, dt, MarchMode::Full).unwrap();
        let via = integrate(&spec, &g, dt, dt, MarchMode::Full).unwrap();
        assert_eq!(one, via);
    }

    #[test]
    fn ode_mode_ignores_the_grid_stencil() {
        // ODE-only runs need no spatial stencil, so the cell-count floor does not apply
        let g = crate::grid::Grid1D::from_faces(vec![0.0, 0.5, 1.0]).unwrap();
        let spec = ProblemSpec::new(1.0).unwrap();
        assert!(integrate(&spec, &g, 0.01, 0.01, MarchMode::OdeOnly).is_ok());
        assert!(integrate(&spec, &g, 0.01, 0.01, MarchMode::Full).is_err());
    }
}
