//! Fromm's second-order upwind finite-volume residual and the direct steady
//! solver built on it.
//!
//! For cell `j` the residual is `Res_j = f_{j+1/2} - f_{j-1/2}` with the
//! interior flux
//!
//! ```text
//! f_{j+1/2} = a [ u_j + (u_{j+1} - u_{j-1}) / (x_{j+1} - x_{j-1}) * h_j / 2 ]
//! ```
//!
//! The inflow face carries `a * g(t)` for a boundary function `g`; the face
//! after the first cell and the outflow face use one-sided gradients. The
//! scheme reproduces linear profiles exactly on any grid, which is what makes
//! it second order on irregular grids.

use crate::banded::BandedMatrix;
use crate::error::{Error, Result};
use crate::grid::{Grid1D, MIN_CELLS};
use crate::manufactured::{steady_forcing, u_exact, ProblemSpec};

/// Cell-centered values on a grid at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField<'g> {
    grid: &'g Grid1D,
    values: Vec<f64>,
    time: f64,
}

impl<'g> SolutionField<'g> {
    pub fn new(grid: &'g Grid1D, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::FieldLength {
                values: values.len(),
                cells: grid.n_cells(),
            });
        }
        Ok(SolutionField { grid, values, time })
    }

    /// Samples `f` at the cell centers.
    pub fn from_fn(grid: &'g Grid1D, time: f64, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.centers().iter().map(|&x| f(x)).collect();
        SolutionField { grid, values, time }
    }

    pub fn grid(&self) -> &'g Grid1D {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub(crate) fn with_values(grid: &'g Grid1D, values: Vec<f64>, time: f64) -> Self {
        debug_assert_eq!(values.len(), grid.n_cells());
        SolutionField { grid, values, time }
    }
}

fn check_stencil(grid: &Grid1D) -> Result<()> {
    if grid.n_cells() < MIN_CELLS {
        return Err(Error::TooFewCells {
            got: grid.n_cells(),
            min: MIN_CELLS,
        });
    }
    Ok(())
}

/// All `N + 1` face fluxes for the given cell values and inflow value.
pub fn face_fluxes(grid: &Grid1D, a: f64, values: &[f64], inflow: f64) -> Result<Vec<f64>> {
    check_stencil(grid)?;
    let mut fluxes = vec![0.0; grid.n_cells() + 1];
    fill_fluxes(grid, a, values, inflow, &mut fluxes);
    Ok(fluxes)
}

fn fill_fluxes(grid: &Grid1D, a: f64, u: &[f64], inflow: f64, f: &mut [f64]) {
    let x = grid.centers();
    let h = grid.volumes();
    let n = u.len();
    f[0] = a * inflow;
    f[1] = a * (u[0] + (u[1] - u[0]) / (x[1] - x[0]) * h[0] / 2.0);
    for j in 1..n - 1 {
        f[j + 1] = a * (u[j] + (u[j + 1] - u[j - 1]) / (x[j + 1] - x[j - 1]) * h[j] / 2.0);
    }
    f[n] = a * (u[n - 1] + (u[n - 1] - u[n - 2]) / (x[n - 1] - x[n - 2]) * h[n - 1] / 2.0);
}

/// Scratch buffers so time stepping does not allocate per stage.
#[derive(Debug, Default)]
pub(crate) struct ResidualWorkspace {
    fluxes: Vec<f64>,
}

impl ResidualWorkspace {
    pub(crate) fn residual_into(
        &mut self,
        grid: &Grid1D,
        a: f64,
        values: &[f64],
        inflow: f64,
        out: &mut [f64],
    ) {
        self.fluxes.resize(values.len() + 1, 0.0);
        fill_fluxes(grid, a, values, inflow, &mut self.fluxes);
        for (r, w) in out.iter_mut().zip(self.fluxes.windows(2)) {
            *r = w[1] - w[0];
        }
    }
}

/// `Res_j = f_{j+1/2} - f_{j-1/2}` for every cell, with inflow `a * inflow(t)`.
pub fn residual(
    field: &SolutionField<'_>,
    spec: &ProblemSpec,
    t: f64,
    inflow: &dyn Fn(f64) -> f64,
) -> Result<Vec<f64>> {
    residual_values(field.grid(), spec.a(), field.values(), inflow(t))
}

/// Residual for raw values and a fixed inflow value.
pub fn residual_values(grid: &Grid1D, a: f64, values: &[f64], inflow: f64) -> Result<Vec<f64>> {
    check_stencil(grid)?;
    if values.len() != grid.n_cells() {
        return Err(Error::FieldLength {
            values: values.len(),
            cells: grid.n_cells(),
        });
    }
    let mut out = vec![0.0; values.len()];
    ResidualWorkspace::default().residual_into(grid, a, values, inflow, &mut out);
    Ok(out)
}

/// Cell weights of face `i` (`1 <= i <= N`): `f_i = a * sum(w * u[cell])`.
fn face_weights(grid: &Grid1D, face: usize) -> [(usize, f64); 3] {
    let x = grid.centers();
    let h = grid.volumes();
    let n = grid.n_cells();
    if face == 1 {
        let c = h[0] / (2.0 * (x[1] - x[0]));
        [(0, 1.0 - c), (1, c), (1, 0.0)]
    } else if face == n {
        let c = h[n - 1] / (2.0 * (x[n - 1] - x[n - 2]));
        [(n - 2, -c), (n - 1, 1.0 + c), (n - 1, 0.0)]
    } else {
        let j = face - 1;
        let c = h[j] / (2.0 * (x[j + 1] - x[j - 1]));
        [(j - 1, -c), (j, 1.0), (j + 1, c)]
    }
}

/// The linear operator `u -> Res(u)` with zero inflow, as a band matrix with
/// two sub-diagonals and one super-diagonal.
pub fn residual_matrix(grid: &Grid1D, a: f64) -> Result<BandedMatrix> {
    check_stencil(grid)?;
    let n = grid.n_cells();
    let mut m = BandedMatrix::zeros(n, 2, 1);
    for face in 1..=n {
        for (cell, w) in face_weights(grid, face) {
            // face `face` is the right face of cell face-1 and the left face of cell `face`
            m.add(face - 1, cell, a * w);
            if face < n {
                m.add(face, cell, -a * w);
            }
        }
    }
    Ok(m)
}

/// Solves `Res_j(u) = source(x_j) h_j` with a fixed inflow value by a direct
/// banded factorization.
pub fn steady_solve_with<'g>(
    grid: &'g Grid1D,
    a: f64,
    source: impl Fn(f64) -> f64,
    inflow: f64,
) -> Result<SolutionField<'g>> {
    let matrix = residual_matrix(grid, a)?;
    let mut rhs: Vec<f64> = grid
        .centers()
        .iter()
        .zip(grid.volumes())
        .map(|(&x, &h)| source(x) * h)
        .collect();
    // f_{1/2} = a * inflow enters Res_1 with a minus sign
    rhs[0] += a * inflow;
    matrix.solve(&mut rhs)?;
    Ok(SolutionField::with_values(grid, rhs, 0.0))
}

/// Steady manufactured problem: `Res_j = a u_x(x_j, 0) h_j` with inflow
/// `u_exact(0, 0)`. Its exact solution is `u_exact(x, 0)`.
pub fn steady_solve<'g>(spec: &ProblemSpec, grid: &'g Grid1D) -> Result<SolutionField<'g>> {
    steady_solve_with(
        grid,
        spec.a(),
        |x| steady_forcing(spec, x),
        u_exact(0.0, 0.0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_irregular, make_regular};
    use proptest::prelude::*;

    fn spec(a: f64) -> ProblemSpec {
        ProblemSpec::new(a).unwrap()
    }

    #[test]
    fn constant_is_preserved() {
        for g in [
            make_regular(8).unwrap(),
            make_irregular(16, 9, 0.3).unwrap(),
        ] {
            let a = 1.7;
            let c = 2.5;
            let field = SolutionField::from_fn(&g, 0.0, |_| c);
            let res = residual(&field, &spec(a), 0.0, &|_| c).unwrap();
            assert!(res.iter().all(|r| r.abs() <= 1e-14 * a * c), "{res:?}");
        }
    }

    #[test]
    fn linear_profile_gives_flux_difference() {
        let (alpha, beta, a) = (0.7, -1.3, 2.0);
        let g = make_irregular(32, 11, 0.4).unwrap();
        let field = SolutionField::from_fn(&g, 0.0, |x| alpha + beta * x);
        let res = residual(&field, &spec(a), 0.0, &|_| alpha).unwrap();
        for (r, h) in res.iter().zip(g.volumes()) {
            let expected = a * beta * h;
            assert!(
                (r - expected).abs() <= 1e-13 * expected.abs(),
                "{r} vs {expected}"
            );
        }
    }

    #[test]
    fn rejects_tiny_grid() {
        let g = Grid1D::from_faces(vec![0.0, 0.25, 0.5, 1.0]).unwrap();
        let field = SolutionField::from_fn(&g, 0.0, |x| x);
        assert!(matches!(
            residual(&field, &spec(1.0), 0.0, &|_| 0.0),
            Err(Error::TooFewCells { got: 3, .. })
        ));
        assert!(steady_solve(&spec(1.0), &g).is_err());
    }

    #[test]
    fn matrix_reproduces_residual() {
        let g = make_irregular(40, 2, 0.3).unwrap();
        let a = 1.3;
        let u: Vec<f64> = g
            .centers()
            .iter()
            .map(|&x| (3.0 * x).sin() + x * x)
            .collect();
        let res = residual_values(&g, a, &u, 0.0).unwrap();
        let m = residual_matrix(&g, a).unwrap();
        for i in 0..g.n_cells() {
            let mut acc = 0.0;
            for j in i.saturating_sub(2)..=(i + 1).min(g.n_cells() - 1) {
                acc += m.get(i, j) * u[j];
            }
            assert!(
                (acc - res[i]).abs() <= 1e-13,
                "row {i}: {acc} vs {}",
                res[i]
            );
        }
    }

    #[test]
    fn steady_solution_satisfies_scheme() {
        for g in [
            make_regular(64).unwrap(),
            make_irregular(64, 4, 0.3).unwrap(),
        ] {
            let p = spec(1.0);
            let sol = steady_solve(&p, &g).unwrap();
            let res = residual(&sol, &p, 0.0, &|t| u_exact(0.0, t)).unwrap();
            for (j, r) in res.iter().enumerate() {
                let target = steady_forcing(&p, g.centers()[j]) * g.volumes()[j];
                assert!((r - target).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn steady_linear_exactness() {
        let (alpha, beta, a) = (1.5, 0.75, 0.6);
        let g = make_irregular(24, 17, 0.35).unwrap();
        let sol = steady_solve_with(&g, a, |_| a * beta, alpha).unwrap();
        for (u, x) in sol.values().iter().zip(g.centers()) {
            assert!((u - (alpha + beta * x)).abs() <= 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn exactness_properties_on_random_grids(
            seed in any::<u64>(),
            n in 4usize..80,
            frac in 0.0f64..0.45,
            alpha in -3.0f64..3.0,
            beta in -3.0f64..3.0,
            a in 0.1f64..5.0,
        ) {
            let g = make_irregular(n, seed, frac).unwrap();
            let p = spec(a);

            let lin = SolutionField::from_fn(&g, 0.0, |x| alpha + beta * x);
            let res = residual(&lin, &p, 0.0, &|_| alpha).unwrap();
            for (r, h) in res.iter().zip(g.volumes()) {
                let expected = a * beta * h;
                prop_assert!((r - expected).abs() <= 1e-13 * (expected.abs() + a * alpha.abs() * h));
            }

            let c = alpha;
            let flat = SolutionField::from_fn(&g, 0.0, |_| c);
            let res = residual(&flat, &p, 0.0, &|_| c).unwrap();
            prop_assert!(res.iter().all(|r| r.abs() <= 1e-14 * (a * c).abs().max(f64::MIN_POSITIVE)));
        }

        #[test]
        fn residual_telescopes(seed in any::<u64>(), n in 4usize..100, inflow in -2.0f64..2.0) {
            let g = make_irregular(n, seed, 0.3).unwrap();
            let u: Vec<f64> = g.centers().iter().map(|&x| (5.0 * x).cos() + 2.0).collect();
            let f = face_fluxes(&g, 1.0, &u, inflow).unwrap();
            let res = residual_values(&g, 1.0, &u, inflow).unwrap();
            let sum: f64 = res.iter().sum();
            let expected = f[n] - f[0];
            prop_assert!((sum - expected).abs() <= 1e-13 * (f[n].abs() + f[0].abs()));
        }

        #[test]
        fn residual_is_linear_without_inflow(
            seed in any::<u64>(),
            n in 4usize..60,
            scale in -4.0f64..4.0,
        ) {
            let g = make_irregular(n, seed, 0.3).unwrap();
            let u: Vec<f64> = g.centers().iter().map(|&x| (7.0 * x).sin()).collect();
            let v: Vec<f64> = g.centers().iter().map(|&x| x * x - 0.3).collect();
            let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + scale * b).collect();
            let ru = residual_values(&g, 1.0, &u, 0.0).unwrap();
            let rv = residual_values(&g, 1.0, &v, 0.0).unwrap();
            let rs = residual_values(&g, 1.0, &sum, 0.0).unwrap();
            for j in 0..n {
                prop_assert!((rs[j] - (ru[j] + scale * rv[j])).abs() <= 1e-13 * (1.0 + scale.abs()));
            }
        }
    }
}
