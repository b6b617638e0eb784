//! Experiment orchestration: presets, configuration, level runs and output
//! files.

pub mod config;
mod emit;
mod presets;

pub use config::{parse_config, CaseConfig, ConfigBuilder, Experiment, FinalTime, GridSelection};
pub use emit::{csv_table, dat_table, emit_outputs, factor_csv, report};
pub use presets::{preset, preset_builder, PRESETS};

use std::thread;

use crate::analysis::{
    build_table, l1_norm, linf_norm, pointwise_errors, pointwise_errors_with, ConvergenceTable,
    LevelErrors,
};
use crate::errmodel::{factor_table, remedy_schedule, FactorRow};
use crate::error::{Error, Result};
use crate::grid::{grid_family, FamilySpec, Grid1D, GridKind};
use crate::manufactured::{exact_change, ProblemSpec};
use crate::march::{integrate, integrate_with, Advection, MarchMode};
use crate::scheme::{steady_solve, SolutionField};

/// Closed interval an observed order is expected to fall in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub name: &'static str,
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn contains(&self, order: f64) -> bool {
        self.lo <= order && order <= self.hi
    }
}

pub const PITFALL_BAND: Band = Band {
    name: "pitfall",
    lo: 0.8,
    hi: 1.2,
};
pub const DESIGN_BAND: Band = Band {
    name: "design",
    lo: 1.9,
    hi: 2.1,
};
pub const REMEDY_BAND: Band = Band {
    name: "remedy",
    lo: 1.85,
    hi: 2.15,
};

/// Expected `(L1, L∞)` bands for the finest level pair.
pub fn expected_bands(experiment: Experiment, kind: GridKind) -> Option<(Band, Band)> {
    match (experiment, kind) {
        (Experiment::Steady | Experiment::OdeTime, _) => Some((DESIGN_BAND, DESIGN_BAND)),
        (Experiment::UnsteadyFixedDt | Experiment::UnsteadyScaledDt, GridKind::Regular) => {
            Some((DESIGN_BAND, PITFALL_BAND))
        }
        (Experiment::UnsteadyFixedDt | Experiment::UnsteadyScaledDt, GridKind::Irregular) => {
            Some((PITFALL_BAND, PITFALL_BAND))
        }
        (Experiment::Remedy, _) => Some((REMEDY_BAND, REMEDY_BAND)),
        (Experiment::FactorTables, _) => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    Linf,
}

impl Norm {
    pub fn label(self) -> &'static str {
        match self {
            Norm::L1 => "L1",
            Norm::Linf => "L∞",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandCheck {
    pub kind: GridKind,
    pub norm: Norm,
    pub order: f64,
    pub band: Band,
}

impl BandCheck {
    pub fn inside(&self) -> bool {
        self.band.contains(self.order)
    }
}

/// Convergence results on one grid family.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRun {
    pub kind: GridKind,
    pub table: ConvergenceTable,
}

impl GridRun {
    /// Whether the L∞ maximum sits in the first or last cell on every level.
    pub fn linf_at_boundary_everywhere(&self) -> bool {
        self.table
            .rows()
            .iter()
            .all(|r| r.linf_cell == 0 || r.linf_cell + 1 == r.n_cells)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorTable {
    pub mu: f64,
    pub multiplier: f64,
    pub rows: Vec<FactorRow>,
}

/// Everything an experiment produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub config: CaseConfig,
    pub runs: Vec<GridRun>,
    pub factor_tables: Vec<FactorTable>,
}

impl Outcome {
    pub fn run(&self, kind: GridKind) -> Option<&GridRun> {
        self.runs.iter().find(|r| r.kind == kind)
    }

    pub fn band_checks(&self) -> Vec<BandCheck> {
        let mut checks = Vec::new();
        for run in &self.runs {
            if let Some((b1, binf)) = expected_bands(self.config.experiment, run.kind) {
                let (o1, oinf) = run.table.final_orders();
                checks.push(BandCheck {
                    kind: run.kind,
                    norm: Norm::L1,
                    order: o1,
                    band: b1,
                });
                checks.push(BandCheck {
                    kind: run.kind,
                    norm: Norm::Linf,
                    order: oinf,
                    band: binf,
                });
            }
        }
        checks
    }

    pub fn bands_satisfied(&self) -> bool {
        self.band_checks().iter().all(BandCheck::inside)
    }
}

pub fn family_spec(config: &CaseConfig, kind: GridKind) -> FamilySpec {
    FamilySpec {
        kind,
        base_cells: config.base_cells,
        n_levels: config.n_levels,
        seed: config.seed,
        perturb_fraction: config.perturb_fraction,
        layout: config.layout,
    }
}

fn run_level(config: &CaseConfig, spec: &ProblemSpec, grid: &Grid1D) -> Result<LevelErrors> {
    let errors = match config.experiment {
        Experiment::Steady => {
            let field = steady_solve(spec, grid)?;
            pointwise_errors(&field, field.time())?
        }
        Experiment::FactorTables => unreachable!("factor tables run no levels"),
        _ => {
            let dt = config
                .dt_for(grid.nominal_spacing())
                .expect("validated configs carry a time step");
            let t_final = config
                .final_time()
                .expect("validated configs carry a final time");
            if config.experiment == Experiment::OdeTime {
                // the update ignores u, so march the change from the initial data
                let problem = Advection::manufactured_ode(spec);
                let zero = SolutionField::from_fn(grid, 0.0, |_| 0.0);
                let change = integrate_with(&problem, zero, t_final, dt, MarchMode::OdeOnly)?;
                let t = change.time();
                pointwise_errors_with(&change, t, |x| exact_change(x, t))?
            } else {
                let field = integrate(spec, grid, t_final, dt, MarchMode::Full)?;
                pointwise_errors(&field, field.time())?
            }
        }
    };
    let (linf, linf_cell) = linf_norm(&errors);
    Ok(LevelErrors {
        n_cells: grid.n_cells(),
        l1: l1_norm(&errors),
        linf,
        linf_cell,
    })
}

/// Runs every level of one grid family, one thread per level. The result
/// does not depend on scheduling.
pub fn run_family(config: &CaseConfig, kind: GridKind) -> Result<GridRun> {
    let spec = ProblemSpec::new(config.a)?;
    let grids = grid_family(&family_spec(config, kind))?;
    let results: Vec<Result<LevelErrors>> = thread::scope(|s| {
        let handles: Vec<_> = grids
            .iter()
            .map(|g| s.spawn(|| run_level(config, &spec, g)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("level thread panicked"))
            .collect()
    });
    let mut levels = Vec::with_capacity(results.len());
    for (level, (res, g)) in results.into_iter().zip(&grids).enumerate() {
        levels.push(res.map_err(|e| Error::Level {
            level,
            n_cells: g.n_cells(),
            source: Box::new(e),
        })?);
    }
    Ok(GridRun {
        kind,
        table: build_table(&levels)?,
    })
}

fn factor_tables(config: &CaseConfig) -> Result<Vec<FactorTable>> {
    let mus = match config.mu {
        Some(mu) => vec![mu],
        None => vec![0.01, 1.0],
    };
    mus.into_iter()
        .map(|mu| {
            let schedule = remedy_schedule(config.a, mu, config.coarsest_h(), 1.0)?;
            Ok(FactorTable {
                mu,
                multiplier: 1.0,
                rows: factor_table(&schedule, config.base_cells, config.n_levels),
            })
        })
        .collect()
}

/// Runs the experiment without touching the file system.
pub fn compute(config: &CaseConfig) -> Result<Outcome> {
    let mut outcome = Outcome {
        config: config.clone(),
        runs: Vec::new(),
        factor_tables: Vec::new(),
    };
    if config.experiment == Experiment::FactorTables {
        outcome.factor_tables = factor_tables(config)?;
    } else {
        for &kind in config.grids.kinds() {
            outcome.runs.push(run_family(config, kind)?);
        }
    }
    Ok(outcome)
}

/// Runs the experiment and, when the config names an output directory,
/// writes the output files there.
pub fn run_experiment(config: &CaseConfig) -> Result<Outcome> {
    let outcome = compute(config)?;
    if let Some(dir) = &config.output_dir {
        emit_outputs(&outcome, dir, false)?;
    }
    Ok(outcome)
}
