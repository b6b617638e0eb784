use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::{Experiment, FinalTime};
use super::{family_spec, FactorTable, GridRun, Outcome};
use crate::analysis::ConvergenceTable;
use crate::error::{Error, Result};
use crate::grid::grid_family;

/// Scientific notation with 17 significant digits.
fn full(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(full).unwrap_or_default()
}

pub fn csv_table(table: &ConvergenceTable) -> String {
    let mut out = String::from("level,n_cells,h,l1_error,linf_error,l1_order,linf_order\n");
    for r in table.rows() {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.level,
            r.n_cells,
            full(r.h),
            full(r.l1_error),
            full(r.linf_error),
            opt(r.l1_order),
            opt(r.linf_order)
        )
        .unwrap();
    }
    out
}

/// Whitespace-separated `h l1_error linf_error` rows.
pub fn dat_table(table: &ConvergenceTable) -> String {
    let mut out = String::from("# h l1_error linf_error\n");
    for r in table.rows() {
        writeln!(
            out,
            "{} {} {}",
            full(r.h),
            full(r.l1_error),
            full(r.linf_error)
        )
        .unwrap();
    }
    out
}

pub fn factor_csv(tables: &[FactorTable]) -> String {
    let mut out = String::from("mu,multiplier,n_cells,h,a_tf_over_h,factor\n");
    for t in tables {
        for r in &t.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                full(t.mu),
                full(t.multiplier),
                r.n_cells,
                full(r.h),
                full(r.a_tf_over_h),
                full(r.factor)
            )
            .unwrap();
        }
    }
    out
}

fn describe_time(outcome: &Outcome, out: &mut String) {
    let cfg = &outcome.config;
    match cfg.experiment {
        Experiment::Steady | Experiment::FactorTables => {}
        Experiment::UnsteadyFixedDt => {
            writeln!(out, "time step: fixed dt = {}", full(cfg.dt_fixed.unwrap())).unwrap();
        }
        _ => {
            writeln!(out, "time step: dt = mu h / a, mu = {}", cfg.mu.unwrap()).unwrap();
        }
    }
    if let (Some(rule), Some(tf)) = (cfg.t_final, cfg.final_time()) {
        let rule = match rule {
            FinalTime::Explicit(_) => "explicit".to_string(),
            other => other.to_string(),
        };
        writeln!(out, "final time: {} ({rule})", full(tf)).unwrap();
    }
}

fn grid_section(run: &GridRun, experiment: Experiment, out: &mut String) {
    writeln!(out, "\n[{} grids]", run.kind.name()).unwrap();
    writeln!(
        out,
        "{:>5} {:>7} {:>12} {:>12} {:>12} {:>8} {:>8} {:>9}",
        "level", "n_cells", "h", "L1 error", "L∞ error", "L1 ord", "L∞ ord", "L∞ cell"
    )
    .unwrap();
    let ord = |o: Option<f64>| o.map_or("-".to_string(), |v| format!("{v:.3}"));
    for r in run.table.rows() {
        writeln!(
            out,
            "{:>5} {:>7} {:>12.4e} {:>12.4e} {:>12.4e} {:>8} {:>8} {:>9}",
            r.level,
            r.n_cells,
            r.h,
            r.l1_error,
            r.linf_error,
            ord(r.l1_order),
            ord(r.linf_order),
            r.linf_cell
        )
        .unwrap();
    }
    let (o1, oinf) = run.table.final_orders();
    match super::expected_bands(experiment, run.kind) {
        Some((b1, binf)) => {
            for (label, order, band) in [("L1", o1, b1), ("L∞", oinf, binf)] {
                writeln!(
                    out,
                    "observed {label} order {order:.3} — {} band [{}, {}]: {}",
                    band.name,
                    band.lo,
                    band.hi,
                    if band.contains(order) {
                        "inside"
                    } else {
                        "OUTSIDE"
                    }
                )
                .unwrap();
            }
        }
        None => {
            writeln!(out, "observed L1 order {o1:.3}, L∞ order {oinf:.3}").unwrap();
        }
    }
    writeln!(
        out,
        "L∞ maximum in a boundary cell on every level: {}",
        if run.linf_at_boundary_everywhere() {
            "yes"
        } else {
            "no"
        }
    )
    .unwrap();
}

fn factor_section(t: &FactorTable, a: f64, out: &mut String) {
    writeln!(
        out,
        "\nexp(-a T_f / h) with T_f = {} mu h_c / a, mu = {}, a = {a}",
        t.multiplier, t.mu
    )
    .unwrap();
    writeln!(
        out,
        "{:>7} {:>12} {:>10} {:>10}",
        "n_cells", "h", "a T_f / h", "factor"
    )
    .unwrap();
    for r in &t.rows {
        writeln!(
            out,
            "{:>7} {:>12.4e} {:>10.4} {:>10.2e}",
            r.n_cells, r.h, r.a_tf_over_h, r.factor
        )
        .unwrap();
    }
}

/// Human-readable summary with final-pair orders and band verdicts.
pub fn report(outcome: &Outcome) -> String {
    let cfg = &outcome.config;
    let mut out = String::new();
    writeln!(out, "case: {}", cfg.name).unwrap();
    writeln!(out, "experiment: {}", cfg.experiment.name()).unwrap();
    writeln!(out, "a = {}", cfg.a).unwrap();
    writeln!(
        out,
        "levels: {} ({} to {} cells)",
        cfg.n_levels,
        cfg.base_cells,
        cfg.base_cells << (cfg.n_levels - 1)
    )
    .unwrap();
    if outcome.run(crate::grid::GridKind::Irregular).is_some() {
        writeln!(
            out,
            "irregular grids: seed {}, perturbation fraction {}, {:?} layout",
            cfg.seed, cfg.perturb_fraction, cfg.layout
        )
        .unwrap();
    }
    describe_time(outcome, &mut out);
    for run in &outcome.runs {
        grid_section(run, cfg.experiment, &mut out);
    }
    for t in &outcome.factor_tables {
        factor_section(t, cfg.a, &mut out);
    }
    let checks = outcome.band_checks();
    if !checks.is_empty() {
        let failed = checks.iter().filter(|c| !c.inside()).count();
        if failed == 0 {
            writeln!(out, "\nband check: pass ({} orders)", checks.len()).unwrap();
        } else {
            writeln!(
                out,
                "\nband check: FAIL ({failed} of {} orders outside)",
                checks.len()
            )
            .unwrap();
        }
    }
    out
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes the CSV and `.dat` tables per grid kind, the factor CSV if any,
/// the report, and optionally one face-coordinate dump per grid. Returns the
/// paths written, in a fixed order.
pub fn emit_outputs(outcome: &Outcome, dir: &Path, dump_grids: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let name = &outcome.config.name;
    let mut written = Vec::new();
    for run in &outcome.runs {
        let stem = format!("{name}_{}", run.kind.name());
        written.push(write(
            dir.join(format!("{stem}.csv")),
            &csv_table(&run.table),
        )?);
        written.push(write(
            dir.join(format!("{stem}.dat")),
            &dat_table(&run.table),
        )?);
        if dump_grids {
            let grids = grid_family(&family_spec(&outcome.config, run.kind))?;
            for g in &grids {
                let path = dir.join(format!("{stem}_n{}.grid", g.n_cells()));
                written.push(write(path, &g.dump())?);
            }
        }
    }
    if !outcome.factor_tables.is_empty() {
        written.push(write(
            dir.join(format!("{name}_factors.csv")),
            &factor_csv(&outcome.factor_tables),
        )?);
    }
    written.push(write(
        dir.join(format!("{name}_report.txt")),
        &report(outcome),
    )?);
    Ok(written)
}
