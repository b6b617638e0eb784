use super::config::{CaseConfig, ConfigBuilder};
use crate::error::{Error, Result};

/// Preset names with a one-line description each.
pub const PRESETS: [(&str, &str); 6] = [
    ("fig1b", "steady solve, both grid kinds"),
    (
        "fig1c",
        "time integration only, dt = 0.01 h, T_f = 0.01 h_c",
    ),
    ("fig1de", "unsteady, fixed dt = T_f = 1e-8"),
    ("scaled_dt_pitfall", "unsteady, dt = 0.01 h, T_f = 0.01 h_c"),
    ("fig2", "unsteady, dt = 0.95 h, T_f = dt_c"),
    (
        "exp_tables",
        "exp(-a T_f / h) tables for mu = 0.01 and mu = 1",
    ),
];

fn settings(name: &str) -> Option<&'static [(&'static str, &'static str)]> {
    Some(match name {
        "fig1b" => &[("experiment", "steady")],
        "fig1c" => &[("experiment", "ode_time"), ("mu", "0.01"), ("tf", "dtc")],
        "fig1de" => &[
            ("experiment", "unsteady_fixed_dt"),
            ("dt", "1e-8"),
            ("tf", "1e-8"),
        ],
        "scaled_dt_pitfall" => &[
            ("experiment", "unsteady_scaled_dt"),
            ("mu", "0.01"),
            ("tf", "dtc"),
        ],
        "fig2" => &[("experiment", "remedy"), ("mu", "0.95"), ("tf", "dtc")],
        "exp_tables" => &[("experiment", "factor_tables")],
        _ => return None,
    })
}

/// Builder pre-filled with a preset, for callers that want to override
/// fields before validation.
pub fn preset_builder(name: &str) -> Result<ConfigBuilder> {
    let entries = settings(name).ok_or_else(|| Error::UnknownPreset(name.to_string()))?;
    let mut b = ConfigBuilder::new();
    b.set("name", name)?;
    for (k, v) in entries {
        b.set(k, v)?;
    }
    Ok(b)
}

/// A fully populated preset: `a = 1`, 6 levels from 8 cells, both grid
/// kinds, seed 1.
pub fn preset(name: &str) -> Result<CaseConfig> {
    preset_builder(name)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::config::{Experiment, FinalTime, GridSelection};

    #[test]
    fn every_listed_preset_builds() {
        for (name, _) in PRESETS {
            let cfg = preset(name).unwrap();
            assert_eq!(cfg.name, name);
            assert_eq!(cfg.a, 1.0);
            assert_eq!(cfg.base_cells, 8);
            assert_eq!(cfg.n_levels, 6);
            assert_eq!(cfg.grids, GridSelection::Both);
        }
    }

    #[test]
    fn preset_parameters() {
        assert_eq!(preset("fig1de").unwrap().dt_fixed, Some(1e-8));
        assert_eq!(preset("fig1de").unwrap().final_time(), Some(1e-8));
        assert_eq!(preset("fig2").unwrap().mu, Some(0.95));
        let c = preset("fig1c").unwrap();
        assert_eq!(c.experiment, Experiment::OdeTime);
        assert_eq!(c.dt_for(1.0 / 64.0), Some(0.01 / 64.0));
        assert_eq!(c.final_time(), Some(0.01 / 8.0));
        let s = preset("scaled_dt_pitfall").unwrap();
        assert_eq!(s.experiment, Experiment::UnsteadyScaledDt);
        assert_eq!(s.t_final, Some(FinalTime::CoarsestDtMultiple(1.0)));
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(preset("fig3"), Err(Error::UnknownPreset(_))));
    }
}
