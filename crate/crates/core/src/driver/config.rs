//! Experiment configuration and its `key = value` text format.
//!
//! ```text
//! # remedy run on irregular grids only
//! experiment = remedy
//! grid = irregular
//! mu = 0.95
//! tf = dtc
//! out = results/fig2
//! ```
//!
//! `tf` takes either a time (`1e-8`) or a multiple of the coarsest level's
//! time step (`dtc`, `5*dtc`).

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{
    GridKind, IrregularLayout, DEFAULT_PERTURB_FRACTION, MAX_PERTURB_FRACTION, MIN_CELLS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    /// Direct steady solve.
    Steady,
    /// Residual switched off; time accuracy only.
    OdeTime,
    /// One fixed time step on every level.
    UnsteadyFixedDt,
    /// `dt = mu h / a` with a small `mu`.
    UnsteadyScaledDt,
    /// `dt = mu h / a` with `mu = O(1)` and `T_f` tied to the coarsest step.
    Remedy,
    /// Only the `exp(-a T_f / h)` tables; no solves.
    FactorTables,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Steady,
        Experiment::OdeTime,
        Experiment::UnsteadyFixedDt,
        Experiment::UnsteadyScaledDt,
        Experiment::Remedy,
        Experiment::FactorTables,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Steady => "steady",
            Experiment::OdeTime => "ode_time",
            Experiment::UnsteadyFixedDt => "unsteady_fixed_dt",
            Experiment::UnsteadyScaledDt => "unsteady_scaled_dt",
            Experiment::Remedy => "remedy",
            Experiment::FactorTables => "factor_tables",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridSelection {
    Regular,
    Irregular,
    Both,
}

impl GridSelection {
    pub fn kinds(self) -> &'static [GridKind] {
        match self {
            GridSelection::Regular => &[GridKind::Regular],
            GridSelection::Irregular => &[GridKind::Irregular],
            GridSelection::Both => &[GridKind::Regular, GridKind::Irregular],
        }
    }

    fn name(self) -> &'static str {
        match self {
            GridSelection::Regular => "regular",
            GridSelection::Irregular => "irregular",
            GridSelection::Both => "both",
        }
    }
}

impl FromStr for GridSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regular" => Ok(GridSelection::Regular),
            "irregular" => Ok(GridSelection::Irregular),
            "both" => Ok(GridSelection::Both),
            _ => Err(Error::Config(format!(
                "grid must be regular, irregular or both, got `{s}`"
            ))),
        }
    }
}

fn parse_layout(s: &str) -> Result<IrregularLayout> {
    match s {
        "tiled" => Ok(IrregularLayout::Tiled),
        "independent" => Ok(IrregularLayout::Independent),
        _ => Err(Error::Config(format!(
            "layout must be tiled or independent, got `{s}`"
        ))),
    }
}

fn layout_name(layout: IrregularLayout) -> &'static str {
    match layout {
        IrregularLayout::Tiled => "tiled",
        IrregularLayout::Independent => "independent",
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FinalTime {
    Explicit(f64),
    /// `m` times the coarsest level's time step.
    CoarsestDtMultiple(f64),
}

impl fmt::Display for FinalTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FinalTime::Explicit(t) => write!(f, "{t:e}"),
            FinalTime::CoarsestDtMultiple(m) if *m == 1.0 => write!(f, "dtc"),
            FinalTime::CoarsestDtMultiple(m) => write!(f, "{m}*dtc"),
        }
    }
}

impl FromStr for FinalTime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(prefix) = compact.strip_suffix("dtc") {
            let m = match prefix.strip_suffix('*') {
                Some(num) => parse_f64("tf", num)?,
                None if prefix.is_empty() => 1.0,
                None => parse_f64("tf", prefix)?,
            };
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::Config(format!(
                    "tf multiple must be positive, got {m}"
                )));
            }
            return Ok(FinalTime::CoarsestDtMultiple(m));
        }
        let t = parse_f64("tf", &compact)?;
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Config(format!("tf must be positive, got {t}")));
        }
        Ok(FinalTime::Explicit(t))
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("{key}: `{value}` is not a number")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| Error::Config(format!("{key}: `{value}` is not a non-negative integer")))
}

/// A fully validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseConfig {
    pub name: String,
    pub experiment: Experiment,
    pub a: f64,
    pub grids: GridSelection,
    pub base_cells: usize,
    pub n_levels: usize,
    pub seed: u64,
    pub perturb_fraction: f64,
    pub layout: IrregularLayout,
    pub dt_fixed: Option<f64>,
    pub mu: Option<f64>,
    pub t_final: Option<FinalTime>,
    pub output_dir: Option<PathBuf>,
}

impl CaseConfig {
    pub fn coarsest_h(&self) -> f64 {
        1.0 / self.base_cells as f64
    }

    /// Time step on a level with nominal spacing `h`.
    pub fn dt_for(&self, h: f64) -> Option<f64> {
        match self.experiment {
            Experiment::UnsteadyFixedDt => self.dt_fixed,
            Experiment::OdeTime | Experiment::UnsteadyScaledDt | Experiment::Remedy => {
                self.mu.map(|mu| mu * h / self.a)
            }
            Experiment::Steady | Experiment::FactorTables => None,
        }
    }

    pub fn final_time(&self) -> Option<f64> {
        match self.t_final? {
            FinalTime::Explicit(t) => Some(t),
            FinalTime::CoarsestDtMultiple(m) => self.dt_for(self.coarsest_h()).map(|dt| m * dt),
        }
    }

    /// The config in the text format accepted by [`parse_config`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        line("name", self.name.clone());
        line("experiment", self.experiment.name().into());
        line("a", format!("{}", self.a));
        line("grid", self.grids.name().into());
        line("base_cells", self.base_cells.to_string());
        line("levels", self.n_levels.to_string());
        line("seed", self.seed.to_string());
        line("perturb_fraction", format!("{}", self.perturb_fraction));
        line("layout", layout_name(self.layout).into());
        if let Some(dt) = self.dt_fixed {
            line("dt", format!("{dt:e}"));
        }
        if let Some(mu) = self.mu {
            line("mu", format!("{mu}"));
        }
        if let Some(tf) = self.t_final {
            line("tf", tf.to_string());
        }
        if let Some(dir) = &self.output_dir {
            line("out", dir.display().to_string());
        }
        out
    }
}

pub const KEYS: [&str; 13] = [
    "name",
    "experiment",
    "a",
    "grid",
    "base_cells",
    "levels",
    "seed",
    "perturb_fraction",
    "layout",
    "dt",
    "mu",
    "tf",
    "out",
];

/// Accumulates `key = value` settings and validates them into a
/// [`CaseConfig`].
#[derive(Debug, Clone, Default)]
pub struct ConfigBuilder {
    values: BTreeMap<&'static str, String>,
}

impl ConfigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts from an existing config; later [`set`](Self::set) calls
    /// override its fields.
    pub fn from_config(config: &CaseConfig) -> Self {
        let mut b = ConfigBuilder::new();
        for line in config.to_text().lines() {
            let (k, v) = line.split_once(" = ").expect("to_text writes key = value");
            b.set(k, v).expect("to_text writes known keys");
        }
        b
    }

    /// Sets a key, replacing any earlier value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<&mut Self> {
        let key = KEYS
            .into_iter()
            .find(|k| *k == key)
            .ok_or_else(|| Error::Config(format!("unknown key `{key}`")))?;
        self.values.insert(key, value.trim().to_string());
        Ok(self)
    }

    pub fn unset(&mut self, key: &str) -> &mut Self {
        self.values.remove(key);
        self
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn build(&self) -> Result<CaseConfig> {
        let experiment: Experiment = self
            .get("experiment")
            .ok_or_else(|| Error::Config("`experiment` is required".into()))?
            .parse()?;
        let num = |k: &str, default: f64| self.get(k).map_or(Ok(default), |v| parse_f64(k, v));
        let count =
            |k: &str, default: usize| self.get(k).map_or(Ok(default), |v| parse_usize(k, v));

        let a = num("a", 1.0)?;
        let base_cells = count("base_cells", 8)?;
        let n_levels = count("levels", 6)?;
        let seed = match self.get("seed") {
            Some(v) => v.parse::<u64>().map_err(|_| {
                Error::Config(format!("seed: `{v}` is not a 64-bit unsigned integer"))
            })?,
            None => 1,
        };
        let perturb_fraction = num("perturb_fraction", DEFAULT_PERTURB_FRACTION)?;
        let layout = self
            .get("layout")
            .map_or(Ok(IrregularLayout::Tiled), parse_layout)?;
        let grids = self
            .get("grid")
            .map_or(Ok(GridSelection::Both), str::parse)?;
        let dt_fixed = self.get("dt").map(|v| parse_f64("dt", v)).transpose()?;
        let mu = self.get("mu").map(|v| parse_f64("mu", v)).transpose()?;
        let mut t_final = self.get("tf").map(str::parse::<FinalTime>).transpose()?;
        let output_dir = self.get("out").map(PathBuf::from);
        let name = self.get("name").unwrap_or("custom").to_string();

        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Config(format!("a must be positive, got {a}")));
        }
        if base_cells < MIN_CELLS {
            return Err(Error::Config(format!(
                "base_cells must be at least {MIN_CELLS}"
            )));
        }
        if !(2..=20).contains(&n_levels) {
            return Err(Error::Config(format!(
                "levels must be in 2..=20, got {n_levels}"
            )));
        }
        if !(0.0..=MAX_PERTURB_FRACTION).contains(&perturb_fraction) {
            return Err(Error::Config(format!(
                "perturb_fraction must be in [0, {MAX_PERTURB_FRACTION}], got {perturb_fraction}"
            )));
        }
        if name.is_empty() || name.contains(['/', '\\']) {
            return Err(Error::Config(format!(
                "name `{name}` cannot be used in file names"
            )));
        }

        let forbid = |key: &str, present: bool| {
            if present {
                Err(Error::Config(format!(
                    "`{key}` does not apply to experiment {}",
                    experiment.name()
                )))
            } else {
                Ok(())
            }
        };
        let require = |key: &str, present: bool| {
            if present {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "experiment {} requires `{key}`",
                    experiment.name()
                )))
            }
        };
        let check_mu = |upper: Option<f64>| -> Result<()> {
            let mu = mu.expect("checked by require");
            let ok = mu > 0.0 && mu.is_finite() && upper.is_none_or(|u| mu <= u);
            if ok {
                Ok(())
            } else {
                Err(Error::Config(format!("mu = {mu} out of range")))
            }
        };

        match experiment {
            Experiment::Steady => {
                forbid("dt", dt_fixed.is_some())?;
                forbid("mu", mu.is_some())?;
                forbid("tf", t_final.is_some())?;
            }
            Experiment::OdeTime | Experiment::UnsteadyScaledDt => {
                forbid("dt", dt_fixed.is_some())?;
                require("mu", mu.is_some())?;
                require("tf", t_final.is_some())?;
                check_mu(if experiment == Experiment::OdeTime {
                    None
                } else {
                    Some(1.0)
                })?;
            }
            Experiment::UnsteadyFixedDt => {
                forbid("mu", mu.is_some())?;
                require("dt", dt_fixed.is_some())?;
                require("tf", t_final.is_some())?;
                let dt = dt_fixed.expect("required");
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(Error::Config(format!("dt must be positive, got {dt}")));
                }
            }
            Experiment::Remedy => {
                forbid("dt", dt_fixed.is_some())?;
                require("mu", mu.is_some())?;
                check_mu(Some(1.0))?;
                match t_final {
                    None => t_final = Some(FinalTime::CoarsestDtMultiple(1.0)),
                    Some(FinalTime::CoarsestDtMultiple(m)) if m >= 1.0 => {}
                    Some(other) => {
                        return Err(Error::Config(format!(
                            "remedy runs need tf = m*dtc with m >= 1, got {other}"
                        )))
                    }
                }
            }
            Experiment::FactorTables => {
                forbid("dt", dt_fixed.is_some())?;
                forbid("tf", t_final.is_some())?;
                if mu.is_some() {
                    check_mu(Some(1.0))?;
                }
            }
        }

        Ok(CaseConfig {
            name,
            experiment,
            a,
            grids,
            base_cells,
            n_levels,
            seed,
            perturb_fraction,
            layout,
            dt_fixed,
            mu,
            t_final,
            output_dir,
        })
    }
}

/// Parses the line-oriented config format. `#` starts a comment; each key
/// may appear once.
pub fn parse_config(text: &str) -> Result<CaseConfig> {
    let mut builder = ConfigBuilder::new();
    let mut seen = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {lineno}: expected `key = value`")))?;
        let key = key.trim();
        if seen.contains(&key) {
            return Err(Error::Config(format!(
                "line {lineno}: duplicate key `{key}`"
            )));
        }
        seen.push(key);
        builder
            .set(key, value)
            .map_err(|e| Error::Config(format!("line {lineno}: {e}")))?;
    }
    builder.build()
}
