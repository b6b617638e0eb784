use std::path::PathBuf;
use std::process::ExitCode;

use advect_verify::driver::{
    compute, emit_outputs, parse_config, preset_builder, report, ConfigBuilder, PRESETS,
};
use advect_verify::grid::{make_irregular, make_regular, DEFAULT_PERTURB_FRACTION};
use advect_verify::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_BANDS: u8 = 3;

/// Grid-convergence verification of a finite-volume advection solver.
#[derive(Parser)]
#[command(name = "verify", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run an experiment from a preset, a config file or flags.
    Run(RunArgs),
    /// Print the exp(-a T_f / h) tables.
    Factors(FactorArgs),
    /// List the built-in presets.
    ListPresets,
    /// Print the face coordinates of one grid.
    Grid(GridArgs),
}

#[derive(Args, Default)]
struct Overrides {
    /// steady | ode_time | unsteady_fixed_dt | unsteady_scaled_dt | remedy | factor_tables
    #[arg(long)]
    experiment: Option<String>,
    /// Advection speed.
    #[arg(long)]
    a: Option<String>,
    /// regular | irregular | both
    #[arg(long)]
    grid: Option<String>,
    /// Cells on the coarsest level.
    #[arg(long)]
    base_cells: Option<String>,
    /// Number of refinement levels.
    #[arg(long)]
    levels: Option<String>,
    /// CFL number for the scaled-dt experiments.
    #[arg(long)]
    mu: Option<String>,
    /// Fixed time step.
    #[arg(long)]
    dt: Option<String>,
    /// Final time: a number, `dtc` or `m*dtc`.
    #[arg(long)]
    tf: Option<String>,
    /// Seed for irregular grids.
    #[arg(long)]
    seed: Option<String>,
    /// Face displacement as a fraction of the nominal spacing.
    #[arg(long)]
    perturb_fraction: Option<String>,
    /// tiled | independent
    #[arg(long)]
    layout: Option<String>,
    /// Prefix for output file names.
    #[arg(long)]
    name: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, b: &mut ConfigBuilder) -> advect_verify::Result<()> {
        let pairs = [
            ("experiment", &self.experiment),
            ("a", &self.a),
            ("grid", &self.grid),
            ("base_cells", &self.base_cells),
            ("levels", &self.levels),
            ("mu", &self.mu),
            ("dt", &self.dt),
            ("tf", &self.tf),
            ("seed", &self.seed),
            ("perturb_fraction", &self.perturb_fraction),
            ("layout", &self.layout),
            ("name", &self.name),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                b.set(key, v)?;
            }
        }
        if let Some(out) = &self.out {
            b.set("out", &out.display().to_string())?;
        }
        Ok(())
    }
}

#[derive(Args)]
struct RunArgs {
    /// Start from a built-in preset.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Start from a `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    /// Exit with status 3 if an observed order falls outside its band.
    #[arg(long)]
    check: bool,
    /// Also write the face coordinates of every grid.
    #[arg(long)]
    dump_grids: bool,
}

#[derive(Args)]
struct FactorArgs {
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    base_cells: Option<String>,
    #[arg(long)]
    levels: Option<String>,
    /// Print a single table for this CFL number.
    #[arg(long)]
    mu: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Regular,
    Irregular,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    cells: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_PERTURB_FRACTION)]
    perturb_fraction: f64,
}

enum Failure {
    Error(Error),
    Bands,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let mut builder = match (&args.preset, &args.config) {
        (Some(name), _) => preset_builder(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            ConfigBuilder::from_config(&parse_config(&text)?)
        }
        (None, None) => ConfigBuilder::new(),
    };
    args.overrides.apply(&mut builder)?;
    let config = builder.build()?;
    let outcome = compute(&config)?;
    print!("{}", report(&outcome));
    if let Some(dir) = &config.output_dir {
        for path in emit_outputs(&outcome, dir, args.dump_grids)? {
            eprintln!("wrote {}", path.display());
        }
    }
    if args.check && !outcome.bands_satisfied() {
        return Err(Failure::Bands);
    }
    Ok(())
}

fn factors(args: FactorArgs) -> Result<(), Failure> {
    let mut builder = preset_builder("exp_tables")?;
    for (key, value) in [
        ("a", &args.a),
        ("base_cells", &args.base_cells),
        ("levels", &args.levels),
        ("mu", &args.mu),
    ] {
        if let Some(v) = value {
            builder.set(key, v)?;
        }
    }
    print!("{}", report(&compute(&builder.build()?)?));
    Ok(())
}

fn grid(args: GridArgs) -> Result<(), Failure> {
    let g = match args.kind {
        Kind::Regular => make_regular(args.cells)?,
        Kind::Irregular => make_irregular(args.cells, args.seed, args.perturb_fraction)?,
    };
    print!("{}", g.dump());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Factors(args) => factors(args),
        Command::ListPresets => {
            for (name, about) in PRESETS {
                println!("{name:<18} {about}");
            }
            Ok(())
        }
        Command::Grid(args) => grid(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Bands) => {
            eprintln!("error: observed orders outside the expected bands");
            ExitCode::from(EXIT_BANDS)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_RUNTIME
            })
        }
    }
}
