mod report;
mod verify;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mckay_ch::groups::GroupSpec;
use mckay_ch::mckay::{character_table, mckay_quiver, McKayTolerances};
use mckay_ch::morse_lab::{run_morse_lab, MorseConfig, MorseTolerances};
use mckay_ch::{Analysis, Error};
use serde::Serialize;

use verify::{Suite, VerifyConfig};

const MAX_LEVELS: u32 = 12;

#[derive(Parser)]
#[command(name = "mckay-ch", version, about = "Filtered and limiting cylindrical contact homology of S³/G")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuiverFormat {
    Json,
    Dot,
}

#[derive(Args)]
struct McKayFlags {
    /// Character orthogonality and integrality tolerance.
    #[arg(long, default_value_t = 1e-8)]
    char_tol: f64,
    /// Allowed distance of quiver entries from an integer.
    #[arg(long, default_value_t = 1e-6)]
    quiver_tol: f64,
}

impl McKayFlags {
    fn tolerances(&self) -> McKayTolerances {
        McKayTolerances { character: self.char_tol, quiver: self.quiver_tol }
    }
}

#[derive(Args)]
struct MorseFlags {
    /// Latitude rows of the screening grid.
    #[arg(long, default_value_t = 1000)]
    grid_lat: usize,
    /// Longitude columns of the screening grid.
    #[arg(long, default_value_t = 1000)]
    grid_lon: usize,
    /// Gaussian width; searched automatically when absent.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    invariance_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    gradient_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    nondegeneracy_tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    match_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    saddle_level_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    invariance_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    flow_step_tol: f64,
    #[arg(long, default_value_t = 1e-4)]
    arrival_radius: f64,
}

impl MorseFlags {
    fn config(&self) -> MorseConfig {
        MorseConfig {
            grid_lat: self.grid_lat,
            grid_lon: self.grid_lon,
            sigma: self.sigma,
            invariance_samples: self.invariance_samples,
            seed: self.seed,
            tol: MorseTolerances {
                gradient: self.gradient_tol,
                nondegeneracy: self.nondegeneracy_tol,
                matching: self.match_tol,
                saddle_level: self.saddle_level_tol,
                invariance: self.invariance_tol,
                flow_step: self.flow_step_tol,
                arrival: self.arrival_radius,
            },
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Orbit tables, censuses, filtered ranks, direct limit and McKay data.
    Report {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 2)]
        levels: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// ε used only to print numeric action values.
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[command(flatten)]
        mckay: McKayFlags,
    },
    /// Run verification suites; exit status 0 iff every check passes.
    Verify {
        #[arg(long)]
        group: String,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 4)]
        levels: u32,
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
        /// ε for the numeric local-model index.
        #[arg(long, default_value_t = 1e-4)]
        local_eps: f64,
        /// Largest d1 in the bad-building index sweep.
        #[arg(long, default_value_t = 10)]
        d1_max: u64,
        #[command(flatten)]
        morse: MorseFlags,
        #[command(flatten)]
        mckay: McKayFlags,
    },
    /// McKay quiver as DOT or JSON.
    Quiver {
        #[arg(long)]
        group: String,
        #[arg(long, value_enum, default_value = "dot")]
        format: QuiverFormat,
        #[command(flatten)]
        mckay: McKayFlags,
    },
    /// Critical points and flow census of the invariant Morse function, as JSON.
    Morse {
        #[arg(long)]
        group: String,
        #[command(flatten)]
        morse: MorseFlags,
    },
}

enum Failure {
    Input(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(m) => Failure::Input(m),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn analysis(group: &str) -> Result<Analysis, Failure> {
    let spec: GroupSpec = group.parse()?;
    Ok(Analysis::new(spec)?)
}

fn check_levels(levels: u32) -> Result<(), Failure> {
    if levels == 0 || levels > MAX_LEVELS {
        return Err(Failure::Input(format!("--levels must lie in 1..={MAX_LEVELS}, got {levels}")));
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> Result<(), Failure> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Failure::Input(format!("--{name} must be a positive number, got {x}")));
    }
    Ok(())
}

fn check_mckay(f: &McKayFlags) -> Result<(), Failure> {
    check_positive("char-tol", f.char_tol)?;
    check_positive("quiver-tol", f.quiver_tol)
}

fn check_morse(f: &MorseFlags) -> Result<(), Failure> {
    for (name, x) in [
        ("gradient-tol", f.gradient_tol),
        ("nondegeneracy-tol", f.nondegeneracy_tol),
        ("match-tol", f.match_tol),
        ("saddle-level-tol", f.saddle_level_tol),
        ("invariance-tol", f.invariance_tol),
        ("flow-step-tol", f.flow_step_tol),
        ("arrival-radius", f.arrival_radius),
    ] {
        check_positive(name, x)?;
    }
    if let Some(s) = f.sigma {
        check_positive("sigma", s)?;
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| Failure::Run(e.to_string()))
}

/// Prints the document and returns whether every check passed.
fn execute(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Report { group, levels, format, eps, mckay } => {
            check_levels(levels)?;
            check_mckay(&mckay)?;
            if !(eps.is_finite() && (0.0..1.0).contains(&eps)) {
                return Err(Failure::Input(format!("--eps must lie in [0, 1), got {eps}")));
            }
            let a = analysis(&group)?;
            let r = report::build(&a, levels, eps, &mckay.tolerances())?;
            print!("{}", match format {
                Format::Json => json(&r)?,
                Format::Markdown => report::markdown(&r),
            });
            Ok(r.mckay.rank_check)
        }
        Command::Verify { group, suite, levels, format, local_eps, d1_max, morse, mckay } => {
            check_levels(levels)?;
            check_mckay(&mckay)?;
            check_morse(&morse)?;
            check_positive("local-eps", local_eps)?;
            if d1_max == 0 {
                return Err(Failure::Input("--d1-max must be at least 1".into()));
            }
            let a = analysis(&group)?;
            let cfg = VerifyConfig {
                levels,
                local_eps,
                bad_building_d1: d1_max,
                morse: morse.config(),
                mckay: mckay.tolerances(),
            };
            let checks = verify::run(&a, suite, &cfg)?;
            print!("{}", match format {
                Format::Json => json(&checks)?,
                Format::Markdown => verify::markdown(&group, &checks),
            });
            for c in checks.iter().filter(|c| !c.passed) {
                eprintln!("FAIL {}: {}", c.name, c.detail);
            }
            Ok(checks.iter().all(|c| c.passed))
        }
        Command::Quiver { group, format, mckay } => {
            check_mckay(&mckay)?;
            let a = analysis(&group)?;
            let tol = mckay.tolerances();
            let table = character_table(&a.group, &a.classes, &tol)?;
            let q = mckay_quiver(&a.group, &table, &a.classes, &tol)?;
            print!("{}", match format {
                QuiverFormat::Dot => q.to_dot(),
                QuiverFormat::Json => json(&q)?,
            });
            Ok(true)
        }
        Command::Morse { group, morse } => {
            check_morse(&morse)?;
            let a = analysis(&group)?;
            let r = run_morse_lab(&a.orbifold, &a.rotations, &morse.config())?;
            print!("{}", json(&r)?);
            Ok(r.passed())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
