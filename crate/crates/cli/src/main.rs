// SPDX-License-Identifier: Apache-2.0

//! `bilindblad`: run verification suites on built-in or configured models.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bilindblad_core::config::{export_config, parse_config};
use bilindblad_core::geometry::PencilMode;
use bilindblad_core::models::{builtin, ModelFixture, SuiteName, BUILTIN_MODELS};
use bilindblad_core::suite::{run_suites, SuiteRun};
use bilindblad_core::Error;
use clap::{Args, Parser, Subcommand};

const SEED_VARIABLE: &str = "BILINDBLAD_SEED";

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "bilindblad", version, about = "Verify Poisson pencils, contact systems and bi-Lindblad generators")]
struct Cli {
    /// Print the built-in model names and exit.
    #[arg(long)]
    list_models: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the selected verification suites and print the report.
    Verify(RunArgs),
    /// Run the GKSL and dephasing suites and print the coherence table.
    Simulate(RunArgs),
    /// Run the semiclassical suite and print the residual sweep.
    Sweep(RunArgs),
    /// Print a model in the config format.
    ExportModel(SourceArgs),
    /// Print the built-in model names.
    ListModels,
}

#[derive(Args)]
struct SourceArgs {
    /// Built-in model name.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    model: Option<String>,
    /// Model config file.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Suite to run (repeatable); defaults to the model's own selection.
    #[arg(long = "suite", value_parser = parse_suite)]
    suites: Vec<SuiteName>,
    /// Pencil combination: `convex` or `difference`.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<PencilMode>,
    /// Directory for report.txt and CSV artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for every randomized check.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated ħ values for the semiclassical sweep.
    #[arg(long, value_delimiter = ',')]
    hbars: Option<Vec<f64>>,
    /// Comma-separated trajectory times; an empty value disables trajectories.
    #[arg(long, num_args = 0..=1, default_missing_value = "")]
    times: Option<String>,
    #[command(flatten)]
    tolerances: ToleranceArgs,
}

#[derive(Args)]
struct ToleranceArgs {
    #[arg(long)]
    tol_numeric: Option<f64>,
    #[arg(long)]
    tol_cp: Option<f64>,
    #[arg(long)]
    tol_kernel: Option<f64>,
    #[arg(long)]
    tol_semigroup: Option<f64>,
    #[arg(long)]
    tol_coherence: Option<f64>,
    #[arg(long)]
    tol_diagonal: Option<f64>,
    #[arg(long)]
    tol_weyl: Option<f64>,
    #[arg(long)]
    tol_slope: Option<f64>,
}

fn parse_suite(s: &str) -> Result<SuiteName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<PencilMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn load(source: &SourceArgs) -> Result<ModelFixture, Error> {
    match (&source.model, &source.config) {
        (Some(name), _) => builtin(name),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)
        }
        (None, None) => Err(Error::config("model", "either --model or --config is required")),
    }
}

fn parse_times(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| Error::config("suite.times", format!("`{s}`: {e}"))))
        .collect()
}

/// Applies command-line overrides; validation happens when the suites run.
fn apply_overrides(fixture: &mut ModelFixture, args: &RunArgs, default_suites: &[SuiteName]) -> Result<(), Error> {
    if !args.suites.is_empty() {
        fixture.suite.suites = args.suites.clone();
    } else if !default_suites.is_empty() {
        fixture.suite.suites = default_suites.to_vec();
    }
    if let Some(mode) = args.mode {
        match fixture.poisson.as_mut().and_then(|p| p.pencil.as_mut()) {
            Some(p) => p.mode = mode,
            None => return Err(Error::config("poisson.pencil", "--mode needs a model with a pencil")),
        }
    }
    if let Ok(text) = std::env::var(SEED_VARIABLE) {
        fixture.suite.seed = text
            .trim()
            .parse()
            .map_err(|e| Error::config("suite.seed", format!("{SEED_VARIABLE}=`{text}`: {e}")))?;
    }
    if let Some(seed) = args.seed {
        fixture.suite.seed = seed;
    }
    if let Some(hbars) = &args.hbars {
        match fixture.symbols.as_mut() {
            Some(s) => s.hbars = hbars.clone(),
            None => return Err(Error::config("symbols.hbars", "--hbars needs a model with a symbols section")),
        }
    }
    if let Some(times) = &args.times {
        fixture.suite.times = parse_times(times)?;
    }
    let t = &args.tolerances;
    let tol = &mut fixture.suite.tolerances;
    for (value, slot) in [
        (t.tol_numeric, &mut tol.numeric),
        (t.tol_cp, &mut tol.cp),
        (t.tol_kernel, &mut tol.kernel),
        (t.tol_semigroup, &mut tol.semigroup),
        (t.tol_coherence, &mut tol.coherence),
        (t.tol_diagonal, &mut tol.diagonal),
        (t.tol_weyl, &mut tol.weyl),
        (t.tol_slope, &mut tol.slope),
    ] {
        if let Some(v) = value {
            *slot = v;
        }
    }
    Ok(())
}

fn write_outputs(dir: &Path, run: &SuiteRun) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.txt"), run.report.to_text())?;
    if let Some(csv) = &run.coherences {
        fs::write(dir.join("coherences.csv"), csv)?;
    }
    if let Some(csv) = &run.egorov {
        fs::write(dir.join("egorov_sweep.csv"), csv)?;
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum Output {
    Report,
    Coherences,
    Sweep,
}

fn run(args: &RunArgs, default_suites: &[SuiteName], output: Output) -> u8 {
    let run = load(&args.source)
        .and_then(|mut f| apply_overrides(&mut f, args, default_suites).map(|_| f))
        .and_then(|f| run_suites(&f));
    let run = match run {
        Ok(r) => r,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Some(dir) = &args.out {
        if let Err(e) = write_outputs(dir, &run) {
            eprintln!("cannot write outputs to {}: {e}", dir.display());
            return EXIT_FAIL;
        }
    }
    match output {
        Output::Report => print!("{}", run.report.to_text()),
        Output::Coherences => match &run.coherences {
            Some(csv) => print!("{csv}"),
            None => print!("{}", run.report.to_text()),
        },
        Output::Sweep => match &run.egorov {
            Some(csv) => print!("{csv}"),
            None => print!("{}", run.report.to_text()),
        },
    }
    if run.report.passed() {
        EXIT_PASS
    } else {
        if !matches!(output, Output::Report) {
            eprintln!("some checks failed; rerun `verify` for the full report");
        }
        EXIT_FAIL
    }
}

fn list_models() {
    for (name, description) in BUILTIN_MODELS {
        println!("{name:<16} {description}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_models {
        list_models();
        return ExitCode::SUCCESS;
    }
    let code = match cli.command {
        None => {
            eprintln!("no command given; see --help");
            EXIT_CONFIG
        }
        Some(Command::ListModels) => {
            list_models();
            EXIT_PASS
        }
        Some(Command::ExportModel(source)) => match load(&source) {
            Ok(f) => {
                print!("{}", export_config(&f));
                EXIT_PASS
            }
            Err(e) => {
                eprintln!("config error: {e}");
                EXIT_CONFIG
            }
        },
        Some(Command::Verify(args)) => run(&args, &[], Output::Report),
        Some(Command::Simulate(args)) => run(&args, &[SuiteName::Gksl, SuiteName::Dephasing], Output::Coherences),
        Some(Command::Sweep(args)) => run(&args, &[SuiteName::Egorov], Output::Sweep),
    };
    ExitCode::from(code)
}
