use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use mzi_past::format::{parse_scenario, write_series_csv, write_spectrum_csv, write_weak_report};
use mzi_past::run::{run, NoiseOptions, RunOptions};
use mzi_past::scenario::{builtin, BUILTIN_NAMES};
use mzi_past::spectrum::DEFAULT_SMOOTHING_WINDOW;
use mzi_past::Scenario;

/// Simulate quad-cell signals from vibrating mirrors in nested
/// Mach-Zehnder interferometers and compare spectra with weak values.
#[derive(Parser)]
#[command(name = "mzi-past", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in scenarios.
    ListScenarios,
    /// Print the weak value of every mirror projector.
    WeakValues {
        /// Built-in scenario name or scenario file.
        scenario: String,
    },
    /// Simulate the detector signal and report spectral peaks.
    Simulate {
        /// Built-in scenario name or scenario file.
        scenario: String,
        #[arg(long, value_name = "PATH")]
        out_series: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        out_spectrum: Option<PathBuf>,
        /// Write the smoothed spectrum as SVG.
        #[arg(long, value_name = "PATH")]
        plot: Option<PathBuf>,
        /// Write the weak-value report.
        #[arg(long, value_name = "PATH")]
        out_weak: Option<PathBuf>,
        /// Smoothing window in bins.
        #[arg(long, default_value_t = DEFAULT_SMOOTHING_WINDOW, value_name = "N")]
        window: usize,
        /// Add seeded white noise to the signal.
        #[arg(long, value_name = "K")]
        noise_seed: Option<u64>,
        /// Noise standard deviation relative to the clean signal RMS.
        #[arg(long, default_value_t = 0.01, value_name = "X", requires = "noise_seed")]
        noise_level: f64,
    },
    /// Check a scenario file and print any warnings.
    Validate { file: PathBuf },
}

fn load(arg: &str) -> Result<Scenario> {
    if let Some(s) = builtin(arg) {
        return Ok(s);
    }
    let path = Path::new(arg);
    if !path.exists() {
        bail!("`{arg}` is neither a built-in scenario ({}) nor a file", BUILTIN_NAMES.join(", "));
    }
    load_file(path)
}

fn load_file(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let s = parse_scenario(&text).with_context(|| format!("{}", path.display()))?;
    Ok(s.named(name))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::ListScenarios => {
            for name in BUILTIN_NAMES {
                let s = builtin(name).expect("listed builtin");
                let mirrors: Vec<&str> = s.mirrors.keys().map(String::as_str).collect();
                println!("{name:<9} paths {}  mirrors {}", s.paths.len(), mirrors.join(" "));
            }
        }
        Command::WeakValues { scenario } => {
            let s = load(&scenario)?;
            let report = s.weak_values();
            print!("{}", write_weak_report(&report));
            if !report.defined {
                eprintln!("weak values undefined: orthogonal postselection");
            }
        }
        Command::Simulate { scenario, out_series, out_spectrum, plot, out_weak, window, noise_seed, noise_level } => {
            let s = load(&scenario)?;
            for w in s.warnings() {
                eprintln!("warning: {w}");
            }
            let options = RunOptions {
                window,
                noise: noise_seed.map(|seed| NoiseOptions { seed, relative_level: noise_level }),
                plot: plot.is_some(),
                ..Default::default()
            };
            let art = run(&s, &options)?;
            if let Some(p) = &out_series {
                write(p, &write_series_csv(&art.series))?;
            }
            if let Some(p) = &out_spectrum {
                write(p, &write_spectrum_csv(&art.spectrum))?;
            }
            if let (Some(p), Some(svg)) = (&plot, &art.plot) {
                write(p, svg)?;
            }
            if let Some(p) = &out_weak {
                write(p, &write_weak_report(&art.weak_values))?;
            }
            print!("{}", art.summary());
        }
        Command::Validate { file } => {
            let s = load_file(&file)?;
            for w in s.warnings() {
                println!("warning: {w}");
            }
            println!("ok: {} mirrors, {} paths", s.mirrors.len(), s.paths.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
