//! Command-line driver: runs one experiment, a noise sweep or a figure preset
//! and writes CSV or SVG output.
//!
//! Exit status is 0 on success, 2 on configuration errors and 1 when a
//! numerical invariant fails.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qwalk2d::experiment::{
    preset, preset_names, run_experiment, run_preset, write_csv, write_preset, write_result,
    ConfigOverrides, ExperimentResult, OutputFormat, ResultTable,
};
use qwalk2d::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "qwalk2d",
    version,
    about = "Two-dimensional quantum walks under coin noise"
)]
struct Cli {
    /// grover | alternate | pauli
    #[arg(long)]
    scheme: Option<String>,

    /// Number of walk steps.
    #[arg(long)]
    steps: Option<usize>,

    /// none | bitflip-axis | bitflip-step | stateflip | depolarizing
    #[arg(long)]
    noise: Option<String>,

    /// Flip-set size of the state-flip channel: 3, 6 or 23.
    #[arg(long)]
    k: Option<usize>,

    /// Noise level, or a comma-separated list for a sweep.
    #[arg(long)]
    p: Option<String>,

    /// Coin angle of the alternate walk, in radians.
    #[arg(long)]
    theta: Option<f64>,

    /// Comma-separated subset of distribution, mid_pp, mid_xy, robustness.
    #[arg(long)]
    measure: Option<String>,

    /// Figure preset, fig1 to fig16.
    #[arg(long)]
    preset: Option<String>,

    /// Comma-separated subset of csv, svg.
    #[arg(long)]
    format: Option<String>,

    /// Output directory; CSV goes to standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// key=value configuration file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Recorded only; all computations are deterministic.
    #[arg(long)]
    seed: Option<u64>,

    /// Print the preset names and exit.
    #[arg(long)]
    list_presets: bool,
}

impl Cli {
    fn overrides(&self) -> Result<ConfigOverrides> {
        let file_text = |key: &str, v: &Option<String>| {
            v.as_ref()
                .map(|s| format!("{key}={s}\n"))
                .unwrap_or_default()
        };
        // reuse the file parser so flags and files accept identical syntax
        let text = [
            file_text("scheme", &self.scheme),
            file_text("noise", &self.noise),
            file_text("p", &self.p),
            file_text("measure", &self.measure),
            file_text("format", &self.format),
            file_text("preset", &self.preset),
        ]
        .concat();
        let mut o = ConfigOverrides::parse(&text)?;
        o.steps = self.steps;
        o.k = self.k;
        o.theta = self.theta;
        o.out = self.out.clone();
        o.seed = self.seed;
        Ok(o)
    }
}

fn print_tables(tables: &[(String, ResultTable)]) -> Result<()> {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let many = tables.len() > 1;
    for (name, table) in tables {
        if many {
            writeln!(lock, "# {name}")?;
        }
        write_csv(table, &mut lock)?;
    }
    Ok(())
}

fn tables_of(prefix: &str, r: &ExperimentResult) -> Vec<(String, ResultTable)> {
    let mut out: Vec<(String, ResultTable)> = r
        .distributions
        .iter()
        .map(|(p, d)| {
            (
                format!("{prefix}_p{p}_distribution"),
                ResultTable::Distribution(d.clone()),
            )
        })
        .collect();
    if !r.series.is_empty() {
        out.push((format!("{prefix}_series"), r.series_table()));
    }
    out
}

fn run(cli: Cli) -> Result<()> {
    if cli.list_presets {
        println!("{}", preset_names().join("\n"));
        return Ok(());
    }
    let flags = cli.overrides()?;
    let merged = match &cli.config {
        Some(path) => flags.or(ConfigOverrides::from_file(path)?),
        None => flags,
    };
    let formats = merged
        .formats
        .clone()
        .unwrap_or_else(|| vec![OutputFormat::Csv]);
    let out = merged.out.clone();
    if out.is_none() && formats.contains(&OutputFormat::Svg) {
        return Err(Error::Config("svg output requires --out".into()));
    }

    if let Some(name) = merged.preset.clone() {
        let mut p = preset(&name)?;
        if let Some(steps) = merged.steps {
            p = p.with_steps(steps);
        }
        let results = run_preset(&p)?;
        match out {
            Some(dir) => {
                for path in write_preset(p.name, &results, &dir, &formats)? {
                    eprintln!("wrote {}", path.display());
                }
            }
            None => {
                let tables: Vec<_> = results
                    .iter()
                    .flat_map(|(label, r)| tables_of(&format!("{}_{label}", p.name), r))
                    .collect();
                print_tables(&tables)?;
            }
        }
        return Ok(());
    }

    let config = merged.into_config()?;
    let result = run_experiment(&config)?;
    let prefix = format!("{}_t{}", config.scheme, config.steps);
    match &config.out {
        Some(dir) => {
            for path in write_result(&prefix, &result, dir, &config.formats)? {
                eprintln!("wrote {}", path.display());
            }
        }
        None => print_tables(&tables_of(&prefix, &result))?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
