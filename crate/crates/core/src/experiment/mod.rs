//! Experiment configuration, sweeps over noise levels, figure presets and
//! CSV/SVG output.

mod config;
mod output;
mod presets;

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::correlations::{mid_pp, mid_xy, robustness_ratio};
use crate::error::{Error, Result};
use crate::noise::{NoiseKind, NoiseSpec, NoisyWalk};
use crate::state::{DensityOperator, Distribution};
use crate::walk::{initial_state, pure_trajectory, InitialCoinState, SchemeKind, WalkScheme};

pub use config::ConfigOverrides;
pub use output::{
    emit_csv, emit_svg, format_value, lines_from_rows, render_heatmap, render_lines, write_csv,
    write_preset, write_result, LineSeries, PlotKind,
};
pub use presets::{preset, preset_names, run_preset, Preset, PresetRun};

/// Quantity recorded by an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    /// Lattice distribution after the last step.
    Distribution,
    /// Coin–lattice MID at every step.
    MidPp,
    /// x–y MID at every step.
    MidXy,
    /// x–y MID relative to the noiseless walk at every step.
    Robustness,
}

impl Measure {
    pub fn name(&self) -> &'static str {
        match self {
            Measure::Distribution => "distribution",
            Measure::MidPp => "mid_pp",
            Measure::MidXy => "mid_xy",
            Measure::Robustness => "robustness",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distribution" => Ok(Measure::Distribution),
            "mid_pp" => Ok(Measure::MidPp),
            "mid_xy" => Ok(Measure::MidXy),
            "robustness" => Ok(Measure::Robustness),
            other => Err(Error::Config(format!("unknown measure '{other}'"))),
        }
    }
}

/// Noise family as selected on the command line; the depolarizing family
/// resolves to the two- or four-state channel by scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseFamily {
    None,
    BitflipAxis,
    BitflipStep,
    Stateflip,
    Depolarizing,
}

impl NoiseFamily {
    pub fn name(&self) -> &'static str {
        match self {
            NoiseFamily::None => "none",
            NoiseFamily::BitflipAxis => "bitflip-axis",
            NoiseFamily::BitflipStep => "bitflip-step",
            NoiseFamily::Stateflip => "stateflip",
            NoiseFamily::Depolarizing => "depolarizing",
        }
    }

    /// Channel kind for `scheme`, or a configuration error naming the pair.
    pub fn resolve(&self, scheme: SchemeKind) -> Result<NoiseKind> {
        let two_state = scheme != SchemeKind::Grover;
        let kind = match (self, two_state) {
            (NoiseFamily::None, _) => NoiseKind::None,
            (NoiseFamily::BitflipAxis, true) => NoiseKind::BitflipPerAxis,
            (NoiseFamily::BitflipStep, true) => NoiseKind::BitflipPerStep,
            (NoiseFamily::Stateflip, false) => NoiseKind::Stateflip4,
            (NoiseFamily::Depolarizing, true) => NoiseKind::Depolarizing2,
            (NoiseFamily::Depolarizing, false) => NoiseKind::Depolarizing4,
            _ => {
                return Err(Error::Config(format!(
                    "noise '{}' is not available for scheme '{scheme}'",
                    self.name()
                )))
            }
        };
        Ok(kind)
    }

    /// Largest legal noise level.
    pub fn max_p(&self) -> f64 {
        if *self == NoiseFamily::BitflipAxis {
            2.0
        } else {
            1.0
        }
    }
}

impl fmt::Display for NoiseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(NoiseFamily::None),
            "bitflip-axis" => Ok(NoiseFamily::BitflipAxis),
            "bitflip-step" => Ok(NoiseFamily::BitflipStep),
            "stateflip" => Ok(NoiseFamily::Stateflip),
            "depolarizing" => Ok(NoiseFamily::Depolarizing),
            other => Err(Error::Config(format!("unknown noise '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutputFormat {
    Csv,
    Svg,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }
}

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: SchemeKind,
    /// Rotation angle of the alternate walk's coin.
    pub theta: f64,
    pub steps: usize,
    pub noise: NoiseFamily,
    /// Noise levels; more than one makes a sweep.
    pub ps: Vec<f64>,
    /// Flip-set size for the state-flip channel.
    pub k: usize,
    pub measures: Vec<Measure>,
    /// Output directory; standard output when absent.
    pub out: Option<PathBuf>,
    pub formats: Vec<OutputFormat>,
    /// Accepted for reproducibility records; every computation is deterministic.
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scheme: SchemeKind::Grover,
            theta: FRAC_PI_4,
            steps: 10,
            noise: NoiseFamily::None,
            ps: vec![0.0],
            k: 3,
            measures: vec![Measure::Distribution],
            out: None,
            formats: vec![OutputFormat::Csv],
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.measures.is_empty() {
            return Err(Error::Config("at least one measure is required".into()));
        }
        if self.ps.is_empty() {
            return Err(Error::Config("at least one noise level is required".into()));
        }
        let kind = self.noise.resolve(self.scheme)?;
        for &p in &self.ps {
            if !(0.0..=self.noise.max_p()).contains(&p) {
                return Err(Error::Config(format!(
                    "noise level {p} outside [0, {}] for noise '{}'",
                    self.noise.max_p(),
                    self.noise
                )));
            }
        }
        if kind == NoiseKind::Stateflip4 && ![3, 6, 23].contains(&self.k) {
            return Err(Error::Config(format!(
                "k must be 3, 6 or 23, got {}",
                self.k
            )));
        }
        if !self.theta.is_finite() {
            return Err(Error::Config("theta must be finite".into()));
        }
        Ok(())
    }

    pub fn walk_scheme(&self) -> WalkScheme {
        match self.scheme {
            SchemeKind::Alternate => WalkScheme::alternate(self.theta),
            kind => WalkScheme::from_kind(kind),
        }
    }

    pub fn noise_spec(&self, p: f64) -> Result<NoiseSpec> {
        let kind = self.noise.resolve(self.scheme)?;
        if kind == NoiseKind::None {
            return Ok(NoiseSpec::none());
        }
        NoiseSpec::new(kind, p, Some(self.k)).map_err(|e| Error::Config(e.to_string()))
    }

    fn wants(&self, m: Measure) -> bool {
        self.measures.contains(&m)
    }

    fn wants_series(&self) -> bool {
        self.measures.iter().any(|m| *m != Measure::Distribution)
    }
}

/// One `(step, p, measure, value)` record; `value` is empty for a ratio
/// whose baseline vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub step: usize,
    pub p: f64,
    pub measure: Measure,
    pub value: Option<f64>,
}

/// A unit of output: one distribution, or a series of per-step values.
#[derive(Debug, Clone, PartialEq)]
pub enum ResultTable {
    Distribution(Distribution),
    Series(Vec<SeriesRow>),
}

/// All tables produced by one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    /// Final-step distribution per noise level, ordered by level.
    pub distributions: Vec<(f64, Distribution)>,
    /// Per-step series ordered by `(p, step)`.
    pub series: Vec<SeriesRow>,
}

impl ExperimentResult {
    pub fn series_table(&self) -> ResultTable {
        ResultTable::Series(self.series.clone())
    }

    /// Values of one measure at one noise level, indexed by step.
    pub fn values(&self, measure: Measure, p: f64) -> Vec<Option<f64>> {
        self.series
            .iter()
            .filter(|r| r.measure == measure && r.p == p)
            .map(|r| r.value)
            .collect()
    }
}

struct PointResult {
    distribution: Option<Distribution>,
    series: Vec<SeriesRow>,
}

#[derive(Default)]
struct StepValues {
    q_pp: Option<f64>,
    q_xy: Option<f64>,
}

fn correlations_of(config: &ExperimentConfig, rho: &DensityOperator) -> Result<StepValues> {
    let q_pp = if config.wants(Measure::MidPp) {
        Some(mid_pp(rho)?)
    } else {
        None
    };
    let q_xy = if config.wants(Measure::MidXy) || config.wants(Measure::Robustness) {
        Some(mid_xy(rho)?)
    } else {
        None
    };
    Ok(StepValues { q_pp, q_xy })
}

/// Evolves the walk at level `p`, collecting per-step values and the final
/// distribution. Noiseless runs use the pure-state path.
fn evolve_point(config: &ExperimentConfig, p: f64) -> Result<(Distribution, Vec<StepValues>)> {
    let scheme = config.walk_scheme();
    let noise = config.noise_spec(p)?;
    let coin = InitialCoinState::default_for(&scheme);
    let mut values = Vec::with_capacity(config.steps + 1);
    if noise.kind() == NoiseKind::None || p == 0.0 {
        let states = pure_trajectory(&scheme, &coin, config.steps)?;
        if config.wants_series() {
            for psi in &states {
                values.push(correlations_of(config, &psi.to_density())?);
            }
        }
        let last = states.last().expect("trajectory includes the input state");
        return Ok((last.distribution(), values));
    }
    let walk = NoisyWalk::new(&scheme, &noise).map_err(|e| Error::Config(e.to_string()))?;
    let rho = initial_state(&scheme, &coin, config.steps)?.to_density();
    let wants_series = config.wants_series();
    let last = walk.evolve(rho, config.steps, |_, r| {
        if wants_series {
            values.push(correlations_of(config, r)?);
        }
        Ok(())
    })?;
    let report = last.invariants();
    if !report.holds() {
        return Err(Error::InvalidState(format!(
            "final density operator violates invariants: {report:?}"
        )));
    }
    Ok((last.distribution(), values))
}

fn run_point(config: &ExperimentConfig, p: f64, baseline: Option<&[f64]>) -> Result<PointResult> {
    let (distribution, values) = evolve_point(config, p)?;
    let mut series = Vec::new();
    for (step, v) in values.iter().enumerate() {
        for &m in &config.measures {
            let value = match m {
                Measure::Distribution => continue,
                Measure::MidPp => v.q_pp,
                Measure::MidXy => v.q_xy,
                Measure::Robustness => {
                    let base = baseline.and_then(|b| b.get(step).copied()).unwrap_or(0.0);
                    v.q_xy.and_then(|q| robustness_ratio(q, base))
                }
            };
            series.push(SeriesRow {
                step,
                p,
                measure: m,
                value,
            });
        }
    }
    Ok(PointResult {
        distribution: config.wants(Measure::Distribution).then_some(distribution),
        series,
    })
}

/// Noiseless x–y MID per step, the robustness baseline.
fn noiseless_q_xy(config: &ExperimentConfig) -> Result<Vec<f64>> {
    let clean = ExperimentConfig {
        noise: NoiseFamily::None,
        ps: vec![0.0],
        measures: vec![Measure::MidXy],
        ..config.clone()
    };
    let (_, values) = evolve_point(&clean, 0.0)?;
    Ok(values.into_iter().map(|v| v.q_xy.unwrap_or(0.0)).collect())
}

fn assemble(config: &ExperimentConfig, points: Vec<PointResult>) -> ExperimentResult {
    let mut tagged: Vec<(f64, PointResult)> = config.ps.iter().copied().zip(points).collect();
    // stable, so duplicated levels keep one contiguous block each
    tagged.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut distributions = Vec::new();
    let mut series = Vec::new();
    for (p, point) in tagged {
        if let Some(d) = point.distribution {
            distributions.push((p, d));
        }
        series.extend(point.series);
    }
    ExperimentResult {
        distributions,
        series,
    }
}

/// Runs every noise level of `config` in parallel.
pub fn run_sweep(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let baseline = if config.wants(Measure::Robustness) {
        Some(noiseless_q_xy(config)?)
    } else {
        None
    };
    let points = config
        .ps
        .par_iter()
        .map(|&p| run_point(config, p, baseline.as_deref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(config, points))
}

/// Runs an experiment; several noise levels are handled as a sweep.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    if config.ps.len() > 1 {
        return run_sweep(config);
    }
    config.validate()?;
    let baseline = if config.wants(Measure::Robustness) {
        Some(noiseless_q_xy(config)?)
    } else {
        None
    };
    let point = run_point(config, config.ps[0], baseline.as_deref())?;
    Ok(assemble(config, vec![point]))
}
