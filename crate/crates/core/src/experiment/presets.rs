//! Figure presets at desk scale.
//!
//! Distributions that only need the pure-state path keep the original step
//! count. Noisy distributions and every correlation series run on density
//! operators, whose dimension grows as `t⁴`, so those presets use fewer
//! steps; each preset records both numbers.

use rayon::prelude::*;

use super::{run_experiment, ExperimentConfig, ExperimentResult, Measure, NoiseFamily};
use crate::error::{Error, Result};
use crate::walk::SchemeKind;

/// Step count of correlation presets.
const SERIES_STEPS: usize = 8;
/// Step count of noisy distribution presets.
const NOISY_DISTRIBUTION_STEPS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct PresetRun {
    pub label: String,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    /// Steps in the original figure, where stated.
    pub original_steps: Option<usize>,
    pub steps: usize,
    pub runs: Vec<PresetRun>,
}

impl Preset {
    /// Same preset with every run shortened or lengthened to `steps`.
    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        for r in &mut self.runs {
            r.config.steps = steps;
        }
        self
    }
}

const NAMES: [&str; 16] = [
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11",
    "fig12", "fig13", "fig14", "fig15", "fig16",
];

pub fn preset_names() -> &'static [&'static str] {
    &NAMES
}

fn run(
    label: &str,
    scheme: SchemeKind,
    noise: NoiseFamily,
    ps: &[f64],
    k: usize,
    measures: &[Measure],
    steps: usize,
) -> PresetRun {
    PresetRun {
        label: label.to_string(),
        config: ExperimentConfig {
            scheme,
            noise,
            ps: ps.to_vec(),
            k,
            measures: measures.to_vec(),
            steps,
            ..ExperimentConfig::default()
        },
    }
}

fn two_state(noise: NoiseFamily, ps: &[f64], measures: &[Measure], steps: usize) -> Vec<PresetRun> {
    vec![
        run(
            "alternate",
            SchemeKind::Alternate,
            noise,
            ps,
            3,
            measures,
            steps,
        ),
        run("pauli", SchemeKind::Pauli, noise, ps, 3, measures, steps),
    ]
}

const SWEEP: [f64; 4] = [0.0, 0.1, 0.3, 0.9];
const AXIS_SWEEP: [f64; 4] = [0.0, 0.2, 0.6, 1.0];

pub fn preset(name: &str) -> Result<Preset> {
    use Measure::*;
    use NoiseFamily as N;
    use SchemeKind::*;
    let s = SERIES_STEPS;
    let nd = NOISY_DISTRIBUTION_STEPS;
    let (description, original_steps, steps, runs) = match name {
        "fig1" => (
            "noiseless Grover distribution",
            Some(25),
            25,
            vec![run(
                "grover",
                Grover,
                N::None,
                &[0.0],
                3,
                &[Distribution],
                25,
            )],
        ),
        "fig2" => (
            "noiseless coin-lattice and x-y MID for all schemes",
            None,
            s,
            vec![
                run("grover", Grover, N::None, &[0.0], 3, &[MidPp, MidXy], s),
                run(
                    "alternate",
                    Alternate,
                    N::None,
                    &[0.0],
                    3,
                    &[MidPp, MidXy],
                    s,
                ),
                run("pauli", Pauli, N::None, &[0.0], 3, &[MidPp, MidXy], s),
            ],
        ),
        "fig3" => (
            "Grover distribution under the 23-flip channel at p = 0.1 and 0.9",
            Some(15),
            nd,
            vec![run(
                "grover",
                Grover,
                N::Stateflip,
                &[0.1, 0.9],
                23,
                &[Distribution],
                nd,
            )],
        ),
        "fig4" => (
            "Grover MID under the 23-flip channel",
            None,
            s,
            vec![run(
                "grover",
                Grover,
                N::Stateflip,
                &SWEEP,
                23,
                &[MidPp, MidXy],
                s,
            )],
        ),
        "fig5" => (
            "two-state distributions with bit-flips after each axis, p/2 = 0.05 and 0.45",
            Some(25),
            nd,
            two_state(N::BitflipAxis, &[0.1, 0.9], &[Distribution], nd),
        ),
        "fig6" => (
            "two-state coin-lattice MID with bit-flips after each axis",
            None,
            s,
            two_state(N::BitflipAxis, &AXIS_SWEEP, &[MidPp], s),
        ),
        "fig7" => (
            "two-state x-y MID with bit-flips after each axis",
            None,
            s,
            two_state(N::BitflipAxis, &AXIS_SWEEP, &[MidXy], s),
        ),
        "fig8" => (
            "two-state coin-lattice MID with bit-flips after each step",
            None,
            s,
            two_state(N::BitflipStep, &SWEEP, &[MidPp], s),
        ),
        "fig9" => (
            "two-state x-y MID with bit-flips after each step",
            None,
            s,
            two_state(N::BitflipStep, &SWEEP, &[MidXy], s),
        ),
        "fig10" => (
            "Grover x-y MID for 3-, 6- and 23-flip channels at p = 0.1",
            None,
            6,
            [3, 6, 23]
                .iter()
                .map(|&k| {
                    run(
                        &format!("grover_k{k}"),
                        Grover,
                        N::Stateflip,
                        &[0.1],
                        k,
                        &[MidXy],
                        6,
                    )
                })
                .collect(),
        ),
        "fig11" => (
            "depolarized distributions at p = 0.1",
            Some(15),
            nd,
            vec![
                run(
                    "grover",
                    Grover,
                    N::Depolarizing,
                    &[0.1],
                    3,
                    &[Distribution],
                    nd,
                ),
                run(
                    "alternate",
                    Alternate,
                    N::Depolarizing,
                    &[0.1],
                    3,
                    &[Distribution],
                    nd,
                ),
            ],
        ),
        "fig12" => (
            "Grover MID under depolarizing noise",
            None,
            s,
            vec![run(
                "grover",
                Grover,
                N::Depolarizing,
                &SWEEP,
                3,
                &[MidPp, MidXy],
                s,
            )],
        ),
        "fig13" => (
            "two-state coin-lattice MID under depolarizing noise",
            None,
            s,
            two_state(N::Depolarizing, &SWEEP, &[MidPp], s),
        ),
        "fig14" => (
            "two-state x-y MID under depolarizing noise",
            None,
            s,
            two_state(N::Depolarizing, &SWEEP, &[MidXy], s),
        ),
        "fig15" => (
            "x-y MID relative to the noiseless walk under flip noise at p = 0.2",
            None,
            s,
            vec![
                run("grover", Grover, N::Stateflip, &[0.2], 3, &[Robustness], s),
                run(
                    "alternate",
                    Alternate,
                    N::BitflipStep,
                    &[0.2],
                    3,
                    &[Robustness],
                    s,
                ),
                run("pauli", Pauli, N::BitflipStep, &[0.2], 3, &[Robustness], s),
            ],
        ),
        "fig16" => (
            "x-y MID relative to the noiseless walk under depolarizing noise at p = 0.2",
            None,
            s,
            vec![
                run(
                    "grover",
                    Grover,
                    N::Depolarizing,
                    &[0.2],
                    3,
                    &[Robustness],
                    s,
                ),
                run(
                    "alternate",
                    Alternate,
                    N::Depolarizing,
                    &[0.2],
                    3,
                    &[Robustness],
                    s,
                ),
                run("pauli", Pauli, N::Depolarizing, &[0.2], 3, &[Robustness], s),
            ],
        ),
        other => {
            return Err(Error::Config(format!(
                "unknown preset '{other}' (expected one of {})",
                NAMES.join(", ")
            )))
        }
    };
    let name = NAMES.iter().find(|n| **n == name).expect("matched above");
    Ok(Preset {
        name,
        description,
        original_steps,
        steps,
        runs,
    })
}

/// Runs all runs of a preset in parallel, returned in preset order.
pub fn run_preset(preset: &Preset) -> Result<Vec<(String, ExperimentResult)>> {
    preset
        .runs
        .par_iter()
        .map(|r| run_experiment(&r.config).map(|res| (r.label.clone(), res)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_is_valid() {
        for name in preset_names() {
            let p = preset(name).unwrap();
            assert_eq!(p.name, *name);
            assert!(!p.runs.is_empty());
            for r in &p.runs {
                r.config.validate().unwrap();
                assert_eq!(r.config.steps, p.steps);
            }
        }
        assert!(matches!(preset("fig17"), Err(Error::Config(_))));
    }

    #[test]
    fn fig1_row_count() {
        let p = preset("fig1").unwrap();
        let out = run_preset(&p).unwrap();
        let d = &out[0].1.distributions[0].1;
        assert_eq!(d.iter().count(), 51 * 51);
        assert!((d.total() - 1.0).abs() < 1e-10);
    }
}
