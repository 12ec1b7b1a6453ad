//! Flip-absorption symmetries of the two-state walks and their breakdown for
//! the four-state walk.
//!
//! A deterministic flip `σ` applied after every step can be moved into the
//! next step's operators. For the two-state walks the resulting evolution
//! differs from the noiseless one only by a relabeling of coin states, so a
//! bit- or phase-flip channel at `p = 1` reproduces the noiseless
//! distribution, and the same walk can be written noiselessly with the
//! absorbed coin `σ·B`. Here the flip is folded into a coin (flip-into-coin);
//! the equivalent flip-into-shift factoring swaps the projectors of the
//! following shift instead.
//!
//! A permutation channel on the Grover coin at `p = 1` is a uniform mixture
//! of `k` different flips, which no single relabeling can absorb, so the
//! state loses purity and the distribution departs from the noiseless one.
//! A single deterministic flip `f` can still be absorbed, provided the shift
//! is relabeled as well: `f·S·G = (f S f†)·(f G)`.

use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::noise::{
    permutation_flip_set, sigma1, sigma3, ChannelSchedule, KrausSet, NoiseKind, NoiseSpec,
    NoisyWalk,
};
use crate::state::Distribution;
use crate::walk::{
    evolve_program, grover_coin, initial_state, rotation_coin, CoinOperator, Factor,
    InitialCoinState, SchemeKind, ShiftOperator, Stage, StepProgram, WalkScheme,
};

/// Tolerance for distribution equality in symmetry checks.
pub const EQUIVALENCE_TOL: f64 = 1e-10;
/// Minimum deviation that counts as a broken symmetry.
pub const BREAKDOWN_GAP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipKind {
    /// `σ₁`
    Bit,
    /// `σ₃`
    Phase,
}

impl FlipKind {
    pub fn operator(&self) -> CoinOperator {
        match self {
            FlipKind::Bit => sigma1(),
            FlipKind::Phase => sigma3(),
        }
    }
}

/// A two-state coin with a deterministic flip folded in: `result = flip · base`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorbedCoin {
    base: CoinOperator,
    flip: FlipKind,
    result: CoinOperator,
}

impl AbsorbedCoin {
    pub fn base(&self) -> &CoinOperator {
        &self.base
    }

    pub fn flip(&self) -> FlipKind {
        self.flip
    }

    pub fn result(&self) -> &CoinOperator {
        &self.result
    }
}

fn absorb(coin: &CoinOperator, flip: FlipKind) -> Result<AbsorbedCoin> {
    if coin.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: coin.dim(),
        });
    }
    Ok(AbsorbedCoin {
        base: coin.clone(),
        flip,
        result: flip.operator().compose(coin)?,
    })
}

/// `σ₁ · coin`; the Hadamard coin becomes `[[1, −1], [1, 1]]/√2`.
pub fn absorb_bitflip(coin: &CoinOperator) -> Result<AbsorbedCoin> {
    absorb(coin, FlipKind::Bit)
}

/// `σ₃ · coin`; the Hadamard coin becomes `[[1, 1], [−1, 1]]/√2`.
pub fn absorb_phaseflip(coin: &CoinOperator) -> Result<AbsorbedCoin> {
    absorb(coin, FlipKind::Phase)
}

/// Distribution deviations of the two-state flip symmetries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    pub scheme: SchemeKind,
    pub steps: usize,
    /// Per-step bit-flip at `p = 1` against `p = 0`.
    pub bitflip_step: f64,
    /// Per-step phase-flip at `p = 1` against `p = 0`.
    pub phaseflip_step: f64,
    /// Per-axis bit-flip at `p′ = 1` against `p = 0`.
    pub bitflip_axis: f64,
    /// Noiseless walk with the bit-flip absorbed coin against its noisy counterpart.
    pub absorbed_bit: f64,
    /// Noiseless walk with the phase-flip absorbed coin against its noisy counterpart.
    pub absorbed_phase: f64,
}

impl SymmetryReport {
    pub fn max_deviation(&self) -> f64 {
        [
            self.bitflip_step,
            self.phaseflip_step,
            self.bitflip_axis,
            self.absorbed_bit,
            self.absorbed_phase,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passes(&self) -> bool {
        self.max_deviation() <= EQUIVALENCE_TOL
    }
}

fn density_run(walk: &NoisyWalk, scheme: &WalkScheme, steps: usize) -> Result<Distribution> {
    let coin = InitialCoinState::default_for(scheme);
    let rho = initial_state(scheme, &coin, steps)?.to_density();
    Ok(walk.evolve(rho, steps, |_, _| Ok(()))?.distribution())
}

fn flip_walk(scheme: &WalkScheme, flip: FlipKind, schedule: ChannelSchedule) -> Result<NoisyWalk> {
    let channel = KrausSet::uniform_mixture(2, vec![flip.operator()], 1.0)?;
    NoisyWalk::from_parts(scheme.program(), channel, schedule)
}

/// Step program of `scheme` with the flip absorbed into a coin at the start
/// of every step: the x-stage coin of the alternate walk becomes `σ·B`, and
/// the coin-free Pauli walk gains a leading coin `σ`.
pub fn absorbed_program(scheme: &WalkScheme, flip: FlipKind) -> Result<StepProgram> {
    match scheme.kind() {
        SchemeKind::Grover => Err(Error::InvalidArgument(
            "flip absorption into a two-state coin is undefined for the grover scheme".into(),
        )),
        SchemeKind::Alternate => {
            let b = rotation_coin(scheme.theta().unwrap_or(FRAC_PI_4));
            let absorbed = absorb(&b, flip)?;
            Ok(StepProgram::new(
                2,
                vec![
                    Stage::new(vec![
                        Factor::Coin(absorbed.result().clone()),
                        Factor::Shift(ShiftOperator::along_x()),
                    ]),
                    Stage::new(vec![
                        Factor::Coin(b),
                        Factor::Shift(ShiftOperator::along_y()),
                    ]),
                ],
            ))
        }
        SchemeKind::Pauli => {
            let mut program = scheme.program();
            program.stages_mut()[0] = Stage::new(vec![
                Factor::Coin(flip.operator()),
                Factor::Shift(ShiftOperator::along_x()),
            ]);
            Ok(program)
        }
    }
}

/// Runs the flip-symmetry checks for a two-state scheme over `steps` steps.
pub fn verify_twostate_symmetry(scheme: &WalkScheme, steps: usize) -> Result<SymmetryReport> {
    if !scheme.is_two_state() {
        return Err(Error::InvalidArgument(format!(
            "flip symmetry is only defined for two-state schemes, got {}",
            scheme.kind()
        )));
    }
    let coin = InitialCoinState::default_for(scheme);
    let input = initial_state(scheme, &coin, steps)?;
    let clean = evolve_program(&scheme.program(), &input, steps)?.distribution();

    let bit_step = density_run(
        &flip_walk(scheme, FlipKind::Bit, ChannelSchedule::PerStep)?,
        scheme,
        steps,
    )?;
    let phase_step = density_run(
        &flip_walk(scheme, FlipKind::Phase, ChannelSchedule::PerStep)?,
        scheme,
        steps,
    )?;
    let axis = NoisyWalk::new(
        scheme,
        &NoiseSpec::new(NoiseKind::BitflipPerAxis, 2.0, None)?,
    )?;
    let bit_axis = density_run(&axis, scheme, steps)?;

    let absorbed_bit =
        evolve_program(&absorbed_program(scheme, FlipKind::Bit)?, &input, steps)?.distribution();
    let absorbed_phase =
        evolve_program(&absorbed_program(scheme, FlipKind::Phase)?, &input, steps)?.distribution();

    Ok(SymmetryReport {
        scheme: scheme.kind(),
        steps,
        bitflip_step: bit_step.max_abs_diff(&clean)?,
        phaseflip_step: phase_step.max_abs_diff(&clean)?,
        bitflip_axis: bit_axis.max_abs_diff(&clean)?,
        absorbed_bit: absorbed_bit.max_abs_diff(&bit_step)?,
        absorbed_phase: absorbed_phase.max_abs_diff(&phase_step)?,
    })
}

/// Grover state-flip channel at `p = 1` against the noiseless walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakdownReport {
    pub k: usize,
    pub steps: usize,
    /// Max distribution deviation from `p = 0`.
    pub deviation: f64,
    /// `tr(ρ²)` at `p = 1`.
    pub purity: f64,
}

impl BreakdownReport {
    pub fn passes(&self) -> bool {
        self.deviation > BREAKDOWN_GAP && self.purity < 1.0 - 1e-6
    }
}

/// Runs the Grover walk with the `k`-flip channel at `p` and `p = 0`.
pub fn grover_flip_deviation(k: usize, p: f64, steps: usize) -> Result<BreakdownReport> {
    let scheme = WalkScheme::grover();
    let coin = InitialCoinState::GroverSymmetric;
    let input = initial_state(&scheme, &coin, steps)?;
    let clean = evolve_program(&scheme.program(), &input, steps)?.distribution();
    let walk = NoisyWalk::new(&scheme, &NoiseSpec::new(NoiseKind::Stateflip4, p, Some(k))?)?;
    let noisy = walk.evolve(input.to_density(), steps, |_, _| Ok(()))?;
    Ok(BreakdownReport {
        k,
        steps,
        deviation: noisy.distribution().max_abs_diff(&clean)?,
        purity: noisy.purity(),
    })
}

/// The `k`-flip channel at `p = 1` fails to reproduce the noiseless walk.
pub fn verify_grover_breakdown(k: usize, steps: usize) -> Result<BreakdownReport> {
    permutation_flip_set(k)?;
    grover_flip_deviation(k, 1.0, steps)
}

/// A single deterministic flip after each Grover step against its absorbed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorptionReport {
    pub steps: usize,
    /// Noisy walk against the coin `f·G` with relabeled shift `f S f†`.
    pub deviation: f64,
    /// Noisy walk against the coin `f·G` with the unmodified shift.
    pub unrelabeled_deviation: f64,
}

impl AbsorptionReport {
    pub fn passes(&self) -> bool {
        self.deviation <= EQUIVALENCE_TOL
    }
}

/// Compares the Grover walk with flip `flip` applied at `p = 1` after each step
/// against the noiseless walk with `flip` absorbed into the coin.
pub fn single_flip_absorption_check(flip: &CoinOperator, steps: usize) -> Result<AbsorptionReport> {
    if flip.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: flip.dim(),
        });
    }
    let scheme = WalkScheme::grover();
    let input = initial_state(&scheme, &InitialCoinState::GroverSymmetric, steps)?;
    let channel = KrausSet::uniform_mixture(4, vec![flip.clone()], 1.0)?;
    let noisy = NoisyWalk::from_parts(scheme.program(), channel, ChannelSchedule::PerStep)?
        .evolve(input.to_density(), steps, |_, _| Ok(()))?
        .distribution();

    let coin = flip.compose(&grover_coin())?;
    let relabeled = StepProgram::new(
        4,
        vec![Stage::new(vec![
            Factor::Coin(coin.clone()),
            Factor::Shift(ShiftOperator::diagonal().conjugated(flip)),
        ])],
    );
    let plain = StepProgram::new(
        4,
        vec![Stage::new(vec![
            Factor::Coin(coin),
            Factor::Shift(ShiftOperator::diagonal()),
        ])],
    );
    let absorbed = evolve_program(&relabeled, &input, steps)?.distribution();
    let naive = evolve_program(&plain, &input, steps)?.distribution();
    Ok(AbsorptionReport {
        steps,
        deviation: noisy.max_abs_diff(&absorbed)?,
        unrelabeled_deviation: noisy.max_abs_diff(&naive)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::cyclic_flip;
    use crate::CMatrix;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> CMatrix {
        let r = FRAC_1_SQRT_2;
        CMatrix::from_row_slice(
            2,
            2,
            &[a * r, b * r, c * r, d * r].map(|v| Complex64::new(v, 0.0)),
        )
    }

    fn close(a: &CMatrix, b: &CMatrix) -> bool {
        a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() < 1e-15)
    }

    #[test]
    fn absorbed_hadamard_coins() {
        let h = rotation_coin(FRAC_PI_4);
        let bit = absorb_bitflip(&h).unwrap();
        assert!(close(bit.result().matrix(), &m2(1.0, -1.0, 1.0, 1.0)));
        let phase = absorb_phaseflip(&h).unwrap();
        assert!(close(phase.result().matrix(), &m2(1.0, 1.0, -1.0, 1.0)));
        let twice = absorb_bitflip(bit.result()).unwrap();
        assert!(close(twice.result().matrix(), h.matrix()));
        let twice = absorb_phaseflip(phase.result()).unwrap();
        assert!(close(twice.result().matrix(), h.matrix()));
        assert!(absorb_bitflip(&grover_coin()).is_err());
    }

    #[test]
    fn two_state_symmetry_small() {
        for scheme in [WalkScheme::hadamard_alternate(), WalkScheme::pauli()] {
            for t in [0, 1, 4] {
                let r = verify_twostate_symmetry(&scheme, t).unwrap();
                assert!(r.passes(), "{r:?}");
            }
        }
        assert!(verify_twostate_symmetry(&WalkScheme::grover(), 2).is_err());
    }

    #[test]
    fn grover_breakdown_small() {
        let r = verify_grover_breakdown(23, 4).unwrap();
        assert!(r.purity < 1.0 - 1e-6);
        let r0 = grover_flip_deviation(3, 0.0, 4).unwrap();
        assert_eq!(r0.deviation, 0.0);
        assert!((r0.purity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_flip_absorption() {
        let r = single_flip_absorption_check(&cyclic_flip(), 5).unwrap();
        assert!(r.passes(), "{r:?}");
        assert!(r.unrelabeled_deviation > 0.01);
        let id = single_flip_absorption_check(&CoinOperator::identity(4), 3).unwrap();
        assert!(id.passes());
        assert!(single_flip_absorption_check(&cyclic_flip(), 0)
            .unwrap()
            .passes());
    }
}
