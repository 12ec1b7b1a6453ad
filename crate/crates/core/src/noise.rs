//! Coin-space noise channels and noisy density evolution.
//!
//! Every channel is a random-unitary map `ρ ↦ Σ_i w_i (F_i⊗1) ρ (F_i⊗1)†`
//! acting on the coin factor only, and is applied after the shift it follows.
//! Internally a channel is folded into its `c² × c²` coin superoperator and
//! applied block by block, so the cost is independent of the number of Kraus
//! terms.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::state::DensityOperator;
use crate::walk::{conjugate_stage, CoinOperator, SchemeKind, StepProgram, WalkScheme};
use crate::CMatrix;

const WEIGHT_TOL: f64 = 1e-12;

fn c64(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Pauli `σ₁`.
pub fn sigma1() -> CoinOperator {
    CoinOperator::new(CMatrix::from_row_slice(
        2,
        2,
        &[c64(0.0), c64(1.0), c64(1.0), c64(0.0)],
    ))
    .expect("unitary")
}

/// Pauli `σ₂`.
pub fn sigma2() -> CoinOperator {
    let i = Complex64::new(0.0, 1.0);
    CoinOperator::new(CMatrix::from_row_slice(2, 2, &[c64(0.0), -i, i, c64(0.0)])).expect("unitary")
}

/// Pauli `σ₃`.
pub fn sigma3() -> CoinOperator {
    CoinOperator::new(CMatrix::from_row_slice(
        2,
        2,
        &[c64(1.0), c64(0.0), c64(0.0), c64(-1.0)],
    ))
    .expect("unitary")
}

/// Permutation matrix with `|i⟩ ↦ |image[i]⟩`.
pub fn permutation_matrix(image: &[usize]) -> CoinOperator {
    let n = image.len();
    let mut m = CMatrix::zeros(n, n);
    for (i, &j) in image.iter().enumerate() {
        m[(j, i)] = c64(1.0);
    }
    CoinOperator::new(m).expect("permutation matrices are unitary")
}

/// The 4-cycle `f` with `|1⟩ ↦ |0⟩ ↦ |3⟩ ↦ |2⟩ ↦ |1⟩`, i.e. first row `(0,1,0,0)`.
pub fn cyclic_flip() -> CoinOperator {
    permutation_matrix(&[3, 0, 1, 2])
}

fn powers(base: &CoinOperator, n: usize) -> Vec<CoinOperator> {
    let mut out = Vec::with_capacity(n);
    let mut acc = base.clone();
    for _ in 0..n {
        out.push(acc.clone());
        acc = base.compose(&acc).expect("same dimension");
    }
    out
}

/// Lexicographic successor of a permutation tuple, or `None` after the last.
fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Permutation flips on four basis states.
///
/// * `k = 3`: `f, f², f³` for the 4-cycle [`cyclic_flip`].
/// * `k = 6`: the transpositions `(01), (02), (03), (12), (13), (23)`.
/// * `k = 23`: every non-identity permutation, in lexicographic order of the
///   image tuple `(π(0), π(1), π(2), π(3))`.
pub fn permutation_flip_set(k: usize) -> Result<Vec<CoinOperator>> {
    match k {
        3 => Ok(powers(&cyclic_flip(), 3)),
        6 => Ok([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
            .iter()
            .map(|&(a, b)| {
                let mut image = [0, 1, 2, 3];
                image.swap(a, b);
                permutation_matrix(&image)
            })
            .collect()),
        23 => {
            let mut p = [0usize, 1, 2, 3];
            let mut out = Vec::with_capacity(23);
            while next_permutation(&mut p) {
                out.push(permutation_matrix(&p));
            }
            Ok(out)
        }
        other => Err(Error::InvalidArgument(format!(
            "flip set size must be 3, 6 or 23, got {other}"
        ))),
    }
}

/// Cyclic phase flips `r, r², r³` with `r = diag(1, i, −1, −i)`.
pub fn cyclic_phase_set() -> Vec<CoinOperator> {
    let r = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c64(1.0),
        Complex64::new(0.0, 1.0),
        c64(-1.0),
        Complex64::new(0.0, -1.0),
    ]));
    powers(
        &CoinOperator::new(r).expect("diagonal phases are unitary"),
        3,
    )
}

/// One weighted unitary of a random-unitary channel.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausTerm {
    pub weight: f64,
    pub coin_op: CoinOperator,
}

/// Random-unitary channel on the coin, including its identity term.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    coin_dim: usize,
    terms: Vec<KrausTerm>,
}

impl KrausSet {
    /// Validates weights (nonnegative, summing to one) and dimensions.
    /// Zero-weight terms are dropped.
    pub fn new(coin_dim: usize, terms: Vec<KrausTerm>) -> Result<Self> {
        let mut total = 0.0;
        for t in &terms {
            if t.coin_op.dim() != coin_dim {
                return Err(Error::DimensionMismatch {
                    expected: coin_dim,
                    found: t.coin_op.dim(),
                });
            }
            if !(0.0..=1.0 + WEIGHT_TOL).contains(&t.weight) {
                return Err(Error::InvalidArgument(format!(
                    "Kraus weight {} outside [0, 1]",
                    t.weight
                )));
            }
            total += t.weight;
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidArgument(format!(
                "Kraus weights sum to {total}, expected 1"
            )));
        }
        Ok(KrausSet {
            coin_dim,
            terms: terms.into_iter().filter(|t| t.weight > 0.0).collect(),
        })
    }

    pub fn identity(coin_dim: usize) -> Self {
        KrausSet {
            coin_dim,
            terms: vec![KrausTerm {
                weight: 1.0,
                coin_op: CoinOperator::identity(coin_dim),
            }],
        }
    }

    /// `p/n` on each of `ops`, `1 − p` on the identity.
    pub fn uniform_mixture(coin_dim: usize, ops: Vec<CoinOperator>, p: f64) -> Result<Self> {
        let share = if ops.is_empty() {
            0.0
        } else {
            p / ops.len() as f64
        };
        let mut terms = vec![KrausTerm {
            weight: 1.0 - p,
            coin_op: CoinOperator::identity(coin_dim),
        }];
        terms.extend(ops.into_iter().map(|coin_op| KrausTerm {
            weight: share,
            coin_op,
        }));
        KrausSet::new(coin_dim, terms)
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    pub fn terms(&self) -> &[KrausTerm] {
        &self.terms
    }

    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].coin_op == CoinOperator::identity(self.coin_dim)
    }

    /// Coin superoperator `T[(a,b),(a',b')] = Σ_i w_i F_i[a,a'] conj(F_i[b,b'])`,
    /// listed as nonzero `(a, b, a', b', T)` entries in index order.
    fn superoperator(&self) -> Vec<(usize, usize, usize, usize, Complex64)> {
        let c = self.coin_dim;
        let mut out = Vec::new();
        for a in 0..c {
            for b in 0..c {
                for a2 in 0..c {
                    for b2 in 0..c {
                        let mut t = Complex64::new(0.0, 0.0);
                        for term in &self.terms {
                            let f = term.coin_op.matrix();
                            t += f[(a, a2)] * f[(b, b2)].conj() * term.weight;
                        }
                        if t.norm() > 0.0 {
                            out.push((a, b, a2, b2, t));
                        }
                    }
                }
            }
        }
        out
    }
}

/// The noise families available to experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    None,
    /// `σ₁` with weight `p/2` after each axis; `p ∈ [0, 2]`.
    BitflipPerAxis,
    /// `σ₁` with weight `p` after each full step.
    BitflipPerStep,
    /// Permutation flips on the Grover coin, `p/k` each.
    Stateflip4,
    /// `σ₁, σ₂, σ₃` with weight `p/3` each.
    Depolarizing2,
    /// Cyclic flips, cyclic phases and their products, `p/15` each.
    Depolarizing4,
}

impl std::fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NoiseKind::None => "none",
            NoiseKind::BitflipPerAxis => "bitflip-axis",
            NoiseKind::BitflipPerStep => "bitflip-step",
            NoiseKind::Stateflip4 => "stateflip",
            NoiseKind::Depolarizing2 => "depolarizing2",
            NoiseKind::Depolarizing4 => "depolarizing4",
        })
    }
}

/// When a channel is applied during a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelSchedule {
    /// After every axis stage (two-state schemes only).
    PerAxis,
    /// Once, after the full step.
    PerStep,
}

/// A noise family with its level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    kind: NoiseKind,
    p: f64,
    k: Option<usize>,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, p: f64, k: Option<usize>) -> Result<Self> {
        let max = if kind == NoiseKind::BitflipPerAxis {
            2.0
        } else {
            1.0
        };
        if !(0.0..=max).contains(&p) || p.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "noise level {p} outside [0, {max}] for {kind}"
            )));
        }
        let k = match kind {
            NoiseKind::Stateflip4 => {
                let k = k.unwrap_or(3);
                if ![3, 6, 23].contains(&k) {
                    return Err(Error::InvalidArgument(format!(
                        "flip set size must be 3, 6 or 23, got {k}"
                    )));
                }
                Some(k)
            }
            _ => None,
        };
        Ok(NoiseSpec { kind, p, k })
    }

    pub fn none() -> Self {
        NoiseSpec {
            kind: NoiseKind::None,
            p: 0.0,
            k: None,
        }
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn k(&self) -> Option<usize> {
        self.k
    }

    /// The schedule this noise family is defined with.
    pub fn schedule(&self) -> ChannelSchedule {
        match self.kind {
            NoiseKind::BitflipPerAxis => ChannelSchedule::PerAxis,
            _ => ChannelSchedule::PerStep,
        }
    }

    /// Same family at another level.
    pub fn with_p(&self, p: f64) -> Result<Self> {
        NoiseSpec::new(self.kind, p, self.k)
    }

    /// Coin dimension the family acts on; `None` for the noiseless case.
    pub fn coin_dim(&self) -> Option<usize> {
        match self.kind {
            NoiseKind::None => None,
            NoiseKind::BitflipPerAxis | NoiseKind::BitflipPerStep | NoiseKind::Depolarizing2 => {
                Some(2)
            }
            NoiseKind::Stateflip4 | NoiseKind::Depolarizing4 => Some(4),
        }
    }
}

/// Kraus set applied at each application point of the schedule.
pub fn build_channel(noise: &NoiseSpec, coin_dim: usize) -> Result<KrausSet> {
    if let Some(d) = noise.coin_dim() {
        if d != coin_dim {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: coin_dim,
            });
        }
    }
    let p = noise.p();
    match noise.kind() {
        NoiseKind::None => Ok(KrausSet::identity(coin_dim)),
        NoiseKind::BitflipPerAxis => KrausSet::uniform_mixture(2, vec![sigma1()], p / 2.0),
        NoiseKind::BitflipPerStep => KrausSet::uniform_mixture(2, vec![sigma1()], p),
        NoiseKind::Depolarizing2 => {
            KrausSet::uniform_mixture(2, vec![sigma1(), sigma2(), sigma3()], p)
        }
        NoiseKind::Stateflip4 => {
            KrausSet::uniform_mixture(4, permutation_flip_set(noise.k().unwrap_or(3))?, p)
        }
        NoiseKind::Depolarizing4 => {
            let flips = permutation_flip_set(3)?;
            let phases = cyclic_phase_set();
            let mut ops: Vec<CoinOperator> = flips.clone();
            ops.extend(phases.iter().cloned());
            for r in &phases {
                for f in &flips {
                    ops.push(r.compose(f)?);
                }
            }
            KrausSet::uniform_mixture(4, ops, p)
        }
    }
}

/// `ρ ← Σ_i w_i (F_i⊗1) ρ (F_i⊗1)†` in place on a coin-major matrix.
pub(crate) fn apply_channel_matrix(coin_dim: usize, channel: &KrausSet, rho: &mut CMatrix) {
    if channel.is_identity() {
        return;
    }
    let d = rho.nrows();
    let n = d / coin_dim;
    let sup = channel.superoperator();
    let src = rho.as_slice();
    let mut out = CMatrix::zeros(d, d);
    out.as_mut_slice()
        .par_chunks_mut(d)
        .enumerate()
        .for_each(|(col, dst)| {
            let b = col / n;
            let jj = col % n;
            for &(a, bb, a2, b2, t) in &sup {
                if bb != b {
                    continue;
                }
                let src_col = &src[(b2 * n + jj) * d + a2 * n..(b2 * n + jj) * d + (a2 + 1) * n];
                for (o, s) in dst[a * n..(a + 1) * n].iter_mut().zip(src_col) {
                    *o += t * s;
                }
            }
        });
    *rho = out;
}

/// Applies a coin channel to a walk density operator.
pub fn apply_channel(rho: &DensityOperator, channel: &KrausSet) -> Result<DensityOperator> {
    if rho.spec().coin_dim() != channel.coin_dim() {
        return Err(Error::DimensionMismatch {
            expected: channel.coin_dim(),
            found: rho.spec().coin_dim(),
        });
    }
    let mut out = rho.clone();
    apply_channel_matrix(channel.coin_dim(), channel, out.matrix_mut());
    Ok(out)
}

fn check_schedule(scheme: &WalkScheme, noise: &NoiseSpec, schedule: ChannelSchedule) -> Result<()> {
    if schedule == ChannelSchedule::PerAxis && scheme.kind() == SchemeKind::Grover {
        return Err(Error::InvalidArgument(
            "per-axis noise schedule is undefined for the grover scheme".into(),
        ));
    }
    if noise.kind() != NoiseKind::None && schedule != noise.schedule() {
        return Err(Error::InvalidArgument(format!(
            "noise '{}' cannot be scheduled {}",
            noise.kind(),
            match schedule {
                ChannelSchedule::PerAxis => "per axis",
                ChannelSchedule::PerStep => "per step",
            }
        )));
    }
    Ok(())
}

/// A step program paired with a channel and the points where it acts.
#[derive(Debug, Clone)]
pub struct NoisyWalk {
    program: StepProgram,
    channel: KrausSet,
    schedule: ChannelSchedule,
}

impl NoisyWalk {
    pub fn new(scheme: &WalkScheme, noise: &NoiseSpec) -> Result<Self> {
        Self::with_schedule(scheme, noise, noise.schedule())
    }

    pub fn with_schedule(
        scheme: &WalkScheme,
        noise: &NoiseSpec,
        schedule: ChannelSchedule,
    ) -> Result<Self> {
        check_schedule(scheme, noise, schedule)?;
        Ok(NoisyWalk {
            program: scheme.program(),
            channel: build_channel(noise, scheme.coin_dim())?,
            schedule,
        })
    }

    /// Arbitrary program and channel, e.g. absorbed-coin variants.
    pub fn from_parts(
        program: StepProgram,
        channel: KrausSet,
        schedule: ChannelSchedule,
    ) -> Result<Self> {
        if program.coin_dim() != channel.coin_dim() {
            return Err(Error::DimensionMismatch {
                expected: program.coin_dim(),
                found: channel.coin_dim(),
            });
        }
        Ok(NoisyWalk {
            program,
            channel,
            schedule,
        })
    }

    pub fn program(&self) -> &StepProgram {
        &self.program
    }

    pub fn channel(&self) -> &KrausSet {
        &self.channel
    }

    /// One step: each stage conjugates `ρ`, followed by the channel where
    /// the schedule places it.
    pub fn step(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.spec().coin_dim() != self.program.coin_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.program.coin_dim(),
                found: rho.spec().coin_dim(),
            });
        }
        let spec = *rho.spec();
        let mut out = rho.clone();
        let last = self.program.stages().len().saturating_sub(1);
        for (i, stage) in self.program.stages().iter().enumerate() {
            conjugate_stage(&spec, stage, out.matrix_mut());
            if self.schedule == ChannelSchedule::PerAxis || i == last {
                apply_channel_matrix(spec.coin_dim(), &self.channel, out.matrix_mut());
            }
        }
        Ok(out)
    }

    /// Runs `steps` steps from `initial`, calling `visit(s, ρ(s))` for
    /// `s = 0..=steps`, and returns the final state.
    pub fn evolve<F>(
        &self,
        initial: DensityOperator,
        steps: usize,
        mut visit: F,
    ) -> Result<DensityOperator>
    where
        F: FnMut(usize, &DensityOperator) -> Result<()>,
    {
        let mut rho = initial;
        visit(0, &rho)?;
        for s in 1..=steps {
            rho = self.step(&rho)?;
            visit(s, &rho)?;
        }
        Ok(rho)
    }
}

/// One noisy step of `scheme`.
pub fn noisy_step(
    scheme: &WalkScheme,
    rho: &DensityOperator,
    noise: &NoiseSpec,
    schedule: ChannelSchedule,
) -> Result<DensityOperator> {
    NoisyWalk::with_schedule(scheme, noise, schedule)?.step(rho)
}

/// Final density operator after `steps` noisy steps from the scheme's
/// default input.
pub fn evolve_density(
    scheme: &WalkScheme,
    noise: &NoiseSpec,
    steps: usize,
) -> Result<DensityOperator> {
    let walk = NoisyWalk::new(scheme, noise)?;
    let coin = crate::walk::InitialCoinState::default_for(scheme);
    let rho = crate::walk::initial_state(scheme, &coin, steps)?.to_density();
    walk.evolve(rho, steps, |_, _| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::space::HilbertSpec;
    use crate::state::PureState;
    use crate::walk::{initial_state, step_unitary_matrix, InitialCoinState};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn eye(n: usize) -> CMatrix {
        CMatrix::identity(n, n)
    }

    fn random_density(spec: HilbertSpec, rank: usize, rng: &mut ChaCha8Rng) -> DensityOperator {
        let d = spec.dim();
        let a = CMatrix::from_fn(d, rank, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let mut m = &a * a.adjoint();
        let tr = linalg::trace(&m).re;
        m /= c64(tr);
        DensityOperator::from_raw(spec, m)
    }

    /// Literal `Σ w (F⊗1) ρ (F⊗1)†` with dense Kronecker products.
    fn kraus_oracle(rho: &DensityOperator, set: &KrausSet) -> CMatrix {
        let n = rho.spec().sites();
        let d = rho.spec().dim();
        let mut out = CMatrix::zeros(d, d);
        for t in set.terms() {
            let f = t.coin_op.matrix().kronecker(&eye(n));
            out += (&f * rho.matrix() * f.adjoint()) * c64(t.weight);
        }
        out
    }

    #[test]
    fn flip_sets() {
        let f = cyclic_flip();
        assert_eq!(f.matrix()[(0, 1)], c64(1.0));
        assert_eq!(f.matrix()[(1, 2)], c64(1.0));
        assert_eq!(f.matrix()[(3, 0)], c64(1.0));
        let f4 = powers(&f, 4).pop().unwrap();
        assert_eq!(f4.matrix(), &eye(4));

        let s3 = permutation_flip_set(3).unwrap();
        assert_eq!(s3.len(), 3);
        assert_eq!(s3[0], f);

        let s6 = permutation_flip_set(6).unwrap();
        assert_eq!(s6.len(), 6);
        for m in &s6 {
            assert_eq!(m.compose(m).unwrap().matrix(), &eye(4));
        }
        // first transposition swaps |0⟩ and |1⟩
        assert_eq!(s6[0].matrix()[(0, 1)], c64(1.0));
        assert_eq!(s6[5].matrix()[(2, 3)], c64(1.0));

        let s23 = permutation_flip_set(23).unwrap();
        assert_eq!(s23.len(), 23);
        for (i, m) in s23.iter().enumerate() {
            assert_ne!(m.matrix(), &eye(4));
            let inv = CoinOperator::new(m.matrix().adjoint()).unwrap();
            assert!(s23.contains(&inv));
            assert!(!s23[..i].contains(m));
        }
        // lexicographic: first is (0,1,3,2), last is (3,2,1,0)
        assert_eq!(s23[0], permutation_matrix(&[0, 1, 3, 2]));
        assert_eq!(s23[22], permutation_matrix(&[3, 2, 1, 0]));

        assert!(permutation_flip_set(4).is_err());
    }

    #[test]
    fn phase_set() {
        let r = cyclic_phase_set();
        let i = Complex64::new(0.0, 1.0);
        let diag: Vec<Complex64> = (0..4).map(|k| r[0].matrix()[(k, k)]).collect();
        assert_eq!(diag, vec![c64(1.0), i, c64(-1.0), -i]);
        let diag2: Vec<Complex64> = (0..4).map(|k| r[1].matrix()[(k, k)]).collect();
        for (a, b) in diag2.iter().zip([1.0, -1.0, 1.0, -1.0]) {
            assert!((a - c64(b)).norm() < 1e-15);
        }
        let r4 = r[2].compose(&r[0]).unwrap();
        assert!(linalg::max_abs_diff(r4.matrix(), &eye(4)) < 1e-15);
    }

    #[test]
    fn channel_weights() {
        let cases = [
            (
                NoiseSpec::new(NoiseKind::BitflipPerStep, 0.3, None).unwrap(),
                2,
                2,
            ),
            (
                NoiseSpec::new(NoiseKind::BitflipPerAxis, 1.4, None).unwrap(),
                2,
                2,
            ),
            (
                NoiseSpec::new(NoiseKind::Depolarizing2, 0.3, None).unwrap(),
                2,
                4,
            ),
            (
                NoiseSpec::new(NoiseKind::Stateflip4, 0.3, Some(23)).unwrap(),
                4,
                24,
            ),
            (
                NoiseSpec::new(NoiseKind::Depolarizing4, 0.3, None).unwrap(),
                4,
                16,
            ),
        ];
        for (noise, dim, n_terms) in cases {
            let ch = build_channel(&noise, dim).unwrap();
            assert_eq!(ch.terms().len(), n_terms, "{noise:?}");
            assert!((ch.total_weight() - 1.0).abs() < 1e-12);
        }
        let axis = build_channel(
            &NoiseSpec::new(NoiseKind::BitflipPerAxis, 1.4, None).unwrap(),
            2,
        )
        .unwrap();
        assert!((axis.terms()[1].weight - 0.7).abs() < 1e-15);

        let zero = build_channel(
            &NoiseSpec::new(NoiseKind::Stateflip4, 0.0, Some(3)).unwrap(),
            4,
        )
        .unwrap();
        assert!(zero.is_identity());
        assert!(build_channel(
            &NoiseSpec::new(NoiseKind::Stateflip4, 0.1, Some(3)).unwrap(),
            2
        )
        .is_err());
        assert!(NoiseSpec::new(NoiseKind::BitflipPerStep, 1.5, None).is_err());
        assert!(NoiseSpec::new(NoiseKind::BitflipPerAxis, 2.0, None).is_ok());
        assert!(NoiseSpec::new(NoiseKind::Stateflip4, 0.1, Some(5)).is_err());
    }

    #[test]
    fn superoperator_matches_kraus_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let noises = [
            (
                NoiseSpec::new(NoiseKind::BitflipPerStep, 0.37, None).unwrap(),
                2,
            ),
            (
                NoiseSpec::new(NoiseKind::Depolarizing2, 0.61, None).unwrap(),
                2,
            ),
            (
                NoiseSpec::new(NoiseKind::Stateflip4, 0.2, Some(6)).unwrap(),
                4,
            ),
            (
                NoiseSpec::new(NoiseKind::Stateflip4, 0.9, Some(23)).unwrap(),
                4,
            ),
            (
                NoiseSpec::new(NoiseKind::Depolarizing4, 0.5, None).unwrap(),
                4,
            ),
        ];
        for (noise, dim) in noises {
            let spec = HilbertSpec::new(dim, 1).unwrap();
            let rho = random_density(spec, 3, &mut rng);
            let ch = build_channel(&noise, dim).unwrap();
            let fast = apply_channel(&rho, &ch).unwrap();
            let oracle = kraus_oracle(&rho, &ch);
            assert!(
                linalg::max_abs_diff(fast.matrix(), &oracle) < 1e-14,
                "{noise:?}"
            );
            let inv = fast.invariants();
            assert!(inv.holds(), "{inv:?}");
            // coin-local maps leave the lattice marginal alone
            assert!(
                fast.distribution()
                    .max_abs_diff(&rho.distribution())
                    .unwrap()
                    < 1e-14
            );
        }
    }

    #[test]
    fn depolarizing_three_quarters_fully_mixes() {
        let spec = HilbertSpec::new(2, 0).unwrap();
        let psi = PureState::new(spec, vec![c64(0.6), Complex64::new(0.0, 0.8)]).unwrap();
        let ch = build_channel(
            &NoiseSpec::new(NoiseKind::Depolarizing2, 0.75, None).unwrap(),
            2,
        )
        .unwrap();
        let out = apply_channel(&psi.to_density(), &ch).unwrap();
        assert!(linalg::max_abs_diff(out.matrix(), &(eye(2) * c64(0.5))) < 1e-15);
    }

    #[test]
    fn deterministic_bitflip() {
        let spec = HilbertSpec::new(2, 0).unwrap();
        let psi = PureState::new(spec, vec![c64(1.0), c64(0.0)]).unwrap();
        let ch = build_channel(
            &NoiseSpec::new(NoiseKind::BitflipPerStep, 1.0, None).unwrap(),
            2,
        )
        .unwrap();
        let out = apply_channel(&psi.to_density(), &ch).unwrap();
        assert_eq!(out.matrix()[(1, 1)], c64(1.0));
        assert_eq!(out.matrix()[(0, 0)], c64(0.0));
    }

    #[test]
    fn depolarizing4_mixes_coin() {
        let spec = HilbertSpec::new(4, 0).unwrap();
        let psi = PureState::new(spec, vec![c64(0.5), c64(-0.5), c64(-0.5), c64(0.5)]).unwrap();
        let ch = build_channel(
            &NoiseSpec::new(NoiseKind::Depolarizing4, 1.0, None).unwrap(),
            4,
        )
        .unwrap();
        let out = apply_channel(&psi.to_density(), &ch).unwrap();
        let eig = linalg::hermitian_eigenvalues(out.matrix());
        let s = linalg::entropy_bits(eig, 1e-8).unwrap();
        assert!(s > 0.1, "entropy {s}");
    }

    #[test]
    fn zero_noise_is_unitary_conjugation() {
        let cases = [
            (
                WalkScheme::grover(),
                NoiseSpec::new(NoiseKind::Stateflip4, 0.0, Some(3)).unwrap(),
            ),
            (
                WalkScheme::hadamard_alternate(),
                NoiseSpec::new(NoiseKind::BitflipPerAxis, 0.0, None).unwrap(),
            ),
            (
                WalkScheme::pauli(),
                NoiseSpec::new(NoiseKind::Depolarizing2, 0.0, None).unwrap(),
            ),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (scheme, noise) in cases {
            let spec = HilbertSpec::new(scheme.coin_dim(), 2).unwrap();
            let rho = random_density(spec, 2, &mut rng);
            let u = step_unitary_matrix(&scheme, &spec).unwrap();
            let expected = &u * rho.matrix() * u.adjoint();
            let got = noisy_step(&scheme, &rho, &noise, noise.schedule()).unwrap();
            assert!(linalg::max_abs_diff(got.matrix(), &expected) < 1e-12);
        }
    }

    #[test]
    fn schedule_validation() {
        let spec = HilbertSpec::new(4, 1).unwrap();
        let rho = initial_state(&WalkScheme::grover(), &InitialCoinState::GroverSymmetric, 1)
            .unwrap()
            .to_density();
        let err = noisy_step(
            &WalkScheme::grover(),
            &rho,
            &NoiseSpec::none(),
            ChannelSchedule::PerAxis,
        );
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
        let depol = NoiseSpec::new(NoiseKind::Depolarizing2, 0.1, None).unwrap();
        assert!(
            NoisyWalk::with_schedule(&WalkScheme::pauli(), &depol, ChannelSchedule::PerAxis)
                .is_err()
        );
        let flip = NoiseSpec::new(NoiseKind::BitflipPerStep, 0.1, None).unwrap();
        assert!(NoisyWalk::new(&WalkScheme::grover(), &flip).is_err());
        assert_eq!(spec.coin_dim(), 4);
    }

    #[test]
    fn two_state_p1_matches_p0() {
        for scheme in [WalkScheme::hadamard_alternate(), WalkScheme::pauli()] {
            let clean = evolve_density(&scheme, &NoiseSpec::none(), 6)
                .unwrap()
                .distribution();
            let step = evolve_density(
                &scheme,
                &NoiseSpec::new(NoiseKind::BitflipPerStep, 1.0, None).unwrap(),
                6,
            )
            .unwrap()
            .distribution();
            let axis = evolve_density(
                &scheme,
                &NoiseSpec::new(NoiseKind::BitflipPerAxis, 2.0, None).unwrap(),
                6,
            )
            .unwrap()
            .distribution();
            assert!(clean.max_abs_diff(&step).unwrap() < 1e-10);
            assert!(clean.max_abs_diff(&axis).unwrap() < 1e-10);
        }
    }

    /// Classical walk on the diagonal lattice: each axis moves ±1 with
    /// probability ½, independently, enumerated over all 4ᵗ paths.
    fn diagonal_random_walk(t: usize) -> Vec<((i64, i64), f64)> {
        let mut out: Vec<((i64, i64), f64)> = Vec::new();
        for path in 0..4usize.pow(t as u32) {
            let (mut x, mut y) = (0i64, 0i64);
            let mut r = path;
            for _ in 0..t {
                let mv = r % 4;
                r /= 4;
                x += if mv & 1 == 0 { -1 } else { 1 };
                y += if mv & 2 == 0 { -1 } else { 1 };
            }
            let w = 0.25f64.powi(t as i32);
            match out.iter_mut().find(|(p, _)| *p == (x, y)) {
                Some(e) => e.1 += w,
                None => out.push(((x, y), w)),
            }
        }
        out
    }

    #[test]
    fn alternate_per_axis_half_is_classical() {
        let scheme = WalkScheme::hadamard_alternate();
        let noise = NoiseSpec::new(NoiseKind::BitflipPerAxis, 1.0, None).unwrap();
        for t in 1..=4 {
            let d = evolve_density(&scheme, &noise, t).unwrap().distribution();
            let oracle = diagonal_random_walk(t);
            let mut err: f64 = 0.0;
            for (x, y, p) in d.iter() {
                let q = oracle
                    .iter()
                    .find(|(s, _)| *s == (x, y))
                    .map_or(0.0, |e| e.1);
                err = err.max((p - q).abs());
            }
            assert!(err < 1e-12, "t={t} err={err}");
        }
    }

    #[test]
    fn pauli_per_axis_breaks_xy_symmetry() {
        let noise = NoiseSpec::new(NoiseKind::BitflipPerAxis, 0.9, None).unwrap();
        let pauli = evolve_density(&WalkScheme::pauli(), &noise, 5)
            .unwrap()
            .distribution();
        let alt = evolve_density(&WalkScheme::hadamard_alternate(), &noise, 5)
            .unwrap()
            .distribution();
        assert!(pauli.transpose_asymmetry() > 1e-3);
        assert!(alt.transpose_asymmetry() < 1e-10);
    }

    #[test]
    fn noisy_steps_preserve_invariants() {
        let noise = NoiseSpec::new(NoiseKind::Depolarizing4, 0.4, None).unwrap();
        let walk = NoisyWalk::new(&WalkScheme::grover(), &noise).unwrap();
        let rho = initial_state(&WalkScheme::grover(), &InitialCoinState::GroverSymmetric, 3)
            .unwrap()
            .to_density();
        walk.evolve(rho, 3, |_, r| {
            assert!(r.invariants().holds());
            Ok(())
        })
        .unwrap();
    }
}
