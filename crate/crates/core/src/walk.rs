//! Coins, shifts, initial states and single-step evolution.
//!
//! Each scheme is described as a [`StepProgram`]: an ordered list of stages,
//! each stage being coin and shift factors applied left to right. The Grover
//! walk has one stage `S_(x,y)·(G⊗1)`, the alternate walk two stages
//! `S_(x,0)·(B⊗1)` then `S_(0,y)·(B⊗1)`, and the Pauli walk two coin-free
//! stages `S_σ3` then `S_σ1`. Noise can be scheduled after every stage
//! (per axis) or after the whole program (per step).
//!
//! The operator form is authoritative. [`step_pure_iterative`] implements the
//! amplitude recurrences derived from it. For the Grover walk the `C` term of
//! the `B` recurrence reads from `(x+1, y−1)`, like the other three terms, as
//! the shift structure requires.
//!
//! Shifts wrap periodically on the `L × L` torus, so every operator here is
//! exactly unitary on the finite space. A walk started at the origin never
//! reaches the boundary within its step budget, so the wrap is never
//! exercised by physical evolutions.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::space::HilbertSpec;
use crate::state::{DensityOperator, PureState};
use crate::CMatrix;

const UNITARY_TOL: f64 = 1e-12;

fn c64(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Unitary operator on the coin space.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinOperator {
    matrix: CMatrix,
}

impl CoinOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidArgument("coin matrix must be square".into()));
        }
        let err = linalg::unitarity_error(&matrix);
        if err > UNITARY_TOL {
            return Err(Error::InvalidArgument(format!(
                "coin matrix is not unitary (error {err:e})"
            )));
        }
        Ok(CoinOperator { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &CoinOperator) -> Result<CoinOperator> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(CoinOperator {
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn identity(dim: usize) -> CoinOperator {
        CoinOperator {
            matrix: CMatrix::identity(dim, dim),
        }
    }
}

/// Real rotation coin `[[cos θ, sin θ], [sin θ, −cos θ]]`. Hermitian and
/// unitary, hence self-inverse; `θ = π/4` is the Hadamard coin.
pub fn rotation_coin(theta: f64) -> CoinOperator {
    let (s, c) = theta.sin_cos();
    CoinOperator {
        matrix: CMatrix::from_row_slice(2, 2, &[c64(c), c64(s), c64(s), c64(-c)]),
    }
}

/// Grover diffusion coin `½(J − 2·1)` on four states.
pub fn grover_coin() -> CoinOperator {
    CoinOperator {
        matrix: CMatrix::from_fn(4, 4, |i, j| c64(if i == j { -0.5 } else { 0.5 })),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Grover,
    Alternate,
    Pauli,
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SchemeKind::Grover => "grover",
            SchemeKind::Alternate => "alternate",
            SchemeKind::Pauli => "pauli",
        })
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grover" => Ok(SchemeKind::Grover),
            "alternate" => Ok(SchemeKind::Alternate),
            "pauli" => Ok(SchemeKind::Pauli),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

/// One of the three walk schemes together with its coin parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkScheme {
    kind: SchemeKind,
    theta: Option<f64>,
}

impl WalkScheme {
    pub fn grover() -> Self {
        WalkScheme {
            kind: SchemeKind::Grover,
            theta: None,
        }
    }

    /// Alternate walk with rotation coin `B(θ)`; `θ = π/4` reproduces the
    /// Grover distribution.
    pub fn alternate(theta: f64) -> Self {
        WalkScheme {
            kind: SchemeKind::Alternate,
            theta: Some(theta),
        }
    }

    pub fn hadamard_alternate() -> Self {
        Self::alternate(FRAC_PI_4)
    }

    pub fn pauli() -> Self {
        WalkScheme {
            kind: SchemeKind::Pauli,
            theta: None,
        }
    }

    /// Scheme of the given kind with the default coin parameter.
    pub fn from_kind(kind: SchemeKind) -> Self {
        match kind {
            SchemeKind::Grover => Self::grover(),
            SchemeKind::Alternate => Self::hadamard_alternate(),
            SchemeKind::Pauli => Self::pauli(),
        }
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn theta(&self) -> Option<f64> {
        self.theta
    }

    pub fn coin_dim(&self) -> usize {
        match self.kind {
            SchemeKind::Grover => 4,
            _ => 2,
        }
    }

    pub fn is_two_state(&self) -> bool {
        self.coin_dim() == 2
    }

    pub fn program(&self) -> StepProgram {
        match self.kind {
            SchemeKind::Grover => StepProgram::new(
                4,
                vec![Stage::new(vec![
                    Factor::Coin(grover_coin()),
                    Factor::Shift(ShiftOperator::diagonal()),
                ])],
            ),
            SchemeKind::Alternate => {
                let b = rotation_coin(self.theta.unwrap_or(FRAC_PI_4));
                StepProgram::new(
                    2,
                    vec![
                        Stage::new(vec![
                            Factor::Coin(b.clone()),
                            Factor::Shift(ShiftOperator::along_x()),
                        ]),
                        Stage::new(vec![
                            Factor::Coin(b),
                            Factor::Shift(ShiftOperator::along_y()),
                        ]),
                    ],
                )
            }
            SchemeKind::Pauli => StepProgram::new(
                2,
                vec![
                    Stage::new(vec![Factor::Shift(ShiftOperator::along_x())]),
                    Stage::new(vec![Factor::Shift(ShiftOperator::sigma1_y())]),
                ],
            ),
        }
    }
}

/// Initial coin state placed at the origin.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCoinState {
    /// `½(|0⟩ − |1⟩ − |2⟩ + |3⟩)`, the only four-state input that spreads.
    GroverSymmetric,
    /// `cos(δ/2)|0⟩ + e^{iη} sin(δ/2)|1⟩`.
    TwoState { delta: f64, eta: f64 },
    /// Arbitrary normalized coin vector.
    Custom(Vec<Complex64>),
}

impl InitialCoinState {
    /// `(|0⟩ + i|1⟩)/√2`.
    pub fn two_state_symmetric() -> Self {
        InitialCoinState::TwoState {
            delta: FRAC_PI_2,
            eta: FRAC_PI_2,
        }
    }

    /// Input under which all three schemes share one distribution.
    pub fn default_for(scheme: &WalkScheme) -> Self {
        if scheme.is_two_state() {
            Self::two_state_symmetric()
        } else {
            InitialCoinState::GroverSymmetric
        }
    }

    pub fn amplitudes(&self) -> Vec<Complex64> {
        match self {
            InitialCoinState::GroverSymmetric => vec![c64(0.5), c64(-0.5), c64(-0.5), c64(0.5)],
            InitialCoinState::TwoState { delta, eta } => {
                let (s, c) = (delta / 2.0).sin_cos();
                // exact values for the symmetric input
                if *delta == FRAC_PI_2 && *eta == FRAC_PI_2 {
                    return vec![c64(FRAC_1_SQRT_2), Complex64::new(0.0, FRAC_1_SQRT_2)];
                }
                vec![c64(c), Complex64::from_polar(s, *eta)]
            }
            InitialCoinState::Custom(v) => v.clone(),
        }
    }
}

/// `coin ⊗ |ψ_{0,0}⟩` on a lattice sized for `steps` steps.
pub fn initial_state(
    scheme: &WalkScheme,
    coin: &InitialCoinState,
    steps: usize,
) -> Result<PureState> {
    let amps = coin.amplitudes();
    if amps.len() != scheme.coin_dim() {
        return Err(Error::DimensionMismatch {
            expected: scheme.coin_dim(),
            found: amps.len(),
        });
    }
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "initial coin state has norm² {norm}"
        )));
    }
    let spec = HilbertSpec::new(scheme.coin_dim(), steps)?;
    let mut v = vec![Complex64::new(0.0, 0.0); spec.dim()];
    for (c, a) in amps.into_iter().enumerate() {
        v[spec.index_unchecked(c, 0, 0)] = a;
    }
    PureState::new(spec, v)
}

/// Coin-space projector selecting which states a shift branch moves.
#[derive(Debug, Clone, PartialEq)]
pub enum Projector {
    /// `|c⟩⟨c|`
    Basis(usize),
    General(CMatrix),
}

impl Projector {
    fn to_matrix(&self, dim: usize) -> CMatrix {
        match self {
            Projector::Basis(c) => CMatrix::from_fn(dim, dim, |i, j| {
                c64(if i == *c && j == *c { 1.0 } else { 0.0 })
            }),
            Projector::General(m) => m.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftBranch {
    pub projector: Projector,
    pub dx: i64,
    pub dy: i64,
}

/// Conditional shift `Σ_b P_b ⊗ T_{(dx_b, dy_b)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOperator {
    branches: Vec<ShiftBranch>,
}

impl ShiftOperator {
    pub fn new(branches: Vec<ShiftBranch>) -> Self {
        ShiftOperator { branches }
    }

    pub fn branches(&self) -> &[ShiftBranch] {
        &self.branches
    }

    fn basis(moves: &[(i64, i64)]) -> Self {
        ShiftOperator {
            branches: moves
                .iter()
                .enumerate()
                .map(|(c, &(dx, dy))| ShiftBranch {
                    projector: Projector::Basis(c),
                    dx,
                    dy,
                })
                .collect(),
        }
    }

    /// `S_(x,y)`: |0⟩ → (−1,−1), |1⟩ → (−1,+1), |2⟩ → (+1,−1), |3⟩ → (+1,+1).
    pub fn diagonal() -> Self {
        Self::basis(&[(-1, -1), (-1, 1), (1, -1), (1, 1)])
    }

    /// `S_(x,0)`, also `S_σ3`: |0⟩ → x−1, |1⟩ → x+1.
    pub fn along_x() -> Self {
        Self::basis(&[(-1, 0), (1, 0)])
    }

    /// `S_(0,y)`: |0⟩ → y−1, |1⟩ → y+1.
    pub fn along_y() -> Self {
        Self::basis(&[(0, -1), (0, 1)])
    }

    /// `S_σ1`: |+⟩ → y−1, |−⟩ → y+1.
    pub fn sigma1_y() -> Self {
        let h = c64(0.5);
        let plus = CMatrix::from_row_slice(2, 2, &[h, h, h, h]);
        let minus = CMatrix::from_row_slice(2, 2, &[h, -h, -h, h]);
        ShiftOperator {
            branches: vec![
                ShiftBranch {
                    projector: Projector::General(plus),
                    dx: 0,
                    dy: -1,
                },
                ShiftBranch {
                    projector: Projector::General(minus),
                    dx: 0,
                    dy: 1,
                },
            ],
        }
    }

    /// `(F⊗1) S (F⊗1)†`: same displacements, projectors rotated by `F`.
    pub fn conjugated(&self, f: &CoinOperator) -> Self {
        let dim = f.dim();
        ShiftOperator {
            branches: self
                .branches
                .iter()
                .map(|b| ShiftBranch {
                    projector: Projector::General(
                        f.matrix() * b.projector.to_matrix(dim) * f.matrix().adjoint(),
                    ),
                    dx: b.dx,
                    dy: b.dy,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    Coin(CoinOperator),
    Shift(ShiftOperator),
}

/// Factors applied left to right; noise may follow a stage.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    factors: Vec<Factor>,
}

impl Stage {
    pub fn new(factors: Vec<Factor>) -> Self {
        Stage { factors }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }
}

/// Operator-form description of one walk step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepProgram {
    coin_dim: usize,
    stages: Vec<Stage>,
}

impl StepProgram {
    pub fn new(coin_dim: usize, stages: Vec<Stage>) -> Self {
        StepProgram { coin_dim, stages }
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn stages_mut(&mut self) -> &mut Vec<Stage> {
        &mut self.stages
    }

    fn check(&self, spec: &HilbertSpec) -> Result<()> {
        if spec.coin_dim() != self.coin_dim {
            return Err(Error::DimensionMismatch {
                expected: self.coin_dim,
                found: spec.coin_dim(),
            });
        }
        Ok(())
    }

    /// One full step on a pure state.
    pub fn apply_pure(&self, state: &PureState) -> Result<PureState> {
        self.check(state.spec())?;
        let spec = *state.spec();
        let mut v = state.amplitudes().to_vec();
        let mut scratch = vec![Complex64::new(0.0, 0.0); v.len()];
        for stage in &self.stages {
            apply_stage(&spec, stage, &mut v, &mut scratch);
        }
        Ok(PureState::from_raw(spec, v))
    }

    /// Dense matrix of one full step, built from Kronecker products.
    pub fn matrix(&self, spec: &HilbertSpec) -> Result<CMatrix> {
        self.check(spec)?;
        let d = spec.dim();
        let mut u = CMatrix::identity(d, d);
        for stage in &self.stages {
            for f in stage.factors() {
                u = factor_matrix(spec, f) * u;
            }
        }
        Ok(u)
    }
}

fn lattice_shift_matrix(l: usize, d: i64) -> CMatrix {
    let mut m = CMatrix::zeros(l, l);
    for i in 0..l {
        let j = (i as i64 + d).rem_euclid(l as i64) as usize;
        m[(j, i)] = c64(1.0);
    }
    m
}

fn factor_matrix(spec: &HilbertSpec, f: &Factor) -> CMatrix {
    let l = spec.extent();
    match f {
        Factor::Coin(c) => c.matrix().kronecker(&CMatrix::identity(l * l, l * l)),
        Factor::Shift(s) => {
            let d = spec.dim();
            let mut m = CMatrix::zeros(d, d);
            for b in s.branches() {
                let lattice =
                    lattice_shift_matrix(l, b.dx).kronecker(&lattice_shift_matrix(l, b.dy));
                m += b.projector.to_matrix(spec.coin_dim()).kronecker(&lattice);
            }
            m
        }
    }
}

fn apply_coin(spec: &HilbertSpec, coin: &CMatrix, v: &[Complex64], out: &mut [Complex64]) {
    let n = spec.sites();
    let dim = spec.coin_dim();
    for c in 0..dim {
        let dst = &mut out[c * n..(c + 1) * n];
        dst.fill(Complex64::new(0.0, 0.0));
        for k in 0..dim {
            let w = coin[(c, k)];
            if w.re == 0.0 && w.im == 0.0 {
                continue;
            }
            for (o, a) in dst.iter_mut().zip(&v[k * n..(k + 1) * n]) {
                *o += w * a;
            }
        }
    }
}

#[allow(clippy::needless_range_loop)]
fn apply_shift(spec: &HilbertSpec, shift: &ShiftOperator, v: &[Complex64], out: &mut [Complex64]) {
    let l = spec.extent();
    let n = spec.sites();
    let dim = spec.coin_dim();
    out.fill(Complex64::new(0.0, 0.0));
    for b in shift.branches() {
        let tx: Vec<usize> = (0..l)
            .map(|i| (i as i64 + b.dx).rem_euclid(l as i64) as usize)
            .collect();
        let ty: Vec<usize> = (0..l)
            .map(|i| (i as i64 + b.dy).rem_euclid(l as i64) as usize)
            .collect();
        match &b.projector {
            Projector::Basis(c) => {
                let off = c * n;
                for ix in 0..l {
                    for iy in 0..l {
                        out[off + tx[ix] * l + ty[iy]] += v[off + ix * l + iy];
                    }
                }
            }
            Projector::General(p) => {
                for ix in 0..l {
                    for iy in 0..l {
                        let src = ix * l + iy;
                        let dst = tx[ix] * l + ty[iy];
                        for c in 0..dim {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for k in 0..dim {
                                acc += p[(c, k)] * v[k * n + src];
                            }
                            out[c * n + dst] += acc;
                        }
                    }
                }
            }
        }
    }
}

/// Applies the stage to `v` in place.
pub(crate) fn apply_stage(
    spec: &HilbertSpec,
    stage: &Stage,
    v: &mut Vec<Complex64>,
    scratch: &mut Vec<Complex64>,
) {
    for f in stage.factors() {
        match f {
            Factor::Coin(c) => apply_coin(spec, c.matrix(), v, scratch),
            Factor::Shift(s) => apply_shift(spec, s, v, scratch),
        }
        std::mem::swap(v, scratch);
    }
}

/// `M ← U M` for every column of `M`.
fn apply_stage_to_columns(spec: &HilbertSpec, stage: &Stage, m: &mut CMatrix) {
    let d = spec.dim();
    m.as_mut_slice().par_chunks_mut(d).for_each(|col| {
        let mut v = col.to_vec();
        let mut scratch = vec![Complex64::new(0.0, 0.0); d];
        apply_stage(spec, stage, &mut v, &mut scratch);
        col.copy_from_slice(&v);
    });
}

/// `ρ ← U ρ U†` for the stage unitary `U`.
pub(crate) fn conjugate_stage(spec: &HilbertSpec, stage: &Stage, rho: &mut CMatrix) {
    apply_stage_to_columns(spec, stage, rho);
    let mut t = rho.adjoint();
    apply_stage_to_columns(spec, stage, &mut t);
    *rho = t.adjoint();
}

/// One step in operator form: the reference implementation.
pub fn step_pure_operator(scheme: &WalkScheme, state: &PureState) -> Result<PureState> {
    scheme.program().apply_pure(state)
}

/// Dense unitary of one full step on `spec`.
pub fn step_unitary_matrix(scheme: &WalkScheme, spec: &HilbertSpec) -> Result<CMatrix> {
    scheme.program().matrix(spec)
}

/// Noiseless step of a density operator, `ρ ← U ρ U†`.
pub fn step_density(scheme: &WalkScheme, rho: &DensityOperator) -> Result<DensityOperator> {
    let program = scheme.program();
    program.check(rho.spec())?;
    let mut out = rho.clone();
    for stage in program.stages() {
        conjugate_stage(rho.spec(), stage, out.matrix_mut());
    }
    Ok(out)
}

/// One step via the amplitude recurrences.
pub fn step_pure_iterative(scheme: &WalkScheme, state: &PureState) -> Result<PureState> {
    let spec = *state.spec();
    if spec.coin_dim() != scheme.coin_dim() {
        return Err(Error::DimensionMismatch {
            expected: scheme.coin_dim(),
            found: spec.coin_dim(),
        });
    }
    let l = spec.extent() as i64;
    let n = spec.sites();
    let v = state.amplitudes();
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    let at = |c: usize, ix: i64, iy: i64| -> Complex64 {
        v[c * n + (ix.rem_euclid(l) * l + iy.rem_euclid(l)) as usize]
    };
    let half = 0.5;
    for ix in 0..l {
        for iy in 0..l {
            let site = (ix * l + iy) as usize;
            match scheme.kind() {
                SchemeKind::Grover => {
                    let g = |sx: i64, sy: i64| {
                        let (a, b, c, d) =
                            (at(0, sx, sy), at(1, sx, sy), at(2, sx, sy), at(3, sx, sy));
                        (a, b, c, d)
                    };
                    let (a, b, c, d) = g(ix + 1, iy + 1);
                    out[site] = (-a + b + c + d) * half;
                    let (a, b, c, d) = g(ix + 1, iy - 1);
                    out[n + site] = (a - b + c + d) * half;
                    let (a, b, c, d) = g(ix - 1, iy + 1);
                    out[2 * n + site] = (a + b - c + d) * half;
                    let (a, b, c, d) = g(ix - 1, iy - 1);
                    out[3 * n + site] = (a + b + c - d) * half;
                }
                SchemeKind::Alternate => {
                    let (s, c) = scheme.theta().unwrap_or(FRAC_PI_4).sin_cos();
                    let a_pp = at(0, ix + 1, iy + 1);
                    let b_pp = at(1, ix + 1, iy + 1);
                    let a_mp = at(0, ix - 1, iy + 1);
                    let b_mp = at(1, ix - 1, iy + 1);
                    let a_pm = at(0, ix + 1, iy - 1);
                    let b_pm = at(1, ix + 1, iy - 1);
                    let a_mm = at(0, ix - 1, iy - 1);
                    let b_mm = at(1, ix - 1, iy - 1);
                    out[site] = (a_pp * c + b_pp * s) * c + (a_mp * s - b_mp * c) * s;
                    out[n + site] = (a_pm * c + b_pm * s) * s - (a_mm * s - b_mm * c) * c;
                }
                SchemeKind::Pauli => {
                    let a_pp = at(0, ix + 1, iy + 1);
                    let b_mp = at(1, ix - 1, iy + 1);
                    let a_pm = at(0, ix + 1, iy - 1);
                    let b_mm = at(1, ix - 1, iy - 1);
                    out[site] = (a_pp + b_mp + a_pm - b_mm) * half;
                    out[n + site] = (a_pp + b_mp - a_pm + b_mm) * half;
                }
            }
        }
    }
    Ok(PureState::from_raw(spec, out))
}

/// Evolves the scheme's input for `steps` steps; returns the state after
/// every step, starting with the input.
pub fn pure_trajectory(
    scheme: &WalkScheme,
    coin: &InitialCoinState,
    steps: usize,
) -> Result<Vec<PureState>> {
    let mut states = Vec::with_capacity(steps + 1);
    let mut psi = initial_state(scheme, coin, steps)?;
    for _ in 0..steps {
        let next = step_pure_iterative(scheme, &psi)?;
        states.push(psi);
        psi = next;
    }
    states.push(psi);
    Ok(states)
}

/// Final state after `steps` noiseless steps.
pub fn evolve_pure(
    scheme: &WalkScheme,
    coin: &InitialCoinState,
    steps: usize,
) -> Result<PureState> {
    let mut psi = initial_state(scheme, coin, steps)?;
    for _ in 0..steps {
        psi = step_pure_iterative(scheme, &psi)?;
    }
    Ok(psi)
}

/// Pure evolution of an arbitrary step program from a given input.
pub fn evolve_program(program: &StepProgram, input: &PureState, steps: usize) -> Result<PureState> {
    let mut psi = input.clone();
    for _ in 0..steps {
        psi = program.apply_pure(&psi)?;
    }
    Ok(psi)
}
