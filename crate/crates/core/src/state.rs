//! State containers, lattice marginals and partial traces.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::space::{HilbertSpec, Subsystem};
use crate::CMatrix;

const NORM_TOL: f64 = 1e-12;
const SUBSYSTEM_TOL: f64 = 1e-10;

/// Pure walk state: one amplitude per `(coin, x, y)` in coin-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    spec: HilbertSpec,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wraps a normalized amplitude vector.
    pub fn new(spec: HilbertSpec, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != spec.dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.dim(),
                found: amplitudes.len(),
            });
        }
        let state = PureState { spec, amplitudes };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "state norm² is {norm}, expected 1"
            )));
        }
        Ok(state)
    }

    pub(crate) fn from_raw(spec: HilbertSpec, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), spec.dim());
        PureState { spec, amplitudes }
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, c: usize, x: i64, y: i64) -> Result<Complex64> {
        Ok(self.amplitudes[self.spec.index(c, x, y)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Lattice marginal `P(x, y) = Σ_c |ψ(c, x, y)|²`.
    pub fn distribution(&self) -> Distribution {
        let sites = self.spec.sites();
        let mut p = vec![0.0; sites];
        for block in self.amplitudes.chunks(sites) {
            for (acc, a) in p.iter_mut().zip(block) {
                *acc += a.norm_sqr();
            }
        }
        Distribution::from_raw(self.spec, p)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityOperator {
        let n = self.amplitudes.len();
        let m = DMatrix::from_fn(n, n, |i, j| self.amplitudes[i] * self.amplitudes[j].conj());
        DensityOperator::from_raw(self.spec, m)
    }
}

/// Free-function form of [`PureState::to_density`].
pub fn to_density(state: &PureState) -> DensityOperator {
    state.to_density()
}

/// Diagnostic numbers for the density-operator invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl InvariantReport {
    pub fn holds(&self) -> bool {
        self.trace_error <= 1e-12
            && self.hermiticity_error <= 1e-12
            && self.min_eigenvalue >= -1e-10
    }
}

/// Density operator on the full walk space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    spec: HilbertSpec,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Wraps a matrix after checking shape, Hermiticity and unit trace.
    /// Positivity is not checked here; see [`DensityOperator::invariants`].
    pub fn new(spec: HilbertSpec, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != spec.dim() || matrix.ncols() != spec.dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.dim(),
                found: matrix.nrows(),
            });
        }
        let herm = linalg::hermiticity_error(&matrix);
        if herm > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "matrix is not Hermitian (error {herm:e})"
            )));
        }
        let tr = linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        Ok(DensityOperator { spec, matrix })
    }

    pub(crate) fn from_raw(spec: HilbertSpec, matrix: CMatrix) -> Self {
        DensityOperator { spec, matrix }
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut CMatrix {
        &mut self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.matrix)
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ_ij |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Trace, Hermiticity and smallest-eigenvalue diagnostics.
    pub fn invariants(&self) -> InvariantReport {
        let tr = self.trace();
        let eig = linalg::hermitian_eigenvalues(&self.matrix);
        InvariantReport {
            trace_error: (tr - Complex64::new(1.0, 0.0)).norm(),
            hermiticity_error: linalg::hermiticity_error(&self.matrix),
            min_eigenvalue: eig.last().copied().unwrap_or(0.0),
        }
    }

    /// Lattice marginal `P(x, y) = Σ_c ⟨c,x,y|ρ|c,x,y⟩`.
    pub fn distribution(&self) -> Distribution {
        let sites = self.spec.sites();
        let mut p = vec![0.0; sites];
        for c in 0..self.spec.coin_dim() {
            for (s, acc) in p.iter_mut().enumerate() {
                let i = c * sites + s;
                *acc += self.matrix[(i, i)].re;
            }
        }
        Distribution::from_raw(self.spec, p)
    }

    /// View as an operator on labelled tensor factors `coin ⊗ x ⊗ y`.
    pub fn to_subsystem_state(&self) -> SubsystemState {
        SubsystemState {
            factors: self.spec.factors(),
            matrix: self.matrix.clone(),
        }
    }

    /// Reduced operator on the `keep` factors.
    pub fn partial_trace(&self, keep: &[Subsystem]) -> Result<SubsystemState> {
        partial_trace_matrix(&self.spec.factors(), &self.matrix, keep)
    }
}

/// States whose lattice marginal can be taken.
pub trait Marginal {
    fn marginal(&self) -> Distribution;
}

impl Marginal for PureState {
    fn marginal(&self) -> Distribution {
        self.distribution()
    }
}

impl Marginal for DensityOperator {
    fn marginal(&self) -> Distribution {
        self.distribution()
    }
}

pub fn marginal_distribution(state: &impl Marginal) -> Distribution {
    state.marginal()
}

/// Free-function form of [`DensityOperator::partial_trace`].
pub fn partial_trace(rho: &DensityOperator, keep: &[Subsystem]) -> Result<SubsystemState> {
    rho.partial_trace(keep)
}

/// Probability distribution over lattice sites, stored `[x][y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    spec: HilbertSpec,
    probabilities: Vec<f64>,
}

impl Distribution {
    pub(crate) fn from_raw(spec: HilbertSpec, probabilities: Vec<f64>) -> Self {
        debug_assert_eq!(probabilities.len(), spec.sites());
        Distribution {
            spec,
            probabilities,
        }
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    pub fn steps(&self) -> usize {
        self.spec.steps()
    }

    /// Row-major `L × L` probabilities, `x` slow.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn get(&self, x: i64, y: i64) -> Result<f64> {
        if !self.spec.contains(x, y) {
            return Err(Error::IndexOutOfRange(format!("site ({x}, {y})")));
        }
        Ok(self.probabilities[self.spec.index_unchecked(0, x, y)])
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Iterates `(x, y, p)` with `x` slow, both ascending.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, f64)> + '_ {
        let l = self.spec.extent();
        let t = self.spec.origin_offset();
        self.probabilities
            .iter()
            .enumerate()
            .map(move |(i, &p)| ((i / l) as i64 - t, (i % l) as i64 - t, p))
    }

    /// Largest elementwise difference; distributions must share a lattice.
    pub fn max_abs_diff(&self, other: &Distribution) -> Result<f64> {
        if self.spec.extent() != other.spec.extent() {
            return Err(Error::DimensionMismatch {
                expected: self.spec.extent(),
                found: other.spec.extent(),
            });
        }
        Ok(self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// `max |P(x, y) − P(y, x)|`.
    pub fn transpose_asymmetry(&self) -> f64 {
        let l = self.spec.extent();
        let mut m: f64 = 0.0;
        for i in 0..l {
            for j in 0..l {
                m = m.max((self.probabilities[i * l + j] - self.probabilities[j * l + i]).abs());
            }
        }
        m
    }
}

/// Density operator on an ordered list of labelled tensor factors.
///
/// Produced by partial traces of walk states; also constructible directly for
/// small test systems (a qubit labelled `Coin` and another labelled `X`, say).
#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemState {
    factors: Vec<(Subsystem, usize)>,
    matrix: CMatrix,
}

impl SubsystemState {
    pub fn new(factors: Vec<(Subsystem, usize)>, matrix: CMatrix) -> Result<Self> {
        for (i, (s, d)) in factors.iter().enumerate() {
            if *d == 0 {
                return Err(Error::InvalidArgument(format!(
                    "factor {s} has dimension 0"
                )));
            }
            if factors[..i].iter().any(|(o, _)| o == s) {
                return Err(Error::InvalidArgument(format!("factor {s} listed twice")));
            }
        }
        let dim: usize = factors.iter().map(|(_, d)| d).product();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows(),
            });
        }
        let herm = linalg::hermiticity_error(&matrix);
        if herm > SUBSYSTEM_TOL {
            return Err(Error::InvalidState(format!(
                "matrix is not Hermitian (error {herm:e})"
            )));
        }
        let tr = linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > SUBSYSTEM_TOL || tr.im.abs() > SUBSYSTEM_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        Ok(SubsystemState { factors, matrix })
    }

    pub(crate) fn from_raw(factors: Vec<(Subsystem, usize)>, matrix: CMatrix) -> Self {
        SubsystemState { factors, matrix }
    }

    pub fn factors(&self) -> &[(Subsystem, usize)] {
        &self.factors
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.matrix)
    }

    pub(crate) fn dim_of(&self, subs: &[Subsystem]) -> usize {
        self.factors
            .iter()
            .filter(|(s, _)| subs.contains(s))
            .map(|(_, d)| d)
            .product()
    }

    pub fn partial_trace(&self, keep: &[Subsystem]) -> Result<SubsystemState> {
        partial_trace_matrix(&self.factors, &self.matrix, keep)
    }

    /// Reorders factors so that those in `first` come first (in the given
    /// order), followed by those in `second`. Factors in neither list are
    /// traced out.
    pub fn regroup(&self, first: &[Subsystem], second: &[Subsystem]) -> Result<SubsystemState> {
        let keep: Vec<Subsystem> = first.iter().chain(second).copied().collect();
        let reduced = self.partial_trace(&keep)?;
        reduced.permute(&keep)
    }

    /// Reorders the tensor factors to `order` (a permutation of the current labels).
    fn permute(&self, order: &[Subsystem]) -> Result<SubsystemState> {
        let n = self.factors.len();
        if order.len() != n {
            return Err(Error::InvalidArgument(
                "permutation must list every factor".into(),
            ));
        }
        let pos: Vec<usize> = order
            .iter()
            .map(|s| {
                self.factors
                    .iter()
                    .position(|(f, _)| f == s)
                    .ok_or_else(|| Error::InvalidArgument(format!("no factor {s}")))
            })
            .collect::<Result<_>>()?;
        if pos.iter().enumerate().all(|(i, &p)| i == p) {
            return Ok(self.clone());
        }
        let old_dims: Vec<usize> = self.factors.iter().map(|(_, d)| *d).collect();
        let new_factors: Vec<(Subsystem, usize)> = pos.iter().map(|&p| self.factors[p]).collect();
        let new_dims: Vec<usize> = new_factors.iter().map(|(_, d)| *d).collect();
        let dim = self.dim();
        // old strides
        let mut old_stride = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            old_stride[k] = old_stride[k + 1] * old_dims[k + 1];
        }
        let mut map = vec![0usize; dim];
        let mut digits = vec![0usize; n];
        for (new_index, slot) in map.iter_mut().enumerate() {
            let mut r = new_index;
            for k in (0..n).rev() {
                digits[k] = r % new_dims[k];
                r /= new_dims[k];
            }
            *slot = (0..n).map(|k| digits[k] * old_stride[pos[k]]).sum();
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| self.matrix[(map[i], map[j])]);
        Ok(SubsystemState::from_raw(new_factors, m))
    }
}

fn partial_trace_matrix(
    factors: &[(Subsystem, usize)],
    matrix: &CMatrix,
    keep: &[Subsystem],
) -> Result<SubsystemState> {
    if keep.is_empty() {
        return Err(Error::InvalidArgument(
            "partial trace must keep at least one factor".into(),
        ));
    }
    for s in keep {
        if !factors.iter().any(|(f, _)| f == s) {
            return Err(Error::InvalidArgument(format!("no factor {s} to keep")));
        }
    }
    let kept: Vec<(Subsystem, usize)> = factors
        .iter()
        .filter(|(s, _)| keep.contains(s))
        .copied()
        .collect();
    if kept.len() == factors.len() {
        return Ok(SubsystemState::from_raw(factors.to_vec(), matrix.clone()));
    }
    let dims: Vec<usize> = factors.iter().map(|(_, d)| *d).collect();
    let is_kept: Vec<bool> = factors.iter().map(|(s, _)| keep.contains(s)).collect();
    let dk: usize = kept.iter().map(|(_, d)| d).product();
    let dt: usize = dims
        .iter()
        .zip(&is_kept)
        .filter(|(_, &k)| !k)
        .map(|(d, _)| d)
        .product();

    // full index of (kept index, traced index)
    let mut full = vec![0usize; dk * dt];
    let total: usize = dims.iter().product();
    for idx in 0..total {
        let mut r = idx;
        let (mut ki, mut ti) = (0usize, 0usize);
        let (mut kstride, mut tstride) = (1usize, 1usize);
        for f in (0..dims.len()).rev() {
            let digit = r % dims[f];
            r /= dims[f];
            if is_kept[f] {
                ki += digit * kstride;
                kstride *= dims[f];
            } else {
                ti += digit * tstride;
                tstride *= dims[f];
            }
        }
        full[ti * dk + ki] = idx;
    }

    let mut out = CMatrix::zeros(dk, dk);
    for t in 0..dt {
        let rows = &full[t * dk..(t + 1) * dk];
        for (j, &cj) in rows.iter().enumerate() {
            for (i, &ci) in rows.iter().enumerate() {
                out[(i, j)] += matrix[(ci, cj)];
            }
        }
    }
    Ok(SubsystemState::from_raw(kept, out))
}

/// Split of a subset of `{coin, x, y}` into two disjoint nonempty sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    side_a: Vec<Subsystem>,
    side_b: Vec<Subsystem>,
}

impl Bipartition {
    pub fn new(side_a: Vec<Subsystem>, side_b: Vec<Subsystem>) -> Result<Self> {
        if side_a.is_empty() || side_b.is_empty() {
            return Err(Error::InvalidArgument(
                "both sides of a bipartition must be nonempty".into(),
            ));
        }
        let all: Vec<Subsystem> = side_a.iter().chain(&side_b).copied().collect();
        for (i, s) in all.iter().enumerate() {
            if all[..i].contains(s) {
                return Err(Error::InvalidArgument(format!(
                    "subsystem {s} appears twice in bipartition"
                )));
            }
        }
        Ok(Bipartition { side_a, side_b })
    }

    /// Coin versus lattice.
    pub fn particle_position() -> Self {
        Bipartition {
            side_a: vec![Subsystem::Coin],
            side_b: vec![Subsystem::X, Subsystem::Y],
        }
    }

    /// x versus y, coin traced out.
    pub fn x_y() -> Self {
        Bipartition {
            side_a: vec![Subsystem::X],
            side_b: vec![Subsystem::Y],
        }
    }

    pub fn side_a(&self) -> &[Subsystem] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[Subsystem] {
        &self.side_b
    }
}
