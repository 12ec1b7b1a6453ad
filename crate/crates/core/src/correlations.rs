//! Entropies, mutual information and measurement-induced disturbance.
//!
//! For a bipartite state `ρ` on `A ⊗ B` the measurement-induced disturbance
//! is `Q(ρ) = I(ρ) − I(Π(ρ))`, where `I` is the quantum mutual information and
//! `Π` measures both sides in the eigenbases of their reduced states. All
//! entropies are in bits.
//!
//! Degenerate reduced spectra make `Π` ambiguous. The eigenbasis is fixed by
//! a canonical refinement: eigenvalues within `1e-10·max(1, |λ_max|)` of their
//! neighbour are grouped, and each group's subspace is spanned by the
//! Gram–Schmidt orthonormalized projections of the standard basis vectors
//! `e_0, e_1, …` (residuals of norm ≤ 1e-12 are skipped). Early-step values,
//! where reduced states are highly degenerate, depend on this convention.
//!
//! Walk states are supported on few lattice sites, so spectra are computed on
//! the nonzero rows only. Dropped directions carry zero weight in every
//! entropy and in every outcome probability of `Π`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::space::Subsystem;
use crate::state::{Bipartition, DensityOperator, SubsystemState};
use crate::CMatrix;

const NEGATIVE_FLOOR: f64 = 1e-8;
const TRACE_TOL: f64 = 1e-10;
const GROUP_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-12;

fn entropy_of(eigenvalues: impl IntoIterator<Item = f64>) -> Result<f64> {
    linalg::entropy_bits(eigenvalues, NEGATIVE_FLOOR)
        .map_err(|w| Error::InvalidState(format!("eigenvalue {w:e} below the negativity floor")))
}

/// Entropy in bits of a Hermitian matrix, computed on its nonzero rows.
pub(crate) fn matrix_entropy(m: &CMatrix) -> Result<f64> {
    entropy_of(linalg::hermitian_eigenvalues(m))
}

/// Von Neumann entropy `−Σ λ log₂ λ` in bits.
pub fn von_neumann_entropy(state: &SubsystemState) -> Result<f64> {
    let tr = state.trace();
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
    }
    matrix_entropy(state.matrix())
}

/// Eigenbasis of a Hermitian matrix with degenerate subspaces refined to a
/// canonical orthonormal basis.
#[derive(Debug, Clone)]
pub struct SpectralResolution {
    eigenvalues: Vec<f64>,
    /// Columns are eigenvectors, in the order of `eigenvalues`.
    vectors: CMatrix,
}

impl SpectralResolution {
    /// Complete resolution of `m`.
    pub fn new(m: &CMatrix) -> Self {
        let (vals, vecs) = linalg::hermitian_eigen(m);
        let vectors = refine(&vals, &vecs);
        SpectralResolution {
            eigenvalues: vals,
            vectors,
        }
    }

    /// Resolution restricted to the nonzero rows of a positive semidefinite
    /// `m`; vectors are embedded back into the full space. Omits only
    /// directions outside the support of `m`.
    pub(crate) fn on_support(m: &CMatrix) -> Self {
        let idx = linalg::support(m);
        let n = m.nrows();
        if idx.len() == n {
            return Self::new(m);
        }
        let inner = Self::new(&linalg::submatrix(m, &idx));
        let mut vectors = CMatrix::zeros(n, idx.len());
        for (k, &row) in idx.iter().enumerate() {
            for c in 0..idx.len() {
                vectors[(row, c)] = inner.vectors[(k, c)];
            }
        }
        SpectralResolution {
            eigenvalues: inner.eigenvalues,
            vectors,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Rank-1 spectral projectors `(λ, |v⟩⟨v|)`.
    pub fn projectors(&self) -> Vec<(f64, CMatrix)> {
        (0..self.len())
            .map(|k| {
                let v = self.vectors.column(k);
                (self.eigenvalues[k], v * v.adjoint())
            })
            .collect()
    }
}

/// Replaces each degenerate block of eigenvectors by the canonical basis of
/// its span. `vals` is sorted in descending order.
fn refine(vals: &[f64], vecs: &CMatrix) -> CMatrix {
    let n = vecs.nrows();
    let m = vals.len();
    let scale = vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let tol = GROUP_TOL * scale;
    let mut out = vecs.clone();
    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m && (vals[end - 1] - vals[end]).abs() <= tol {
            end += 1;
        }
        if end - start > 1 {
            let block = vecs.columns(start, end - start);
            let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(end - start);
            for i in 0..n {
                if basis.len() == end - start {
                    break;
                }
                // projection of e_i onto the block: V V† e_i = V (row i of V)†
                let coeffs = block.row(i).adjoint();
                let mut v: DVector<Complex64> = block * coeffs;
                for b in &basis {
                    let overlap = b.dotc(&v);
                    v -= b * overlap;
                }
                let norm = v.norm();
                if norm > RESIDUAL_TOL {
                    basis.push(v / Complex64::new(norm, 0.0));
                }
            }
            for (k, b) in basis.iter().enumerate() {
                out.set_column(start + k, b);
            }
        }
        start = end;
    }
    out
}

/// State reordered as `A ⊗ B` with the dimensions of both sides.
fn split_state(
    state: &SubsystemState,
    split: &Bipartition,
) -> Result<(SubsystemState, usize, usize)> {
    let ab = state.regroup(split.side_a(), split.side_b())?;
    let da = ab.dim_of(split.side_a());
    let db = ab.dim_of(split.side_b());
    Ok((ab, da, db))
}

/// `I(ρ) = S(ρ_A) + S(ρ_B) − S(ρ)` across `split`.
pub fn mutual_information(state: &SubsystemState, split: &Bipartition) -> Result<f64> {
    let (ab, _, _) = split_state(state, split)?;
    let sa = von_neumann_entropy(&ab.partial_trace(split.side_a())?)?;
    let sb = von_neumann_entropy(&ab.partial_trace(split.side_b())?)?;
    let s = von_neumann_entropy(&ab)?;
    Ok(sa + sb - s)
}

/// `Π(ρ) = Σ_{jk} (Π_A^j ⊗ Π_B^k) ρ (Π_A^j ⊗ Π_B^k)` with rank-1 projectors
/// from the refined reduced eigenbases. The result is ordered `A ⊗ B`.
pub fn measurement_channel(state: &SubsystemState, split: &Bipartition) -> Result<SubsystemState> {
    let (ab, _, _) = split_state(state, split)?;
    let ra = SpectralResolution::new(ab.partial_trace(split.side_a())?.matrix());
    let rb = SpectralResolution::new(ab.partial_trace(split.side_b())?.matrix());
    let w = ra.vectors().kronecker(rb.vectors());
    let rotated = w.adjoint() * ab.matrix() * &w;
    let diag = CMatrix::from_diagonal(&DVector::from_iterator(
        rotated.nrows(),
        (0..rotated.nrows()).map(|i| Complex64::new(rotated[(i, i)].re, 0.0)),
    ));
    let out = &w * diag * w.adjoint();
    Ok(SubsystemState::from_raw(ab.factors().to_vec(), out))
}

/// The terms of `Q = I(ρ) − I(Π(ρ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidBreakdown {
    /// `I(ρ)`
    pub total: f64,
    /// `I(Π(ρ))`
    pub classical: f64,
}

impl MidBreakdown {
    /// Unfloored difference `I(ρ) − I(Π(ρ))`.
    pub fn raw(&self) -> f64 {
        self.total - self.classical
    }

    /// MID floored at zero.
    pub fn value(&self) -> f64 {
        self.raw().max(0.0)
    }
}

/// Outcome probabilities `p_jk = ⟨a_j b_k| ρ |a_j b_k⟩` for an `A ⊗ B` matrix.
fn outcome_probabilities(
    m: &CMatrix,
    da: usize,
    db: usize,
    a: &CMatrix,
    b: &CMatrix,
) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(a.ncols());
    for j in 0..a.ncols() {
        let aj = a.column(j);
        // X = Σ_{i,i'} conj(a_j[i]) a_j[i'] ρ[(i,·),(i',·)]
        let mut x = CMatrix::zeros(db, db);
        for i in 0..da {
            let ci = aj[i].conj();
            if ci.norm() == 0.0 {
                continue;
            }
            for i2 in 0..da {
                let w = ci * aj[i2];
                if w.norm() == 0.0 {
                    continue;
                }
                x += m.view((i * db, i2 * db), (db, db)) * w;
            }
        }
        let xb = &x * b;
        let row = (0..b.ncols())
            .map(|k| {
                b.column(k)
                    .iter()
                    .zip(xb.column(k).iter())
                    .map(|(bv, yv)| bv.conj() * yv)
                    .sum::<Complex64>()
                    .re
            })
            .collect();
        out.push(row);
    }
    out
}

/// `I(ρ)` and `I(Π(ρ))` across `split`.
pub fn mid_breakdown(state: &SubsystemState, split: &Bipartition) -> Result<MidBreakdown> {
    let (ab, da, db) = split_state(state, split)?;
    let rho_a = ab.partial_trace(split.side_a())?;
    let rho_b = ab.partial_trace(split.side_b())?;
    let total =
        von_neumann_entropy(&rho_a)? + von_neumann_entropy(&rho_b)? - von_neumann_entropy(&ab)?;

    let ra = SpectralResolution::on_support(rho_a.matrix());
    let rb = SpectralResolution::on_support(rho_b.matrix());
    let p = outcome_probabilities(ab.matrix(), da, db, ra.vectors(), rb.vectors());
    let row_sums: Vec<f64> = p.iter().map(|r| r.iter().sum()).collect();
    let col_sums: Vec<f64> = (0..rb.len())
        .map(|k| p.iter().map(|r| r[k]).sum())
        .collect();
    let joint = entropy_of(p.iter().flatten().copied())?;
    let classical = entropy_of(row_sums)? + entropy_of(col_sums)? - joint;
    Ok(MidBreakdown { total, classical })
}

/// Measurement-induced disturbance across `split`, floored at zero.
///
/// Fails with [`Error::InvalidState`] when the raw value is below `−1e-8`.
pub fn mid(state: &SubsystemState, split: &Bipartition) -> Result<f64> {
    let b = mid_breakdown(state, split)?;
    if b.raw() < -NEGATIVE_FLOOR {
        return Err(Error::InvalidState(format!(
            "negative disturbance {:e}",
            b.raw()
        )));
    }
    Ok(b.value())
}

/// MID between the coin and the lattice.
pub fn mid_pp(rho: &DensityOperator) -> Result<f64> {
    mid(&rho.to_subsystem_state(), &Bipartition::particle_position())
}

/// MID between the x and y lattice axes, coin traced out.
pub fn mid_xy(rho: &DensityOperator) -> Result<f64> {
    mid(
        &rho.partial_trace(&[Subsystem::X, Subsystem::Y])?,
        &Bipartition::x_y(),
    )
}

/// `q_noisy / q_noiseless`, or `None` when the baseline is not above `1e-12`.
pub fn robustness_ratio(q_noisy: f64, q_noiseless: f64) -> Option<f64> {
    (q_noiseless > 1e-12).then(|| q_noisy / q_noiseless)
}

/// Both correlation measures of one walk state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationRecord {
    pub step: usize,
    pub particle_position: MidBreakdown,
    pub x_y: MidBreakdown,
}

impl CorrelationRecord {
    pub fn new(step: usize, rho: &DensityOperator) -> Result<Self> {
        let pp = mid_breakdown(&rho.to_subsystem_state(), &Bipartition::particle_position())?;
        let xy = mid_breakdown(
            &rho.partial_trace(&[Subsystem::X, Subsystem::Y])?,
            &Bipartition::x_y(),
        )?;
        for b in [pp, xy] {
            if b.raw() < -NEGATIVE_FLOOR {
                return Err(Error::InvalidState(format!(
                    "negative disturbance {:e}",
                    b.raw()
                )));
            }
        }
        Ok(CorrelationRecord {
            step,
            particle_position: pp,
            x_y: xy,
        })
    }

    pub fn q_pp(&self) -> f64 {
        self.particle_position.value()
    }

    pub fn q_xy(&self) -> f64 {
        self.x_y.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn two_qubit(m: CMatrix) -> SubsystemState {
        SubsystemState::new(vec![(Subsystem::Coin, 2), (Subsystem::X, 2)], m).unwrap()
    }

    fn toy_split() -> Bipartition {
        Bipartition::new(vec![Subsystem::Coin], vec![Subsystem::X]).unwrap()
    }

    fn bell() -> SubsystemState {
        let h = 0.5;
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = c(h);
        m[(0, 3)] = c(h);
        m[(3, 0)] = c(h);
        m[(3, 3)] = c(h);
        two_qubit(m)
    }

    fn classical_mixture() -> SubsystemState {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = c(0.5);
        m[(3, 3)] = c(0.5);
        two_qubit(m)
    }

    fn random_state(
        factors: Vec<(Subsystem, usize)>,
        rank: usize,
        rng: &mut ChaCha8Rng,
    ) -> SubsystemState {
        let d: usize = factors.iter().map(|f| f.1).product();
        let a = CMatrix::from_fn(d, rank, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let mut m = &a * a.adjoint();
        let tr = linalg::trace(&m).re;
        m /= c(tr);
        SubsystemState::new(factors, m).unwrap()
    }

    fn random_bipartite(rng: &mut ChaCha8Rng) -> SubsystemState {
        let da = rng.random_range(2..=4);
        let db = rng.random_range(2..=12 / da);
        let rank = rng.random_range(1..=da * db);
        random_state(vec![(Subsystem::Coin, da), (Subsystem::X, db)], rank, rng)
    }

    #[test]
    fn entropy_examples() {
        let pure = two_qubit(CMatrix::from_fn(4, 4, |i, j| {
            c(if i == 0 && j == 0 { 1.0 } else { 0.0 })
        }));
        assert_eq!(von_neumann_entropy(&pure).unwrap(), 0.0);
        let mixed =
            SubsystemState::new(vec![(Subsystem::Coin, 2)], CMatrix::identity(2, 2) * c(0.5))
                .unwrap();
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-15);
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(0.75);
        m[(1, 1)] = c(0.25);
        let s = von_neumann_entropy(&SubsystemState::new(vec![(Subsystem::Coin, 2)], m).unwrap())
            .unwrap();
        assert!((s - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn entropy_rejects_negative_spectrum() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(1.1);
        m[(1, 1)] = c(-0.1);
        let s = SubsystemState::from_raw(vec![(Subsystem::Coin, 2)], m);
        assert!(matches!(
            von_neumann_entropy(&s),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn mutual_information_examples() {
        assert!((mutual_information(&bell(), &toy_split()).unwrap() - 2.0).abs() < 1e-9);
        assert!(
            (mutual_information(&classical_mixture(), &toy_split()).unwrap() - 1.0).abs() < 1e-9
        );
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[
                c(0.7),
                Complex64::new(0.1, 0.2),
                Complex64::new(0.1, -0.2),
                c(0.3),
            ],
        );
        let b = CMatrix::from_row_slice(2, 2, &[c(0.4), c(0.1), c(0.1), c(0.6)]);
        let prod = two_qubit(a.kronecker(&b));
        assert!(mutual_information(&prod, &toy_split()).unwrap().abs() < 1e-10);
        assert!(mid(&prod, &toy_split()).unwrap().abs() < 1e-9);
    }

    #[test]
    fn mid_examples() {
        assert!((mid(&bell(), &toy_split()).unwrap() - 1.0).abs() < 1e-9);
        assert!(mid(&classical_mixture(), &toy_split()).unwrap().abs() < 1e-9);
        let pi = measurement_channel(&bell(), &toy_split()).unwrap();
        assert!(linalg::max_abs_diff(pi.matrix(), classical_mixture().matrix()) < 1e-15);
        let b = mid_breakdown(&bell(), &toy_split()).unwrap();
        assert!((b.total - 2.0).abs() < 1e-9 && (b.classical - 1.0).abs() < 1e-9);
    }

    #[test]
    fn refinement_uses_standard_basis() {
        let m = CMatrix::identity(3, 3) * c(1.0 / 3.0);
        let r = SpectralResolution::new(&m);
        assert!(linalg::max_abs_diff(r.vectors(), &CMatrix::identity(3, 3)) < 1e-15);
        // degenerate pair inside a rotated subspace
        let s = 1.0 / 2f64.sqrt();
        let u = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(s),
                c(s),
                c(0.0),
                c(s),
                c(-s),
                c(0.0),
                c(0.0),
                c(0.0),
                c(1.0),
            ],
        );
        let d = CMatrix::from_diagonal(&DVector::from_vec(vec![c(0.25), c(0.25), c(0.5)]));
        let r = SpectralResolution::new(&(&u * d * u.adjoint()));
        assert!((r.eigenvalues()[0] - 0.5).abs() < 1e-15);
        assert!((r.vectors()[(2, 0)].norm() - 1.0).abs() < 1e-14);
        assert!((r.vectors()[(0, 1)].norm() - 1.0).abs() < 1e-14);
        assert!((r.vectors()[(1, 2)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn measurement_channel_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let s = random_bipartite(&mut rng);
            let split = toy_split();
            let pi = measurement_channel(&s, &split).unwrap();
            assert!((pi.trace().re - 1.0).abs() < 1e-12);
            assert!(linalg::hermitian_eigenvalues(pi.matrix()).last().unwrap() > &-1e-12);
            let pi2 = measurement_channel(&pi, &split).unwrap();
            assert!(linalg::max_abs_diff(pi.matrix(), pi2.matrix()) < 1e-10);
            let r = SpectralResolution::new(pi.matrix());
            for (i, (_, p)) in r.projectors().iter().enumerate().take(3) {
                assert!(linalg::max_abs_diff(&(p * p), p) < 1e-10, "projector {i}");
            }
        }
    }

    #[test]
    fn measurement_never_adds_information() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let s = random_bipartite(&mut rng);
            let b = mid_breakdown(&s, &toy_split()).unwrap();
            assert!(b.classical <= b.total + 1e-8, "{b:?}");
        }
    }

    #[test]
    fn fast_path_matches_measurement_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let s = random_bipartite(&mut rng);
            let split = toy_split();
            let direct = mutual_information(&s, &split).unwrap()
                - mutual_information(&measurement_channel(&s, &split).unwrap(), &split).unwrap();
            let fast = mid_breakdown(&s, &split).unwrap().raw();
            assert!((direct - fast).abs() < 1e-10, "{direct} vs {fast}");
        }
    }

    #[test]
    fn diagonal_phases_leave_mid_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..50 {
            let s = random_state(vec![(Subsystem::Coin, 2), (Subsystem::X, 3)], 3, &mut rng);
            let split = toy_split();
            let ra = SpectralResolution::new(s.partial_trace(&[Subsystem::Coin]).unwrap().matrix());
            let rb = SpectralResolution::new(s.partial_trace(&[Subsystem::X]).unwrap().matrix());
            let phases = |r: &SpectralResolution, rng: &mut ChaCha8Rng| {
                let d = CMatrix::from_diagonal(&DVector::from_iterator(
                    r.len(),
                    (0..r.len()).map(|_| Complex64::from_polar(1.0, rng.random::<f64>() * 6.0)),
                ));
                r.vectors() * d * r.vectors().adjoint()
            };
            let u = phases(&ra, &mut rng).kronecker(&phases(&rb, &mut rng));
            let t = SubsystemState::from_raw(s.factors().to_vec(), &u * s.matrix() * u.adjoint());
            let q0 = mid_breakdown(&s, &split).unwrap().raw();
            let q1 = mid_breakdown(&t, &split).unwrap().raw();
            assert!((q0 - q1).abs() < 1e-8);
        }
    }

    #[test]
    fn robustness_guard() {
        assert_eq!(robustness_ratio(0.3, 0.3), Some(1.0));
        assert_eq!(robustness_ratio(0.3, 0.0), None);
        assert_eq!(robustness_ratio(0.0, 1e-13), None);
    }

    proptest! {
        #[test]
        fn entropy_is_additive(seed in any::<u64>(), da in 1usize..=4, db in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_state(vec![(Subsystem::Coin, da)], rng.random_range(1..=da), &mut rng);
            let b = random_state(vec![(Subsystem::X, db)], rng.random_range(1..=db), &mut rng);
            let ab = SubsystemState::new(
                vec![(Subsystem::Coin, da), (Subsystem::X, db)],
                a.matrix().kronecker(b.matrix()),
            ).unwrap();
            let lhs = von_neumann_entropy(&ab).unwrap();
            let rhs = von_neumann_entropy(&a).unwrap() + von_neumann_entropy(&b).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }
    }
}
