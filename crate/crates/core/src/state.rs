//! Quantum states and the measures computed on them.
//!
//! Entropies are in nats. Fidelity is the root fidelity `tr√(√ρ σ √ρ)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{eigh, eigvalsh, ComplexMatrix, C64, ONE, ZERO};

/// Spectrum values at or below this are treated as zero for entropy and support.
pub const EIGEN_CUTOFF: f64 = 1e-12;
/// Eigenvalues above this count towards the numerical rank.
pub const RANK_CUTOFF: f64 = 1e-10;
/// Tolerance of the density-matrix and pure-state invariants.
pub const STATE_TOLERANCE: f64 = 1e-10;

pub(crate) fn qubits_for_dim(dim: usize) -> Option<usize> {
    if dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}

#[inline]
pub(crate) fn bit_shift(n_qubits: usize, qubit: usize) -> usize {
    n_qubits - 1 - qubit
}

/// Normalized state vector over `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())
            .ok_or_else(|| Error::InvalidState(format!("length {} is not a power of two", amplitudes.len())))?;
        let norm = amplitudes.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("norm is {norm}")));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// `|0…0⟩`
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state; `index` uses qubit 0 as the most significant bit.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[index] = ONE;
        Self { n_qubits, amplitudes }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite operator on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates the matrix against all three density-matrix invariants.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState("matrix is not square".into()));
        }
        let n_qubits = qubits_for_dim(matrix.rows())
            .ok_or_else(|| Error::InvalidState(format!("dimension {} is not a power of two", matrix.rows())))?;
        let rho = Self { n_qubits, matrix };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(n_qubits: usize, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), 1 << n_qubits);
        Self { n_qubits, matrix }
    }

    /// Checks Hermiticity, unit trace and positivity within [`STATE_TOLERANCE`].
    pub fn validate(&self) -> Result<()> {
        let herm = self.matrix.hermitian_deviation();
        if herm > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = self.matrix.trace();
        if (tr - ONE).norm() > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let min = eigvalsh(&self.matrix)?[0];
        if min < -STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            n_qubits,
            matrix: ComplexMatrix::from_real_diagonal(&vec![1.0 / dim as f64; dim]),
        }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        PureState::basis(n_qubits, index).to_density()
    }

    /// Diagonal state from a probability vector.
    pub fn from_diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(probabilities))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Ascending spectrum.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.matrix).expect("density matrices are Hermitian")
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_of_product(&self.matrix).re
    }

    /// Count of eigenvalues above [`RANK_CUTOFF`].
    pub fn rank(&self) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > RANK_CUTOFF).count()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            matrix: crate::linalg::tensor_product(&self.matrix, &other.matrix),
        }
    }
}

fn check_same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// Kronecker product of two operators.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    crate::linalg::tensor_product(a, b)
}

/// Reduced state on the qubits in `keep`, ordered by ascending index.
pub fn partial_trace(state: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = state.n_qubits;
    if keep.is_empty() {
        return Err(Error::EmptySelection);
    }
    if let Some(&index) = keep.iter().find(|&&q| q >= n) {
        return Err(Error::QubitOutOfRange { index, n_qubits: n });
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let n_keep = kept.len();
    let dk = 1usize << n_keep;
    let dt = 1usize << traced.len();

    let compose = |k: usize, t: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &q) in kept.iter().enumerate() {
            idx |= ((k >> (n_keep - 1 - pos)) & 1) << bit_shift(n, q);
        }
        for (pos, &q) in traced.iter().enumerate() {
            idx |= ((t >> (traced.len() - 1 - pos)) & 1) << bit_shift(n, q);
        }
        idx
    };

    let m = &state.matrix;
    let mut out = ComplexMatrix::zeros(dk, dk);
    let mut full = vec![0usize; dk];
    for t in 0..dt {
        for (k, f) in full.iter_mut().enumerate() {
            *f = compose(k, t);
        }
        for (a, &fa) in full.iter().enumerate() {
            for (b, &fb) in full.iter().enumerate() {
                out[(a, b)] += m[(fa, fb)];
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(n_keep, out))
}

fn entropy_of_spectrum(values: &[f64]) -> f64 {
    let s: f64 = values.iter().filter(|&&l| l > EIGEN_CUTOFF).map(|&l| -l * l.ln()).sum();
    s.max(0.0)
}

/// `−tr ρ ln ρ` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

/// `tr(ρ ln ρ − ρ ln σ)`; fails with [`Error::SupportViolation`] when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho, sigma)?;
    let neg_entropy = -von_neumann_entropy(rho);
    let es = eigh(&sigma.matrix)?;
    let n = sigma.dim();
    let mut cross = 0.0;
    for k in 0..n {
        let w = es.vectors.column(k);
        let rw = rho.matrix.mat_vec(&w);
        let weight: f64 = w.iter().zip(&rw).map(|(a, b)| (a.conj() * b).re).sum();
        let mu = es.values[k];
        if mu <= EIGEN_CUTOFF {
            if weight > RANK_CUTOFF {
                return Err(Error::SupportViolation);
            }
            continue;
        }
        cross += weight * mu.ln();
    }
    Ok((neg_entropy - cross).max(0.0))
}

/// Root fidelity `tr√(√ρ σ √ρ)`, clamped to `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho, sigma)?;
    let sqrt_rho = eigh(&rho.matrix)?.map(|l| l.max(0.0).sqrt());
    let inner = sqrt_rho.matmul(&sigma.matrix).matmul(&sqrt_rho);
    let f: f64 = eigvalsh(&inner)?.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `½‖ρ − σ‖₁`
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho, sigma)?;
    let diff = rho.matrix.sub(&sigma.matrix);
    Ok(0.5 * eigvalsh(&diff)?.iter().map(|l| l.abs()).sum::<f64>())
}

/// `tr(ρ₁ρ₂…ρ_m)` including its imaginary part.
pub fn overlap_exact_complex(states: &[&DensityMatrix]) -> Result<C64> {
    let (first, rest) = states
        .split_first()
        .ok_or_else(|| crate::error::invalid_arg("overlap needs at least one state"))?;
    for s in rest {
        check_same_dim(first, s)?;
    }
    let Some((last, middle)) = rest.split_last() else {
        return Ok(first.matrix.trace());
    };
    let mut acc = first.matrix.clone();
    for s in middle {
        acc = acc.matmul(&s.matrix);
    }
    Ok(acc.trace_of_product(&last.matrix))
}

/// Real part of `tr(ρ₁ρ₂…ρ_m)`.
pub fn overlap_exact(states: &[&DensityMatrix]) -> Result<f64> {
    overlap_exact_complex(states).map(|z| z.re)
}

/// Random state `GG†/tr(GG†)` with `G` a `2^n × rank` matrix of entries uniform on
/// the unit square. Not Haar distributed; rank is `min(rank, 2^n)` almost surely.
pub fn random_density_matrix<R: rand::Rng + ?Sized>(
    rng: &mut R,
    n_qubits: usize,
    rank: usize,
) -> Result<DensityMatrix> {
    if rank == 0 {
        return Err(crate::error::invalid_arg("rank must be at least 1"));
    }
    let dim = 1usize << n_qubits;
    let g = ComplexMatrix::from_fn(dim, rank, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    let m = m.scale(C64::new(1.0 / tr, 0.0));
    // symmetrize away the rounding asymmetry of the product
    let m = ComplexMatrix::from_fn(dim, dim, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    Ok(DensityMatrix { n_qubits, matrix: m })
}

/// Mixed state stored through a factor `Φ` with `ρ = ΦΦ†`.
///
/// The columns of `Φ` are the (unnormalized) system branches of a purification,
/// so `Φ` has one column per ancilla basis state. Traces of products reduce to
/// small Gram matrices, which keeps training costs independent of `2^n` squared.
#[derive(Clone, Debug, PartialEq)]
pub struct StateFactor {
    n_qubits: usize,
    factor: ComplexMatrix,
}

impl StateFactor {
    pub fn new(factor: ComplexMatrix) -> Result<Self> {
        let n_qubits = qubits_for_dim(factor.rows())
            .ok_or_else(|| Error::InvalidState(format!("dimension {} is not a power of two", factor.rows())))?;
        let tr = factor.frobenius_norm().powi(2);
        if (tr - 1.0).abs() > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        Ok(Self { n_qubits, factor })
    }

    /// Splits a pure state over `n_ancilla` leading qubits and the remaining system
    /// qubits; the result represents the reduced state of the system.
    pub fn from_purification(psi: &PureState, n_ancilla: usize) -> Result<Self> {
        if n_ancilla >= psi.n_qubits() {
            return Err(crate::error::invalid_arg(
                "system register must keep at least one qubit",
            ));
        }
        let n_system = psi.n_qubits() - n_ancilla;
        let dim = 1usize << n_system;
        let amps = psi.amplitudes();
        let factor = ComplexMatrix::from_fn(dim, 1 << n_ancilla, |b, a| amps[a * dim + b]);
        Ok(Self {
            n_qubits: n_system,
            factor,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.factor.rows()
    }

    pub fn factor(&self) -> &ComplexMatrix {
        &self.factor
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(self.n_qubits, self.factor.matmul(&self.factor.adjoint()))
    }

    /// `Φ_self† Φ_other`
    pub fn cross_gram(&self, other: &Self) -> ComplexMatrix {
        self.factor.adjoint().matmul(&other.factor)
    }

    /// `tr(ρ₁ρ₂…ρ_m)` evaluated on the factors.
    pub fn overlap_chain(states: &[&StateFactor]) -> Result<C64> {
        let (first, rest) = states
            .split_first()
            .ok_or_else(|| crate::error::invalid_arg("overlap needs at least one state"))?;
        for s in rest {
            if s.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: s.dim(),
                });
            }
        }
        // tr(Φ₁Φ₁†Φ₂Φ₂†…Φ_mΦ_m†) = tr((Φ₁†Φ₂)(Φ₂†Φ₃)…(Φ_m†Φ₁))
        let mut acc: Option<ComplexMatrix> = None;
        for w in 0..states.len() {
            let g = states[w].cross_gram(states[(w + 1) % states.len()]);
            acc = Some(match acc {
                None => g,
                Some(m) => m.matmul(&g),
            });
        }
        Ok(acc.map_or(ZERO, |m| m.trace()))
    }

    /// `tr(ρ^k)` for `k ≥ 1` via powers of the Gram matrix.
    pub fn trace_power(&self, k: usize) -> f64 {
        if k == 0 {
            return self.dim() as f64;
        }
        let g = self.cross_gram(self);
        let mut acc = g.clone();
        for _ in 1..k {
            acc = acc.matmul(&g);
        }
        acc.trace().re
    }

    /// Root fidelity with a dense state. The nonzero spectrum of `√ρ σ √ρ`
    /// coincides with that of `Φ†σΦ`.
    pub fn fidelity(&self, sigma: &DensityMatrix) -> Result<f64> {
        if sigma.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: sigma.dim(),
            });
        }
        let small = self.factor.adjoint().matmul(&sigma.matrix.matmul(&self.factor));
        let f: f64 = eigvalsh(&small)?.iter().map(|&l| l.max(0.0).sqrt()).sum();
        Ok(f.clamp(0.0, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn plus() -> PureState {
        PureState::new(vec![C64::new(FRAC_1_SQRT_2, 0.0); 2]).unwrap()
    }

    fn bell() -> PureState {
        let mut a = vec![ZERO; 4];
        a[0] = C64::new(FRAC_1_SQRT_2, 0.0);
        a[3] = C64::new(FRAC_1_SQRT_2, 0.0);
        PureState::new(a).unwrap()
    }

    #[test]
    fn rejects_unnormalized_pure_state() {
        assert!(PureState::new(vec![ONE, ONE]).is_err());
        assert!(PureState::new(vec![ONE, ZERO, ZERO]).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::from_diagonal(&[0.5, 0.5]).is_ok());
        assert!(DensityMatrix::from_diagonal(&[0.7, 0.5]).is_err());
        assert!(DensityMatrix::from_diagonal(&[1.2, -0.2]).is_err());
        let m = ComplexMatrix::from_vec(2, 2, vec![C64::new(0.5, 0.0), ONE, ZERO, C64::new(0.5, 0.0)]).unwrap();
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn trace_out_product_state() {
        let a = DensityMatrix::from_diagonal(&[0.3, 0.7]).unwrap();
        let b = plus().to_density();
        let out = partial_trace(&a.tensor(&b), &[1]).unwrap();
        assert!(out.matrix().max_abs_diff(b.matrix()) < 1e-12);
        let out = partial_trace(&a.tensor(&b), &[0]).unwrap();
        assert!(out.matrix().max_abs_diff(a.matrix()) < 1e-12);
    }

    #[test]
    fn trace_out_bell_state() {
        let out = partial_trace(&bell().to_density(), &[1]).unwrap();
        assert!(out.matrix().max_abs_diff(DensityMatrix::maximally_mixed(1).matrix()) < 1e-12);
    }

    #[test]
    fn trace_out_ancilla_of_cat_branch() {
        // cos(θ/2)|0⟩|000⟩ + sin(θ/2)|1⟩|111⟩
        let theta = 0.83f64;
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let mut amps = vec![ZERO; 16];
        amps[0] = C64::new(c, 0.0);
        amps[15] = C64::new(s, 0.0);
        let rho = PureState::new(amps).unwrap().to_density();
        let out = partial_trace(&rho, &[1, 2, 3]).unwrap();
        let mut diag = [0.0; 8];
        diag[0] = c * c;
        diag[7] = s * s;
        assert!(out.matrix().max_abs_diff(&ComplexMatrix::from_real_diagonal(&diag)) < 1e-12);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = bell().to_density();
        assert_eq!(partial_trace(&rho, &[]), Err(Error::EmptySelection));
        assert_eq!(
            partial_trace(&rho, &[2]),
            Err(Error::QubitOutOfRange { index: 2, n_qubits: 2 })
        );
    }

    #[test]
    fn partial_trace_middle_qubit() {
        let a = DensityMatrix::from_diagonal(&[0.9, 0.1]).unwrap();
        let b = plus().to_density();
        let c = DensityMatrix::from_diagonal(&[0.25, 0.75]).unwrap();
        let abc = a.tensor(&b).tensor(&c);
        let ac = partial_trace(&abc, &[2, 0]).unwrap();
        assert!(ac.matrix().max_abs_diff(a.tensor(&c).matrix()) < 1e-12);
    }

    #[test]
    fn entropy_examples() {
        assert!(close(von_neumann_entropy(&plus().to_density()), 0.0, 1e-12));
        assert!(close(
            von_neumann_entropy(&DensityMatrix::maximally_mixed(1)),
            LN_2,
            1e-12
        ));
        let rho = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        assert!(close(von_neumann_entropy(&rho), 0.562335, 1e-6));
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        assert!(close(relative_entropy(&rho, &rho).unwrap(), 0.0, 1e-12));
        let zero = DensityMatrix::basis(1, 0);
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!(close(relative_entropy(&zero, &mixed).unwrap(), LN_2, 1e-12));
        assert!(close(relative_entropy(&rho, &mixed).unwrap(), 0.130812, 1e-6));
    }

    #[test]
    fn relative_entropy_support_violation() {
        let zero = DensityMatrix::basis(1, 0);
        let mixed = DensityMatrix::maximally_mixed(1);
        assert_eq!(relative_entropy(&mixed, &zero), Err(Error::SupportViolation));
    }

    #[test]
    fn fidelity_examples() {
        let rho = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        assert!(close(fidelity(&rho, &rho).unwrap(), 1.0, 1e-10));
        let (z0, z1) = (DensityMatrix::basis(1, 0), DensityMatrix::basis(1, 1));
        assert!(close(fidelity(&z0, &z1).unwrap(), 0.0, 1e-12));
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!(close(fidelity(&mixed, &z0).unwrap(), FRAC_1_SQRT_2, 1e-10));
        assert!(close(fidelity(&z0, &mixed).unwrap(), FRAC_1_SQRT_2, 1e-10));
        assert!(fidelity(&z0, &DensityMatrix::maximally_mixed(2)).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let rho = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        assert!(close(trace_distance(&rho, &rho).unwrap(), 0.0, 1e-12));
        let (z0, z1) = (DensityMatrix::basis(1, 0), DensityMatrix::basis(1, 1));
        assert!(close(trace_distance(&z0, &z1).unwrap(), 1.0, 1e-12));
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!(close(trace_distance(&rho, &mixed).unwrap(), 0.25, 1e-12));
    }

    #[test]
    fn overlap_examples() {
        let rho = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        assert!(close(overlap_exact(&[&rho]).unwrap(), 1.0, 1e-12));
        let m = DensityMatrix::maximally_mixed(1);
        assert!(close(overlap_exact(&[&m, &m]).unwrap(), 0.5, 1e-12));
        assert!(close(overlap_exact(&[&m, &m, &m]).unwrap(), 0.25, 1e-12));
        assert!(overlap_exact(&[]).is_err());
        assert!(overlap_exact(&[&m, &DensityMatrix::maximally_mixed(2)]).is_err());
    }

    #[test]
    fn factor_matches_dense_state() {
        let theta = 1.1f64;
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let mut amps = vec![ZERO; 8];
        amps[0] = C64::new(c, 0.0);
        amps[4 + 3] = C64::new(0.0, s);
        let psi = PureState::new(amps).unwrap();
        let f = StateFactor::from_purification(&psi, 1).unwrap();
        let dense = partial_trace(&psi.to_density(), &[1, 2]).unwrap();
        assert!(f.to_density().matrix().max_abs_diff(dense.matrix()) < 1e-14);
        for k in 1..5 {
            let want = overlap_exact(&vec![&dense; k]).unwrap();
            assert!(close(f.trace_power(k), want, 1e-14));
        }
        let sigma = DensityMatrix::from_diagonal(&[0.4, 0.1, 0.2, 0.3]).unwrap();
        assert!(close(
            f.fidelity(&sigma).unwrap(),
            fidelity(&dense, &sigma).unwrap(),
            1e-10
        ));
    }
}
