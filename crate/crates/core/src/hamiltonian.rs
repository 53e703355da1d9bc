//! Pauli-string Hamiltonians and the exact Gibbs-state oracle.
//!
//! Energies use `k_B = 1`, so `beta` is the raw inverse temperature. Sites are
//! 0-based here; the chain builders wrap the last site back to the first.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::error::{invalid_arg, Error, Result};
use crate::linalg::{eigh, ComplexMatrix, HermitianEigen, C64, ZERO};
use crate::state::{bit_shift, DensityMatrix, StateFactor};

/// Largest register that [`PauliHamiltonian::spectrum`] will diagonalize densely.
pub const MAX_DENSE_QUBITS: usize = 14;
/// Two eigenvalues closer than this are treated as one level.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> ComplexMatrix {
        let (o, l, i) = (ZERO, C64::new(1.0, 0.0), C64::new(0.0, 1.0));
        let data = match self {
            Pauli::I => vec![l, o, o, l],
            Pauli::X => vec![o, l, l, o],
            Pauli::Y => vec![o, -i, i, o],
            Pauli::Z => vec![l, o, o, -l],
        };
        ComplexMatrix::from_vec(2, 2, data).expect("2x2")
    }
}

/// Weighted tensor product of Pauli letters, one letter per qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    pub coefficient: f64,
    pub letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(coefficient: f64, letters: Vec<Pauli>) -> Self {
        Self { coefficient, letters }
    }

    /// Identity everywhere except the listed `(site, letter)` pairs.
    pub fn from_sites(n_qubits: usize, coefficient: f64, sites: &[(usize, Pauli)]) -> Self {
        let mut letters = vec![Pauli::I; n_qubits];
        for &(q, p) in sites {
            letters[q] = p;
        }
        Self::new(coefficient, letters)
    }

    fn masks(&self) -> (usize, usize, usize) {
        let n = self.letters.len();
        let (mut flip, mut sign, mut n_y) = (0usize, 0usize, 0usize);
        for (q, p) in self.letters.iter().enumerate() {
            let bit = 1usize << bit_shift(n, q);
            match p {
                Pauli::I => {}
                Pauli::X => flip |= bit,
                Pauli::Y => {
                    flip |= bit;
                    sign |= bit;
                    n_y += 1;
                }
                Pauli::Z => sign |= bit,
            }
        }
        (flip, sign, n_y)
    }

    /// Phase `p(b)` with `P|b⟩ = p(b) |b ⊕ flip⟩`, coefficient excluded.
    fn phase_fn(&self) -> (usize, impl Fn(usize) -> C64) {
        let (flip, sign, n_y) = self.masks();
        let i_pow = match n_y % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        let phase = move |b: usize| {
            if (b & sign).count_ones().is_multiple_of(2) {
                i_pow
            } else {
                -i_pow
            }
        };
        (flip, phase)
    }

    pub fn is_diagonal(&self) -> bool {
        self.letters.iter().all(|p| matches!(p, Pauli::I | Pauli::Z))
    }

    /// Coefficient times the Kronecker product of the letters.
    pub fn to_dense(&self) -> ComplexMatrix {
        let dim = 1usize << self.letters.len();
        let (flip, phase) = self.phase_fn();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for b in 0..dim {
            m[(b ^ flip, b)] = phase(b) * self.coefficient;
        }
        m
    }

    /// `coefficient · tr(P ρ)`
    pub fn expectation(&self, rho: &ComplexMatrix) -> C64 {
        let (flip, phase) = self.phase_fn();
        let acc: C64 = (0..rho.rows()).map(|c| phase(c) * rho[(c, c ^ flip)]).sum();
        acc * self.coefficient
    }

    /// `coefficient · P v`
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let (flip, phase) = self.phase_fn();
        let mut out = vec![ZERO; v.len()];
        for (b, &a) in v.iter().enumerate() {
            out[b ^ flip] = phase(b) * a * self.coefficient;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliHamiltonian {
    n_qubits: usize,
    terms: Vec<PauliString>,
}

impl PauliHamiltonian {
    pub fn new(n_qubits: usize, terms: Vec<PauliString>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(invalid_arg("Hamiltonian needs at least one qubit"));
        }
        if let Some(t) = terms.iter().find(|t| t.letters.len() != n_qubits) {
            return Err(Error::DimensionMismatch {
                expected: n_qubits,
                found: t.letters.len(),
            });
        }
        Ok(Self { n_qubits, terms })
    }

    /// Builds one of the named benchmark chains: `"ising"` or `"xy"`.
    pub fn from_model_name(name: &str, chain_length: usize) -> Result<Self> {
        match name {
            "ising" => build_ising_chain(chain_length),
            "xy" => build_xy_chain(chain_length),
            other => Err(invalid_arg(format!("unknown model '{other}'"))),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(PauliString::is_diagonal)
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let dim = self.dim();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for t in &self.terms {
            let (flip, phase) = t.phase_fn();
            for b in 0..dim {
                m[(b ^ flip, b)] += phase(b) * t.coefficient;
            }
        }
        m
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::TooLarge(self.n_qubits));
        }
        eigh(&self.to_dense())
    }

    /// Ascending eigenvalues, length `2^n`.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        self.eigen().map(|e| e.values)
    }

    /// `H v`
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; v.len()];
        for t in &self.terms {
            for (o, x) in out.iter_mut().zip(t.apply(v)) {
                *o += x;
            }
        }
        out
    }

    /// `tr(H ρ)` for a factored state `ρ = ΦΦ†`.
    pub fn expectation_factor(&self, state: &StateFactor) -> Result<f64> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        let phi = state.factor();
        let mut acc = 0.0;
        for a in 0..phi.cols() {
            let col = phi.column(a);
            let h_col = self.apply(&col);
            acc += col.iter().zip(&h_col).map(|(x, y)| (x.conj() * y).re).sum::<f64>();
        }
        Ok(acc)
    }
}

/// `−Σᵢ Zᵢ Zᵢ₊₁` on a ring of `chain_length` sites.
pub fn build_ising_chain(chain_length: usize) -> Result<PauliHamiltonian> {
    if chain_length < 2 {
        return Err(invalid_arg("chain length must be at least 2"));
    }
    let terms = (0..chain_length)
        .map(|i| {
            let j = (i + 1) % chain_length;
            PauliString::from_sites(chain_length, -1.0, &[(i, Pauli::Z), (j, Pauli::Z)])
        })
        .collect();
    PauliHamiltonian::new(chain_length, terms)
}

/// `−Σᵢ (Xᵢ Xᵢ₊₁ + Yᵢ Yᵢ₊₁)` on a ring. At length 2 the single bond appears twice.
pub fn build_xy_chain(chain_length: usize) -> Result<PauliHamiltonian> {
    if chain_length < 2 {
        return Err(invalid_arg("chain length must be at least 2"));
    }
    let mut terms = Vec::with_capacity(2 * chain_length);
    for letter in [Pauli::X, Pauli::Y] {
        for i in 0..chain_length {
            let j = (i + 1) % chain_length;
            terms.push(PauliString::from_sites(chain_length, -1.0, &[(i, letter), (j, letter)]));
        }
    }
    PauliHamiltonian::new(chain_length, terms)
}

pub fn to_dense(h: &PauliHamiltonian) -> ComplexMatrix {
    h.to_dense()
}

pub fn spectrum(h: &PauliHamiltonian) -> Result<Vec<f64>> {
    h.spectrum()
}

/// Distance from the lowest level to the next distinct level.
pub fn spectral_gap(h: &PauliHamiltonian) -> Result<f64> {
    let values = h.spectrum()?;
    let ground = values[0];
    values
        .iter()
        .find(|&&l| l - ground > DEGENERACY_TOLERANCE)
        .map(|&l| l - ground)
        .ok_or(Error::DegenerateSpectrum)
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(invalid_arg(format!(
            "inverse temperature must be finite and >= 0, got {beta}"
        )));
    }
    Ok(())
}

/// Boltzmann weights `e^{−β(λᵢ − λ₀)}/Z'` of an ascending spectrum.
fn boltzmann(values: &[f64], beta: f64) -> Vec<f64> {
    let ground = values[0];
    let w: Vec<f64> = values.iter().map(|&l| (-beta * (l - ground)).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// `exp(−βH)/tr exp(−βH)`; `beta = 0` gives the maximally mixed state.
pub fn gibbs_state(h: &PauliHamiltonian, beta: f64) -> Result<DensityMatrix> {
    check_beta(beta)?;
    let eig = h.eigen()?;
    let probs = boltzmann(&eig.values, beta);
    // eigenvalues come back sorted, so map them by position
    let n = probs.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (k, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = eig.vectors[(i, k)] * p;
            if vik == ZERO {
                continue;
            }
            for j in 0..n {
                m[(i, j)] += vik * eig.vectors[(j, k)].conj();
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(h.n_qubits(), m))
}

/// `ln tr exp(−βH)`, evaluated with the ground energy factored out.
pub fn log_partition_function(h: &PauliHamiltonian, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let values = h.spectrum()?;
    let ground = values[0];
    let sum: f64 = values.iter().map(|&l| (-beta * (l - ground)).exp()).sum();
    Ok(-beta * ground + sum.ln())
}

/// `Re tr(H ρ)`
pub fn energy_expectation(h: &PauliHamiltonian, rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: rho.dim(),
        });
    }
    let z: C64 = h.terms.iter().map(|t| t.expectation(rho.matrix())).sum();
    debug_assert!(z.im.abs() <= 1e-9 * (1.0 + z.re.abs()));
    Ok(z.re)
}
