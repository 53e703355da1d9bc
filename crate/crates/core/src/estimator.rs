//! Exact and shot-sampled estimators for the ingredients of the loss.
//!
//! Sampled estimators draw outcomes from the exact outcome distribution of the
//! simulated measurement (there is no hardware noise model). Every call seeds its
//! own ChaCha8 stream, so the result depends only on the inputs and the seed.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{apply_circuit, output_state, Gate, ParameterizedCircuit, RegisterLayout};
use crate::error::{invalid_arg, Error, Result};
use crate::hamiltonian::{energy_expectation, PauliHamiltonian, PauliString};
use crate::linalg::{ComplexMatrix, C64, ZERO};
use crate::loss::trace_powers;
use crate::state::{overlap_exact, DensityMatrix};

/// Largest register simulated for the measurement circuits below.
pub const MAX_CIRCUIT_QUBITS: usize = 13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ShotConfig {
    shots: u64,
    seed: u64,
}

impl ShotConfig {
    pub fn new(shots: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(invalid_arg("shot count must be at least 1"));
        }
        Ok(Self { shots, seed })
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EstimateMode {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateResult {
    pub value: f64,
    pub std_error: f64,
    pub mode: EstimateMode,
}

impl EstimateResult {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            mode: EstimateMode::Exact,
        }
    }
}

/// Mean of `shots` draws of a ±1 variable with `P(+1) = (1 + mean)/2`, and its
/// standard error.
pub(crate) fn sample_pm1(rng: &mut ChaCha8Rng, expectation: f64, shots: u64) -> (f64, f64) {
    let p = (0.5 * (1.0 + expectation)).clamp(0.0, 1.0);
    let plus = (0..shots).filter(|_| rng.gen_bool(p)).count() as f64;
    let n = shots as f64;
    let mean = (2.0 * plus - n) / n;
    (mean, ((1.0 - mean * mean).max(0.0) / n).sqrt())
}

/// `tr(Hρ)`. In sampled mode every Pauli term is measured separately with the full
/// shot budget and the coefficient-weighted means are summed.
pub fn estimate_energy(h: &PauliHamiltonian, rho: &DensityMatrix, cfg: Option<&ShotConfig>) -> Result<EstimateResult> {
    let exact = energy_expectation(h, rho)?;
    let Some(cfg) = cfg else {
        return Ok(EstimateResult::exact(exact));
    };
    let mut rng = cfg.rng();
    let (mut value, mut var) = (0.0, 0.0);
    for term in h.terms() {
        let word = PauliString::new(1.0, term.letters.clone());
        let e = word.expectation(rho.matrix()).re;
        let (mean, se) = sample_pm1(&mut rng, e, cfg.shots);
        value += term.coefficient * mean;
        var += (term.coefficient * se).powi(2);
    }
    Ok(EstimateResult {
        value,
        std_error: var.sqrt(),
        mode: EstimateMode::Sampled,
    })
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

fn check_circuit_size(n: usize) -> Result<()> {
    if n > MAX_CIRCUIT_QUBITS {
        return Err(Error::TooLarge(n));
    }
    Ok(())
}

/// Output distribution of the destructive swap test together with the parity
/// value `(−1)^{Σ aᵢbᵢ}` of each outcome.
fn destructive_swap_distribution(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Vec<(f64, f64)>> {
    check_same_dim(rho, sigma)?;
    let n = rho.n_qubits();
    check_circuit_size(2 * n)?;
    let mut gates: Vec<Gate> = (0..n).map(|i| Gate::cnot(i, n + i)).collect();
    gates.extend((0..n).map(Gate::h));
    let circ = ParameterizedCircuit::new(2 * n, gates)?;
    let out = apply_circuit(&circ, &[], &rho.tensor(sigma))?;
    let half = 1usize << n;
    Ok((0..out.dim())
        .map(|x| {
            let (a, b) = (x / half, x % half);
            let parity = if (a & b).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            (out.matrix()[(x, x)].re.max(0.0), parity)
        })
        .collect())
}

/// Exact expectation of the post-processed destructive swap test circuit.
pub fn destructive_swap_circuit_expectation(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(destructive_swap_distribution(rho, sigma)?
        .iter()
        .map(|(p, v)| p * v)
        .sum())
}

/// `tr(ρσ)` via the destructive swap test: transversal CNOTs from the ρ qubits onto
/// the σ qubits, Hadamards on the ρ qubits, then parity post-processing.
pub fn destructive_swap_overlap(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    cfg: Option<&ShotConfig>,
) -> Result<EstimateResult> {
    check_same_dim(rho, sigma)?;
    let Some(cfg) = cfg else {
        return Ok(EstimateResult::exact(overlap_exact(&[rho, sigma])?));
    };
    let dist = destructive_swap_distribution(rho, sigma)?;
    let mut cumulative = Vec::with_capacity(dist.len());
    let mut acc = 0.0;
    for (p, _) in &dist {
        acc += p;
        cumulative.push(acc);
    }
    let mut rng = cfg.rng();
    let mut sum = 0.0;
    for _ in 0..cfg.shots {
        let u = rng.gen::<f64>() * acc;
        let idx = cumulative.partition_point(|&c| c <= u).min(dist.len() - 1);
        sum += dist[idx].1;
    }
    let n = cfg.shots as f64;
    let mean = sum / n;
    Ok(EstimateResult {
        value: mean,
        std_error: ((1.0 - mean * mean).max(0.0) / n).sqrt(),
        mode: EstimateMode::Sampled,
    })
}

/// Traces out the qubits `[offset, offset + n_reg)` of an `n_total`-qubit state and
/// puts `replacement` in their place.
fn replace_register(
    state: &ComplexMatrix,
    n_total: usize,
    offset: usize,
    replacement: &ComplexMatrix,
) -> ComplexMatrix {
    let n_reg = replacement.rows().trailing_zeros() as usize;
    let low_bits = n_total - offset - n_reg;
    let reg_dim = 1usize << n_reg;
    let low_dim = 1usize << low_bits;
    let split = |i: usize| {
        let lo = i % low_dim;
        let reg = (i / low_dim) % reg_dim;
        let hi = i / (low_dim * reg_dim);
        (hi, reg, lo)
    };
    let join = |hi: usize, reg: usize, lo: usize| (hi * reg_dim + reg) * low_dim + lo;
    let dim = state.rows();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let (hi_i, reg_i, lo_i) = split(i);
        for j in 0..dim {
            let (hi_j, reg_j, lo_j) = split(j);
            let r = replacement[(reg_i, reg_j)];
            if r == ZERO {
                continue;
            }
            let reduced: C64 = (0..reg_dim)
                .map(|s| state[(join(hi_i, s, lo_i), join(hi_j, s, lo_j))])
                .sum();
            out[(i, j)] = reduced * r;
        }
    }
    out
}

/// Exact `⟨Z⟩` of the work ancilla in the reset-based overlap circuit, which equals
/// `Re tr(ρ₁ρ₂…ρ_k)`.
///
/// Registers are `[ancilla | slot₁ | slot₂]`. The ancilla starts in `|+⟩` and slot₁
/// holds `ρ₁`. For each further state the fresh slot₂ is prepared, a controlled
/// SWAP acts between the slots and slot₂ is reset. A final Hadamard precedes the
/// ancilla measurement.
pub fn overlap_circuit_expectation(states: &[&DensityMatrix]) -> Result<f64> {
    if states.len() < 2 {
        return Err(invalid_arg("overlap circuit needs at least two states"));
    }
    for s in &states[1..] {
        check_same_dim(states[0], s)?;
    }
    let m = states[0].n_qubits();
    let n_total = 1 + 2 * m;
    check_circuit_size(n_total)?;
    let cswap = ParameterizedCircuit::new(n_total, (0..m).map(|q| Gate::cswap(0, 1 + q, 1 + m + q)).collect())?;
    let reset = ParameterizedCircuit::new(n_total, (0..m).map(|q| Gate::reset(1 + m + q)).collect())?;
    let hadamard = ParameterizedCircuit::new(n_total, alloc::vec![Gate::h(0)])?;

    let mut state = apply_circuit(&hadamard, &[], &DensityMatrix::basis(n_total, 0))?;
    let prepare = |state: &DensityMatrix, offset: usize, rho: &DensityMatrix| {
        DensityMatrix::from_matrix_unchecked(n_total, replace_register(state.matrix(), n_total, offset, rho.matrix()))
    };
    state = prepare(&state, 1, states[0]);
    for rho in &states[1..] {
        state = prepare(&state, 1 + m, rho);
        state = apply_circuit(&cswap, &[], &state)?;
        state = apply_circuit(&reset, &[], &state)?;
    }
    state = apply_circuit(&hadamard, &[], &state)?;
    let half = state.dim() / 2;
    Ok((0..state.dim())
        .map(|i| {
            let p = state.matrix()[(i, i)].re;
            if i < half {
                p
            } else {
                -p
            }
        })
        .sum())
}

/// `tr(ρᵏ)` for the register-B state prepared by `circ`. Sampled mode measures the
/// ancilla of the reset-based overlap circuit `shots` times.
pub fn higher_order_overlap(
    circ: &ParameterizedCircuit,
    theta: &[f64],
    layout: &RegisterLayout,
    k: usize,
    cfg: Option<&ShotConfig>,
) -> Result<EstimateResult> {
    let rho = output_state(circ, theta, layout)?;
    higher_order_overlap_state(&rho, k, cfg)
}

/// [`higher_order_overlap`] for an explicit state.
pub fn higher_order_overlap_state(rho: &DensityMatrix, k: usize, cfg: Option<&ShotConfig>) -> Result<EstimateResult> {
    if k < 2 {
        return Err(invalid_arg(format!("overlap order must be at least 2, got {k}")));
    }
    let Some(cfg) = cfg else {
        let value = trace_powers(rho.matrix(), k)[k - 1];
        return Ok(EstimateResult::exact(value));
    };
    let copies: Vec<&DensityMatrix> = (0..k).map(|_| rho).collect();
    let z = overlap_circuit_expectation(&copies)?;
    let (value, std_error) = sample_pm1(&mut cfg.rng(), z, cfg.shots);
    Ok(EstimateResult {
        value,
        std_error,
        mode: EstimateMode::Sampled,
    })
}
