//! Gradients of the truncated free energy, ADAM, and the training loop.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::{FRAC_PI_2, TAU};

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{output_factor, output_factor_shifted, output_state, ParameterizedCircuit, RegisterLayout};
use crate::error::{invalid_arg, Error, Result};
use crate::estimator::{sample_pm1, ShotConfig};
use crate::hamiltonian::{gibbs_state, PauliHamiltonian, PauliString};
use crate::linalg::ComplexMatrix;
use crate::loss::{
    check_positive_beta, trace_powers_factor, truncated_free_energy, truncated_free_energy_factor,
    TruncationCoefficients,
};
use crate::state::StateFactor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GradientMode {
    ParameterShift,
    FiniteDifference,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LossMode {
    Exact,
    /// Energy terms and trace powers are replaced by shot averages.
    Sampled(ShotConfig),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub beta: f64,
    pub order: usize,
    pub learning_rate: f64,
    pub max_iters: usize,
    pub tolerance: f64,
    pub init_seed: u64,
    pub init_range: (f64, f64),
    pub gradient_mode: GradientMode,
    pub loss_mode: LossMode,
    /// Step of the central differences used in finite-difference mode.
    pub fd_step: f64,
}

impl TrainConfig {
    /// Defaults: `η = 0.1`, 200 iterations, tolerance `1e-6`, parameters drawn from
    /// `[0, 2π)`, exact loss. Order 2 uses parameter shifts, other orders use
    /// finite differences.
    pub fn new(beta: f64, order: usize) -> Self {
        Self {
            beta,
            order,
            learning_rate: 0.1,
            max_iters: 200,
            tolerance: 1e-6,
            init_seed: 0,
            init_range: (0.0, TAU),
            gradient_mode: if order == 2 {
                GradientMode::ParameterShift
            } else {
                GradientMode::FiniteDifference
            },
            loss_mode: LossMode::Exact,
            fd_step: 1e-5,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.init_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_positive_beta(self.beta)?;
        TruncationCoefficients::new(self.order)?;
        if !(self.learning_rate > 0.0) {
            return Err(invalid_arg("learning rate must be > 0"));
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid_arg("tolerance must be > 0"));
        }
        if self.max_iters == 0 {
            return Err(invalid_arg("max_iters must be at least 1"));
        }
        if !(self.fd_step > 0.0) {
            return Err(invalid_arg("finite-difference step must be > 0"));
        }
        let (lo, hi) = self.init_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(invalid_arg(format!("bad init range [{lo}, {hi}]")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub loss: f64,
    /// Fidelity to the exact Gibbs state. Diagnostic only.
    pub fidelity: f64,
    pub grad_max_norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainTrace {
    pub initial_theta: Vec<f64>,
    pub initial_loss: f64,
    pub initial_fidelity: f64,
    pub records: Vec<IterationRecord>,
    pub theta: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

impl TrainTrace {
    pub fn final_loss(&self) -> f64 {
        self.records.last().map_or(self.initial_loss, |r| r.loss)
    }

    pub fn final_fidelity(&self) -> f64 {
        self.records.last().map_or(self.initial_fidelity, |r| r.fidelity)
    }

    /// Best fidelity among the iterations numbered `≤ iteration`.
    pub fn fidelity_within(&self, iteration: usize) -> f64 {
        self.records
            .iter()
            .filter(|r| r.iteration <= iteration)
            .map(|r| r.fidelity)
            .fold(self.initial_fidelity, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    /// `β₁ = 0.9`, `β₂ = 0.999`, `ε = 1e-8`.
    pub fn new(n_params: usize) -> Self {
        Self {
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    /// One bias-corrected ADAM update of `theta` in place.
    pub fn step(&mut self, theta: &mut [f64], gradient: &[f64], eta: f64) -> Result<()> {
        let n = self.m.len();
        for len in [theta.len(), gradient.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        self.t += 1;
        let t = self.t as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        for i in 0..n {
            let g = gradient[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            theta[i] -= eta * m_hat / (v_hat.sqrt() + self.epsilon);
        }
        Ok(())
    }
}

/// Functional form of [`AdamState::step`].
pub fn adam_step(state: &AdamState, theta: &[f64], gradient: &[f64], eta: f64) -> Result<(AdamState, Vec<f64>)> {
    let mut next = state.clone();
    let mut theta = theta.to_vec();
    next.step(&mut theta, gradient, eta)?;
    Ok((next, theta))
}

/// Central differences `(L(θ + h e_m) − L(θ − h e_m)) / 2h`.
pub fn gradient_finite_difference(
    mut loss: impl FnMut(&[f64]) -> Result<f64>,
    theta: &[f64],
    step: f64,
) -> Result<Vec<f64>> {
    if !(step > 0.0) {
        return Err(invalid_arg("finite-difference step must be > 0"));
    }
    let mut probe = theta.to_vec();
    let mut grad = Vec::with_capacity(theta.len());
    for m in 0..theta.len() {
        probe[m] = theta[m] + step;
        let plus = loss(&probe)?;
        probe[m] = theta[m] - step;
        let minus = loss(&probe)?;
        probe[m] = theta[m];
        grad.push((plus - minus) / (2.0 * step));
    }
    Ok(grad)
}

fn check_problem(circ: &ParameterizedCircuit, h: &PauliHamiltonian, layout: &RegisterLayout) -> Result<()> {
    if circ.n_qubits() != layout.total() {
        return Err(Error::DimensionMismatch {
            expected: layout.total(),
            found: circ.n_qubits(),
        });
    }
    if h.n_qubits() != layout.n_system {
        return Err(Error::DimensionMismatch {
            expected: layout.n_system,
            found: h.n_qubits(),
        });
    }
    if circ.has_reset() {
        return Err(Error::InvalidGate("training circuits must be reset-free".into()));
    }
    Ok(())
}

/// Exact `F_K(θ)` through the density-matrix output state.
pub fn loss_exact(
    circ: &ParameterizedCircuit,
    theta: &[f64],
    layout: &RegisterLayout,
    h: &PauliHamiltonian,
    beta: f64,
    order: usize,
) -> Result<f64> {
    truncated_free_energy(h, &output_state(circ, theta, layout)?, beta, order)
}

/// `tr(ρ₊ ρʲ)` for `j = 1..=order` given `G = Φ†Φ` powers and `C = Φ†Φ₊`.
fn shifted_overlaps(gram_powers: &[ComplexMatrix], cross: &ComplexMatrix) -> Vec<f64> {
    // tr(Φ₊Φ₊†(ΦΦ†)ʲ) = tr(C† G^{j−1} C)
    let cross_adj = cross.adjoint();
    gram_powers
        .iter()
        .map(|gp| cross_adj.matmul(&gp.matmul(cross)).trace().re)
        .collect()
}

/// Parameter-shift gradient of `F_K` for any order.
///
/// Each `RY` occurrence contributes `½(E₊ − E₋) − β⁻¹ Σ_{j≥1} C_j (j+1)/2 (tr(ρ₊ρʲ) − tr(ρ₋ρʲ))`
/// with the occurrence shifted by `±π/2`, and occurrences sharing a parameter add up.
/// At order 2 this reads `½ΔK + 2β⁻¹ΔO − ¾β⁻¹ΔG`.
pub fn gradient_parameter_shift(
    circ: &ParameterizedCircuit,
    theta: &[f64],
    h: &PauliHamiltonian,
    beta: f64,
    order: usize,
    layout: &RegisterLayout,
) -> Result<Vec<f64>> {
    check_problem(circ, h, layout)?;
    check_positive_beta(beta)?;
    let coeffs = TruncationCoefficients::new(order)?;
    let base = output_factor(circ, theta, layout)?;
    let gram = base.cross_gram(&base);
    // G⁰ … G^{K−1}
    let mut gram_powers = Vec::with_capacity(order);
    gram_powers.push(ComplexMatrix::identity(gram.rows()));
    for j in 1..order {
        let next = gram_powers[j - 1].matmul(&gram);
        gram_powers.push(next);
    }
    let c = coeffs.as_slice();
    let mut grad = vec![0.0; circ.n_params()];
    for (index, gate) in circ.gates().iter().enumerate() {
        let Some(m) = gate.param_index() else { continue };
        let mut side = [0.0f64; 2];
        for (s, delta) in [FRAC_PI_2, -FRAC_PI_2].into_iter().enumerate() {
            let shifted = output_factor_shifted(circ, theta, layout, Some((index, delta)))?;
            let energy = h.expectation_factor(&shifted)?;
            let overlaps = shifted_overlaps(&gram_powers, &base.cross_gram(&shifted));
            let entropy: f64 = (1..=order)
                .map(|j| c[j] * (j as f64 + 1.0) / 2.0 * overlaps[j - 1])
                .sum();
            side[s] = 0.5 * energy - entropy / beta;
        }
        grad[m] += side[0] - side[1];
    }
    Ok(grad)
}

/// Parameter-shift gradient of `F₂`.
pub fn gradient_parameter_shift_f2(
    circ: &ParameterizedCircuit,
    theta: &[f64],
    h: &PauliHamiltonian,
    beta: f64,
    layout: &RegisterLayout,
) -> Result<Vec<f64>> {
    gradient_parameter_shift(circ, theta, h, beta, 2, layout)
}

/// Evaluates the loss for a configured mode. Sampled mode draws each energy term
/// and each `tr(ρ^{j+1})` as a ±1 shot average around its exact value.
struct LossEvaluator<'a> {
    circ: &'a ParameterizedCircuit,
    layout: &'a RegisterLayout,
    h: &'a PauliHamiltonian,
    words: Vec<(f64, PauliString)>,
    coeffs: TruncationCoefficients,
    beta: f64,
    sampler: Option<(ChaCha8Rng, u64)>,
}

impl<'a> LossEvaluator<'a> {
    fn new(
        circ: &'a ParameterizedCircuit,
        layout: &'a RegisterLayout,
        h: &'a PauliHamiltonian,
        cfg: &TrainConfig,
    ) -> Result<Self> {
        let sampler = match cfg.loss_mode {
            LossMode::Exact => None,
            LossMode::Sampled(shots) => Some((ChaCha8Rng::seed_from_u64(shots.seed()), shots.shots())),
        };
        let words = h
            .terms()
            .iter()
            .map(|t| (t.coefficient, PauliString::new(1.0, t.letters.clone())))
            .collect();
        Ok(Self {
            circ,
            layout,
            h,
            words,
            coeffs: TruncationCoefficients::new(cfg.order)?,
            beta: cfg.beta,
            sampler,
        })
    }

    fn exact_at(&self, theta: &[f64]) -> Result<f64> {
        let state = output_factor(self.circ, theta, self.layout)?;
        truncated_free_energy_factor(self.h, &state, self.beta, self.coeffs.order())
    }

    fn at(&mut self, theta: &[f64]) -> Result<(f64, StateFactor)> {
        let state = output_factor(self.circ, theta, self.layout)?;
        let Some((rng, shots)) = self.sampler.as_mut() else {
            let value = truncated_free_energy_factor(self.h, &state, self.beta, self.coeffs.order())?;
            return Ok((value, state));
        };
        let phi = state.factor();
        let mut energy = 0.0;
        for (coefficient, word) in &self.words {
            let mut e = 0.0;
            for a in 0..phi.cols() {
                let col = phi.column(a);
                e += col
                    .iter()
                    .zip(word.apply(&col))
                    .map(|(x, y)| (x.conj() * y).re)
                    .sum::<f64>();
            }
            energy += coefficient * sample_pm1(rng, e, *shots).0;
        }
        let mut traces = trace_powers_factor(&state, self.coeffs.order() + 1);
        // tr(ρ) = 1 needs no measurement
        for t in traces.iter_mut().skip(1) {
            *t = sample_pm1(rng, *t, *shots).0;
        }
        Ok((energy - self.coeffs.combine(&traces) / self.beta, state))
    }
}

/// Trains `circ` toward the Gibbs state of `h` at `cfg.beta`.
///
/// Stops when consecutive losses differ by at most `cfg.tolerance` or after
/// `cfg.max_iters` ADAM steps. The fidelity to the exact Gibbs state is recorded
/// each iteration and never feeds back into the optimization.
pub fn train(
    circ: &ParameterizedCircuit,
    layout: &RegisterLayout,
    h: &PauliHamiltonian,
    cfg: &TrainConfig,
) -> Result<TrainTrace> {
    cfg.validate()?;
    check_problem(circ, h, layout)?;
    let gibbs = gibbs_state(h, cfg.beta)?;
    let mut eval = LossEvaluator::new(circ, layout, h, cfg)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.init_seed);
    let (lo, hi) = cfg.init_range;
    let mut theta: Vec<f64> = (0..circ.n_params())
        .map(|_| lo + (hi - lo) * rng.gen::<f64>())
        .collect();
    let initial_theta = theta.clone();

    let (initial_loss, state) = eval.at(&theta)?;
    if !initial_loss.is_finite() {
        return Err(Error::NonFiniteLoss { iteration: 0 });
    }
    let initial_fidelity = state.fidelity(&gibbs)?;

    let mut adam = AdamState::new(circ.n_params());
    let mut records = Vec::with_capacity(cfg.max_iters);
    let mut previous = initial_loss;
    let mut converged = false;
    for iteration in 1..=cfg.max_iters {
        let grad = match cfg.gradient_mode {
            GradientMode::ParameterShift => gradient_parameter_shift(circ, &theta, h, cfg.beta, cfg.order, layout)?,
            GradientMode::FiniteDifference => gradient_finite_difference(|t| eval.exact_at(t), &theta, cfg.fd_step)?,
        };
        adam.step(&mut theta, &grad, cfg.learning_rate)?;
        let (loss, state) = eval.at(&theta)?;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { iteration });
        }
        records.push(IterationRecord {
            iteration,
            loss,
            fidelity: state.fidelity(&gibbs)?,
            grad_max_norm: grad.iter().fold(0.0, |acc, g| acc.max(g.abs())),
        });
        if (loss - previous).abs() <= cfg.tolerance {
            converged = true;
            break;
        }
        previous = loss;
    }
    Ok(TrainTrace {
        initial_theta,
        initial_loss,
        initial_fidelity,
        iterations: records.len(),
        records,
        theta,
        converged,
    })
}

/// `f″(x) = 4 − 3x` for `f(x) = 2x² − ½x³ − 3/2`.
pub fn convexity_second_derivative(x: f64) -> f64 {
    4.0 - 3.0 * x
}

/// Checks `f″(x) ≥ 1` on a 1001-point grid over `[0, 1]`.
pub fn check_convexity_scalar() -> bool {
    (0..=1000).all(|i| convexity_second_derivative(i as f64 / 1000.0) >= 1.0)
}
