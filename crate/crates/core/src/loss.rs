//! Truncated entropy, free energies and the analytic bounds that accompany them.
//!
//! Entropies are in nats. `S_K(ρ) = Σ_{j=0}^{K} C_j tr(ρ^{j+1})` is the order-`K`
//! Taylor truncation of `−tr ρ ln ρ` around the identity.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::error::{invalid_arg, Result};
use crate::hamiltonian::{energy_expectation, PauliHamiltonian};
use crate::linalg::ComplexMatrix;
use crate::state::{von_neumann_entropy, DensityMatrix, StateFactor};

/// `C_0..C_K` of the truncated entropy.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationCoefficients {
    order: usize,
    c: Vec<f64>,
}

impl TruncationCoefficients {
    pub fn new(order: usize) -> Result<Self> {
        if order < 1 {
            return Err(invalid_arg("truncation order must be at least 1"));
        }
        let k_max = order;
        let mut c = Vec::with_capacity(k_max + 1);
        c.push((1..=k_max).map(|k| 1.0 / k as f64).sum());
        for j in 1..k_max {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let s: f64 = (j..=k_max).map(|k| binomial(k, j) / k as f64).sum();
            c.push(sign * s);
        }
        let sign = if k_max.is_multiple_of(2) { 1.0 } else { -1.0 };
        c.push(sign / k_max as f64);
        Ok(Self { order, c })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.c
    }

    /// `Σ_j C_j t[j]` where `t[j] = tr(ρ^{j+1})`.
    pub fn combine(&self, traces: &[f64]) -> f64 {
        debug_assert_eq!(traces.len(), self.c.len());
        self.c.iter().zip(traces).map(|(c, t)| c * t).sum()
    }
}

pub fn coefficients(order: usize) -> Result<TruncationCoefficients> {
    TruncationCoefficients::new(order)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `tr(ρ), tr(ρ²), …, tr(ρ^{m})` by repeated multiplication.
pub fn trace_powers(rho: &ComplexMatrix, m: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(m);
    if m == 0 {
        return out;
    }
    out.push(rho.trace().re);
    let mut power = rho.clone();
    for _ in 1..m {
        power = power.matmul(rho);
        out.push(power.trace().re);
    }
    out
}

/// Same as [`trace_powers`] for a factored state; works on the small Gram matrix.
pub fn trace_powers_factor(state: &StateFactor, m: usize) -> Vec<f64> {
    trace_powers(&state.cross_gram(state), m)
}

pub fn truncated_entropy(rho: &DensityMatrix, order: usize) -> Result<f64> {
    let c = TruncationCoefficients::new(order)?;
    Ok(c.combine(&trace_powers(rho.matrix(), order + 1)))
}

pub fn truncated_entropy_factor(state: &StateFactor, order: usize) -> Result<f64> {
    let c = TruncationCoefficients::new(order)?;
    Ok(c.combine(&trace_powers_factor(state, order + 1)))
}

/// `Σᵢ Σ_{k=1}^{K} λᵢ(1−λᵢ)^k / k`, the spectral form of the truncated entropy.
pub fn truncated_entropy_spectral(eigenvalues: &[f64], order: usize) -> f64 {
    eigenvalues
        .iter()
        .map(|&l| {
            let l = l.clamp(0.0, 1.0);
            (1..=order)
                .map(|k| l * (1.0 - l).powi(k as i32) / k as f64)
                .sum::<f64>()
        })
        .sum()
}

pub(crate) fn check_positive_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(invalid_arg(format!(
            "inverse temperature must be finite and > 0, got {beta}"
        )));
    }
    Ok(())
}

/// `tr(Hρ) − β⁻¹ S_K(ρ)`
pub fn truncated_free_energy(h: &PauliHamiltonian, rho: &DensityMatrix, beta: f64, order: usize) -> Result<f64> {
    check_positive_beta(beta)?;
    Ok(energy_expectation(h, rho)? - truncated_entropy(rho, order)? / beta)
}

pub fn truncated_free_energy_factor(h: &PauliHamiltonian, state: &StateFactor, beta: f64, order: usize) -> Result<f64> {
    check_positive_beta(beta)?;
    Ok(h.expectation_factor(state)? - truncated_entropy_factor(state, order)? / beta)
}

/// `tr(Hρ) − β⁻¹ S(ρ)`
pub fn free_energy(h: &PauliHamiltonian, rho: &DensityMatrix, beta: f64) -> Result<f64> {
    check_positive_beta(beta)?;
    Ok(energy_expectation(h, rho)? - von_neumann_entropy(rho) / beta)
}

fn check_order(order: usize) -> Result<()> {
    if order < 1 {
        return Err(invalid_arg("truncation order must be at least 1"));
    }
    Ok(())
}

/// Largest `Δ ∈ (0, e⁻¹)` with `−Δ ln Δ < (1−Δ)^{K+1}/(K+1)`.
///
/// `g(Δ) = (1−Δ)^{K+1}/(K+1) + Δ ln Δ` is strictly decreasing on the interval,
/// positive near 0 and negative at `e⁻¹`, so bisection brackets the crossing and
/// the lower end always satisfies the strict inequality.
pub fn delta_star(order: usize) -> Result<f64> {
    check_order(order)?;
    let g = |d: f64| (1.0 - d).powi(order as i32 + 1) / (order as f64 + 1.0) + d * d.ln();
    let (mut lo, mut hi) = (1e-300, (-1.0f64).exp());
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `r/(K+1) (1−Δ)^{K+1}` at a caller-chosen admissible `Δ`.
pub fn truncation_bound_with_delta(order: usize, rank: usize, delta: f64) -> Result<f64> {
    check_order(order)?;
    if rank < 1 {
        return Err(invalid_arg("rank must be at least 1"));
    }
    if !(delta > 0.0 && delta < (-1.0f64).exp()) {
        return Err(invalid_arg(format!("delta must lie in (0, 1/e), got {delta}")));
    }
    Ok(rank as f64 / (order as f64 + 1.0) * (1.0 - delta).powi(order as i32 + 1))
}

/// Upper bound on `|S(ρ) − S_K(ρ)|` for a state of the given rank.
pub fn truncation_bound(order: usize, rank: usize) -> Result<f64> {
    truncation_bound_with_delta(order, rank, delta_star(order)?)
}

/// Inputs and outputs of the fidelity-floor calculation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    pub order: usize,
    pub rank: usize,
    pub beta: f64,
    pub eps: f64,
    pub delta_star: f64,
    pub truncation_bound: f64,
    pub fidelity_floor: f64,
    /// The floor is nonpositive and carries no information.
    pub vacuous: bool,
}

/// `1 − √(2(βε + 2r/(K+1)(1−Δ)^{K+1}))`, reported unclamped.
///
/// The `δ₀` term enters without a factor of `β`, exactly as the floor is usually
/// stated. Its derivation bounds the relative entropy by `2δ₀ + βε`, which would
/// call for `β` on both terms; the stated form is kept.
pub fn fidelity_floor_theorem1(order: usize, rank: usize, beta: f64, eps: f64) -> Result<BoundReport> {
    check_positive_beta(beta)?;
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(invalid_arg(format!("eps must be finite and >= 0, got {eps}")));
    }
    let delta = delta_star(order)?;
    let trunc = truncation_bound_with_delta(order, rank, delta)?;
    let floor = 1.0 - (2.0 * (beta * eps + 2.0 * trunc)).sqrt();
    Ok(BoundReport {
        order,
        rank,
        beta,
        eps,
        delta_star: delta,
        truncation_bound: trunc,
        fidelity_floor: floor,
        vacuous: floor <= 0.0,
    })
}

/// `1/√(1 + (N/2 − 1) e^{−βg})` for the two-level cat-state mixture.
pub fn prop2_fidelity_bound(dim: usize, beta: f64, gap: f64) -> Result<f64> {
    if dim < 4 || !dim.is_power_of_two() {
        return Err(invalid_arg(format!("dimension must be a power of two >= 4, got {dim}")));
    }
    check_positive_beta(beta)?;
    if !(gap > 0.0) {
        return Err(invalid_arg(format!("spectral gap must be > 0, got {gap}")));
    }
    Ok(1.0 / (1.0 + (dim as f64 / 2.0 - 1.0) * (-beta * gap).exp()).sqrt())
}

/// `1 − √(2δ)`
pub fn lemma1_fidelity_floor(delta: f64) -> Result<f64> {
    if !(delta >= 0.0) {
        return Err(invalid_arg(format!("relative entropy must be >= 0, got {delta}")));
    }
    Ok(1.0 - (2.0 * delta).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_ising_chain, gibbs_state, log_partition_function, Pauli, PauliString};
    use crate::state::PureState;
    use alloc::vec;
    use core::f64::consts::LN_2;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(coefficients(1).unwrap().as_slice(), &[1.0, -1.0]);
        let c2 = coefficients(2).unwrap();
        assert!(c2
            .as_slice()
            .iter()
            .zip([1.5, -2.0, 0.5])
            .all(|(a, b)| close(*a, b, 1e-15)));
        assert!(close(coefficients(3).unwrap().as_slice()[3], -1.0 / 3.0, 1e-15));
        assert!(coefficients(0).is_err());
        for k in 1..=10 {
            let s: f64 = coefficients(k).unwrap().as_slice().iter().sum();
            assert!(s.abs() < 1e-9, "K={k}: {s}");
        }
    }

    #[test]
    fn truncated_entropy_examples() {
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!(close(truncated_entropy(&mixed, 2).unwrap(), 0.625, 1e-15));
        assert!(close(truncated_entropy(&mixed, 1).unwrap(), 0.5, 1e-15));
        let pure = PureState::basis(2, 3).to_density();
        for k in 1..6 {
            assert!(truncated_entropy(&pure, k).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn free_energy_examples() {
        let z = PauliHamiltonian::new(1, vec![PauliString::new(1.0, vec![Pauli::Z])]).unwrap();
        let f = free_energy(&z, &DensityMatrix::maximally_mixed(1), 1.0).unwrap();
        assert!(close(f, -LN_2, 1e-12));
        let ising = build_ising_chain(4).unwrap();
        let beta = 0.7;
        let g = gibbs_state(&ising, beta).unwrap();
        let want = -log_partition_function(&ising, beta).unwrap() / beta;
        assert!(close(free_energy(&ising, &g, beta).unwrap(), want, 1e-10));
        assert!(free_energy(&ising, &g, 0.0).is_err());
    }

    #[test]
    fn truncated_free_energy_examples() {
        let h = build_ising_chain(5).unwrap();
        let ground = DensityMatrix::basis(5, 0);
        assert!(close(truncated_free_energy(&h, &ground, 2.0, 2).unwrap(), -5.0, 1e-12));
        let mut diag = [0.0; 32];
        diag[0] = 0.5;
        diag[31] = 0.5;
        let cat = DensityMatrix::from_diagonal(&diag).unwrap();
        let beta = 2.0;
        let want = -5.0 - 0.625 / beta;
        assert!(close(truncated_free_energy(&h, &cat, beta, 2).unwrap(), want, 1e-12));
    }

    #[test]
    fn delta_star_properties() {
        let mut prev = f64::INFINITY;
        for k in 1..=8 {
            let d = delta_star(k).unwrap();
            assert!(d > 0.0 && d < (-1.0f64).exp());
            assert!(-d * d.ln() < (1.0 - d).powi(k as i32 + 1) / (k as f64 + 1.0));
            assert!(d <= prev);
            prev = d;
        }
        // Δ = 0.01 is admissible at K = 2.
        let d: f64 = 0.01;
        assert!(-d * d.ln() < (1.0 - d).powi(3) / 3.0);
    }

    #[test]
    fn truncation_bound_examples() {
        assert!(close(
            truncation_bound_with_delta(2, 2, 0.01).unwrap(),
            2.0 * 0.99f64.powi(3) / 3.0,
            1e-15
        ));
        assert!(LN_2 - 0.625 <= truncation_bound(2, 2).unwrap());
        assert!(truncation_bound(0, 1).is_err());
        assert!(truncation_bound(2, 0).is_err());
    }

    #[test]
    fn theorem1_floor() {
        let r = fidelity_floor_theorem1(2, 2, 2.0, 0.0).unwrap();
        let want = 1.0 - (2.0 * 2.0 * truncation_bound(2, 2).unwrap()).sqrt();
        assert!(close(r.fidelity_floor, want, 1e-15));
        assert!(r.vacuous);
        let big = fidelity_floor_theorem1(400, 2, 2.0, 0.0).unwrap();
        assert!(big.fidelity_floor > 0.5 && !big.vacuous);
        let worse = fidelity_floor_theorem1(400, 2, 2.0, 0.01).unwrap();
        assert!(worse.fidelity_floor <= big.fidelity_floor);
    }

    #[test]
    fn prop2_examples() {
        assert!(close(prop2_fidelity_bound(32, 1.25, 4.0).unwrap(), 0.953, 1e-3));
        let want = 1.0 / (1.0 + 15.0 * (-8.0f64).exp()).sqrt();
        assert!(close(prop2_fidelity_bound(32, 2.0, 4.0).unwrap(), want, 1e-15));
        assert!(close(want, 0.99749, 1e-5));
        assert!(close(prop2_fidelity_bound(32, 100.0, 4.0).unwrap(), 1.0, 1e-12));
        assert!(prop2_fidelity_bound(2, 1.0, 4.0).is_err());
        assert!(prop2_fidelity_bound(24, 1.0, 4.0).is_err());
    }

    #[test]
    fn lemma1_examples() {
        assert_eq!(lemma1_fidelity_floor(0.0).unwrap(), 1.0);
        assert!(close(lemma1_fidelity_floor(0.5).unwrap(), 0.0, 1e-15));
        assert!(close(lemma1_fidelity_floor(0.02).unwrap(), 0.8, 1e-15));
        assert!(lemma1_fidelity_floor(-1.0).is_err());
    }
}
