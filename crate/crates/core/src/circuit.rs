//! Parameterized circuits and their simulation.
//!
//! `RY(θ) = exp(−iθY/2)`. Register A (the ancilla purification register) takes the
//! lowest qubit indices and register B follows it. Density-matrix simulation
//! supports every gate kind including `RESET`; reset-free circuits acting on a
//! pure input may also be run on state vectors, which is what the trainer uses.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::error::{invalid_arg, Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};
use crate::state::{bit_shift, DensityMatrix, PureState, StateFactor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Ry,
    H,
    Cnot,
    Cz,
    Cswap,
    Reset,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Ry | GateKind::H | GateKind::Reset => 1,
            GateKind::Cnot | GateKind::Cz => 2,
            GateKind::Cswap => 3,
        }
    }
}

/// A gate acting on `targets`. Controlled gates list the control first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    kind: GateKind,
    targets: Vec<usize>,
    param: Option<usize>,
}

impl Gate {
    pub fn ry(qubit: usize, param: usize) -> Self {
        Self {
            kind: GateKind::Ry,
            targets: vec![qubit],
            param: Some(param),
        }
    }

    pub fn h(qubit: usize) -> Self {
        Self::fixed(GateKind::H, vec![qubit])
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::fixed(GateKind::Cnot, vec![control, target])
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Self::fixed(GateKind::Cz, vec![a, b])
    }

    pub fn cswap(control: usize, a: usize, b: usize) -> Self {
        Self::fixed(GateKind::Cswap, vec![control, a, b])
    }

    pub fn reset(qubit: usize) -> Self {
        Self::fixed(GateKind::Reset, vec![qubit])
    }

    fn fixed(kind: GateKind, targets: Vec<usize>) -> Self {
        Self {
            kind,
            targets,
            param: None,
        }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn param_index(&self) -> Option<usize> {
        self.param
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.targets.len() != self.kind.arity() {
            return Err(Error::InvalidGate(format!(
                "{:?} takes {} qubits, got {}",
                self.kind,
                self.kind.arity(),
                self.targets.len()
            )));
        }
        if let Some(&index) = self.targets.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::QubitOutOfRange { index, n_qubits });
        }
        for (i, a) in self.targets.iter().enumerate() {
            if self.targets[i + 1..].contains(a) {
                return Err(Error::InvalidGate(format!("{:?} repeats qubit {a}", self.kind)));
            }
        }
        if (self.kind == GateKind::Ry) != self.param.is_some() {
            return Err(Error::InvalidGate(format!(
                "{:?} parameter binding is inconsistent",
                self.kind
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParameterizedCircuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
}

impl ParameterizedCircuit {
    /// Validates the gates; parameter indices must cover `0..n_params` (repeats allowed).
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(invalid_arg("circuit needs at least one qubit"));
        }
        for g in &gates {
            g.validate(n_qubits)?;
        }
        let n_params = gates.iter().filter_map(|g| g.param).max().map_or(0, |m| m + 1);
        let mut seen = vec![false; n_params];
        for p in gates.iter().filter_map(|g| g.param) {
            seen[p] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidGate(format!("parameter {missing} is never used")));
        }
        Ok(Self {
            n_qubits,
            gates,
            n_params,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    pub fn has_reset(&self) -> bool {
        self.count(GateKind::Reset) > 0
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params {
            return Err(Error::ParameterCount {
                expected: self.n_params,
                found: theta.len(),
            });
        }
        Ok(())
    }
}

/// Sizes of the ancilla register A and the system register B.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RegisterLayout {
    pub n_ancilla: usize,
    pub n_system: usize,
}

impl RegisterLayout {
    pub fn new(n_ancilla: usize, n_system: usize) -> Result<Self> {
        if n_system == 0 {
            return Err(invalid_arg("system register needs at least one qubit"));
        }
        Ok(Self { n_ancilla, n_system })
    }

    pub fn total(&self) -> usize {
        self.n_ancilla + self.n_system
    }

    pub fn system_qubits(&self) -> Vec<usize> {
        (self.n_ancilla..self.total()).collect()
    }
}

type Mat2 = [[C64; 2]; 2];

fn ry_matrix(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ]
}

fn hadamard_matrix() -> Mat2 {
    let h = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

/// Index permutation of a CNOT or CSWAP; both are involutions.
fn permutation(kind: GateKind, masks: &[usize]) -> impl Fn(usize) -> usize + '_ {
    move |i: usize| match kind {
        GateKind::Cnot => {
            if i & masks[0] != 0 {
                i ^ masks[1]
            } else {
                i
            }
        }
        GateKind::Cswap => {
            let (a, b) = (i & masks[1] != 0, i & masks[2] != 0);
            if i & masks[0] != 0 && a != b {
                i ^ masks[1] ^ masks[2]
            } else {
                i
            }
        }
        _ => i,
    }
}

fn masks_for(n_qubits: usize, targets: &[usize]) -> Vec<usize> {
    targets.iter().map(|&q| 1usize << bit_shift(n_qubits, q)).collect()
}

fn resolve_angle(gate: &Gate, index: usize, theta: &[f64], shift: Option<(usize, f64)>) -> f64 {
    let base = theta[gate.param.expect("RY carries a parameter")];
    match shift {
        Some((g, delta)) if g == index => base + delta,
        _ => base,
    }
}

mod dm {
    use super::*;

    pub fn single(rho: &mut [C64], dim: usize, mask: usize, u: &Mat2) {
        for i0 in (0..dim).filter(|i| i & mask == 0) {
            let i1 = i0 | mask;
            for j in 0..dim {
                let (r0, r1) = (rho[i0 * dim + j], rho[i1 * dim + j]);
                rho[i0 * dim + j] = u[0][0] * r0 + u[0][1] * r1;
                rho[i1 * dim + j] = u[1][0] * r0 + u[1][1] * r1;
            }
        }
        let ud = [[u[0][0].conj(), u[0][1].conj()], [u[1][0].conj(), u[1][1].conj()]];
        for i in 0..dim {
            let row = &mut rho[i * dim..(i + 1) * dim];
            for j0 in (0..dim).filter(|j| j & mask == 0) {
                let j1 = j0 | mask;
                let (c0, c1) = (row[j0], row[j1]);
                row[j0] = c0 * ud[0][0] + c1 * ud[0][1];
                row[j1] = c0 * ud[1][0] + c1 * ud[1][1];
            }
        }
    }

    pub fn permute(rho: &mut Vec<C64>, dim: usize, perm: impl Fn(usize) -> usize) {
        let map: Vec<usize> = (0..dim).map(&perm).collect();
        let mut out = vec![ZERO; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                out[i * dim + j] = rho[map[i] * dim + map[j]];
            }
        }
        *rho = out;
    }

    pub fn cz(rho: &mut [C64], dim: usize, both: usize) {
        let sign = |i: usize| i & both == both;
        for i in 0..dim {
            for j in 0..dim {
                if sign(i) != sign(j) {
                    rho[i * dim + j] = -rho[i * dim + j];
                }
            }
        }
    }

    /// `|0⟩⟨0|_q ⊗ tr_q ρ`
    pub fn reset(rho: &mut Vec<C64>, dim: usize, mask: usize) {
        let mut out = vec![ZERO; dim * dim];
        for i in (0..dim).filter(|i| i & mask == 0) {
            for j in (0..dim).filter(|j| j & mask == 0) {
                out[i * dim + j] = rho[i * dim + j] + rho[(i | mask) * dim + (j | mask)];
            }
        }
        *rho = out;
    }
}

mod sv {
    use super::*;

    pub fn single(psi: &mut [C64], mask: usize, u: &Mat2) {
        for i0 in (0..psi.len()).filter(|i| i & mask == 0) {
            let i1 = i0 | mask;
            let (a0, a1) = (psi[i0], psi[i1]);
            psi[i0] = u[0][0] * a0 + u[0][1] * a1;
            psi[i1] = u[1][0] * a0 + u[1][1] * a1;
        }
    }

    pub fn permute(psi: &mut [C64], perm: impl Fn(usize) -> usize) {
        for i in 0..psi.len() {
            let j = perm(i);
            if j > i {
                psi.swap(i, j);
            }
        }
    }

    pub fn cz(psi: &mut [C64], both: usize) {
        for (i, a) in psi.iter_mut().enumerate() {
            if i & both == both {
                *a = -*a;
            }
        }
    }
}

/// Density-matrix simulation with an optional extra angle on one gate occurrence.
pub(crate) fn simulate_density(
    circ: &ParameterizedCircuit,
    theta: &[f64],
    input: &DensityMatrix,
    shift: Option<(usize, f64)>,
) -> Result<DensityMatrix> {
    circ.check_theta(theta)?;
    if input.n_qubits() != circ.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: 1 << circ.n_qubits,
            found: input.dim(),
        });
    }
    let n = circ.n_qubits;
    let dim = 1usize << n;
    let mut rho = input.matrix().clone().into_vec();
    for (index, gate) in circ.gates.iter().enumerate() {
        let masks = masks_for(n, &gate.targets);
        match gate.kind {
            GateKind::Ry => {
                let u = ry_matrix(resolve_angle(gate, index, theta, shift));
                dm::single(&mut rho, dim, masks[0], &u);
            }
            GateKind::H => dm::single(&mut rho, dim, masks[0], &hadamard_matrix()),
            GateKind::Cnot | GateKind::Cswap => dm::permute(&mut rho, dim, permutation(gate.kind, &masks)),
            GateKind::Cz => dm::cz(&mut rho, dim, masks[0] | masks[1]),
            GateKind::Reset => dm::reset(&mut rho, dim, masks[0]),
        }
    }
    let matrix = ComplexMatrix::from_vec(dim, dim, rho)?;
    Ok(DensityMatrix::from_matrix_unchecked(n, matrix))
}

/// State-vector simulation of a reset-free circuit, with an optional extra angle
/// on one gate occurrence.
pub(crate) fn simulate_pure(
    circ: &ParameterizedCircuit,
    theta: &[f64],
    input: &PureState,
    shift: Option<(usize, f64)>,
) -> Result<PureState> {
    circ.check_theta(theta)?;
    if input.n_qubits() != circ.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: 1 << circ.n_qubits,
            found: input.dim(),
        });
    }
    let n = circ.n_qubits;
    let mut psi = input.clone();
    let amps = psi.amplitudes_mut();
    for (index, gate) in circ.gates.iter().enumerate() {
        let masks = masks_for(n, &gate.targets);
        match gate.kind {
            GateKind::Ry => {
                let u = ry_matrix(resolve_angle(gate, index, theta, shift));
                sv::single(amps, masks[0], &u);
            }
            GateKind::H => sv::single(amps, masks[0], &hadamard_matrix()),
            GateKind::Cnot | GateKind::Cswap => sv::permute(amps, permutation(gate.kind, &masks)),
            GateKind::Cz => sv::cz(amps, masks[0] | masks[1]),
            GateKind::Reset => {
                return Err(Error::InvalidGate(
                    "RESET is not unitary; use density-matrix simulation".into(),
                ))
            }
        }
    }
    Ok(psi)
}

/// Applies the gates in order to a density matrix. `RESET` acts as the channel
/// `ρ ↦ |0⟩⟨0| ⊗ tr_q ρ` on its qubit.
pub fn apply_circuit(circ: &ParameterizedCircuit, theta: &[f64], input: &DensityMatrix) -> Result<DensityMatrix> {
    simulate_density(circ, theta, input, None)
}

/// Applies a reset-free circuit to a state vector.
pub fn apply_circuit_pure(circ: &ParameterizedCircuit, theta: &[f64], input: &PureState) -> Result<PureState> {
    simulate_pure(circ, theta, input, None)
}

fn check_layout(circ: &ParameterizedCircuit, layout: &RegisterLayout) -> Result<()> {
    if circ.n_qubits != layout.total() {
        return Err(Error::DimensionMismatch {
            expected: layout.total(),
            found: circ.n_qubits,
        });
    }
    Ok(())
}

/// Register-B state as a factor `Φ` with `ρ_B = ΦΦ†`, for reset-free circuits.
pub fn output_factor(circ: &ParameterizedCircuit, theta: &[f64], layout: &RegisterLayout) -> Result<StateFactor> {
    output_factor_shifted(circ, theta, layout, None)
}

pub(crate) fn output_factor_shifted(
    circ: &ParameterizedCircuit,
    theta: &[f64],
    layout: &RegisterLayout,
    shift: Option<(usize, f64)>,
) -> Result<StateFactor> {
    check_layout(circ, layout)?;
    let psi = simulate_pure(circ, theta, &PureState::zero(circ.n_qubits), shift)?;
    StateFactor::from_purification(&psi, layout.n_ancilla)
}

/// `tr_A U(θ)|0…0⟩⟨0…0|U(θ)†`
pub fn output_state(circ: &ParameterizedCircuit, theta: &[f64], layout: &RegisterLayout) -> Result<DensityMatrix> {
    check_layout(circ, layout)?;
    if circ.has_reset() {
        let rho = apply_circuit(circ, theta, &DensityMatrix::basis(circ.n_qubits, 0))?;
        return crate::state::partial_trace(&rho, &layout.system_qubits());
    }
    Ok(output_factor(circ, theta, layout)?.to_density())
}

fn cnot_cascade(n_qubits: usize, gates: &mut Vec<Gate>) {
    for q in 0..n_qubits - 1 {
        gates.push(Gate::cnot(q, q + 1));
    }
}

fn require_single_ancilla(layout: &RegisterLayout) -> Result<()> {
    if layout.n_ancilla != 1 {
        return Err(invalid_arg(format!(
            "Ising ansatz uses exactly one ancilla, layout has {}",
            layout.n_ancilla
        )));
    }
    Ok(())
}

/// One `RY` per qubit, then `CNOT(A→B₁)` and `CNOT(Bᵢ→Bᵢ₊₁)` down the chain.
/// With `n_system = 5` this has 6 parameters.
pub fn build_ising_ansatz_6(layout: &RegisterLayout) -> Result<ParameterizedCircuit> {
    require_single_ancilla(layout)?;
    let n = layout.total();
    let mut gates: Vec<Gate> = (0..n).map(|q| Gate::ry(q, q)).collect();
    cnot_cascade(n, &mut gates);
    ParameterizedCircuit::new(n, gates)
}

/// A single `RY` on the ancilla whose bit is copied through register B.
pub fn build_ising_ansatz_1(layout: &RegisterLayout) -> Result<ParameterizedCircuit> {
    require_single_ancilla(layout)?;
    if layout.n_system < 2 {
        return Err(invalid_arg("one-parameter ansatz needs at least two system qubits"));
    }
    let n = layout.total();
    let mut gates = vec![Gate::ry(0, 0)];
    cnot_cascade(n, &mut gates);
    ParameterizedCircuit::new(n, gates)
}

/// Initial `RY` layer, then `depth` repetitions of a brickwork CNOT layer
/// followed by another `RY` layer. Parameter count is `(n_A + n_B)(depth + 1)`.
///
/// The brickwork runs on a ring over all qubits: even pairs, then odd pairs,
/// then `CNOT(n−1 → 0)` when `n ≥ 3`. Without the closing gate the ancilla
/// only ever acts as a control and training tends to stall on pure states.
pub fn build_xy_ansatz(layout: &RegisterLayout, depth: usize) -> Result<ParameterizedCircuit> {
    if depth < 1 {
        return Err(invalid_arg("ansatz depth must be at least 1"));
    }
    let n = layout.total();
    let mut gates: Vec<Gate> = (0..n).map(|q| Gate::ry(q, q)).collect();
    for layer in 1..=depth {
        for start in [0, 1] {
            for q in (start..n.saturating_sub(1)).step_by(2) {
                gates.push(Gate::cnot(q, q + 1));
            }
        }
        if n >= 3 {
            gates.push(Gate::cnot(n - 1, 0));
        }
        gates.extend((0..n).map(|q| Gate::ry(q, layer * n + q)));
    }
    ParameterizedCircuit::new(n, gates)
}

/// Ansatz family by name: `"ising6"`, `"ising1"` or `"xy"` (the latter uses `depth`).
pub fn build_ansatz(name: &str, layout: &RegisterLayout, depth: usize) -> Result<ParameterizedCircuit> {
    match name {
        "ising6" => build_ising_ansatz_6(layout),
        "ising1" => build_ising_ansatz_1(layout),
        "xy" => build_xy_ansatz(layout, depth),
        other => Err(invalid_arg(format!("unknown ansatz '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{tensor_product, ONE};
    use core::f64::consts::{FRAC_PI_2, PI};

    fn single(gate: Gate) -> ParameterizedCircuit {
        let n = gate.targets().iter().max().unwrap() + 1;
        ParameterizedCircuit::new(n, vec![gate]).unwrap()
    }

    #[test]
    fn ry_pi_flips_zero() {
        let out = apply_circuit(&single(Gate::ry(0, 0)), &[PI], &DensityMatrix::basis(1, 0)).unwrap();
        assert!(out.matrix().max_abs_diff(DensityMatrix::basis(1, 1).matrix()) < 1e-15);
    }

    #[test]
    fn reset_of_plus_state() {
        let plus = apply_circuit(&single(Gate::h(0)), &[], &DensityMatrix::basis(1, 0)).unwrap();
        let out = apply_circuit(&single(Gate::reset(0)), &[], &plus).unwrap();
        assert!(out.matrix().max_abs_diff(DensityMatrix::basis(1, 0).matrix()) < 1e-15);
    }

    #[test]
    fn cnot_on_one_zero() {
        let out = apply_circuit(&single(Gate::cnot(0, 1)), &[], &DensityMatrix::basis(2, 0b10)).unwrap();
        assert_eq!(out, DensityMatrix::basis(2, 0b11));
    }

    #[test]
    fn cswap_swaps_only_when_control_set() {
        let c = single(Gate::cswap(0, 1, 2));
        let out = apply_circuit(&c, &[], &DensityMatrix::basis(3, 0b011)).unwrap();
        assert_eq!(out, DensityMatrix::basis(3, 0b011));
        let out = apply_circuit(&c, &[], &DensityMatrix::basis(3, 0b101)).unwrap();
        assert_eq!(out, DensityMatrix::basis(3, 0b110));
        let out = apply_circuit(&c, &[], &DensityMatrix::basis(3, 0b111)).unwrap();
        assert_eq!(out, DensityMatrix::basis(3, 0b111));
    }

    #[test]
    fn gate_validation() {
        assert!(ParameterizedCircuit::new(2, vec![Gate::cnot(0, 0)]).is_err());
        assert!(ParameterizedCircuit::new(2, vec![Gate::h(2)]).is_err());
        assert!(ParameterizedCircuit::new(2, vec![Gate::ry(0, 1)]).is_err());
        let shared = ParameterizedCircuit::new(2, vec![Gate::ry(0, 0), Gate::ry(1, 0)]).unwrap();
        assert_eq!(shared.n_params(), 1);
    }

    #[test]
    fn parameter_length_is_checked() {
        let c = single(Gate::ry(0, 0));
        assert_eq!(
            apply_circuit(&c, &[0.1, 0.2], &DensityMatrix::basis(1, 0)),
            Err(Error::ParameterCount { expected: 1, found: 2 })
        );
        assert!(apply_circuit(&c, &[0.1], &DensityMatrix::basis(2, 0)).is_err());
    }

    #[test]
    fn pure_path_rejects_reset() {
        let c = single(Gate::reset(0));
        assert!(apply_circuit_pure(&c, &[], &PureState::zero(1)).is_err());
    }

    #[test]
    fn ising6_shape() {
        let layout = RegisterLayout::new(1, 5).unwrap();
        let c = build_ising_ansatz_6(&layout).unwrap();
        assert_eq!(c.n_params(), 6);
        assert_eq!(c.count(GateKind::Ry), 6);
        assert_eq!(c.count(GateKind::Cnot), 5);
        let out = output_state(&c, &[0.0; 6], &layout).unwrap();
        assert_eq!(out, DensityMatrix::basis(5, 0));
    }

    #[test]
    fn ising1_cat_mixture() {
        let layout = RegisterLayout::new(1, 5).unwrap();
        let c = build_ising_ansatz_1(&layout).unwrap();
        let out = output_state(&c, &[FRAC_PI_2], &layout).unwrap();
        let mut diag = [0.0; 32];
        diag[0] = 0.5;
        diag[31] = 0.5;
        assert!(out.matrix().max_abs_diff(&ComplexMatrix::from_real_diagonal(&diag)) < 1e-15);
        assert!((out.purity() - 0.5).abs() < 1e-15);
        let zero = output_state(&c, &[0.0], &layout).unwrap();
        assert_eq!(zero, DensityMatrix::basis(5, 0));
        assert!(build_ising_ansatz_1(&RegisterLayout::new(1, 1).unwrap()).is_err());
        assert!(build_ising_ansatz_1(&RegisterLayout::new(2, 3).unwrap()).is_err());
    }

    #[test]
    fn ising1_eigenvalues() {
        let layout = RegisterLayout::new(1, 3).unwrap();
        let c = build_ising_ansatz_1(&layout).unwrap();
        let theta = 2.2f64;
        let ev = output_state(&c, &[theta], &layout).unwrap().eigenvalues();
        let (a, b) = ((theta / 2.0).cos().powi(2), (theta / 2.0).sin().powi(2));
        assert!((ev[7] - a.max(b)).abs() < 1e-12);
        assert!((ev[6] - a.min(b)).abs() < 1e-12);
    }

    #[test]
    fn xy_parameter_counts() {
        let l15 = RegisterLayout::new(1, 5).unwrap();
        assert_eq!(build_xy_ansatz(&l15, 4).unwrap().n_params(), 30);
        assert_eq!(build_xy_ansatz(&l15, 3).unwrap().n_params(), 24);
        assert_eq!(
            build_xy_ansatz(&RegisterLayout::new(3, 3).unwrap(), 8)
                .unwrap()
                .n_params(),
            54
        );
        assert!(build_xy_ansatz(&l15, 0).is_err());
        let c = build_xy_ansatz(&l15, 2).unwrap();
        assert_eq!(c.count(GateKind::Cnot), 12);
        assert_eq!(c.gates()[11].targets(), &[5, 0]);
    }

    #[test]
    fn any_ansatz_at_zero_gives_zero_state() {
        let layout = RegisterLayout::new(1, 3).unwrap();
        for name in ["ising6", "ising1", "xy"] {
            let c = build_ansatz(name, &layout, 2).unwrap();
            let out = output_state(&c, &vec![0.0; c.n_params()], &layout).unwrap();
            assert_eq!(out, DensityMatrix::basis(3, 0), "{name}");
        }
        assert!(build_ansatz("qaoa", &layout, 1).is_err());
    }

    #[test]
    fn cz_matches_dense_operator() {
        let c = ParameterizedCircuit::new(2, vec![Gate::h(0), Gate::h(1), Gate::cz(0, 1)]).unwrap();
        let out = apply_circuit(&c, &[], &DensityMatrix::basis(2, 0)).unwrap();
        let amps = [0.5, 0.5, 0.5, -0.5].map(|x| C64::new(x, 0.0));
        let want = ComplexMatrix::outer(&amps, &amps);
        assert!(out.matrix().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn ry_matches_generator_exponential() {
        // exp(−iθY/2) = cos(θ/2) I − i sin(θ/2) Y
        let theta = 0.77;
        let y = crate::hamiltonian::Pauli::Y.matrix();
        let want = ComplexMatrix::identity(2)
            .scale(C64::new((theta / 2.0).cos(), 0.0))
            .sub(&y.scale(C64::new(0.0, (theta / 2.0).sin())));
        let u = ry_matrix(theta);
        let got = ComplexMatrix::from_vec(2, 2, vec![u[0][0], u[0][1], u[1][0], u[1][1]]).unwrap();
        assert!(got.max_abs_diff(&want) < 1e-15);
        let _ = tensor_product(&got, &ComplexMatrix::identity(1));
        let _ = ONE;
    }
}
