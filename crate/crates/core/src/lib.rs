//! Variational preparation of quantum Gibbs states.
//!
//! The crate is `no_std` (it needs `alloc`) and contains everything that is pure
//! computation:
//!
//! - [`linalg`]: dense complex matrices, Kronecker products and a Hermitian eigensolver
//! - [`state`]: density matrices, pure states, partial traces, entropies and distances
//! - [`hamiltonian`]: Pauli-string Hamiltonians, the periodic Ising and XY chains,
//!   spectra and the exact Gibbs state
//! - [`circuit`]: parameterized circuits, the ansatz families, density-matrix and
//!   pure-state simulation
//! - [`loss`]: truncated entropy, the truncated free energy and the analytic bounds
//! - [`estimator`]: exact and shot-sampled overlap/energy estimators (destructive swap
//!   test, reset-based higher-order overlap circuit)
//! - [`optim`]: parameter-shift gradients, ADAM and the training loop
//!
//! IO, configuration files and the command line live in the `thermovar` crate.

#![no_std]
#![warn(clippy::redundant_closure_for_method_calls, clippy::map_unwrap_or)]
// `!(x > 0.0)` deliberately rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod circuit;
pub mod error;
pub mod estimator;
pub mod hamiltonian;
pub mod linalg;
pub mod loss;
pub mod optim;
pub mod state;

#[doc(inline)]
pub use self::{
    circuit::{Gate, GateKind, ParameterizedCircuit, RegisterLayout},
    error::{Error, Result},
    hamiltonian::{Pauli, PauliHamiltonian, PauliString},
    linalg::{ComplexMatrix, C64},
    loss::{BoundReport, TruncationCoefficients},
    optim::{AdamState, TrainConfig, TrainTrace},
    state::{DensityMatrix, PureState, StateFactor},
};
