//! Supersymmetric quantum mechanics on qubits: truncated Hamiltonians,
//! Pauli expansions, statevector simulation and an adaptive VQE.

pub mod avqe;
pub mod error;
pub mod model;
pub mod opt;
pub mod pauli;
pub mod record;
pub mod scan;
pub mod sim;

pub use error::{Error, Result};
pub use model::{
    build_hamiltonian, build_supercharges, exact_spectrum, make_boson_ops,
    superpotential_derivatives, BosonOperators, QubitHamiltonian, Supercharges, Superpotential,
    SuperpotentialSpec,
};
pub use opt::{minimize, shift_gradient, OptimizerConfig, VQEResult};
pub use pauli::{decompose, group_commuting, reconstruct, PauliString, PauliSum};
pub use sim::{
    apply_gate, expectation, init_basis_state, Ansatz, BasisState, Gate, GateKind, GateTemplate,
    NoiseModel, StateVector,
};
