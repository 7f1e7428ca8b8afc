//! Commutation-derived quantum filters over Clifford circuits with Pauli noise.

pub mod analytics;
pub mod channels;
pub mod clifford;
pub mod error;
pub mod filters;
pub mod noisy_sim;
pub mod pauli;

pub use channels::PauliChannel;
pub use clifford::{brickwork_circuit, CliffordCircuit, CliffordTableau, Gate};
pub use error::{Error, Result};
pub use pauli::{enumerate_paulis, Pauli, PauliString, PauliTypeCount};
