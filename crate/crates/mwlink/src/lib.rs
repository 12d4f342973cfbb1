//! Simulation and analytic toolkit for deterministic quantum operations
//! between two qubit-cavity nodes connected by a multimode microwave link.
//!
//! The model keeps a single excitation shared between two qubits, two
//! resonators, and a window of waveguide modes, and integrates the resulting
//! linear equations of motion with shaped qubit-resonator couplings.

pub mod controls;
pub mod dynamics;
pub mod error;
pub mod node;
pub mod protocols;
pub mod theory;
pub mod waveguide;

pub use error::ModelError;
pub use node::{DispersiveBlock, NodeSpec};
