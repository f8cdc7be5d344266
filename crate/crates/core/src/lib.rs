//! Geometric phases, unitary winding numbers and topological sum rules for
//! registers of up to four qubits under piecewise-constant Hamiltonians.

pub mod linalg;
pub mod evolution;
pub mod gates;
pub mod io;
pub mod pauli;
pub mod phase;
pub mod schmidt;
