//! Quantum-state transfer along open XY spin chains: register basis,
//! Hamiltonians, thermal initial states, evolution, the sender→receiver
//! transfer map and its informational classification, and polarization-based
//! reconstruction of the sender state.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod basis;
pub mod chain;
pub mod density;
pub mod error;
pub mod evolution;
pub mod initial;
pub mod linalg;
pub mod measurement;
pub mod par;
pub mod transfer;

pub use num_complex::Complex64 as C64;

pub use basis::{Register, SpinOp, MAX_QUBITS};
pub use chain::{build_rest_hamiltonian, build_xy_hamiltonian, ChainSpec};
pub use density::{bloch_to_density, density_to_bloch, partial_trace, tensor_product, BlochVector, DensityMatrix, Mode};
pub use error::{Error, Result};
pub use evolution::{diagonalize, evolve, receiver_state, receiver_state_with, unitary_at, Propagator};
pub use initial::{assemble_initial, assemble_initial_for, rest_state, RestStateKind};
pub use linalg::CMat;
pub use measurement::{
    add_noise, compute_b, polarization, reconstruct_from_polarizations, reconstruct_from_receiver, simulate_readout,
    DirectionSet, MeasurementSystem, PolarizationReadout, ReconstructionReport,
};
pub use par::Parallelism;
pub use transfer::{
    classify, closed_form_r, closed_form_transfer, compute_info_system, compute_transfer_matrix, pst_check, scan_time,
    Classification, InfoSystem, PstCheck, ScanOptions, ScanPoint, ScanResult, Tolerances, TransferClass,
    TransferEngine, TransferMatrix,
};
