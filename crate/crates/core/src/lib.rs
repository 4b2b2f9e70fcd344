//! Fock-space simulation and verification of post-selected linear-optical
//! gates: the nonlinear sign (NS) gate, a CNOT built from two NS gates, and a
//! simplified CNOT built from biased NS gates.
//!
//! Numerics are generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! the scalar to `f64`, which every report and CLI command uses.

pub mod circuit;
pub mod cli;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod gates;
pub mod harness;
pub mod linalg;
pub mod loader;
pub mod postselect;
pub mod report;
pub mod scalar;

pub use circuit::{beamsplitter_matrix, compose_transfer_matrix, validate_circuit, BeamsplitterElement, Circuit, Port};
pub use error::{Error, Result};
pub use evolution::{apply_element, evolve, oracle_amplitude, permanent, AmplitudeQuery};
pub use fock::{enumerate_basis, inner_product, make_state, FockStateVector, OccupationVector};
pub use harness::{GateReport, SensitivityResult};
pub use loader::{load_circuit, parse_circuit};
pub use postselect::{coincidence_probability, condition, ConditionalOutcome, DetectionPattern};
pub use report::ReportDocument;
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type FockState = FockStateVector<f64>;
pub type FockState32 = FockStateVector<f32>;
pub type OpticalCircuit = Circuit<f64>;
pub type OpticalCircuit32 = Circuit<f32>;
pub type Element = BeamsplitterElement<f64>;
pub type TransferMatrix = linalg::SquareMatrix<f64>;
pub type Outcome = ConditionalOutcome<f64>;
