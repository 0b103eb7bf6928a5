//! Gaussian Majorana engine for the projectively measured (1+1)D circuit.

pub mod arc;
pub mod circuit;
pub mod entropy;
pub mod state;

pub use arc::{fit_arc, fit_arc_with, triangular_volume, ArcFit, Chord};
pub use circuit::{
    layer_slots, replay, run_trajectory, sample_trajectory, CircuitCouplings, TrajectoryConfig,
    TrajectoryRecord,
};
pub use entropy::{binary_entropy_nats, entanglement_entropy, entropy_profile, LogBase};
pub use state::{Boundary, GateCoupling, GateKind, GateSpec, MajoranaState};
