//! Simulation toolkit for learning transitions of surface codes under
//! uniform-basis weak and projective measurement.
//!
//! * [`protocol`]: measurement coordinates and coupling conversions.
//! * [`duality`]: complex Kramers–Wannier map and the self-dual line.
//! * [`fermion`]: Gaussian Majorana circuit for the projective limit.
//! * [`statevector`]: dense simulation of small planar codes.
//! * [`ensemble`]: sphere histograms and KL divergence.
//! * [`floquet`]: post-selected Floquet spectra.

pub mod duality;
pub mod ensemble;
pub mod error;
pub mod fermion;
pub mod floquet;
pub mod io;
pub mod protocol;
pub mod seed;
pub mod statevector;

pub use error::{Error, Result};
