//! Dense simulation of the rotate-then-measure protocol on small planar codes.

pub mod coherent;
pub mod layout;
pub mod logical;
pub mod state;

pub use coherent::{
    coherent_information, exhaustive_amplitudes, exhaustive_records, post_selected_record,
    projected_ensemble, sample_record, sampled_records, slice_amplitudes, CoherentInfo, Plan,
};
pub use layout::CodeLayout;
pub use logical::{logical_density, LogicalAmplitudes, LogicalDensity, LogicalRecord, KAPPA_CONVENTION};
pub use state::{CodeState, LogicalInit, MeasureMode};
