//! Instrument tomography: fiducial circuits, linear-inversion reconstruction
//! with CP projection, instrument fidelity and error-generator analysis.

mod fiducials;
mod generator;
mod instrument;
mod reconstruct;

pub use fiducials::{read_counts_csv, write_counts_csv, AxisState, CountRow, Fiducial, FiducialData, FiducialSet, Setting};
pub use generator::{
    channel_error_generator, decoded_instrument, dephasing_coefficient, error_generator, flip_probability,
    generator_basis, pure_readout_error, rate_of_contrast, summed_error_generator, ElementaryGenerator,
    ErrorGeneratorDecomposition, GeneratorKind, GeneratorScope,
};
pub use instrument::{cp_project, instrument_fidelity, QuantumInstrument, CP_TOLERANCE, TP_TOLERANCE};
pub use reconstruct::{linear_inversion, reconstruct_instrument};
