//! Layered weighted-operator evolution, tomography and decoding.

pub mod decode;
pub mod params;
pub mod protocol;
pub mod tomography;

pub use decode::{
    decode_penultimate, synthesize, CityWeight, DecodeMethod, DecodeReport, DecodeResult, Decoder,
};
pub use params::{ParamBound, ParamMode, ProtocolParams, VariedValue};
pub use protocol::{
    close_protocol, deviated_state, deviated_state_fidelity, intensities_csv, layer_step,
    run_protocol, transfer_intensities, ArrowIntensity, LayerState, ProtocolRun,
};
pub use tomography::{measure, measure_state, Measurement, TomographyConfig};
