//! Monte-Carlo memory experiments: detector error models, bit-reproducible
//! sampling, lookup and belief-propagation decoding, and logical-error-rate
//! / pseudothreshold estimation.

pub mod decode;
pub mod dem;
pub mod rate;
pub mod sample;

pub use decode::{BpConfig, BpDecoder, Decoder, LookupDecoder};
pub use dem::{build_detector_model, DetectorModel};
pub use rate::{logical_error_rate, pseudothreshold, RateEstimate};
pub use sample::{sample, ShotBatch};
