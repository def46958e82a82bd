//! Sparse code multiple access: codebooks, transmission, deterministic
//! message-passing detection, operation counting, Monte-Carlo evaluation and
//! data-flow-graph folding analysis for the detector datapath.

pub mod decoder;
pub mod dfg;
pub mod error;
pub mod fixed;
pub mod metrics;
pub mod reference;
pub mod sim;
pub mod system;
pub mod tx;

pub use decoder::{decode, DecodeResult, Decoder, DecoderConfig};
pub use error::{Error, Result};
pub use system::ScmaSystem;
