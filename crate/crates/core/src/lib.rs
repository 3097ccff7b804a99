//! Morphology-aware subword tokenization for Hebrew.

pub mod analysis;
pub mod error;
pub mod hebrew;
pub mod inventory;
pub mod pipeline;
pub mod pretokenize;
pub mod segmentation;
pub mod synth;
pub mod wordpiece;

pub use error::{Error, Result};
