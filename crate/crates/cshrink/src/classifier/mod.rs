//! Prototype classifier for complex-valued signals.
//!
//! Pipeline: a weighted-Fréchet-mean convolution layer over the raw complex
//! sequence, per-class prototypes estimated with the shrinkage machinery,
//! min-distance features against those prototypes, and a small real-valued
//! head trained with cross-entropy. During training the prototypes are
//! re-estimated once per epoch; during evaluation only distances to the saved
//! class means are computed.

pub mod baseline;
pub mod data;
pub mod net;
pub mod tape;
pub mod train;

pub use data::{ComplexSignal, Dataset, GenConfig};
pub use net::{ModelConfig, PrototypeState};
pub use train::{evaluate, train, Checkpoint, EvalReport, MetricsRow, TrainConfig};
