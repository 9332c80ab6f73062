//! Truncated signatures and log-signatures of piecewise-linear paths, together
//! with the I-/T-visibility transformations that embed absolute position into
//! signature features.
//!
//! The crate is organised bottom-up:
//!
//! - [`tensor`]: truncated tensor-algebra arithmetic ([`TensorSeries`], [`Word`]).
//! - [`path`]: streams, piecewise-linear paths, concatenation and reversal.
//! - [`signature`]: signatures via Chen's identity and a quadrature oracle.
//! - [`transforms`]: time augmentation, lead-lag, discrete and continuous visibility.
//! - [`theorems`]: numerical checks of the identities satisfied by lifted signatures.
//! - [`pipeline`]: JSONL ingestion, feature extraction and CSV output.
//! - [`bench`]: a synthetic position-sensitivity experiment with a ridge classifier.

pub mod bench;
pub mod error;
pub mod path;
pub mod pipeline;
pub mod signature;
pub mod tensor;
pub mod theorems;
pub mod transforms;

pub use error::{Error, Result};
pub use path::{PiecewiseLinearPath, Stream};
pub use signature::{iterated_integral_oracle, log_signature, segment_signature, signature};
pub use tensor::{word_count, TensorSeries, Word};
pub use transforms::{TransformSpec, Visibility};
