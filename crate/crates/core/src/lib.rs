//! Offline side of the Vietnamese comment classification system.
//!
//! The crate is organized along the processing chain:
//!
//! - [`ingest`]: load, validate, balance and split labeled comment datasets
//! - [`textprep`]: the normalization pipeline that turns raw comments into
//!   token sequences (lowercasing, cleaning, Unicode/tone normalization,
//!   teencode expansion, phrase segmentation)
//! - [`features`]: bag-of-words count vectorization over preprocessed tokens
//! - [`classify`]: multinomial naive Bayes, softmax regression and random
//!   forest classifiers with a common JSON persistence format
//! - [`eval`]: confusion matrices, accuracy/macro-F1, grid search, model
//!   selection, error listings and corpus statistics
//!
//! Everything that samples (balancing, splitting, bootstrapping, feature
//! subsampling) draws from the same [`rng::SplitMix64`] generator, so a run is
//! bit-reproducible given its seed.

pub mod classify;
pub mod error;
pub mod eval;
pub mod features;
pub mod ingest;
pub mod rng;
pub mod textprep;

pub use error::{Error, Result};
