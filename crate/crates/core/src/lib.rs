//! Time-signature classification of song lyrics from lexical stress.
//!
//! Lyrics are split into phrases, each phrase becomes a vector of stress
//! marks looked up in a pronunciation dictionary, and counts of short
//! stress-beat patterns over those vectors form the feature matrix fed to
//! the classifiers.

pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod lexicon;
pub mod models;
pub mod patterning;
pub mod resampling;
pub mod synthetic;

pub use error::{Error, Result};
