//! Symbolic folk-song motif modelling.
//!
//! The crate turns monophonic melodies into intervallic or rhythmic motif
//! strings, learns motif embeddings with skip-gram negative sampling, and
//! classifies songs with a bidirectional GRU encoder followed by an attention
//! pooling layer. Linear SVM baselines over averaged embeddings and PV-DBOW
//! document vectors, corpus splitting, metrics, and a synthetic corpus
//! generator are included.
//!
//! Everything here is pure computation over owned data and builds without
//! `std` (an allocator is required). File formats, corpus loading, threaded
//! training and the command line live in the `folkmotif` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod attention;
pub mod baselines;
pub mod embedding;
pub mod gru;
pub mod kern;
pub mod linalg;
pub mod math;
pub mod melody;
pub mod metrics;
pub mod multiword;
pub mod network;
pub mod pvdbow;
pub mod sampling;
pub mod sgns;
pub mod split;
pub mod synth;
pub mod token;
pub mod vocab;

pub use melody::{Melody, Meter, MeterChange, NoteEvent, Rational};
pub use token::{IntervalToken, Representation, RhythmToken};
pub use vocab::Vocabulary;
