//! Algorithms for filtering a keyword-collected social-media corpus, discovering
//! latent topics and tracking how those topics move week by week.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches files,
//! clocks or threads lives in the `topictrace` companion crate.
//!
//! Stages, in pipeline order:
//!
//! * [`corpus`]: normalization, Penn Treebank style tokenization, stopword
//!   removal, Porter stemming and deduplication.
//! * [`features`]: vocabularies, TF-IDF vectors and PCA over precomputed embeddings.
//! * [`balance`]: SMOTE oversampling of the minority class.
//! * [`classify`]: logistic regression and linear SVM, splits, metrics and
//!   cross-validation.
//! * [`topics`]: collapsed Gibbs LDA, coherence scores and the topic-count sweep.
//! * [`trends`]: weekly binning, trend matrices and event alignment.
//! * [`report`]: Jensen-Shannon distances, the intertopic map and SVG charts.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod balance;
pub mod classify;
pub mod corpus;
mod error;
pub mod features;
pub mod fingerprint;
pub mod linalg;
pub mod report;
pub mod rng;
pub mod time;
pub mod topics;
pub mod trends;

pub use error::{Error, Result};
