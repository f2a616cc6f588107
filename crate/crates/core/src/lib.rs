//! Unsupervised grouping of cyber threat intelligence reports.
//!
//! The pipeline runs preprocessing ([`preprocess`]), TF-IDF
//! ([`vectorize`]), document distances ([`similarity`]), one of three
//! clustering engines ([`cluster`]) and validity scoring ([`evaluate`]).
//! [`pipeline`] ties the stages together, runs the full experiment grid and
//! exports group profiles.

pub mod cli;
pub mod cluster;
pub mod corpus;
pub mod error;
pub mod evaluate;
pub mod pipeline;
pub mod preprocess;
pub mod similarity;
pub mod vectorize;

pub use error::{Error, Result};
