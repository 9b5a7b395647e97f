//! Next-word suggestion workbench for sentence-level text simplification.
//!
//! A writer simplifying a difficult sentence gets ranked suggestions for the
//! next word of their simplification. Suggestions come from pluggable
//! backends ([`predictors`]), optionally combined by an ensemble
//! ([`ensemble`]): majority vote, a single-label model selector, or a
//! multi-label selector. [`corpus`] builds and splits parallel corpora,
//! [`evaluation`] scores systems, and [`service`] serves suggestions over
//! HTTP.

pub mod cli;
pub mod corpus;
pub mod ensemble;
pub mod evaluation;
pub mod predictors;
pub mod service;
