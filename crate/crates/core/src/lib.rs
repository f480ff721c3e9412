//! Mining proof libraries for recurring proof patterns.
//!
//! The pipeline reads Coq/SSReflect scripts or step traces
//! ([`parser`]), encodes the first steps of every proof as a fixed-length
//! numeric vector ([`features`]), clusters the vectors many times with
//! different seeds ([`cluster`]) and keeps the groups that recur across
//! runs ([`digest`]). [`corpus`] persists multi-library corpora and
//! [`hint`] answers "which proofs look like this unfinished one?".

pub mod cluster;
pub mod corpus;
pub mod digest;
pub mod error;
pub mod features;
pub mod hint;
pub mod parser;
pub mod report;

pub use error::{Error, ParseError, ParseErrorKind, Result};
