//! Explicit wreath-product embeddings of groups into 2- and 4-generated groups.

pub mod basefun;
pub mod embedder;
pub mod error;
pub mod group;
pub mod seqtools;
pub mod wreath;

pub use error::{Error, Result};
