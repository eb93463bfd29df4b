//! Ranked enumeration of join-project queries.

pub mod acyclic;
pub mod composite;
pub mod engine;
pub mod error;
pub mod harness;
mod heap;
pub mod instance;
pub mod join_tree;
pub mod lexi;
pub mod query;
pub mod ranking;
pub mod reduce;
pub mod relation;
pub mod star;
pub mod stream;
pub mod weights;

pub use error::{Error, Result};
