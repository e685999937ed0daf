pub mod acts;
pub mod error;
pub mod game;
pub mod harness;
pub mod language;
pub mod marl;
pub mod ontology;
pub mod tracking;

pub use error::{Error, Result};
