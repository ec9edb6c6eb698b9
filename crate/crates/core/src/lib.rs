pub mod checks;
pub mod config;
pub mod construction;
pub mod error;
pub mod galois;
pub mod padic;
pub mod pipeline;
pub mod report;
pub mod scaffold;
pub mod structure;
pub mod tower;
pub mod witt;

pub use error::{Error, Result};
