//! IO, file formats and the command-line driver on top of `reident-core`.

pub mod commands;
pub mod error;
pub mod formats;
pub mod manifest;
pub mod svg;

pub use commands::{run, Cli};
pub use error::AppError;
