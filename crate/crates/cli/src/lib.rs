//! File formats and run configuration for the spectral network designer.
//!
//! Everything here is string-in/string-out so the binary owns all file IO
//! and the formats stay trivially testable.

pub mod config;
pub mod formats;
