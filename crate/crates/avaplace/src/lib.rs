//! File formats, command-line interface and HTTP service around
//! [`avaplace_core`].

pub mod cli;
pub mod field_io;
pub mod parallel;
pub mod scene_file;
pub mod service;
pub mod settings;

pub use avaplace_core as core;
