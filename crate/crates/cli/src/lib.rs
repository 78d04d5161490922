//! Scene files, command dispatch and SVG output for the `billiards` tool.

pub mod commands;
pub mod error;
pub mod render;
pub mod report;
pub mod scene_file;

pub use commands::{run, Command, Overrides};
pub use error::{CliError, Result};
pub use report::Report;
pub use scene_file::{load_scene, LoadedScene, SceneFile};
