pub mod classify;
pub mod conics;
pub mod error;
pub mod orbits;
pub mod poly;
pub mod proj_geom;
pub mod puiseaux;
pub mod real_billiards;

pub use error::{GeomError, Result};
