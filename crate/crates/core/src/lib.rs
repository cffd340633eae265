pub mod am_algebra;
pub mod error;
pub mod numeric;

pub use error::{Error, Result};
pub mod cross_sections;
pub mod experiment;
pub mod kinematics;
pub mod levels;
pub mod polarization;
