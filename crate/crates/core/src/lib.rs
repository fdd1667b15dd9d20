pub mod aggregate;
pub mod cli;
pub mod error;
pub mod fit;
pub mod model;
pub mod nlls;
pub mod nlparse;
pub mod sched;

pub use error::{Error, Result};
