pub mod abrr;
pub mod error;
pub mod linalg;
pub mod rmatrix;
pub mod rootsys;
pub mod routesum;
pub mod scalars;
pub mod shapovalov;
pub mod singular;
pub mod uqmodules;

pub use error::{Error, Result};
