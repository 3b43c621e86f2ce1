pub mod bayes;
pub mod error;
pub mod gk;
pub mod lwave;
pub mod quad;
pub mod specfun;
pub mod tridiag;
pub mod verify;

pub use error::{Error, Result};
