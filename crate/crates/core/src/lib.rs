pub mod approx;
pub mod assembly;
pub mod bench;
pub mod circuit;
pub mod error;
pub mod matcore;
pub mod srbb;
pub mod targets;

pub use error::{Error, Result};
pub use matcore::{CMat, Permutation, C64};
