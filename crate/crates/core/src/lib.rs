// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod activation;
pub mod cli;
pub mod error;
pub mod filters;
pub mod states;
pub mod teleport;
pub mod tensor;

pub use error::{Error, Result};
