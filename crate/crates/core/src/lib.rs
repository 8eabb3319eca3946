pub mod arith;
pub mod census;
pub mod characters;
pub mod curve;
pub mod cyclotomic;
pub mod error;
pub mod field;
pub mod jacobian;
pub mod lfun;
pub mod linalg;
pub mod numeric;
pub mod poly;
pub mod recovery;

pub use error::{Error, Result};
