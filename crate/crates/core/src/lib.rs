//! Primitive elements of finite fields that avoid an arrangement of affine
//! hyperplanes: field arithmetic, character sums and the bounds that decide
//! existence.

pub mod bounds;
pub mod charsum;
pub mod error;
pub mod gf;
pub mod hyperplane;
pub mod ntheory;

pub use error::{Error, Result};
