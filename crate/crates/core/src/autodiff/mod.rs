//! Minimal dense reverse-mode automatic differentiation and the Adam
//! optimizer — the numerical substrate for every trainable model in the
//! crate.
//!
//! A [`Tape`] is a declared program: leaves are bound to tensors at
//! [`Tape::forward`] time, every recorded primitive is evaluated in order
//! with intermediates cached, and [`Tape::backward`] walks the record in
//! reverse accumulating exact gradients. Shapes are checked when ops are
//! recorded. Everything is `f64`; finite-difference checks demand it.

mod adam;
mod check;
mod tape;
mod tensor;

pub use adam::{Adam, AdamConfig};
pub use check::{finite_difference_gradients, max_relative_error};
pub use tape::{Tape, Var};
pub use tensor::Tensor;
