//! Truncated Fourier series on the torus.

mod field;
mod grid;
mod multiplier;
mod norm;

pub use field::TrigField;
pub use grid::{fast_len, from_grid, multiply, product_full, to_grid, GridFit};
pub use multiplier::MultiplierOp;
pub use norm::{hs, l2, norm, NormKind};
