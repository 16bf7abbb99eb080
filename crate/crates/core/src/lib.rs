//! Numerics for the periodic Burgers-Hilbert equation `f_t = Hf + f f_x`:
//! traveling waves, the constants behind their size estimates, the spectrum
//! of the linearization, and perturbed dynamics in a moving frame.

mod error;
pub mod bounds;
pub mod dynamics;
pub mod report;
pub mod spectral;
pub mod spectrum;
pub mod wave;

pub use error::{Error, Result};
pub use spectral::{NormKind, TrigField};
