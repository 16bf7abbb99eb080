//! Time evolution of perturbed traveling waves.

mod frame;
mod lifespan;
mod sim;

pub use frame::{frame_fit, reconstruction_error, FrameState, WaveData, WaveProvider};
pub use lifespan::*;
pub use sim::{cfl_limit, rhs, run, step_rk4, Diagnostics, Frame, SimConfig, SimState};
