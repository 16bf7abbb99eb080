//! Traveling waves `Hu − v u′ + u u′ = 0` bifurcating from `(0, −1)`.

mod solve;
mod taylor;

pub use solve::{
    continuation, eps_derivative, eval_taylor, newton_refine, reflect, residual, solve_wave, Continuation,
    TravelingWave, WaveSource,
};
pub use taylor::{
    diagonal_series, format_rational, parse_rational, taylor_table, taylor_table_with, Arithmetic,
    DiagonalSeries, WaveTaylor, DOUBLE_MAX_ORDER, EXACT_MAX_ORDER,
};
