//! Pseudospectral RK4 integration of `f_t = Hf + f f_x`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectral::{l2, multiply, to_grid, TrigField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "speed")]
pub enum Frame {
    Lab,
    /// Coordinates moving with speed `v`; adds `−v f_x` to the right side.
    Comoving(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub modes: usize,
    pub dt: f64,
    pub dealias: bool,
    pub frame: Frame,
    pub record_every: usize,
}

/// Largest stable step for a field of amplitude `max_abs` on `n` modes.
pub fn cfl_limit(n: usize, max_abs: f64) -> f64 {
    0.5 / (n as f64 * (max_abs + 1.0))
}

fn max_abs(f: &TrigField) -> f64 {
    let m = (2 * f.truncation() + 2).max(16);
    to_grid(f, m).into_iter().fold(0.0, |a, x| a.max(x.abs()))
}

impl SimConfig {
    /// Validates the step against the initial data.
    pub fn new(modes: usize, dt: f64, frame: Frame, record_every: usize, f0: &TrigField) -> Result<Self> {
        if modes < 4 {
            return Err(invalid("modes", "need at least 4 modes"));
        }
        if record_every == 0 {
            return Err(invalid("record_every", "must be at least 1"));
        }
        let limit = cfl_limit(modes, max_abs(f0));
        if !(dt > 0.0 && dt <= limit) {
            return Err(Error::Cfl { dt, limit });
        }
        Ok(Self {
            modes,
            dt,
            dealias: true,
            frame,
            record_every,
        })
    }

    /// Modes kept by the 2/3 rule.
    pub fn band(&self) -> usize {
        if self.dealias {
            2 * self.modes / 3
        } else {
            self.modes
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub l2: f64,
    pub mean: f64,
    /// `(Σ_{k > N/3} |f̂_k|² / Σ_k |f̂_k|²)^{1/2}`.
    pub tail_fraction: f64,
    pub max_slope: f64,
}

impl Diagnostics {
    pub fn of(f: &TrigField) -> Self {
        let n = f.truncation();
        let (mut all, mut tail) = (0.0, 0.0);
        for k in 1..=n {
            let e = f.cos_coef(k).powi(2) + f.sin_coef(k).powi(2);
            all += e;
            if 3 * k > n {
                tail += e;
            }
        }
        Self {
            l2: l2(f),
            mean: f.mean(),
            tail_fraction: if all > 0.0 { (tail / all).sqrt() } else { 0.0 },
            max_slope: max_abs(&f.derivative()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub t: f64,
    pub f: TrigField,
    pub diagnostics: Diagnostics,
}

impl SimState {
    /// Initial state; the data is cut to the configured truncation and, when
    /// dealiasing, to the 2/3 band so that the discrete flow conserves L².
    pub fn new(f0: &TrigField, config: &SimConfig) -> Self {
        let f = f0.with_truncation(config.modes).lowpass(config.band());
        Self {
            t: 0.0,
            diagnostics: Diagnostics::of(&f),
            f,
        }
    }
}

/// `Hf + f f_x`, with the product dealiased when asked; the mean of the
/// output is set to zero.
pub fn rhs(f: &TrigField, dealias: bool) -> TrigField {
    let fx = f.derivative();
    let prod = multiply(f, &fx, dealias);
    let out = f.hilbert().add(&prod);
    TrigField::new(0.0, out.cos().to_vec(), out.sin().to_vec()).expect("finite rhs")
}

fn frame_rhs(f: &TrigField, config: &SimConfig) -> TrigField {
    let r = rhs(f, config.dealias);
    match config.frame {
        Frame::Lab => r,
        Frame::Comoving(v) => r.axpy(-v, &f.derivative()),
    }
}

/// One classical RK4 step.
pub fn step_rk4(state: &SimState, config: &SimConfig) -> Result<SimState> {
    let limit = cfl_limit(config.modes, max_abs(&state.f));
    if config.dt > limit {
        return Err(Error::Cfl {
            dt: config.dt,
            limit,
        });
    }
    let h = config.dt;
    let f = &state.f;
    let k1 = frame_rhs(f, config);
    let k2 = frame_rhs(&f.axpy(0.5 * h, &k1), config);
    let k3 = frame_rhs(&f.axpy(0.5 * h, &k2), config);
    let k4 = frame_rhs(&f.axpy(h, &k3), config);
    let incr = k1.add(&k2.scale(2.0)).add(&k3.scale(2.0)).add(&k4);
    let next = f.axpy(h / 6.0, &incr);
    let t = state.t + h;
    if next.cos().iter().chain(next.sin()).any(|c| !c.is_finite()) {
        return Err(Error::Blowup { t });
    }
    Ok(SimState {
        t,
        diagnostics: Diagnostics::of(&next),
        f: next,
    })
}

/// Runs `steps` steps, calling `observe` after every `record_every`-th.
pub fn run(
    state: SimState,
    config: &SimConfig,
    steps: usize,
    mut observe: impl FnMut(&SimState),
) -> Result<SimState> {
    let mut s = state;
    for i in 1..=steps {
        s = step_rk4(&s, config)?;
        if i % config.record_every == 0 {
            observe(&s);
        }
    }
    Ok(s)
}
