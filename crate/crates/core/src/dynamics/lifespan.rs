//! Growth time of perturbations of a traveling wave.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::frame::{frame_fit, WaveProvider};
use super::sim::{step_rk4, Frame, SimConfig, SimState};
use crate::error::{invalid, Error, Result};
use crate::spectral::{hs, TrigField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Doubling,
    FrameFail,
    Resolution,
    SlopeBlowup,
    TMax,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Doubling => "doubling",
            Self::FrameFail => "frame_fail",
            Self::Resolution => "resolution",
            Self::SlopeBlowup => "slope_blowup",
            Self::TMax => "t_max",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "doubling" => Self::Doubling,
            "frame_fail" => Self::FrameFail,
            "resolution" => Self::Resolution,
            "slope_blowup" => Self::SlopeBlowup,
            "t_max" => Self::TMax,
            _ => return Err(Error::Parse(format!("unknown stop reason {s:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifespanSample {
    pub t: f64,
    pub g_h4: f64,
    pub eps: f64,
    pub a: f64,
    pub l2: f64,
    pub mean: f64,
    pub max_slope: f64,
    pub tail_fraction: f64,
    /// `max(|ψ⁺(g)|, |ψ⁻(g)|)` after the fit.
    pub projection: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifespanRecord {
    pub eps: f64,
    pub delta: f64,
    pub t_obs: f64,
    pub stop_reason: StopReason,
    /// First sample times with `‖g‖_{H⁴} ≥ 2δ, 4δ, 8δ`.
    pub thresholds: [Option<f64>; 3],
    pub samples: Vec<LifespanSample>,
}

/// Options beyond the simulation config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifespanOptions {
    pub t_max: f64,
    /// Keep integrating past `2δ` until `8δ` to fill all thresholds.
    pub follow_thresholds: bool,
    /// Ignore thresholds and integrate to `t_max` (plain simulation).
    pub run_to_t_max: bool,
    /// Tail fraction that counts as loss of resolution.
    pub tail_limit: f64,
    /// `max |f_x|` that counts as incipient breaking.
    pub slope_limit: f64,
}

impl LifespanOptions {
    pub fn new(t_max: f64) -> Self {
        Self {
            t_max,
            follow_thresholds: false,
            run_to_t_max: false,
            tail_limit: 1e-3,
            slope_limit: 10.0,
        }
    }
}

/// `cos 2x + sin 3x` scaled to unit `H⁴` norm, then stripped of its
/// components along the kernel pair and its mean.
pub fn perturbation_shape(provider: &mut WaveProvider, eps: f64) -> Result<TrigField> {
    let n = provider.modes();
    let p = TrigField::cos_mode(2, 1.0, n).add(&TrigField::sin_mode(3, 1.0, n));
    let p = p.scale(1.0 / hs(&p, 4.0));
    let d = provider.get(eps)?;
    let p = d.purge(&p);
    TrigField::new(0.0, p.cos().to_vec(), p.sin().to_vec())
}

/// Evolves `u_ε + δ p` and tracks `‖g‖_{H⁴}` until it doubles.
pub fn lifespan_run(eps: f64, delta: f64, config: &SimConfig, opts: &LifespanOptions) -> Result<LifespanRecord> {
    if eps == 0.0 {
        return Err(invalid("eps", "must be nonzero"));
    }
    if !(delta >= 0.0 && delta <= eps.abs() / 10.0) {
        return Err(invalid("delta", "need 0 ≤ delta ≤ |eps|/10"));
    }
    if !(opts.t_max > 0.0) {
        return Err(invalid("t_max", "must be positive"));
    }
    let mut provider = WaveProvider::new(config.modes, 1e-13)?;
    let p = perturbation_shape(&mut provider, eps)?;
    let u = provider.get(eps)?.wave.u.clone();
    let f0 = u.axpy(delta, &p);
    let mut config = config.clone();
    if let Frame::Comoving(v) = config.frame {
        if v.is_nan() {
            config.frame = Frame::Comoving(provider.get(eps)?.wave.v);
        }
    }
    let mut state = SimState::new(&f0, &config);
    let (mut fe, mut fa) = (eps, 0.0);
    let mut samples = Vec::new();
    let mut thresholds = [None; 3];
    let mut stop = StopReason::TMax;

    let frame_speed = match config.frame {
        Frame::Lab => 0.0,
        Frame::Comoving(v) => v,
    };
    let mut last_t = 0.0;
    let mut observe = |state: &SimState, fe: &mut f64, fa: &mut f64, last_t: &mut f64, samples: &mut Vec<LifespanSample>| -> Result<Option<StopReason>> {
        let d = &state.diagnostics;
        if d.tail_fraction > opts.tail_limit {
            return Ok(Some(StopReason::Resolution));
        }
        if d.max_slope > opts.slope_limit {
            return Ok(Some(StopReason::SlopeBlowup));
        }
        // the wave drifts at `v_ε` relative to the frame
        let drift = provider.get(*fe)?.wave.v - frame_speed;
        let guess = *fa + drift * (state.t - *last_t);
        *last_t = state.t;
        let fit = match frame_fit(&state.f, *fe, guess, &mut provider) {
            Ok(fit) => fit,
            Err(_) => return Ok(Some(StopReason::FrameFail)),
        };
        *fe = fit.eps;
        *fa = fit.a;
        let g_h4 = hs(&fit.g, 4.0);
        samples.push(LifespanSample {
            t: state.t,
            g_h4,
            eps: fit.eps,
            a: fit.a,
            l2: d.l2,
            mean: d.mean,
            max_slope: d.max_slope,
            tail_fraction: d.tail_fraction,
            projection: fit.fit_residual,
        });
        Ok(None)
    };

    if let Some(r) = observe(&state, &mut fe, &mut fa, &mut last_t, &mut samples)? {
        stop = r;
    } else {
        let steps = (opts.t_max / config.dt).floor() as usize;
        for i in 1..=steps {
            state = match step_rk4(&state, &config) {
                Ok(s) => s,
                Err(Error::Blowup { .. }) | Err(Error::Cfl { .. }) => {
                    stop = StopReason::SlopeBlowup;
                    break;
                }
                Err(e) => return Err(e),
            };
            if i % config.record_every != 0 && i != steps {
                continue;
            }
            if let Some(r) = observe(&state, &mut fe, &mut fa, &mut last_t, &mut samples)? {
                stop = r;
                break;
            }
            let g = samples.last().expect("observed").g_h4;
            for (slot, mult) in thresholds.iter_mut().zip([2.0, 4.0, 8.0]) {
                if slot.is_none() && delta > 0.0 && g >= mult * delta {
                    *slot = Some(state.t);
                }
            }
            let done = if opts.follow_thresholds { thresholds[2] } else { thresholds[0] };
            if done.is_some() && !opts.run_to_t_max {
                stop = StopReason::Doubling;
                break;
            }
        }
    }
    let t_obs = match stop {
        StopReason::Doubling => thresholds[0].expect("doubling recorded"),
        _ => thresholds[0].unwrap_or(state.t),
    };
    Ok(LifespanRecord {
        eps,
        delta,
        t_obs,
        stop_reason: if thresholds[0].is_some() { StopReason::Doubling } else { stop },
        thresholds,
        samples,
    })
}

/// How the perturbation size follows the amplitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "c")]
pub enum DeltaRule {
    /// `δ = c ε`; fitted against `log(1/(εδ))`.
    Linear(f64),
    /// `δ = c ε²`; fitted against `log(ε/δ²)`.
    Quadratic(f64),
}

impl DeltaRule {
    pub fn delta(self, eps: f64) -> f64 {
        match self {
            Self::Linear(c) => c * eps.abs(),
            Self::Quadratic(c) => c * eps * eps,
        }
    }

    /// Abscissa of the log-log fit.
    pub fn predictor(self, eps: f64, delta: f64) -> f64 {
        match self {
            Self::Linear(_) => (1.0 / (eps.abs() * delta)).ln(),
            Self::Quadratic(_) => (eps.abs() / (delta * delta)).ln(),
        }
    }
}

/// Least-squares line through `(x, y)` with the standard error of the slope.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub points: usize,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if n > 2 {
        let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Some(LinearFit {
        slope,
        intercept,
        slope_stderr,
        points: n,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rule: DeltaRule,
    pub records: Vec<LifespanRecord>,
    /// Fit of `log T_obs` over runs that stopped by doubling.
    pub fit: Option<LinearFit>,
}

/// Number of worker threads: `BHWAVE_THREADS` if set, else the rayon default.
pub fn worker_threads() -> usize {
    std::env::var("BHWAVE_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

/// Runs every amplitude on a worker pool; results keep the input order.
pub fn sweep_lifespan(
    eps_list: &[f64],
    rule: DeltaRule,
    config: &SimConfig,
    opts: &LifespanOptions,
) -> Result<SweepResult> {
    if eps_list.len() < 3 {
        return Err(invalid("eps_list", "need at least 3 amplitudes"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_threads())
        .build()
        .map_err(|e| invalid("threads", e.to_string()))?;
    let records: Vec<LifespanRecord> = pool.install(|| {
        eps_list
            .par_iter()
            .map(|&eps| {
                let mut cfg = config.clone();
                cfg.dt = cfg.dt.min(super::sim::cfl_limit(cfg.modes, 1.5 * eps.abs() + 0.1));
                lifespan_run(eps, rule.delta(eps), &cfg, opts)
            })
            .collect::<Result<_>>()
    })?;
    let done: Vec<&LifespanRecord> = records.iter().filter(|r| r.stop_reason == StopReason::Doubling).collect();
    let xs: Vec<f64> = done.iter().map(|r| rule.predictor(r.eps, r.delta)).collect();
    let ys: Vec<f64> = done.iter().map(|r| r.t_obs.ln()).collect();
    Ok(SweepResult {
        rule,
        fit: fit_line(&xs, &ys),
        records,
    })
}
