//! Newton solves of the truncated traveling-wave equation.

use faer::prelude::*;
use faer::Mat;
use serde::{Deserialize, Serialize};

use super::taylor::WaveTaylor;
use crate::error::{invalid, Error, Result};
use crate::spectral::{l2, product_full, TrigField};

const MAX_NEWTON: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveSource {
    Taylor,
    Newton,
}

/// A profile `u` and speed `v` with `Hu − v u′ + u u′ ≈ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TravelingWave {
    pub eps: f64,
    pub u: TrigField,
    pub v: f64,
    /// L² norm of the full (untruncated) residual of the truncated profile.
    pub residual_norm: f64,
    pub source: WaveSource,
}

impl TravelingWave {
    pub fn new(eps: f64, u: TrigField, v: f64, source: WaveSource) -> Self {
        let residual_norm = l2(&residual(&u, v));
        Self {
            eps,
            u,
            v,
            residual_norm,
            source,
        }
    }

    pub fn truncation(&self) -> usize {
        self.u.truncation()
    }

    /// `(u(n·)/n, v/n)`, again a traveling wave.
    pub fn rescaled(&self, n: usize) -> Self {
        let inv = 1.0 / n as f64;
        Self::new(self.eps * inv, self.u.compress(n).scale(inv), self.v * inv, self.source)
    }
}

/// `Hu − v u′ + u u′` with the product kept exactly.
pub fn residual(u: &TrigField, v: f64) -> TrigField {
    let du = u.derivative();
    let lin = u.hilbert().axpy(-v, &du);
    product_full(u, &du).add(&lin)
}

/// Sums the series to order `table.nmax()`, keeping modes up to `n`.
pub fn eval_taylor(table: &WaveTaylor, eps: f64, n: usize) -> Result<TravelingWave> {
    if !(eps.abs() < 0.5) {
        return Err(invalid("eps", "Taylor evaluation needs |eps| < 0.5"));
    }
    if n == 0 {
        return Err(invalid("modes", "truncation must be at least 1"));
    }
    let (mut cos, v) = table.sum(eps, table.nmax());
    cos.resize(n, 0.0);
    let u = TrigField::even(cos)?;
    Ok(TravelingWave::new(eps, u, v, WaveSource::Taylor))
}

/// Cosine coefficients of `u²`, `c[k]` for `0 ≤ k ≤ n`, from cosine
/// coefficients `a[k]` (index 0 unused).
fn square_cos(a: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n + 1];
    for k in 0..=n {
        let mut s = 0.0;
        for i in 1..k {
            s += 0.5 * a[i] * a[k - i];
        }
        for j in 1..a.len() {
            if j + k < a.len() {
                s += if k == 0 { 0.5 } else { 1.0 } * a[j] * a[j + k];
            }
        }
        c[k] = s;
    }
    c
}

/// Sine-mode residuals `R_k = a_k (1 + v k) − (k/2) c_k`, k = 1..n.
fn sine_residual(a: &[f64], v: f64) -> Vec<f64> {
    let n = a.len() - 1;
    let c = square_cos(a, n);
    (1..=n)
        .map(|k| {
            let kf = k as f64;
            a[k] * (1.0 + v * kf) - 0.5 * kf * c[k]
        })
        .collect()
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|r| r * r).sum::<f64>().sqrt()
}

/// Newton on `{R_k = 0, 1 ≤ k ≤ n}` in the unknowns `a_2..a_n, v` with
/// `a_1 = eps` pinned.
///
/// The guess is padded or cut to `n` modes; its sine part is dropped.
pub fn newton_refine(guess: &TravelingWave, eps: f64, n: usize, tol: f64) -> Result<TravelingWave> {
    if n < 2 {
        return Err(invalid("modes", "Newton needs at least 2 modes"));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol", "tolerance must be positive"));
    }
    let mut a = vec![0.0; n + 1];
    for k in 2..=n {
        a[k] = guess.u.cos_coef(k);
    }
    a[1] = eps;
    let mut v = guess.v;

    let mut res = sine_residual(&a, v);
    // R_k is a sine coefficient; its L² weight is √π.
    let weight = std::f64::consts::PI.sqrt();
    let mut iters = 0;
    while weight * norm2(&res) > 0.1 * tol {
        if iters == MAX_NEWTON {
            return Err(Error::Divergence {
                iterations: iters,
                residual: weight * norm2(&res),
            });
        }
        iters += 1;
        let jac = jacobian(&a, v);
        let rhs = Mat::<f64>::from_fn(n, 1, |i, _| -res[i]);
        let step = jac.partial_piv_lu().solve(&rhs);
        let mut step_norm = 0.0f64;
        for k in 2..=n {
            a[k] += step[(k - 2, 0)];
            step_norm = step_norm.max(step[(k - 2, 0)].abs());
        }
        v += step[(n - 1, 0)];
        step_norm = step_norm.max(step[(n - 1, 0)].abs());
        res = sine_residual(&a, v);
        if !v.is_finite() || a.iter().any(|x| !x.is_finite()) || res.iter().any(|r| !r.is_finite()) {
            return Err(Error::Divergence {
                iterations: iters,
                residual: f64::INFINITY,
            });
        }
        if step_norm < 1e-16 * (1.0 + v.abs()) {
            break;
        }
    }

    let u = TrigField::even(a[1..].to_vec())?;
    let wave = TravelingWave::new(eps, u, v, WaveSource::Newton);
    if !(wave.residual_norm <= tol) {
        return Err(Error::Divergence {
            iterations: iters,
            residual: wave.residual_norm,
        });
    }
    Ok(wave)
}

/// Rows k = 1..n, columns a_2..a_n then v.
fn jacobian(a: &[f64], v: f64) -> Mat<f64> {
    let n = a.len() - 1;
    let at = |i: i64| -> f64 {
        if i >= 1 && (i as usize) <= n {
            a[i as usize]
        } else {
            0.0
        }
    };
    Mat::from_fn(n, n, |row, col| {
        let k = row + 1;
        let kf = k as f64;
        if col == n - 1 {
            return kf * a[k];
        }
        let j = col + 2;
        let (ki, ji) = (k as i64, j as i64);
        let dc = at(ki - ji) + at(ji + ki) + at(ji - ki);
        let diag = if j == k { 1.0 + v * kf } else { 0.0 };
        diag - 0.5 * kf * dc
    })
}

/// Result of marching along the branch.
#[derive(Clone, Debug)]
pub struct Continuation {
    pub waves: Vec<TravelingWave>,
    pub last_eps: f64,
    /// Why marching stopped before `eps_max`, if it did.
    pub stopped: Option<String>,
}

/// Steps `eps = d_eps, 2 d_eps, …` up to `eps_max`, seeding each solve with
/// the previous wave.
pub fn continuation(eps_max: f64, d_eps: f64, n: usize, tol: f64) -> Result<Continuation> {
    if !(d_eps > 0.0 && d_eps <= 0.02) {
        return Err(invalid("d_eps", "step must lie in (0, 0.02]"));
    }
    if !(eps_max > 0.0) {
        return Err(invalid("eps_max", "must be positive"));
    }
    let steps = (eps_max / d_eps + 1e-9).floor() as usize;
    let mut seed = TravelingWave::new(0.0, TrigField::zeros(n), -1.0, WaveSource::Newton);
    let mut waves = Vec::with_capacity(steps);
    for i in 1..=steps {
        let eps = i as f64 * d_eps;
        match newton_refine(&seed, eps, n, tol) {
            Ok(w) => {
                seed = w.clone();
                waves.push(w);
            }
            Err(e) if i == 1 => {
                let _ = e;
                return Err(Error::ContinuationStart { eps });
            }
            Err(e) => {
                return Ok(Continuation {
                    last_eps: waves.last().map_or(0.0, |w| w.eps),
                    waves,
                    stopped: Some(format!("eps = {eps}: {e}")),
                });
            }
        }
    }
    Ok(Continuation {
        last_eps: waves.last().map_or(0.0, |w| w.eps),
        waves,
        stopped: None,
    })
}

/// `(u(· + π), v)` at amplitude `−ε`.
pub fn reflect(wave: &TravelingWave) -> TravelingWave {
    TravelingWave::new(-wave.eps, wave.u.shift(std::f64::consts::PI), wave.v, wave.source)
}

/// Newton solve at any amplitude on the branch: seeded by the Taylor
/// polynomial for `|eps| ≤ 0.3`, by continuation beyond.
pub fn solve_wave(eps: f64, n: usize, tol: f64) -> Result<TravelingWave> {
    if eps == 0.0 {
        return Ok(TravelingWave::new(0.0, TrigField::zeros(n), -1.0, WaveSource::Newton));
    }
    let e = eps.abs();
    let wave = if e <= 0.3 {
        let table = super::taylor::taylor_table(8)?;
        newton_refine(&eval_taylor(&table, e, n)?, e, n, tol)?
    } else {
        let path = continuation(e, 0.01, n, tol)?;
        let last = path.waves.last().ok_or(Error::ContinuationStart { eps: 0.01 })?;
        newton_refine(last, e, n, tol)?
    };
    Ok(if eps < 0.0 { reflect(&wave) } else { wave })
}

/// `∂_ε (u_ε, v_ε)` by centered differences with one Richardson step.
pub fn eps_derivative(wave: &TravelingWave, h: f64, tol: f64) -> Result<(TrigField, f64)> {
    let n = wave.truncation();
    let at = |e: f64| newton_refine(wave, e, n, tol);
    let diff = |h: f64| -> Result<(TrigField, f64)> {
        let (p, m) = (at(wave.eps + h)?, at(wave.eps - h)?);
        let s = 0.5 / h;
        Ok((p.u.sub(&m.u).scale(s), (p.v - m.v) * s))
    };
    let (du1, dv1) = diff(h)?;
    let (du2, dv2) = diff(0.5 * h)?;
    Ok((
        du2.scale(4.0 / 3.0).axpy(-1.0 / 3.0, &du1),
        (4.0 * dv2 - dv1) / 3.0,
    ))
}
