//! Decomposition `f(x) = u_ε(x + a) + g(x + a)` with `g` free of the
//! generalized zero modes of `L_ε`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectral::{hs, l2, TrigField};
use crate::spectrum::assemble_l_unchecked;
use crate::wave::{eps_derivative, eval_taylor, newton_refine, taylor_table, TravelingWave, WaveTaylor};

const MAX_FIT: usize = 30;
const DUAL_MODES: usize = 48;

/// A wave with its zero-mode basis and dual functionals.
#[derive(Clone, Debug)]
pub struct WaveData {
    pub wave: TravelingWave,
    /// `∂_ε u_ε`.
    pub phi_plus: TrigField,
    /// `−u_ε′ / ε`.
    pub phi_minus: TrigField,
    pub dv: f64,
    /// Functionals `g ↦ Re Σ_m conj(ψ_m) ĝ(m)` over `1 ≤ |m| ≤ dual_modes`,
    /// normalized so that `ψ^i(φ^j) = δ_ij`.
    psi: [Vec<c64>; 2],
    dual_modes: usize,
}

impl WaveData {
    /// `(ψ⁺(g), ψ⁻(g))`.
    pub fn pair(&self, g: &TrigField) -> [f64; 2] {
        let coords = mode_coords(g, self.dual_modes);
        let f = |psi: &[c64]| -> f64 { psi.iter().zip(&coords).map(|(p, c)| p.conj() * c).sum::<c64>().re };
        [f(&self.psi[0]), f(&self.psi[1])]
    }

    /// `g − ψ⁺(g) φ⁺ − ψ⁻(g) φ⁻`.
    pub fn purge(&self, g: &TrigField) -> TrigField {
        let [p, m] = self.pair(g);
        g.axpy(-p, &self.phi_plus).axpy(-m, &self.phi_minus)
    }
}

fn mode_coords(g: &TrigField, nd: usize) -> Vec<c64> {
    let n = nd as i64;
    (-n..=n).filter(|&m| m != 0).map(|m| g.mode(m)).collect()
}

/// Solves for waves at arbitrary amplitudes and caches them with their duals.
pub struct WaveProvider {
    modes: usize,
    tol: f64,
    table: WaveTaylor,
    cache: HashMap<u64, Arc<WaveData>>,
}

impl WaveProvider {
    pub fn new(modes: usize, tol: f64) -> Result<Self> {
        if modes < 8 {
            return Err(invalid("modes", "need at least 8 modes"));
        }
        Ok(Self {
            modes,
            tol,
            table: taylor_table(8)?,
            cache: HashMap::new(),
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn get(&mut self, eps: f64) -> Result<Arc<WaveData>> {
        if eps == 0.0 {
            return Err(invalid("eps", "the zero-mode basis degenerates at eps = 0"));
        }
        if let Some(d) = self.cache.get(&eps.to_bits()) {
            return Ok(d.clone());
        }
        let seed = self
            .cache
            .values()
            .min_by(|a, b| (a.wave.eps - eps).abs().total_cmp(&(b.wave.eps - eps).abs()))
            .map(|d| d.wave.clone());
        let seed = match seed {
            Some(w) => w,
            None => eval_taylor(&self.table, eps.clamp(-0.45, 0.45), self.modes)?,
        };
        let wave = newton_refine(&seed, eps, self.modes, self.tol)?;
        let (phi_plus, dv) = eps_derivative(&wave, 1e-4, self.tol)?;
        let phi_minus = wave.u.derivative().scale(-1.0 / eps);
        let nd = DUAL_MODES.min(self.modes);
        let psi = duals(&wave, &phi_plus, &phi_minus, nd)?;
        let data = Arc::new(WaveData {
            wave,
            phi_plus,
            phi_minus,
            dv,
            psi,
            dual_modes: nd,
        });
        if self.cache.len() >= 256 {
            self.cache.clear();
        }
        self.cache.insert(eps.to_bits(), data.clone());
        Ok(data)
    }
}

/// Left null space of `A²` for the truncated `L_ε`, made biorthogonal to
/// `(φ⁺, φ⁻)`.
fn duals(wave: &TravelingWave, pp: &TrigField, pm: &TrigField, nd: usize) -> Result<[Vec<c64>; 2]> {
    let a = assemble_l_unchecked(&wave.u.with_truncation(nd), wave.v, nd).entries;
    let a2 = &a * &a;
    let svd = a2.svd().map_err(|e| Error::Linalg(format!("{e:?}")))?;
    let s = svd.S().column_vector();
    let mut order: Vec<usize> = (0..s.nrows()).collect();
    order.sort_by(|&i, &j| s[i].re.total_cmp(&s[j].re));
    let u = svd.U();
    let w: Vec<Vec<c64>> = order[..2]
        .iter()
        .map(|&j| (0..u.nrows()).map(|r| u[(r, j)]).collect())
        .collect();
    let phis = [mode_coords(pp, nd), mode_coords(pm, nd)];
    // M_ij = w_i^H φ_j
    let m = Mat::<c64>::from_fn(2, 2, |i, j| w[i].iter().zip(&phis[j]).map(|(a, b)| a.conj() * b).sum());
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    if det.norm() < 1e-12 {
        return Err(Error::Linalg("zero-mode basis is not dual to the left kernel".into()));
    }
    // ψ_i^H = Σ_k (M⁻¹)_{ik} w_k^H, so ψ_i = Σ_k conj((M⁻¹)_{ik}) w_k
    let inv = [
        [m[(1, 1)] / det, -m[(0, 1)] / det],
        [-m[(1, 0)] / det, m[(0, 0)] / det],
    ];
    let psi = |i: usize| -> Vec<c64> {
        (0..w[0].len())
            .map(|r| inv[i][0].conj() * w[0][r] + inv[i][1].conj() * w[1][r])
            .collect()
    };
    Ok([psi(0), psi(1)])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrameState {
    pub eps: f64,
    /// In `[0, 2π)`.
    pub a: f64,
    pub g: TrigField,
    /// `max(|ψ⁺(g)|, |ψ⁻(g)|)`.
    pub fit_residual: f64,
    pub phi0_plus: TrigField,
    pub phi0_minus: TrigField,
    pub iterations: usize,
}

impl FrameState {
    /// `u_ε(x + a) + g(x + a)`.
    pub fn reconstruct(&self, u: &TrigField) -> TrigField {
        u.add(&self.g).shift(self.a)
    }
}

/// Newton iteration on `(ε, a) ↦ (ψ⁺(g), ψ⁻(g))` with `g = f(· − a) − u_ε`.
pub fn frame_fit(f: &TrigField, eps_guess: f64, a_guess: f64, provider: &mut WaveProvider) -> Result<FrameState> {
    let n = provider.modes();
    let f = f.with_truncation(n);
    let start = provider.get(eps_guess)?;
    let dist = hs(&f.shift(-a_guess).sub(&start.wave.u), 2.0);
    if !(dist < 0.2 * eps_guess.abs()) {
        return Err(invalid("guess", "outside the basin ‖f − u(·+a)‖_{H²} < 0.2|ε|"));
    }
    let fx = f.derivative();
    let (mut eps, mut a) = (eps_guess, a_guess);
    let mut last = f64::INFINITY;
    for it in 0..=MAX_FIT {
        let d = provider.get(eps)?;
        let g = f.shift(-a).sub(&d.wave.u);
        let [y0, y1] = d.pair(&g);
        let res = y0.abs().max(y1.abs());
        if res < 1e-13 || (it > 0 && res < 1e-11 && res >= 0.5 * last) {
            return Ok(FrameState {
                eps,
                a: a.rem_euclid(2.0 * PI),
                g,
                fit_residual: res,
                phi0_plus: d.phi_plus.clone(),
                phi0_minus: d.phi_minus.clone(),
                iterations: it,
            });
        }
        if it == MAX_FIT || !res.is_finite() {
            break;
        }
        last = res;
        // ∂g/∂ε = −φ⁺ (dual variation neglected), ∂g/∂a = −f′(· − a)
        let je = d.pair(&d.phi_plus.scale(-1.0));
        let ja = d.pair(&fx.shift(-a).scale(-1.0));
        let det = je[0] * ja[1] - ja[0] * je[1];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let de = -(y0 * ja[1] - ja[0] * y1) / det;
        let da = -(je[0] * y1 - y0 * je[1]) / det;
        eps += de;
        a += da;
    }
    Err(Error::FrameFail {
        iterations: MAX_FIT,
        residual: last,
    })
}

/// `‖f − (u_ε + g)(· + a)‖` in L², a check on a fitted state.
pub fn reconstruction_error(f: &TrigField, state: &FrameState, provider: &mut WaveProvider) -> Result<f64> {
    let d = provider.get(state.eps)?;
    Ok(l2(&f.with_truncation(provider.modes()).sub(&state.reconstruct(&d.wave.u))))
}
