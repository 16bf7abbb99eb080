//! The linearization `L_ε g = −v_ε g_x + Hg + (u_ε g)_x` about a traveling
//! wave: truncated matrix, eigenvalues, their expansions in ε, and the sums
//! of three eigenvalues that control resonances.

mod kato;

use std::f64::consts::PI;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

pub use kato::{kato_coefficient, kato_coefficient_any, QComplex, KATO_MAX_ORDER};

use crate::error::{invalid, Error, Result};
use crate::spectral::{to_grid, TrigField};
use crate::wave::TravelingWave;

/// Dense matrix over the modes `e^{imx}`, `1 ≤ |m| ≤ N`.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub entries: Mat<c64>,
    pub modes: usize,
}

impl OperatorMatrix {
    /// Row/column of frequency `m`: `−N..−1` then `1..N`.
    pub fn index(&self, m: i64) -> usize {
        index_of(m, self.modes)
    }

    pub fn frequency(&self, i: usize) -> i64 {
        let n = self.modes as i64;
        let i = i as i64;
        if i < n {
            i - n
        } else {
            i - n + 1
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.modes
    }

    /// Coefficient vector of a mean-zero field in this basis.
    pub fn coords(&self, f: &TrigField) -> Vec<c64> {
        (0..self.dim()).map(|i| f.mode(self.frequency(i))).collect()
    }

    /// Real field with the positive-frequency part of `x`.
    pub fn field(&self, x: &[c64]) -> TrigField {
        let mut pos = vec![c64::new(0.0, 0.0); self.modes + 1];
        for (k, p) in pos.iter_mut().enumerate().skip(1) {
            *p = x[self.index(k as i64)];
        }
        TrigField::from_positive_modes(&pos)
    }

    pub fn apply(&self, x: &[c64]) -> Vec<c64> {
        let a = &self.entries;
        (0..a.nrows())
            .map(|r| (0..a.ncols()).map(|c| a[(r, c)] * x[c]).sum())
            .collect()
    }
}

fn index_of(m: i64, n: usize) -> usize {
    let ni = n as i64;
    debug_assert!(m != 0 && m.abs() <= ni);
    if m < 0 {
        (m + ni) as usize
    } else {
        (m + ni - 1) as usize
    }
}

/// Highest mode carrying a nonzero coefficient.
pub fn bandwidth(f: &TrigField) -> usize {
    (1..=f.truncation())
        .rev()
        .find(|&k| f.cos_coef(k) != 0.0 || f.sin_coef(k) != 0.0)
        .unwrap_or(0)
}

/// Matrix of `L_ε` on `N` modes; requires a well-resolved wave and
/// `N ≥ 4 × bandwidth(u)`.
pub fn assemble_l(wave: &TravelingWave, n: usize) -> Result<OperatorMatrix> {
    if !(wave.residual_norm < 1e-8) {
        return Err(invalid("wave", "residual must be below 1e-8"));
    }
    if n < 4 * bandwidth(&wave.u).max(1) {
        return Err(invalid("modes", "need N ≥ 4 × wave bandwidth"));
    }
    Ok(assemble_l_unchecked(&wave.u, wave.v, n))
}

pub(crate) fn assemble_l_unchecked(u: &TrigField, v: f64, n: usize) -> OperatorMatrix {
    let ni = n as i64;
    let band = bandwidth(u) as i64;
    let mut a = Mat::<c64>::zeros(2 * n, 2 * n);
    for m in (-ni..=ni).filter(|&m| m != 0) {
        let r = index_of(m, n);
        let mf = m as f64;
        a[(r, r)] = c64::new(0.0, -v * mf - m.signum() as f64);
        for d in -band..=band {
            let mp = m - d;
            if d == 0 || mp == 0 || mp.abs() > ni {
                continue;
            }
            let uh = u.mode(d);
            // i m û(d)
            a[(r, index_of(mp, n))] += c64::new(-mf * uh.im, mf * uh.re);
        }
    }
    OperatorMatrix {
        entries: a,
        modes: n,
    }
}

/// `c_ε = 2π (∫ dy / (u − v))⁻¹` by the trapezoid rule.
pub fn c_eps(wave: &TravelingWave) -> Result<f64> {
    let m = (8 * wave.truncation()).max(64);
    let samples = to_grid(&wave.u, m);
    let mut acc = 0.0;
    for s in samples {
        let d = s - wave.v;
        if !(d > 0.0) {
            return Err(Error::SignChange);
        }
        acc += 1.0 / d;
    }
    Ok(m as f64 / acc)
}

/// `i n − ε² i (n+s)/4 − 11 ε⁴ i (n+s)/32 − 527 ε⁶ i (n+s)/768`, with the
/// `ε⁶` coefficient `529/384` for `|n| = 1`. Returned as `(re, im)`.
pub fn lambda_taylor_closed(n: i64, eps: f64) -> Result<c64> {
    if n == 0 {
        return Err(invalid("n", "eigenvalue index must be nonzero"));
    }
    let s = n.signum() as f64;
    let ns = n as f64 + s;
    let e2 = eps * eps;
    let c6 = if n.abs() == 1 { 529.0 / 384.0 * s } else { 527.0 / 768.0 * ns };
    let im = n as f64 - e2 * ns / 4.0 - 11.0 * e2 * e2 * ns / 32.0 - c6 * e2 * e2 * e2;
    Ok(c64::new(0.0, im))
}

/// Eigenvalues matched to indices `1 ≤ |n| ≤ M`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenPairSet {
    /// `(n, λ_n)` in the order `1, −1, 2, −2, …`.
    pub lam: Vec<(i64, c64)>,
    /// Distance of each matched eigenvalue to its target.
    pub match_quality: Vec<f64>,
    /// Indices whose target had a second candidate within `1e−6`.
    pub ambiguous: Vec<i64>,
    /// The two unmatched eigenvalues closest to 0.
    pub kernel_pair: [c64; 2],
}

impl EigenPairSet {
    pub fn get(&self, n: i64) -> Option<c64> {
        self.lam.iter().find(|(k, _)| *k == n).map(|(_, l)| *l)
    }
}

/// Target for matching `λ_n`: `i((n + s) c − s)`.
pub fn matching_target(n: i64, c: f64) -> c64 {
    let s = n.signum() as f64;
    c64::new(0.0, (n as f64 + s) * c - s)
}

pub fn eigen_spectrum(matrix: &OperatorMatrix, wave: &TravelingWave, m: usize) -> Result<EigenPairSet> {
    if m == 0 || 2 * m > matrix.modes {
        return Err(invalid("M", "need 1 ≤ M ≤ N/2"));
    }
    let c = c_eps(wave)?;
    let eig = matrix
        .entries
        .eigenvalues()
        .map_err(|e| Error::Linalg(format!("{e:?}")))?;
    let mut used = vec![false; eig.len()];
    let mut lam = Vec::with_capacity(2 * m);
    let mut quality = Vec::with_capacity(2 * m);
    let mut ambiguous = Vec::new();
    for k in 1..=m as i64 {
        for n in [k, -k] {
            let t = matching_target(n, c);
            let mut best: Option<(usize, f64)> = None;
            let mut second = f64::INFINITY;
            for (i, z) in eig.iter().enumerate() {
                if used[i] {
                    continue;
                }
                let d = (z - t).norm();
                match best {
                    Some((_, bd)) if d >= bd => second = second.min(d),
                    _ => {
                        if let Some((_, bd)) = best {
                            second = second.min(bd);
                        }
                        best = Some((i, d));
                    }
                }
            }
            let (i, d) = best.ok_or_else(|| Error::Linalg("ran out of eigenvalues".into()))?;
            used[i] = true;
            if second <= 1e-6 {
                ambiguous.push(n);
            }
            lam.push((n, eig[i]));
            quality.push(d);
        }
    }
    let mut rest: Vec<c64> = eig
        .iter()
        .zip(&used)
        .filter(|(_, u)| !**u)
        .map(|(z, _)| *z)
        .collect();
    rest.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let zero = c64::new(0.0, 0.0);
    Ok(EigenPairSet {
        lam,
        match_quality: quality,
        ambiguous,
        kernel_pair: [rest.first().copied().unwrap_or(zero), rest.get(1).copied().unwrap_or(zero)],
    })
}

/// `|λ_n − (n + s) c_ε i + i s|` for each matched index.
pub fn remainder(set: &EigenPairSet, c: f64) -> Vec<(i64, f64)> {
    set.lam
        .iter()
        .map(|&(n, l)| (n, (l - matching_target(n, c)).norm()))
        .collect()
}

/// Empirical decay order of the remainders between two amplitudes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RemainderOrder {
    pub n: i64,
    pub residual_a: f64,
    pub residual_b: f64,
    pub order: f64,
    /// `min(2|n| + 4, 6) − 0.5`.
    pub required: f64,
}

pub fn remainder_check(
    a: (&SpectrumReport, &SpectrumReport),
) -> Vec<RemainderOrder> {
    let (ra, rb) = a;
    let ratio = (ra.eps / rb.eps).abs().ln();
    ra.remainder
        .iter()
        .filter_map(|&(n, x)| {
            let y = rb.remainder.iter().find(|(k, _)| *k == n)?.1;
            Some(RemainderOrder {
                n,
                residual_a: x,
                residual_b: y,
                order: (x / y).ln() / ratio,
                required: ((2 * n.abs() + 4).min(6)) as f64 - 0.5,
            })
        })
        .collect()
}

/// Minimum of `|λ_m + λ_n + λ_l|` over `1 ≤ |m|, |n|, |l| ≤ M`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NonResonance {
    pub eps: f64,
    pub scan_m: usize,
    pub min: f64,
    pub witness: (i64, i64, i64),
    /// `max_n |λ_n + λ_{−n}|`, the exact resonance.
    pub pair_defect: f64,
}

pub fn nonres_scan(eps: f64, m: usize) -> Result<NonResonance> {
    if m == 0 || m > 64 {
        return Err(invalid("M", "need 1 ≤ M ≤ 64"));
    }
    if !(eps.abs() <= 0.1) {
        return Err(invalid("eps", "scan uses the small-amplitude expansion; need |eps| ≤ 0.1"));
    }
    let mi = m as i64;
    let idx: Vec<i64> = (-mi..=mi).filter(|&k| k != 0).collect();
    let lam: Vec<f64> = idx
        .iter()
        .map(|&k| lambda_taylor_closed(k, eps).map(|z| z.im))
        .collect::<Result<_>>()?;
    let mut best = (f64::INFINITY, (0, 0, 0));
    for (i, a) in lam.iter().enumerate() {
        for (j, b) in lam.iter().enumerate().skip(i) {
            for (k, c) in lam.iter().enumerate().skip(j) {
                let v = (a + b + c).abs();
                if v < best.0 {
                    best = (v, (idx[i], idx[j], idx[k]));
                }
            }
        }
    }
    let pair_defect = (1..=mi)
        .map(|k| {
            let p = lambda_taylor_closed(k, eps).unwrap();
            let q = lambda_taylor_closed(-k, eps).unwrap();
            (p + q).norm()
        })
        .fold(0.0, f64::max);
    Ok(NonResonance {
        eps,
        scan_m: m,
        min: best.0,
        witness: best.1,
        pair_defect,
    })
}

/// `‖L_ε u′‖` and `‖L_ε ∂_ε u − (∂_ε v) u′‖` in L².
pub fn kernel_check(
    wave: &TravelingWave,
    matrix: &OperatorMatrix,
    du: &TrigField,
    dv: f64,
) -> [f64; 2] {
    let up = wave.u.derivative().with_truncation(matrix.modes);
    let du = du.with_truncation(matrix.modes);
    let x1 = matrix.apply(&matrix.coords(&up));
    let x2 = matrix.apply(&matrix.coords(&du));
    let u_c = matrix.coords(&up);
    let l2 = |x: &[c64]| (2.0 * PI * x.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt();
    let d2: Vec<c64> = x2.iter().zip(&u_c).map(|(a, b)| a - b * dv).collect();
    [l2(&x1), l2(&d2)]
}

/// Everything reported for one amplitude.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eps: f64,
    pub modes: usize,
    pub c_eps: f64,
    pub lam: Vec<(i64, c64)>,
    pub taylor_pred: Vec<(i64, c64)>,
    pub remainder: Vec<(i64, f64)>,
    pub ambiguous: Vec<i64>,
    pub kernel_pair: [c64; 2],
    pub nonres: Option<NonResonance>,
    pub kernel_defects: Option<[f64; 2]>,
}

/// Solve for the wave, assemble `L_ε` on `modes` modes and match
/// `1 ≤ |n| ≤ window`.
pub fn spectrum_report(wave: &TravelingWave, modes: usize, window: usize) -> Result<SpectrumReport> {
    let matrix = assemble_l(wave, modes)?;
    let set = eigen_spectrum(&matrix, wave, window)?;
    let c = c_eps(wave)?;
    let taylor_pred = set
        .lam
        .iter()
        .map(|&(n, _)| lambda_taylor_closed(n, wave.eps).map(|z| (n, z)))
        .collect::<Result<_>>()?;
    Ok(SpectrumReport {
        eps: wave.eps,
        modes,
        c_eps: c,
        remainder: remainder(&set, c),
        lam: set.lam,
        taylor_pred,
        ambiguous: set.ambiguous,
        kernel_pair: set.kernel_pair,
        nonres: None,
        kernel_defects: None,
    })
}
