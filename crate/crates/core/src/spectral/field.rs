use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A real 2π-periodic function stored as a truncated trigonometric series
///
/// ```text
/// f(x) = mean + Σ_{k=1..N} cos[k] cos(kx) + sin[k] sin(kx)
/// ```
///
/// Coefficients beyond the truncation `N` are zero. Values are immutable once
/// built; every operation returns a new field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawField")]
pub struct TrigField {
    mean: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

#[derive(Deserialize)]
struct RawField {
    mean: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TryFrom<RawField> for TrigField {
    type Error = crate::Error;

    fn try_from(raw: RawField) -> Result<Self> {
        TrigField::new(raw.mean, raw.cos, raw.sin)
    }
}

impl TrigField {
    pub fn new(mean: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        if cos.len() != sin.len() {
            return Err(invalid(
                "sin",
                format!("{} sine vs {} cosine coefficients", sin.len(), cos.len()),
            ));
        }
        if cos.is_empty() {
            return Err(invalid("cos", "truncation must be at least 1"));
        }
        if !mean.is_finite() || cos.iter().chain(&sin).any(|c| !c.is_finite()) {
            return Err(invalid("cos", "non-finite coefficient"));
        }
        Ok(Self { mean, cos, sin })
    }

    pub(crate) fn from_parts(mean: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        debug_assert_eq!(cos.len(), sin.len());
        debug_assert!(!cos.is_empty());
        Self { mean, cos, sin }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_parts(0.0, vec![0.0; n.max(1)], vec![0.0; n.max(1)])
    }

    pub fn constant(c: f64, n: usize) -> Self {
        let mut f = Self::zeros(n);
        f.mean = c;
        f
    }

    /// `amp * cos(kx)` with truncation `n` (grown to `k` if needed).
    pub fn cos_mode(k: usize, amp: f64, n: usize) -> Self {
        assert!(k >= 1, "mode index starts at 1");
        let mut f = Self::zeros(n.max(k));
        f.cos[k - 1] = amp;
        f
    }

    pub fn sin_mode(k: usize, amp: f64, n: usize) -> Self {
        assert!(k >= 1, "mode index starts at 1");
        let mut f = Self::zeros(n.max(k));
        f.sin[k - 1] = amp;
        f
    }

    /// Even field from cosine coefficients `cos[k-1]`, mean zero.
    pub fn even(cos: Vec<f64>) -> Result<Self> {
        let n = cos.len();
        Self::new(0.0, cos, vec![0.0; n])
    }

    pub fn truncation(&self) -> usize {
        self.cos.len()
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn cos(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin(&self) -> &[f64] {
        &self.sin
    }

    /// Cosine coefficient of mode `k >= 1`; zero past the truncation.
    pub fn cos_coef(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.cos.get(k - 1).copied().unwrap_or(0.0)
    }

    pub fn sin_coef(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.sin.get(k - 1).copied().unwrap_or(0.0)
    }

    pub fn is_even(&self) -> bool {
        self.sin.iter().all(|&b| b == 0.0)
    }

    pub fn is_odd(&self) -> bool {
        self.mean == 0.0 && self.cos.iter().all(|&a| a == 0.0)
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean == 0.0
    }

    /// Member of X: even, mean zero and orthogonal to cos x.
    pub fn in_x(&self) -> bool {
        self.is_even() && self.is_mean_zero() && self.cos[0] == 0.0
    }

    /// Complex Fourier coefficient f̂(m) for f = Σ f̂(m) e^{imx}.
    pub fn mode(&self, m: i64) -> Complex64 {
        if m == 0 {
            return Complex64::new(self.mean, 0.0);
        }
        let k = m.unsigned_abs() as usize;
        let (a, b) = (self.cos_coef(k), self.sin_coef(k));
        if m > 0 {
            Complex64::new(0.5 * a, -0.5 * b)
        } else {
            Complex64::new(0.5 * a, 0.5 * b)
        }
    }

    /// Field whose positive-frequency coefficients are `pos[k]` for k = 0..=n;
    /// the negative half is implied by reality.
    pub fn from_positive_modes(pos: &[Complex64]) -> Self {
        let n = pos.len().saturating_sub(1).max(1);
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        for (k, c) in pos.iter().enumerate().skip(1) {
            cos[k - 1] = 2.0 * c.re;
            sin[k - 1] = -2.0 * c.im;
        }
        Self::from_parts(pos.first().map_or(0.0, |c| c.re), cos, sin)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .fold(self.mean, |acc, (i, (a, b))| {
                let kx = (i + 1) as f64 * x;
                acc + a * kx.cos() + b * kx.sin()
            })
    }

    /// Copy with truncation `n`, zero padded or cut.
    pub fn with_truncation(&self, n: usize) -> Self {
        let n = n.max(1);
        let mut cos = self.cos.clone();
        let mut sin = self.sin.clone();
        cos.resize(n, 0.0);
        sin.resize(n, 0.0);
        Self::from_parts(self.mean, cos, sin)
    }

    /// Zero every mode above `k`, keeping the truncation.
    pub fn lowpass(&self, k: usize) -> Self {
        let mut out = self.clone();
        for i in k.min(out.cos.len())..out.cos.len() {
            out.cos[i] = 0.0;
            out.sin[i] = 0.0;
        }
        out
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let n = self.truncation().max(other.truncation());
        let cos = (1..=n)
            .map(|k| op(self.cos_coef(k), other.cos_coef(k)))
            .collect();
        let sin = (1..=n)
            .map(|k| op(self.sin_coef(k), other.sin_coef(k)))
            .collect();
        Self::from_parts(op(self.mean, other.mean), cos, sin)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + s * other`
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + s * b)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_parts(
            s * self.mean,
            self.cos.iter().map(|a| s * a).collect(),
            self.sin.iter().map(|b| s * b).collect(),
        )
    }

    pub fn derivative(&self) -> Self {
        let mut cos = vec![0.0; self.truncation()];
        let mut sin = vec![0.0; self.truncation()];
        for k in 1..=self.truncation() {
            let kf = k as f64;
            cos[k - 1] = kf * self.sin[k - 1];
            sin[k - 1] = -kf * self.cos[k - 1];
        }
        Self::from_parts(0.0, cos, sin)
    }

    /// Periodic Hilbert transform, symbol −i sgn k.
    pub fn hilbert(&self) -> Self {
        let cos = self.sin.iter().map(|b| -b).collect();
        let sin = self.cos.clone();
        Self::from_parts(0.0, cos, sin)
    }

    /// Translate: x ↦ f(x + a).
    pub fn shift(&self, a: f64) -> Self {
        let mut cos = vec![0.0; self.truncation()];
        let mut sin = vec![0.0; self.truncation()];
        for k in 1..=self.truncation() {
            let (s, c) = (k as f64 * a).sin_cos();
            let (ak, bk) = (self.cos[k - 1], self.sin[k - 1]);
            cos[k - 1] = ak * c + bk * s;
            sin[k - 1] = bk * c - ak * s;
        }
        Self::from_parts(self.mean, cos, sin)
    }

    /// x ↦ f(n x), truncation multiplied by `n`.
    pub fn compress(&self, n: usize) -> Self {
        assert!(n >= 1);
        let mut out = Self::zeros(self.truncation() * n);
        out.mean = self.mean;
        for k in 1..=self.truncation() {
            out.cos[k * n - 1] = self.cos[k - 1];
            out.sin[k * n - 1] = self.sin[k - 1];
        }
        out
    }

    /// Largest coefficient difference, including the mean.
    pub fn max_coef_diff(&self, other: &Self) -> f64 {
        let d = self.sub(other);
        d.cos
            .iter()
            .chain(&d.sin)
            .fold(d.mean.abs(), |m, c| m.max(c.abs()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("finite coefficients always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_mismatched_and_nonfinite() {
        assert!(TrigField::new(0.0, vec![1.0], vec![]).is_err());
        assert!(TrigField::new(f64::NAN, vec![1.0], vec![0.0]).is_err());
        assert!(TrigField::new(0.0, vec![], vec![]).is_err());
    }

    #[test]
    fn parity_flags() {
        let c = TrigField::cos_mode(2, 1.0, 4);
        assert!(c.is_even() && c.is_mean_zero() && c.in_x());
        assert!(!TrigField::cos_mode(1, 1.0, 4).in_x());
        assert!(TrigField::sin_mode(3, 1.0, 4).is_odd());
        assert!(!TrigField::constant(1.0, 2).is_odd());
    }

    #[test]
    fn shift_matches_pointwise() {
        let f = TrigField::new(0.3, vec![1.0, -0.2, 0.05], vec![0.1, 0.4, 0.0]).unwrap();
        let g = f.shift(0.7);
        for j in 0..9 {
            let x = j as f64 * 0.71;
            assert_abs_diff_eq!(g.eval(x), f.eval(x + 0.7), epsilon = 1e-14);
        }
    }

    #[test]
    fn json_layout() {
        let f = TrigField::new(0.5, vec![1.0, 2.0], vec![0.0, -1.0]).unwrap();
        let s = f.to_json();
        assert_eq!(s, r#"{"mean":0.5,"cos":[1.0,2.0],"sin":[0.0,-1.0]}"#);
        assert_eq!(TrigField::from_json(&s).unwrap(), f);
        assert!(TrigField::from_json(r#"{"mean":0,"cos":[1],"sin":[]}"#).is_err());
    }

    #[test]
    fn modes_round_trip() {
        let f = TrigField::new(0.25, vec![1.0, -0.5], vec![0.75, 0.0]).unwrap();
        let pos: Vec<_> = (0..=2).map(|m| f.mode(m)).collect();
        assert_eq!(TrigField::from_positive_modes(&pos), f);
        assert_eq!(f.mode(-1), f.mode(1).conj());
    }
}
