//! Fourier multipliers acting on [`TrigField`]s.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::TrigField;
use crate::error::{Error, Result};

type Symbol = Arc<dyn Fn(i64) -> Complex64 + Send + Sync>;

/// Operator `f̂(k) ↦ symbol(k) f̂(k)`.
#[derive(Clone)]
pub struct MultiplierOp {
    name: String,
    symbol: Symbol,
}

impl fmt::Debug for MultiplierOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierOp").field("name", &self.name).finish()
    }
}

impl MultiplierOp {
    pub fn new(name: impl Into<String>, symbol: impl Fn(i64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            symbol: Arc::new(symbol),
        }
    }

    /// Periodic Hilbert transform, symbol `−i sgn k`.
    pub fn hilbert() -> Self {
        Self::new("H", |k| Complex64::new(0.0, -(k.signum() as f64)))
    }

    /// `∂_x`, symbol `ik`.
    pub fn derivative() -> Self {
        Self::new("d/dx", |k| Complex64::new(0.0, k as f64))
    }

    /// `Λ = |∂_x|`.
    pub fn lambda() -> Self {
        Self::new("Lambda", |k| Complex64::new(k.unsigned_abs() as f64, 0.0))
    }

    /// Reduced resolvent of `∂_x + H` at the eigenvalue `in`:
    /// symbol `1/(i(m − sgn m − n))`, zero on `m = n + sgn n` and on `m = 0`.
    ///
    /// Not real preserving for `n ≠ 0`; useful on complex data only.
    pub fn reduced_resolvent(n: i64) -> Self {
        let s = n.signum();
        Self::new(format!("S_{n}"), move |m| {
            if m == 0 || m == n + s {
                Complex64::new(0.0, 0.0)
            } else {
                let d = (m - m.signum() - n) as f64;
                Complex64::new(0.0, -1.0 / d)
            }
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbol(&self, k: i64) -> Complex64 {
        (self.symbol)(k)
    }

    /// Whether `symbol(−k) = conj(symbol(k))` for `0 ≤ k ≤ n`.
    pub fn is_real_preserving(&self, n: usize) -> bool {
        (0..=n as i64).all(|k| {
            let (p, m) = (self.symbol(k), self.symbol(-k));
            (p.conj() - m).norm() <= 1e-14 * (1.0 + p.norm())
        })
    }

    pub fn apply(&self, f: &TrigField) -> Result<TrigField> {
        let n = f.truncation();
        if !self.is_real_preserving(n) {
            return Err(Error::NotRealPreserving(self.name.clone()));
        }
        let pos: Vec<Complex64> = (0..=n as i64).map(|k| self.symbol(k) * f.mode(k)).collect();
        Ok(TrigField::from_positive_modes(&pos).with_truncation(n))
    }
}
