//! Norms on truncated series.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::TrigField;
use crate::error::{Error, Result};

/// Which norm to evaluate. `L2` is the plain `(∫|f|²)^{1/2}`; `L2Normalized` is
/// normalized by `1/π` so that `‖sin nx‖ = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NormKind {
    L2Normalized,
    L2,
    /// Inhomogeneous Sobolev norm with weights `(1 + k²)^s`.
    Hk(f64),
    /// Homogeneous Sobolev seminorm with weights `k^{2s}`.
    HdotK(f64),
    /// `‖cos nx‖_X = n − 1`; defined on even mean-zero fields with no `cos x`.
    Xnorm,
}

pub fn norm(f: &TrigField, kind: NormKind) -> Result<f64> {
    let energy = |w: &dyn Fn(f64) -> f64| -> f64 {
        f.cos()
            .iter()
            .zip(f.sin())
            .enumerate()
            .map(|(i, (a, b))| w((i + 1) as f64) * (a * a + b * b))
            .sum()
    };
    let m2 = f.mean() * f.mean();
    let v = match kind {
        NormKind::L2Normalized => 2.0 * m2 + energy(&|_| 1.0),
        NormKind::L2 => 2.0 * PI * m2 + PI * energy(&|_| 1.0),
        NormKind::Hk(s) => 2.0 * PI * m2 + PI * energy(&|k| (1.0 + k * k).powf(s)),
        NormKind::HdotK(s) => PI * energy(&|k| k.powf(2.0 * s)),
        NormKind::Xnorm => {
            if !f.in_x() {
                return Err(Error::NotInX);
            }
            energy(&|k| (k - 1.0) * (k - 1.0))
        }
    };
    Ok(v.sqrt())
}

/// Shorthand for the plain L² norm, which is always defined.
pub fn l2(f: &TrigField) -> f64 {
    norm(f, NormKind::L2).expect("L2 is defined on every field")
}

/// Shorthand for the Sobolev `H^s` norm.
pub fn hs(f: &TrigField, s: f64) -> f64 {
    norm(f, NormKind::Hk(s)).expect("H^s is defined on every field")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn paper_normalization() {
        let f = TrigField::sin_mode(5, 1.0, 8);
        assert_abs_diff_eq!(norm(&f, NormKind::L2Normalized).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l2(&f), PI.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn x_norm_values() {
        let f = TrigField::cos_mode(3, 1.0, 4);
        assert_abs_diff_eq!(norm(&f, NormKind::Xnorm).unwrap(), 2.0, epsilon = 1e-15);
        let g = TrigField::cos_mode(2, 1.0, 4).add(&TrigField::cos_mode(4, 1.0, 4));
        assert_abs_diff_eq!(norm(&g, NormKind::Xnorm).unwrap(), 10f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn x_norm_rejects_outside_x() {
        for f in [
            TrigField::cos_mode(1, 1.0, 3),
            TrigField::sin_mode(2, 1.0, 3),
            TrigField::constant(1.0, 3),
        ] {
            assert!(matches!(norm(&f, NormKind::Xnorm), Err(Error::NotInX)));
        }
    }

    #[test]
    fn sobolev_weights() {
        let f = TrigField::cos_mode(2, 1.0, 3);
        assert_abs_diff_eq!(hs(&f, 1.0), (5.0 * PI).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(
            norm(&f, NormKind::HdotK(2.0)).unwrap(),
            (16.0 * PI).sqrt(),
            epsilon = 1e-14
        );
    }
}
