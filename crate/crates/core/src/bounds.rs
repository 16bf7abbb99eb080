//! Numerical checks of the constants in the size estimate for the branch:
//! two linear operator norms on X, the bilinear bound `‖(fg)′‖ ≤ B‖f‖‖g‖`,
//! the constants `C_n`, and the comparison ODE that yields `x*`.

use std::f64::consts::PI;

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// `√(π²/3 + 869/144)`, the bilinear constant as stated.
pub fn b_constant() -> f64 {
    (PI * PI / 3.0 + 869.0 / 144.0).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub truncation: usize,
    pub computed_value: f64,
    pub paper_bound: f64,
    pub satisfied: bool,
    pub margin: f64,
}

impl BoundReport {
    pub fn new(name: &str, truncation: usize, computed_value: f64, paper_bound: f64) -> Self {
        Self {
            name: name.to_string(),
            truncation,
            computed_value,
            paper_bound,
            satisfied: computed_value <= paper_bound + 1e-10,
            margin: paper_bound - computed_value,
        }
    }
}

/// Matrix of `f ↦ j f sin(jx) − f′ cos(jx)` from the X-unit basis
/// `cos(nx)/(n−1)`, `2 ≤ n ≤ N`, to sine coefficients (orthonormal in the
/// 1/π-normalized L²). Rows are `sin(mx)`, `1 ≤ m ≤ N + j`.
pub fn shift_operator_matrix(n: usize, j: usize) -> Mat<f64> {
    let mut m = Mat::<f64>::zeros(n + j, n.saturating_sub(1));
    for col in 0..n.saturating_sub(1) {
        let k = col + 2;
        let s = 1.0 / (k - 1) as f64;
        // j cos kx sin jx + k sin kx cos jx
        //   = ((k+j)/2) sin (k+j)x + ((k−j)/2) sin (k−j)x
        m[(k + j - 1, col)] += 0.5 * (k + j) as f64 * s;
        if k > j {
            m[(k - j - 1, col)] += 0.5 * (k - j) as f64 * s;
        } else if k < j {
            m[(j - k - 1, col)] -= 0.5 * (k as f64 - j as f64) * s;
        }
    }
    m
}

fn top_singular(m: &Mat<f64>) -> Result<(f64, Vec<f64>)> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return Ok((0.0, vec![0.0; m.ncols()]));
    }
    let svd = m.svd().map_err(|e| Error::Linalg(format!("{e:?}")))?;
    let s = svd.S().column_vector();
    let (mut best, mut idx) = (f64::NEG_INFINITY, 0);
    for i in 0..s.nrows() {
        if s[i] > best {
            best = s[i];
            idx = i;
        }
    }
    let v = svd.V();
    Ok((best, (0..v.nrows()).map(|r| v[(r, idx)]).collect()))
}

fn largest_singular_value(m: &Mat<f64>) -> Result<f64> {
    let s = m.singular_values().map_err(|e| Error::Linalg(format!("{e:?}")))?;
    Ok(s.into_iter().fold(0.0, f64::max))
}

/// `sup ‖f sin x − f′ cos x‖ / ‖f‖_X` over the truncation, against `√3`.
pub fn op_norm_f_sinx(n: usize) -> Result<BoundReport> {
    if n < 8 {
        return Err(invalid("modes", "need N ≥ 8"));
    }
    let v = largest_singular_value(&shift_operator_matrix(n, 1))?;
    Ok(BoundReport::new("f sin x - f' cos x", n, v, 3f64.sqrt()))
}

/// `sup ‖2f sin 2x − f′ cos 2x‖ / ‖f‖_X`, against `√17 / 2`.
pub fn op_norm_f_sin2x(n: usize) -> Result<BoundReport> {
    if n < 8 {
        return Err(invalid("modes", "need N ≥ 8"));
    }
    let v = largest_singular_value(&shift_operator_matrix(n, 2))?;
    Ok(BoundReport::new("2f sin 2x - f' cos 2x", n, v, 0.5 * 17f64.sqrt()))
}

/// Matrix of `f ↦ (f g)′` from the X-unit basis to sine coefficients
/// `sin(mx)`, `1 ≤ m ≤ 2N`, for `g = Σ d_m cos(mx)/(m−1)`.
///
/// `d[i]` is the coordinate of `cos((i+2)x)/(i+1)`.
pub fn product_derivative_matrix(n: usize, d: &[f64]) -> Mat<f64> {
    let mut out = Mat::<f64>::zeros(2 * n, n - 1);
    for col in 0..n - 1 {
        let k = col + 2;
        for (i, &dm) in d.iter().enumerate() {
            let m = i + 2;
            let w = dm / ((k - 1) * (m - 1)) as f64;
            // (cos kx cos mx)′ = −½((k+m) sin(k+m)x + |k−m| sin|k−m|x)
            out[(k + m - 1, col)] -= 0.5 * (k + m) as f64 * w;
            let diff = k.abs_diff(m);
            if diff > 0 {
                out[(diff - 1, col)] -= 0.5 * diff as f64 * w;
            }
        }
    }
    out
}

/// Largest `‖(fg)′‖` found over X-unit `f, g` by alternating top singular
/// vectors from random starts.
pub fn bilinear_probe(n: usize, trials: usize, seed: u64) -> Result<BoundReport> {
    if trials == 0 {
        return Err(invalid("trials", "need at least one trial"));
    }
    if n < 2 {
        return Err(invalid("modes", "need N ≥ 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for _ in 0..trials {
        let mut g: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nrm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        g.iter_mut().for_each(|x| *x /= nrm);
        let mut value = 0.0;
        for _ in 0..100 {
            let (s, f) = top_singular(&product_derivative_matrix(n, &g))?;
            let converged = (s - value).abs() <= 1e-14 * s;
            value = s;
            g = f;
            if converged {
                break;
            }
        }
        best = best.max(value);
    }
    Ok(BoundReport::new("(fg)'", n, best, b_constant()))
}

/// Value of `‖(fg)′‖` in the 1/π-normalized L² for X-coordinates `f`, `g`.
pub fn bilinear_value(n: usize, f: &[f64], g: &[f64]) -> f64 {
    let m = product_derivative_matrix(n, g);
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)] * f[c]).sum::<f64>().powi(2))
        .sum::<f64>()
        .sqrt()
}

const E_TERMS: u64 = 1_000_000;

/// `D_n = Σ_{k=1}^{n−3} n² / (k² (n−k−2)²)`.
pub fn d_n(n: u64) -> f64 {
    let nf = (n * n) as f64;
    (1..n.saturating_sub(2))
        .map(|k| nf / ((k * k) as f64 * ((n - k - 2) * (n - k - 2)) as f64))
        .sum()
}

/// `E_n = Σ_{k≥1} n² / (k² (k+n)²)`, summed smallest terms first, plus an
/// integral estimate of the tail beyond `10⁶` terms.
pub fn e_n(n: u64) -> f64 {
    let nf = n as f64;
    let term = |k: f64| nf * nf / (k * k * (k + nf) * (k + nf));
    let head: f64 = (1..=E_TERMS).rev().map(|k| term(k as f64)).sum();
    // ∫_{K+½}^∞ n²/x⁴ dx, with the (x+n)⁻² factor's leading correction
    let a = E_TERMS as f64 + 0.5;
    let tail = nf * nf / (3.0 * a * a * a) - nf * nf * nf / (2.0 * a.powi(4));
    head + tail
}

/// `C_n = D_n + 2E_n`.
pub fn cn_constant(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "n must be at least 1"));
    }
    Ok(d_n(n) + 2.0 * e_n(n))
}

/// `(n, C_n)` for `1 ≤ n ≤ n_max`, computed in parallel.
pub fn cn_table(n_max: u64) -> Vec<(u64, f64)> {
    (1..=n_max)
        .into_par_iter()
        .map(|n| (n, d_n(n) + 2.0 * e_n(n)))
        .collect()
}

/// The quadratic `a(x) y² + b(x) y + c(x) = 0` obtained by integrating the
/// comparison ODE from `y(0) = 0`.
#[derive(Clone, Copy, Debug)]
pub struct ImplicitCurve {
    pub b_const: f64,
}

impl Default for ImplicitCurve {
    fn default() -> Self {
        Self { b_const: b_constant() }
    }
}

impl ImplicitCurve {
    pub fn coefficients(&self, x: f64) -> (f64, f64, f64) {
        let a = 2.0 * self.b_const * x * x + 4.0 * x;
        let b = 8.0 * x + 17f64.sqrt() * x * x - 4.0;
        let c = x * (x * x + 2.5).sqrt() + 2.5 * (0.4f64.sqrt() * x).asinh();
        (a, b, c)
    }

    /// `b + 2√(ac)`; negative while a nonnegative root exists.
    pub fn criterion(&self, x: f64) -> f64 {
        let (a, b, c) = self.coefficients(x);
        b + 2.0 * (a * c).sqrt()
    }

    /// Smaller root, the branch through `y(0) = 0`.
    pub fn root(&self, x: f64) -> Option<f64> {
        let (a, b, c) = self.coefficients(x);
        if x == 0.0 {
            return Some(0.0);
        }
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        // −b − √disc over 2a, written to avoid cancellation
        Some(2.0 * c / (-b + disc.sqrt()))
    }

    /// Right side of the comparison ODE.
    pub fn slope(&self, x: f64, y: f64) -> f64 {
        let bc = self.b_const;
        let s17 = 17f64.sqrt();
        let num = (10.0 + 4.0 * x * x).sqrt()
            + (8.0 + 2.0 * s17 * x) * y
            + 4.0 * bc * x * y * y
            + 4.0 * y * y;
        num / self.denominator(x, y)
    }

    pub fn denominator(&self, x: f64, y: f64) -> f64 {
        4.0 - 8.0 * x - 8.0 * x * y - 17f64.sqrt() * x * x - 4.0 * self.b_const * x * x * y
    }
}

/// Root of [`ImplicitCurve::criterion`] on `[0.1, 0.4]` by bisection.
pub fn find_xstar() -> Result<f64> {
    find_xstar_in(&ImplicitCurve::default(), 0.1, 0.4, 1e-8)
}

pub fn find_xstar_in(curve: &ImplicitCurve, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (curve.criterion(a), curve.criterion(b));
    if !(fa < 0.0 && fb > 0.0) {
        return Err(Error::NoBracket { lo, hi });
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        if curve.criterion(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Trajectory of the comparison ODE integrated with an embedded
/// Dormand–Prince 5(4) pair.
#[derive(Clone, Debug)]
pub struct OdeRun {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Where the step size collapsed against the vanishing denominator.
    pub blowup_x: Option<f64>,
}

impl OdeRun {
    /// Value at an accepted step point, e.g. one of the requested stops.
    pub fn y_at(&self, x: f64) -> Option<f64> {
        let i = self.xs.iter().position(|&t| t == x)?;
        Some(self.ys[i])
    }
}

/// Integrates `y′ = slope(x, y)` from `y(0) = 0` up to `x_end`, forcing
/// steps to land on each of `stops` (sorted) so they can be read exactly.
pub fn integrate_ode(curve: &ImplicitCurve, x_end: f64, stops: &[f64], rtol: f64) -> OdeRun {
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let (mut x, mut y) = (0.0f64, 0.0f64);
    let mut h: f64 = 1e-4;
    let mut xs = vec![x];
    let mut ys = vec![y];
    let mut next_stop = stops.iter().copied().filter(|&s| s > 0.0).peekable();
    let mut blowup_x = None;
    while x < x_end {
        let target = next_stop.peek().copied().unwrap_or(x_end).min(x_end);
        let hh = h.min(target - x);
        let mut k = [0.0f64; 7];
        let mut ok = true;
        for s in 0..7 {
            let yi = y + hh * (0..s).map(|j| A[s][j] * k[j]).sum::<f64>();
            let xi = x + C[s] * hh;
            if curve.denominator(xi, yi) <= 0.0 {
                ok = false;
                break;
            }
            k[s] = curve.slope(xi, yi);
        }
        let (y5, err) = if ok {
            let y5 = y + hh * B5.iter().zip(&k).map(|(b, k)| b * k).sum::<f64>();
            let y4 = y + hh * B4.iter().zip(&k).map(|(b, k)| b * k).sum::<f64>();
            (y5, (y5 - y4).abs() / (rtol * (1.0 + y5.abs())))
        } else {
            (y, f64::INFINITY)
        };
        if err <= 1.0 {
            let landed = hh == target - x;
            x = if landed { target } else { x + hh };
            y = y5;
            xs.push(x);
            ys.push(y);
            if landed && next_stop.peek() == Some(&target) {
                next_stop.next();
            }
            h = (hh * 0.9 * err.max(1e-10).powf(-0.2)).min(5.0 * hh).min(1e-2);
        } else {
            h = hh * if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.1) } else { 0.25 };
        }
        if h < 1e-13 {
            blowup_x = Some(x);
            break;
        }
    }
    OdeRun { xs, ys, blowup_x }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_columns() {
        // f = cos 2x: f sin x − f′ cos x = (3/2) sin 3x + (1/2) sin x
        let m = shift_operator_matrix(8, 1);
        let col: f64 = (0..m.nrows()).map(|r| m[(r, 0)].powi(2)).sum::<f64>().sqrt();
        assert!((col - 10f64.sqrt() / 2.0).abs() < 1e-15);
        // f = cos 2x: 2f sin 2x − f′ cos 2x = 2 sin 4x
        let m = shift_operator_matrix(8, 2);
        let col: f64 = (0..m.nrows()).map(|r| m[(r, 0)].powi(2)).sum::<f64>().sqrt();
        assert!((col - 2.0).abs() < 1e-15);
    }

    #[test]
    fn c1_and_d4() {
        assert_eq!(d_n(4), 16.0);
        assert_eq!(d_n(3), 0.0);
        let c1 = cn_constant(1).unwrap();
        assert!((c1 - 2.0 * (PI * PI / 3.0 - 3.0)).abs() < 1e-12);
    }

    #[test]
    fn implicit_curve_at_origin() {
        let c = ImplicitCurve::default();
        assert_eq!(c.coefficients(0.0).2, 0.0);
        assert_eq!(c.root(0.0), Some(0.0));
        assert!(c.criterion(0.1) < 0.0);
    }
}
