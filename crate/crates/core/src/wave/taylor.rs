//! Small-amplitude expansion `u_ε = Σ εⁿ Σ_k u_{n,k} cos kx`, `v_ε = Σ εⁿ v_n`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, ToPrimitive, Zero};

use crate::error::{invalid, Result};

/// Largest order computed in exact arithmetic by [`taylor_table`].
pub const EXACT_MAX_ORDER: usize = 40;
/// Largest order accepted in floating point.
pub const DOUBLE_MAX_ORDER: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arithmetic {
    Exact,
    Double,
}

/// Coefficients `u[n][k]` (1 ≤ k ≤ n ≤ nmax) and `v[n]` (0 ≤ n ≤ nmax).
///
/// `v[nmax]` needs `u` at order `nmax + 1` and is computed as well, so the
/// speed is one order ahead of the profile.
#[derive(Clone, Debug)]
pub struct WaveTaylor {
    nmax: usize,
    u: Vec<Vec<f64>>,
    v: Vec<f64>,
    exact: Option<(Vec<Vec<BigRational>>, Vec<BigRational>)>,
}

/// Exact up to [`EXACT_MAX_ORDER`], floating point beyond.
pub fn taylor_table(nmax: usize) -> Result<WaveTaylor> {
    let mode = if nmax <= EXACT_MAX_ORDER {
        Arithmetic::Exact
    } else {
        Arithmetic::Double
    };
    taylor_table_with(nmax, mode)
}

pub fn taylor_table_with(nmax: usize, mode: Arithmetic) -> Result<WaveTaylor> {
    if nmax == 0 {
        return Err(invalid("nmax", "order must be at least 1"));
    }
    match mode {
        Arithmetic::Double => {
            if nmax > DOUBLE_MAX_ORDER {
                return Err(invalid(
                    "nmax",
                    format!("double mode supports orders up to {DOUBLE_MAX_ORDER}"),
                ));
            }
            let (u, v) = recurrence::<f64>(nmax + 1);
            Ok(WaveTaylor::from_double(nmax, u, v))
        }
        Arithmetic::Exact => {
            let (u, v) = recurrence::<BigRational>(nmax + 1);
            let uf = u.iter().map(|row| row.iter().map(to_f64).collect()).collect();
            let vf = v.iter().map(to_f64).collect();
            let mut t = WaveTaylor::from_double(nmax, uf, vf);
            t.exact = Some((u, v));
            t.truncate_rows();
            Ok(t)
        }
    }
}

impl WaveTaylor {
    fn from_double(nmax: usize, u: Vec<Vec<f64>>, v: Vec<f64>) -> Self {
        let mut t = Self {
            nmax,
            u,
            v,
            exact: None,
        };
        t.truncate_rows();
        t
    }

    fn truncate_rows(&mut self) {
        self.u.truncate(self.nmax + 1);
        self.v.truncate(self.nmax + 1);
        if let Some((u, v)) = &mut self.exact {
            u.truncate(self.nmax + 1);
            v.truncate(self.nmax + 1);
        }
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// `u_{n,k}`; zero outside `1 ≤ k ≤ n ≤ nmax`.
    pub fn u(&self, n: usize, k: usize) -> f64 {
        self.u.get(n).and_then(|r| r.get(k)).copied().unwrap_or(0.0)
    }

    pub fn v(&self, n: usize) -> f64 {
        self.v.get(n).copied().unwrap_or(0.0)
    }

    pub fn u_exact(&self, n: usize, k: usize) -> Option<&BigRational> {
        self.exact.as_ref()?.0.get(n)?.get(k)
    }

    pub fn v_exact(&self, n: usize) -> Option<&BigRational> {
        self.exact.as_ref()?.1.get(n)
    }

    /// Cosine coefficients of `u_ε` (index k − 1) and the speed, summed to
    /// order `nmax` in ε.
    pub fn sum(&self, eps: f64, order: usize) -> (Vec<f64>, f64) {
        let order = order.min(self.nmax);
        let mut cos = vec![0.0; order.max(1)];
        let mut v = 0.0;
        let mut p = 1.0;
        for n in 0..=order {
            v += self.v(n) * p;
            if n >= 1 {
                for k in 1..=n {
                    cos[k - 1] += self.u(n, k) * p;
                }
            }
            p *= eps;
        }
        (cos, v)
    }

    /// CSV with header `n,k,u` over the nonzero pattern `n − k` even; values
    /// are `p/q` in exact mode and decimal otherwise.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,k,u\n");
        for n in 1..=self.nmax {
            for k in (1..=n).filter(|k| (n - k) % 2 == 0) {
                let val = match self.u_exact(n, k) {
                    Some(q) => format_rational(q),
                    None => format!("{:e}", self.u(n, k)),
                };
                let _ = writeln!(s, "{n},{k},{val}");
            }
        }
        s
    }
}

/// `p/q` in lowest terms, or `p` when the denominator is 1.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom() == &BigInt::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Inverse of [`format_rational`]. Accepts an optional sign and rejects a
/// zero denominator.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || crate::Error::Parse(format!("not a rational: {s:?}"));
    let int = |t: &str| -> Result<BigInt> {
        let t = t.trim();
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        BigInt::from_str_radix(t.trim_start_matches('+'), 10).map_err(|_| bad())
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(int(s)?)),
        Some((p, q)) => {
            let q = int(q)?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(int(p)?, q))
        }
    }
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn c<T: FromPrimitive>(x: i64) -> T {
    T::from_i64(x).expect("small integers are representable")
}

/// Runs the recurrence to order `nmax`; returns `u[n][k]` with rows
/// `0..=nmax` and `v[0..=nmax-1]`.
fn recurrence<T: Clone + Num + FromPrimitive>(nmax: usize) -> (Vec<Vec<T>>, Vec<T>) {
    let mut u: Vec<Vec<T>> = (0..=nmax).map(|n| vec![T::zero(); n + 1]).collect();
    let mut v: Vec<T> = vec![T::zero(); nmax];
    v[0] = c(-1);
    u[1][1] = T::one();
    let get = |u: &[Vec<T>], n: usize, k: usize| -> T {
        u.get(n).and_then(|r| r.get(k)).cloned().unwrap_or_else(T::zero)
    };
    for n in 2..=nmax {
        // speed from the sin x balance
        let mut acc = T::zero();
        for m in 1..n {
            for l in 1..=m.min(n - m - 1) {
                acc = acc + get(&u, m, l) * get(&u, n - m, l + 1);
            }
        }
        v[n - 1] = acc / c(2);

        // sin kx balance, solved for the top-order term
        let mut k = n;
        while k >= 2 {
            let mut lin = T::zero();
            for m in 1..=n - k {
                lin = lin + v[m].clone() * get(&u, n - m, k);
            }
            let mut low = T::zero();
            let mut high = T::zero();
            for m in 1..n {
                let lo = 1.max((k + m).saturating_sub(n));
                for l in lo..=m.min(k - 1) {
                    low = low + get(&u, m, l) * get(&u, n - m, k - l);
                }
                if n >= m + k {
                    for l in 1..=m.min(n - m - k) {
                        high = high + get(&u, m, l) * get(&u, n - m, k + l);
                    }
                }
            }
            let kk: T = c(k as i64);
            let rest = kk.clone() * lin - kk.clone() * low / c(4) - kk * high / c(2);
            // (1 − k) u_{n,k} + rest = 0
            u[n][k] = rest / c(k as i64 - 1);
            k -= 2;
        }
    }
    (u, v)
}

/// Diagonal coefficients `u_{n,n}` and radius-of-convergence estimates.
#[derive(Clone, Debug)]
pub struct DiagonalSeries {
    /// `coeffs[n] = u_{n,n}`; index 0 unused.
    pub coeffs: Vec<f64>,
    /// Same in exact arithmetic for `n ≤ EXACT_MAX_ORDER`.
    pub exact: Vec<BigRational>,
    /// `|u_{N,N}|^{−1/N}`.
    pub root_estimate: f64,
    /// `|u_{N−1,N−1} / u_{N,N}|`.
    pub ratio_estimate: f64,
    /// Linear extrapolation of the ratios in `1/n`.
    pub domb_sykes_estimate: f64,
}

/// `(1 − n) u_{n,n} = ½ Σ_{k=1}^{n−1} (n − k) u_{k,k} u_{n−k,n−k}`.
pub fn diagonal_series(nmax: usize) -> Result<DiagonalSeries> {
    if nmax < 3 {
        return Err(invalid("nmax", "need at least 3 diagonal terms"));
    }
    if nmax > DOUBLE_MAX_ORDER {
        return Err(invalid(
            "nmax",
            format!("supports orders up to {DOUBLE_MAX_ORDER}"),
        ));
    }
    let coeffs = diagonal::<f64>(nmax);
    let exact = diagonal::<BigRational>(nmax.min(EXACT_MAX_ORDER));
    let n = nmax as f64;
    let (a, b, p) = (coeffs[nmax], coeffs[nmax - 1], coeffs[nmax - 2]);
    let r_n = (a / b).abs();
    let r_prev = (b / p).abs();
    Ok(DiagonalSeries {
        root_estimate: a.abs().powf(-1.0 / n),
        ratio_estimate: 1.0 / r_n,
        domb_sykes_estimate: 1.0 / (n * r_n - (n - 1.0) * r_prev),
        coeffs,
        exact,
    })
}

fn diagonal<T: Clone + Num + FromPrimitive>(nmax: usize) -> Vec<T> {
    let mut d = vec![T::zero(); nmax + 1];
    d[1] = T::one();
    for n in 2..=nmax {
        let mut acc = T::zero();
        for k in 1..n {
            acc = acc + c::<T>((n - k) as i64) * d[k].clone() * d[n - k].clone();
        }
        d[n] = acc / c(2) / c(1 - n as i64);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn low_orders_exact() {
        let t = taylor_table(6).unwrap();
        assert_eq!(t.u_exact(1, 1), Some(&q(1, 1)));
        assert_eq!(t.u_exact(2, 2), Some(&q(-1, 2)));
        assert_eq!(t.u_exact(3, 3), Some(&q(3, 8)));
        assert_eq!(t.u_exact(3, 1), Some(&q(0, 1)));
        assert_eq!(t.v_exact(0), Some(&q(-1, 1)));
        assert_eq!(t.v_exact(1), Some(&q(0, 1)));
        assert_eq!(t.v_exact(2), Some(&q(-1, 4)));
    }

    #[test]
    fn double_mode_agrees_and_is_capped() {
        let e = taylor_table_with(20, Arithmetic::Exact).unwrap();
        let d = taylor_table_with(20, Arithmetic::Double).unwrap();
        for n in 1..=20 {
            for k in 1..=n {
                let (a, b) = (e.u(n, k), d.u(n, k));
                assert!((a - b).abs() <= 1e-13 * a.abs().max(1e-300), "{n},{k}");
            }
        }
        assert!(taylor_table(201).is_err());
        assert!(taylor_table(0).is_err());
    }

    #[test]
    fn rational_text_round_trip() {
        for s in ["-1/2", "3/8", "0", "-7", "123456789012345678901234567891/2"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        for s in ["1/0", "", "/3", "1/", "a/b", "1.5", "--1", "1/2/3"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn csv_starts_with_low_orders() {
        let csv = taylor_table(3).unwrap().to_csv();
        assert_eq!(csv, "n,k,u\n1,1,1\n2,2,-1/2\n3,1,0\n3,3,3/8\n");
    }
}
