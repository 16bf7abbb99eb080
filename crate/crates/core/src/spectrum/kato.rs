//! Exact Taylor coefficients of the eigenvalues `λ_n(ε)` from Kato's trace
//! formula, in rational complex arithmetic.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::wave::WaveTaylor;

pub type QComplex = Complex<BigRational>;

type Modes = BTreeMap<i64, QComplex>;

/// Largest order accepted by [`kato_coefficient`].
pub const KATO_MAX_ORDER: usize = 4;

fn q(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

/// `λ_n^{(k)}` for `1 ≤ k ≤ 4`.
pub fn kato_coefficient(n: i64, k: usize, table: &WaveTaylor) -> Result<QComplex> {
    if k > KATO_MAX_ORDER {
        return Err(Error::Unsupported(format!(
            "Kato coefficients above order {KATO_MAX_ORDER}"
        )));
    }
    kato_coefficient_any(n, k, table)
}

/// `λ_n^{(k)}` for any `k ≥ 1` the exact table covers. The number of terms
/// grows combinatorially; orders up to 8 are quick.
pub fn kato_coefficient_any(n: i64, k: usize, table: &WaveTaylor) -> Result<QComplex> {
    if n == 0 {
        return Err(invalid("n", "eigenvalue index must be nonzero"));
    }
    if k == 0 {
        return Err(invalid("k", "order must be at least 1"));
    }
    if table.nmax() < k || !table.is_exact() {
        return Err(invalid("table", format!("need an exact table of order ≥ {k}")));
    }
    let s = n.signum();
    let base = n + s;
    let perturbations: Vec<Vec<(i64, BigRational)>> =
        (0..=k).map(|v| multiplier_profile(table, v)).collect();

    let mut total = QComplex::zero();
    for p in 1..=k {
        let hs = representatives(p);
        for vs in compositions(k, p) {
            for h in &hs {
                let mut g = Modes::new();
                g.insert(base, QComplex::one());
                // L^{(v_p)} S^{(h_p)} ⋯ S^{(h_2)} L^{(v_1)} e
                for j in 0..p {
                    if j > 0 {
                        if h[j] == 0 {
                            // S^{(0)} = −P_n
                            let c = g.remove(&base).unwrap_or_else(QComplex::zero);
                            g.clear();
                            if !c.is_zero() {
                                g.insert(base, -c);
                            }
                        }
                        for _ in 0..h[j] {
                            g = apply_resolvent(&g, n);
                        }
                    }
                    g = apply_l(&g, &perturbations[vs[j]]);
                    if g.is_empty() {
                        break;
                    }
                }
                if let Some(c) = g.get(&base) {
                    if p % 2 == 1 {
                        total = total + c.clone();
                    } else {
                        total = total - c.clone();
                    }
                }
            }
        }
    }
    Ok(total)
}

/// Fourier modes of `u^{(v)} − v^{(v)}`, the order-`v` coefficient of
/// `u_ε − v_ε` with the zeroth order excluded.
fn multiplier_profile(table: &WaveTaylor, v: usize) -> Vec<(i64, BigRational)> {
    let mut out = Vec::new();
    if v == 0 {
        return out;
    }
    let half = BigRational::new(1.into(), 2.into());
    if let Some(sv) = table.v_exact(v) {
        if !sv.is_zero() {
            out.push((0, -sv.clone()));
        }
    }
    for kk in 1..=v {
        if let Some(c) = table.u_exact(v, kk) {
            if !c.is_zero() {
                let h = c * &half;
                out.push((kk as i64, h.clone()));
                out.push((-(kk as i64), h));
            }
        }
    }
    out
}

/// `g ↦ (w g)′` for `w` given by its modes.
fn apply_l(g: &Modes, w: &[(i64, BigRational)]) -> Modes {
    let mut out = Modes::new();
    for (&m, c) in g {
        for (j, wj) in w {
            let target = m + j;
            if target == 0 {
                continue;
            }
            let term = c.scale(wj.clone()).scale(q(target));
            // multiply by i
            let term = QComplex::new(-term.im, term.re);
            let e = out.entry(target).or_insert_with(QComplex::zero);
            *e = e.clone() + term;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Reduced resolvent at `in`: `ĝ(m) / (i(m − sgn m − n))`, zero on `n + sgn n`.
fn apply_resolvent(g: &Modes, n: i64) -> Modes {
    let skip = n + n.signum();
    g.iter()
        .filter(|(&m, _)| m != skip && m != 0)
        .map(|(&m, c)| {
            let d = q(m - m.signum() - n);
            // c / (i d) = −i c / d
            let r = QComplex::new(c.im.clone() / &d, -c.re.clone() / &d);
            (m, r)
        })
        .collect()
}

/// Ordered compositions of `k` into `p` positive parts.
fn compositions(k: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, p: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if p == 1 {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 1..=k - (p - 1) {
            prefix.push(first);
            rec(k - first, p - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if p >= 1 && p <= k {
        rec(k, p, &mut Vec::new(), &mut out);
    }
    out
}

/// Tuples of `p` nonnegative integers summing to `p − 1` that are the
/// lexicographically smallest among their rotations.
fn representatives(p: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 0 {
            if left == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for x in 0..=left {
            prefix.push(x);
            rec(left - x, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut all = Vec::new();
    rec(p - 1, p, &mut Vec::new(), &mut all);
    all.into_iter()
        .filter(|h| {
            (1..p).all(|r| {
                let rot: Vec<usize> = h[r..].iter().chain(&h[..r]).copied().collect();
                *h < rot
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representative_counts() {
        // the p rotations of each tuple are distinct, so the count is C(2p−2, p−1)/p
        let catalan = [1, 1, 2, 5, 14, 42];
        for p in 1..=6 {
            assert_eq!(representatives(p).len(), catalan[p - 1], "p = {p}");
            assert!(representatives(p).iter().all(|h| h[0] == 0));
        }
    }

    #[test]
    fn composition_counts() {
        // C(k−1, p−1)
        assert_eq!(compositions(4, 2).len(), 3);
        assert_eq!(compositions(6, 3).len(), 10);
        assert_eq!(compositions(5, 5), vec![vec![1; 5]]);
    }
}
