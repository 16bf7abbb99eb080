//! Equispaced sampling, trigonometric interpolation and exact products.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::TrigField;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Result of interpolating grid samples back to coefficients.
#[derive(Clone, Debug)]
pub struct GridFit {
    pub field: TrigField,
    /// Set when the grid has fewer than `2N + 1` points, so modes near `N`
    /// could not be separated from their aliases.
    pub aliased: bool,
}

/// Smallest 5-smooth integer `>= n`; keeps FFT sizes cheap.
pub fn fast_len(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        let plan = if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        };
        plan.process(buf);
    });
}

/// Samples `f(2πj/m)` for `j = 0..m`.
pub fn to_grid(f: &TrigField, m: usize) -> Vec<f64> {
    assert!(m >= 1, "grid needs at least one point");
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    buf[0] += Complex64::new(f.mean(), 0.0);
    for k in 1..=f.truncation() {
        let c = f.mode(k as i64);
        buf[k % m] += c;
        buf[(m - k % m) % m] += c.conj();
    }
    fft_in_place(&mut buf, true);
    buf.into_iter().map(|c| c.re).collect()
}

/// Discrete trigonometric interpolation of equispaced samples to a field of
/// truncation `n`.
pub fn from_grid(samples: &[f64], n: usize) -> GridFit {
    let m = samples.len();
    assert!(m >= 1, "grid needs at least one point");
    let n = n.max(1);
    let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    fft_in_place(&mut buf, false);
    let scale = 1.0 / m as f64;
    let mut cos = vec![0.0; n];
    let mut sin = vec![0.0; n];
    for k in 1..=n {
        if 2 * k < m {
            let c = buf[k] * scale;
            cos[k - 1] = 2.0 * c.re;
            sin[k - 1] = -2.0 * c.im;
        } else if 2 * k == m {
            cos[k - 1] = buf[k].re * scale;
        }
    }
    GridFit {
        field: TrigField::from_parts(buf[0].re * scale, cos, sin),
        aliased: m < 2 * n + 1,
    }
}

/// Pointwise product truncated to `max(N_f, N_g)` modes.
///
/// The grid has at least `N_f + N_g + N + 1` points, so every retained mode
/// is exact. With `dealias` set, modes above `⌊2N/3⌋` are also zeroed.
pub fn multiply(f: &TrigField, g: &TrigField, dealias: bool) -> TrigField {
    let n = f.truncation().max(g.truncation());
    let m = fast_len(f.truncation() + g.truncation() + n + 1);
    let out = product_on_grid(f, g, m, n);
    if dealias {
        out.lowpass(2 * n / 3)
    } else {
        out
    }
}

/// Exact product with truncation `N_f + N_g`.
pub fn product_full(f: &TrigField, g: &TrigField) -> TrigField {
    let n = f.truncation() + g.truncation();
    product_on_grid(f, g, fast_len(2 * n + 1), n)
}

fn product_on_grid(f: &TrigField, g: &TrigField, m: usize, n: usize) -> TrigField {
    let fs = to_grid(f, m);
    let gs = to_grid(g, m);
    let prod: Vec<f64> = fs.iter().zip(&gs).map(|(a, b)| a * b).collect();
    from_grid(&prod, n).field
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(n: usize, seed: u64) -> TrigField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cos = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sin = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        TrigField::new(rng.gen_range(-1.0..1.0), cos, sin).unwrap()
    }

    #[test]
    fn cos_round_trip_on_eight_points() {
        let f = TrigField::cos_mode(1, 1.0, 1);
        let s = to_grid(&f, 8);
        let back = from_grid(&s, 1);
        assert!(!back.aliased);
        assert!(back.field.max_coef_diff(&f) < 1e-15);
    }

    #[test]
    fn zero_field_samples_to_zero() {
        let s = to_grid(&TrigField::zeros(3), 7);
        assert!(s.iter().all(|&x| x == 0.0));
        assert_eq!(from_grid(&s, 3).field, TrigField::zeros(3));
    }

    #[test]
    fn random_round_trip_n64_m256() {
        let f = random_field(64, 7);
        let back = from_grid(&to_grid(&f, 256), 64);
        assert!(back.field.max_coef_diff(&f) < 1e-13);
    }

    #[test]
    fn aliasing_is_flagged() {
        let f = random_field(8, 1);
        assert!(from_grid(&to_grid(&f, 16), 8).aliased);
        assert!(!from_grid(&to_grid(&f, 17), 8).aliased);
    }

    #[test]
    fn samples_match_pointwise_evaluation() {
        let f = random_field(5, 3);
        let s = to_grid(&f, 13);
        for (j, v) in s.iter().enumerate() {
            let x = 2.0 * std::f64::consts::PI * j as f64 / 13.0;
            assert_abs_diff_eq!(*v, f.eval(x), epsilon = 1e-13);
        }
    }

    #[test]
    fn product_to_sum_identities() {
        let c = TrigField::cos_mode(1, 1.0, 4);
        let s = TrigField::sin_mode(1, 1.0, 4);
        let cc = multiply(&c, &c, false);
        assert_abs_diff_eq!(cc.mean(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(cc.cos_coef(2), 0.5, epsilon = 1e-15);
        let cs = multiply(&c, &s, false);
        assert_abs_diff_eq!(cs.sin_coef(2), 0.5, epsilon = 1e-15);
        assert!(cs.cos().iter().all(|a| a.abs() < 1e-15));
    }

    #[test]
    fn scaled_cos_times_derivative() {
        // (0.1 cos x)(0.1 cos x)' = -0.01 cos x sin x = -0.005 sin 2x
        let f = TrigField::cos_mode(1, 0.1, 8);
        let p = multiply(&f, &f.derivative(), true);
        let expected = TrigField::sin_mode(2, -0.005, 8);
        // grid oracle: compare samples with the closed form
        let m = 64;
        let samples = to_grid(&p, m);
        for (j, v) in samples.iter().enumerate() {
            let x = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            assert!((v - (-0.005 * (2.0 * x).sin())).abs() < 1e-14);
        }
        assert!(p.max_coef_diff(&expected) < 1e-14);
    }

    #[test]
    fn full_product_keeps_high_modes() {
        let f = TrigField::cos_mode(4, 1.0, 4);
        let p = product_full(&f, &f);
        assert_eq!(p.truncation(), 8);
        assert_abs_diff_eq!(p.cos_coef(8), 0.5, epsilon = 1e-15);
        assert_eq!(multiply(&f, &f, false).cos_coef(8), 0.0);
    }

    #[test]
    fn fast_len_is_five_smooth() {
        assert_eq!(fast_len(7), 8);
        assert_eq!(fast_len(97), 100);
        assert_eq!(fast_len(193), 200);
    }
}
