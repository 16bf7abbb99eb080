use bhwave::bounds::*;
use bhwave::spectral::{multiply, norm, NormKind, TrigField};
use std::f64::consts::PI;

/// Grid oracle: the operator applied to cos(nx)/(n−1) with field arithmetic.
fn applied(n: usize, k: usize, j: usize) -> TrigField {
    let m = n + j + 2;
    let f = TrigField::cos_mode(k, 1.0 / (k - 1) as f64, m);
    let s = TrigField::sin_mode(j, j as f64, m);
    let c = TrigField::cos_mode(j, 1.0, m);
    multiply(&f, &s, false).sub(&multiply(&f.derivative(), &c, false))
}

#[test]
fn matrices_match_field_arithmetic() {
    for j in [1, 2] {
        let n = 12;
        let m = shift_operator_matrix(n, j);
        for k in 2..=n {
            let g = applied(n, k, j);
            for r in 1..=n + j {
                assert!((g.sin_coef(r) - m[(r - 1, k - 2)]).abs() < 1e-14, "j={j} k={k} r={r}");
            }
            assert!(g.cos().iter().all(|c| c.abs() < 1e-14));
        }
    }
}

#[test]
fn single_mode_examples() {
    let f = TrigField::cos_mode(2, 1.0, 8);
    let lin1 = multiply(&f, &TrigField::sin_mode(1, 1.0, 8), false)
        .sub(&multiply(&f.derivative(), &TrigField::cos_mode(1, 1.0, 8), false));
    assert!((norm(&lin1, NormKind::L2Normalized).unwrap() - 10f64.sqrt() / 2.0).abs() < 1e-14);
    let lin2 = multiply(&f, &TrigField::sin_mode(2, 2.0, 8), false)
        .sub(&multiply(&f.derivative(), &TrigField::cos_mode(2, 1.0, 8), false));
    assert!((norm(&lin2, NormKind::L2Normalized).unwrap() - 2.0).abs() < 1e-14);
    let sq = multiply(&f, &f, false).derivative();
    assert!((norm(&sq, NormKind::L2Normalized).unwrap() - 2.0).abs() < 1e-14);
    let mut e = vec![0.0; 7];
    e[0] = 1.0;
    assert!((bilinear_value(8, &e, &e) - 2.0).abs() < 1e-14);
    assert_eq!(bilinear_value(8, &e, &[0.0; 7]), 0.0);
}

#[test]
fn operator_norms_below_stated_constants() {
    let mut prev = (0.0, 0.0);
    for n in [8, 16, 64, 200] {
        let a = op_norm_f_sinx(n).unwrap();
        let b = op_norm_f_sin2x(n).unwrap();
        assert!(a.satisfied && b.satisfied, "{a:?} {b:?}");
        assert!(a.computed_value >= prev.0 - 1e-12 && b.computed_value >= prev.1 - 1e-12);
        prev = (a.computed_value, b.computed_value);
    }
    assert!(op_norm_f_sinx(4).is_err());
}

#[test]
fn bilinear_probes_stay_below_b() {
    for n in [16, 64] {
        let r = bilinear_probe(n, 3, 11).unwrap();
        assert!(r.satisfied, "{r:?}");
        assert!(r.computed_value >= 2.0);
    }
    assert!(bilinear_probe(16, 0, 1).is_err());
}

#[test]
fn e_n_matches_partial_fractions() {
    // E_n = π²/3 − Σ_{k≤n} 1/k² − (2/n) Σ_{k≤n} 1/k
    for n in [1u64, 2, 4, 7, 50, 500] {
        let h2: f64 = (1..=n).map(|k| 1.0 / (k * k) as f64).sum();
        let h1: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
        let closed = PI * PI / 3.0 - h2 - 2.0 / n as f64 * h1;
        assert!((e_n(n) - closed).abs() < 1e-12, "n={n}: {} vs {closed}", e_n(n));
    }
}

#[test]
fn c_n_table_peaks_at_four() {
    let t = cn_table(500);
    let (arg, max) = t.iter().fold((0, 0.0), |b, &(n, c)| if c > b.1 { (n, c) } else { b });
    assert_eq!(arg, 4);
    assert!(max < 18.65);
    assert!((max - (2.0 * PI * PI / 3.0 + 797.0 / 72.0)).abs() < 1e-10);
}

#[test]
fn xstar_and_ode_agree() {
    let x = find_xstar().unwrap();
    assert!((0.22..=0.24).contains(&x), "{x}");
    let curve = ImplicitCurve::default();
    let stops: Vec<f64> = (1..=20).map(|i| i as f64 * 0.01).collect();
    let run = integrate_ode(&curve, 0.4, &stops, 1e-12);
    for &s in &stops {
        let ode = run.y_at(s).unwrap();
        let imp = curve.root(s).unwrap();
        assert!((ode - imp).abs() < 1e-6, "x={s}: {ode} vs {imp}");
    }
    let bx = run.blowup_x.expect("denominator should vanish before 0.4");
    assert!((bx - x).abs() < 1e-3, "{bx} vs {x}");
    // increasing and nonnegative up to x*
    let ys: Vec<f64> = (0..=22).map(|i| curve.root(i as f64 * 0.01).unwrap()).collect();
    assert!(ys.windows(2).all(|w| w[1] > w[0]) && ys[0] == 0.0);
}

#[test]
fn bracket_without_sign_change_is_reported() {
    let c = ImplicitCurve::default();
    assert!(find_xstar_in(&c, 0.3, 0.4, 1e-8).is_err());
}
