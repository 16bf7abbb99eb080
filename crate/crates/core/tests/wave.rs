use bhwave::spectral::{l2, TrigField};
use bhwave::wave::*;
use num_bigint::BigInt;
use num_rational::BigRational;

/// Coefficient of xⁿ in 2W(x/2): (−n)^{n−1} / (n! 2^{n−1}).
fn lambert_coef(n: u32) -> BigRational {
    let num = BigInt::from(-(n as i64)).pow(n - 1);
    let fact: BigInt = (1..=n as u64).map(BigInt::from).product();
    BigRational::new(num, fact * BigInt::from(2).pow(n - 1))
}

#[test]
fn diagonal_is_lambert_w_exactly() {
    let d = diagonal_series(40).unwrap();
    assert_eq!(lambert_coef(4), BigRational::new((-1).into(), 3.into()));
    for n in 1..=40u32 {
        assert_eq!(d.exact[n as usize], lambert_coef(n), "n = {n}");
    }
    let t = taylor_table(30).unwrap();
    for n in 1..=30usize {
        assert_eq!(t.u_exact(n, n).unwrap(), &d.exact[n], "n = {n}");
    }
}

#[test]
fn diagonal_double_tracks_exact() {
    let d = diagonal_series(60).unwrap();
    for n in 1..=40 {
        let e: f64 = num_traits::ToPrimitive::to_f64(&d.exact[n]).unwrap();
        assert!((d.coeffs[n] - e).abs() <= 1e-12 * e.abs());
    }
    let target = 2.0 / std::f64::consts::E;
    assert!((d.domb_sykes_estimate - target).abs() < 1e-3 * target);
    assert!(d.root_estimate > target);
}

#[test]
fn parity_pattern_of_table() {
    let t = taylor_table(24).unwrap();
    for n in 1..=24 {
        if n % 2 == 1 {
            assert_eq!(t.v(n), 0.0);
        }
        for k in 1..=n {
            if (n - k) % 2 == 1 || (k == 1 && n > 1) {
                assert_eq!(t.u(n, k), 0.0, "u[{n}][{k}]");
            }
        }
    }
}

#[test]
fn taylor_residual_decays_with_order() {
    let t = taylor_table(12).unwrap();
    let w = eval_taylor(&t, 0.1, 40).unwrap();
    let half = eval_taylor(&t, 0.05, 40).unwrap();
    let order = (w.residual_norm / half.residual_norm).log2();
    assert!((order - 13.0).abs() < 0.2, "order {order}");
    assert!(w.residual_norm < 1e-10);
    let t14 = taylor_table(14).unwrap();
    assert!(eval_taylor(&t14, 0.1, 40).unwrap().residual_norm < 1e-12);
    let t3 = taylor_table(3).unwrap();
    let w3 = eval_taylor(&t3, 0.1, 16).unwrap();
    assert!(w3.residual_norm > 1e-6);
    assert_eq!(eval_taylor(&t, 0.0, 4).unwrap().u, TrigField::zeros(4));
    assert!(eval_taylor(&t, 0.5, 4).is_err());
}

#[test]
fn newton_matches_taylor_on_small_amplitudes() {
    let t30 = taylor_table(30).unwrap();
    let t3 = taylor_table(3).unwrap();
    for eps in [0.05, 0.1, 0.15] {
        let seed = eval_taylor(&t3, eps, 64).unwrap();
        let w = newton_refine(&seed, eps, 64, 1e-12).unwrap();
        assert!(w.residual_norm < 1e-12);
        let tw = eval_taylor(&t30, eps, 64).unwrap();
        let d = l2(&w.u.sub(&tw.u));
        assert!(d < 1e-10, "eps {eps}: {d:e}");
        assert!((w.v - tw.v).abs() < 1e-10);
        assert!(w.u.sin().iter().all(|b| *b == 0.0));
        assert_eq!(w.u.mean(), 0.0);
    }
}

#[test]
fn zero_amplitude_is_fixed() {
    let zero = TravelingWave::new(0.0, TrigField::zeros(8), -1.0, WaveSource::Newton);
    let w = newton_refine(&zero, 0.0, 8, 1e-12).unwrap();
    assert_eq!(w.u, TrigField::zeros(8));
    assert_eq!(w.v, -1.0);
}

#[test]
fn scaling_family_and_reflection() {
    let t3 = taylor_table(3).unwrap();
    let w = newton_refine(&eval_taylor(&t3, 0.1, 3).unwrap(), 0.1, 48, 1e-13).unwrap();
    for n in [2, 3] {
        assert!(w.rescaled(n).residual_norm < 1e-12);
    }
    let m = newton_refine(&eval_taylor(&t3, -0.1, 3).unwrap(), -0.1, 48, 1e-13).unwrap();
    let shifted = m.u.shift(std::f64::consts::PI);
    assert!(shifted.max_coef_diff(&w.u) < 1e-12);
    assert!((m.v - w.v).abs() < 1e-13);
}

#[test]
fn continuation_to_point_two() {
    let c = continuation(0.2, 0.01, 64, 1e-11).unwrap();
    assert_eq!(c.waves.len(), 20);
    assert!(c.stopped.is_none());
    assert!((c.last_eps - 0.2).abs() < 1e-12);
    assert!(c.waves.iter().all(|w| w.residual_norm < 1e-11));
    assert!(continuation(0.2, 0.0, 64, 1e-11).is_err());
    assert!(continuation(0.2, 0.03, 64, 1e-11).is_err());
}

#[test]
fn rational_dump_is_reparseable() {
    let t = taylor_table(10).unwrap();
    let csv = t.to_csv();
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (n, k): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        assert_eq!(&parse_rational(f[2]).unwrap(), t.u_exact(n, k).unwrap());
    }
}
