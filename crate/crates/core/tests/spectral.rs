use bhwave::spectral::{l2, multiply, norm, MultiplierOp, NormKind, TrigField};
use proptest::prelude::*;
use std::f64::consts::PI;

fn field(n: usize) -> impl Strategy<Value = TrigField> {
    (
        -1.0..1.0f64,
        prop::collection::vec(-1.0..1.0f64, n),
        prop::collection::vec(-1.0..1.0f64, n),
    )
        .prop_map(|(m, c, s)| TrigField::new(m, c, s).unwrap())
}

fn mean_zero(f: TrigField) -> TrigField {
    TrigField::new(0.0, f.cos().to_vec(), f.sin().to_vec()).unwrap()
}

fn rel(a: &TrigField, b: &TrigField) -> f64 {
    a.max_coef_diff(b) / (1.0 + l2(a).max(l2(b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hilbert_squared_is_minus_identity(f in field(32)) {
        let f = mean_zero(f);
        let h = MultiplierOp::hilbert();
        let hh = h.apply(&h.apply(&f).unwrap()).unwrap();
        prop_assert!(hh.max_coef_diff(&f.scale(-1.0)) < 1e-15);
    }

    #[test]
    fn multiplier_is_linear(f in field(16), g in field(16), a in -3.0..3.0f64) {
        let d = MultiplierOp::derivative();
        let lhs = d.apply(&f.axpy(a, &g)).unwrap();
        let rhs = d.apply(&f).unwrap().axpy(a, &d.apply(&g).unwrap());
        prop_assert!(lhs.max_coef_diff(&rhs) < 1e-12);
    }

    #[test]
    fn parseval(f in field(40)) {
        let samples = bhwave::spectral::to_grid(&f, 128);
        let quad: f64 = samples.iter().map(|x| x * x).sum::<f64>() * 2.0 * PI / 128.0;
        let n = l2(&f);
        prop_assert!((quad - n * n).abs() < 1e-12 * (1.0 + n * n));
    }

    #[test]
    fn product_commutes(f in field(64), g in field(64)) {
        prop_assert!(rel(&multiply(&f, &g, true), &multiply(&g, &f, true)) < 1e-13);
    }

    #[test]
    fn product_is_bilinear(f in field(64), g in field(64), h in field(64), a in -2.0..2.0f64) {
        let lhs = multiply(&f.axpy(a, &g), &h, false);
        let rhs = multiply(&f, &h, false).axpy(a, &multiply(&g, &h, false));
        prop_assert!(rel(&lhs, &rhs) < 1e-13);
    }

    #[test]
    fn dealiased_low_band_product_is_exact(f in field(10), g in field(10)) {
        // N = 64: ⌊2N/3⌋/2 = 21 so band 10 products stay below the cutoff
        let (f, g) = (f.with_truncation(64), g.with_truncation(64));
        let exact = multiply(&f, &g, false);
        let dealiased = multiply(&f, &g, true);
        prop_assert!(exact.max_coef_diff(&dealiased) < 1e-14);
        let full = bhwave::spectral::product_full(&f, &g);
        prop_assert!(full.with_truncation(64).max_coef_diff(&dealiased) < 1e-14);
    }
}

#[test]
fn json_layout_round_trips() {
    let f = TrigField::new(0.25, vec![1.0, -0.5], vec![0.0, 2.0]).unwrap();
    let s = f.to_json();
    assert_eq!(s, r#"{"mean":0.25,"cos":[1.0,-0.5],"sin":[0.0,2.0]}"#);
    assert_eq!(TrigField::from_json(&s).unwrap(), f);
    assert!(TrigField::from_json(r#"{"mean":0,"cos":[1],"sin":[]}"#).is_err());
}

#[test]
fn paper_norm_vs_plain() {
    let f = TrigField::cos_mode(3, 2.0, 5);
    let p = norm(&f, NormKind::L2Normalized).unwrap();
    assert!((l2(&f) - p * PI.sqrt()).abs() < 1e-14);
}
