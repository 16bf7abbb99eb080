use std::f64::consts::PI;

use bhwave::dynamics::*;
use bhwave::spectral::{hs, l2, TrigField};
use bhwave::wave::*;
use bhwave::Error;
use proptest::prelude::*;

fn wave(eps: f64, n: usize) -> TravelingWave {
    let t = taylor_table(3).unwrap();
    newton_refine(&eval_taylor(&t, eps, 3).unwrap(), eps, n, 1e-13).unwrap()
}

#[test]
fn rhs_of_traveling_wave_is_translation() {
    let w = wave(0.1, 64);
    let r = rhs(&w.u, true);
    let expect = w.u.derivative().scale(w.v);
    assert!(l2(&r.sub(&expect)) < 1e-10);
    assert_eq!(r.mean(), 0.0);
}

#[test]
fn rhs_of_cos_and_zero() {
    let r = rhs(&TrigField::cos_mode(1, 1.0, 16), true);
    let expect = TrigField::sin_mode(1, 1.0, 16).axpy(-0.5, &TrigField::sin_mode(2, 1.0, 16));
    assert!(r.max_coef_diff(&expect) < 1e-15);
    let z = TrigField::zeros(16);
    let cfg = SimConfig::new(16, 0.01, Frame::Lab, 1, &z).unwrap();
    let s = step_rk4(&SimState::new(&z, &cfg), &cfg).unwrap();
    assert_eq!(s.f, TrigField::zeros(16));
    assert!((s.t - 0.01).abs() < 1e-15);
}

#[test]
fn comoving_wave_is_fixed_and_conserves() {
    let w = wave(0.1, 256);
    let cfg = SimConfig::new(256, 1e-3, Frame::Comoving(w.v), 500, &w.u).unwrap();
    let s0 = SimState::new(&w.u, &cfg);
    let steps = (2.0 * PI / 1e-3).round() as usize;
    let l0 = s0.diagnostics.l2;
    let mut worst_mean = 0.0f64;
    let mut worst_drift = 0.0f64;
    let s = run(s0.clone(), &cfg, steps, |s| {
        worst_mean = worst_mean.max(s.diagnostics.mean.abs());
        worst_drift = worst_drift.max((s.diagnostics.l2 - l0).abs() / s.t);
    })
    .unwrap();
    assert!(l2(&s.f.sub(&s0.f)) < 1e-6);
    assert!(worst_mean < 1e-13);
    assert!(worst_drift < 1e-9);
}

#[test]
fn lab_frame_is_rigid_translation() {
    let w = wave(0.1, 64);
    let dt = 1e-3;
    let cfg = SimConfig::new(64, dt, Frame::Lab, 1000, &w.u).unwrap();
    let tend = 2.0 * PI / w.v.abs();
    let steps = (tend / dt).round() as usize;
    let s = run(SimState::new(&w.u, &cfg), &cfg, steps, |_| {}).unwrap();
    let exact = w.u.shift(w.v * s.t);
    assert!(l2(&s.f.sub(&exact)) < 1e-5);
}

fn translation_error(w: &TravelingWave, dt: f64) -> f64 {
    let cfg = SimConfig::new(w.truncation(), dt, Frame::Lab, 1, &w.u).unwrap();
    let steps = (2.0 / dt).round() as usize;
    let s = run(SimState::new(&w.u, &cfg), &cfg, steps, |_| {}).unwrap();
    l2(&s.f.sub(&w.u.shift(w.v * s.t)))
}

#[test]
fn halving_the_step_gains_fourth_order() {
    let w = wave(0.1, 32);
    let e1 = translation_error(&w, 0.01);
    let e2 = translation_error(&w, 0.005);
    let ratio = e1 / e2;
    assert!((12.0..20.0).contains(&ratio), "ratio {ratio} ({e1:e} / {e2:e})");
}

#[test]
fn step_rechecks_cfl() {
    let f = TrigField::cos_mode(1, 0.1, 16);
    let cfg = SimConfig::new(16, 0.01, Frame::Lab, 1, &f).unwrap();
    let big = TrigField::cos_mode(1, 100.0, 16);
    assert!(matches!(step_rk4(&SimState::new(&big, &cfg), &cfg), Err(Error::Cfl { .. })));
}

#[test]
fn fit_recovers_member_of_family() {
    let mut p = WaveProvider::new(64, 1e-13).unwrap();
    let u = p.get(0.1).unwrap().wave.u.clone();
    let st = frame_fit(&u.shift(0.3), 0.1, 0.31, &mut p).unwrap();
    assert!((st.eps - 0.1).abs() < 1e-10);
    assert!((st.a - 0.3).abs() < 1e-10);
    assert!(l2(&st.g) < 1e-10);
    let st = frame_fit(&u.shift(0.3 + 1e-4), 0.1, 0.3, &mut p).unwrap();
    assert!((st.a - 0.3001).abs() < 1e-10);
}

#[test]
fn fit_of_perturbed_wave() {
    let mut p = WaveProvider::new(64, 1e-13).unwrap();
    let u = p.get(0.1).unwrap().wave.u.clone();
    let f = u.add(&TrigField::cos_mode(2, 1e-3, 64));
    let st = frame_fit(&f, 0.1, 0.0, &mut p).unwrap();
    assert!((st.eps - 0.1).abs() < 1e-2);
    assert!(l2(&st.g) < 3e-3);
    let d = p.get(st.eps).unwrap();
    let [y0, y1] = d.pair(&st.g);
    assert!(y0.abs() < 1e-9 && y1.abs() < 1e-9);
    assert!(reconstruction_error(&f, &st, &mut p).unwrap() < 1e-10);
    // refitting the reconstruction gives the same state
    let again = frame_fit(&st.reconstruct(&d.wave.u), st.eps, st.a, &mut p).unwrap();
    assert!((again.eps - st.eps).abs() < 1e-10);
    assert!((again.a - st.a).abs() < 1e-10);
    assert!(l2(&again.g.sub(&st.g)) < 1e-10);
}

#[test]
fn fit_rejects_far_guess() {
    let mut p = WaveProvider::new(32, 1e-13).unwrap();
    let f = TrigField::cos_mode(3, 0.5, 32);
    assert!(frame_fit(&f, 0.1, 0.0, &mut p).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn fit_is_stable_under_small_perturbations(
        eps in 0.03f64..0.15,
        a in 0.0f64..(2.0 * PI),
        c2 in -1.0f64..1.0,
        s3 in -1.0f64..1.0,
        c4 in -1.0f64..1.0,
        scale in 0.0f64..0.02,
    ) {
        let mut p = WaveProvider::new(48, 1e-13).unwrap();
        let u = p.get(eps).unwrap().wave.u.clone();
        let h = TrigField::cos_mode(2, c2, 48)
            .add(&TrigField::sin_mode(3, s3, 48))
            .add(&TrigField::cos_mode(4, c4, 48));
        let h = if hs(&h, 2.0) > 0.0 { h.scale(scale * eps / hs(&h, 2.0)) } else { h };
        let f = u.add(&h).shift(a);
        let st = frame_fit(&f, eps, a, &mut p).unwrap();
        prop_assert!(st.fit_residual < 1e-9);
        prop_assert!((0.0..2.0 * PI).contains(&st.a));
        prop_assert!(reconstruction_error(&f, &st, &mut p).unwrap() < 1e-10);
        // Lipschitz in the H² distance
        prop_assert!((st.eps - eps).abs() <= 10.0 * scale * eps + 1e-12);
    }
}

fn small_config(eps: f64) -> SimConfig {
    let f = TrigField::cos_mode(1, eps, 32);
    let dt = 0.9 * cfl_limit(32, 1.5 * eps + 0.1);
    SimConfig::new(32, dt, Frame::Lab, 20, &f).unwrap()
}

#[test]
fn unperturbed_wave_has_no_defect() {
    let r = lifespan_run(0.1, 0.0, &small_config(0.1), &LifespanOptions::new(20.0)).unwrap();
    assert_eq!(r.stop_reason, StopReason::TMax);
    assert!(r.samples.iter().all(|s| s.g_h4 < 1e-8));
    assert!(r.t_obs <= 20.0);
}

#[test]
fn perturbed_run_is_well_formed() {
    let r = lifespan_run(0.1, 0.002, &small_config(0.1), &LifespanOptions::new(40.0)).unwrap();
    assert!(matches!(r.stop_reason, StopReason::Doubling | StopReason::TMax));
    assert!(r.t_obs.is_finite() && r.t_obs <= 40.0);
    assert!((r.samples[0].g_h4 - 0.002).abs() < 2e-4);
    assert!(r.samples.windows(2).all(|w| w[0].t < w[1].t));
    assert!(r.samples.iter().all(|s| s.projection < 1e-6));
}

#[test]
fn amplitude_drift_is_quadratic_in_delta() {
    let delta = 0.005;
    let mut cfg = small_config(0.1);
    cfg.frame = Frame::Comoving(f64::NAN);
    let r = lifespan_run(0.1, delta, &cfg, &LifespanOptions::new(100.0)).unwrap();
    let drift = r.samples.iter().map(|s| (s.eps - 0.1).abs()).fold(0.0, f64::max);
    assert!(drift <= 10.0 * delta * delta, "drift {drift:e}");
}

#[test]
fn lifespan_rejects_large_delta() {
    let cfg = small_config(0.1);
    let opts = LifespanOptions::new(1.0);
    assert!(lifespan_run(0.1, 0.02, &cfg, &opts).is_err());
    assert!(lifespan_run(0.0, 0.0, &cfg, &opts).is_err());
}

#[test]
fn sweep_needs_three_amplitudes() {
    let cfg = small_config(0.1);
    let opts = LifespanOptions::new(1.0);
    assert!(sweep_lifespan(&[], DeltaRule::Linear(0.05), &cfg, &opts).is_err());
    assert!(sweep_lifespan(&[0.1, 0.05], DeltaRule::Linear(0.05), &cfg, &opts).is_err());
}

#[test]
fn sweep_keeps_order_and_skips_fit_without_doublings() {
    let cfg = small_config(0.12);
    let opts = LifespanOptions::new(0.5);
    let r = sweep_lifespan(&[0.12, 0.06, 0.03], DeltaRule::Linear(0.05), &cfg, &opts).unwrap();
    let eps: Vec<f64> = r.records.iter().map(|x| x.eps).collect();
    assert_eq!(eps, vec![0.12, 0.06, 0.03]);
    for rec in &r.records {
        assert!((rec.delta - 0.05 * rec.eps).abs() < 1e-15);
    }
    if r.records.iter().filter(|x| x.stop_reason == StopReason::Doubling).count() < 2 {
        assert!(r.fit.is_none());
    }
}

#[test]
fn delta_rules() {
    assert!((DeltaRule::Quadratic(2.0).delta(0.1) - 0.02).abs() < 1e-16);
    let x = DeltaRule::Linear(0.05).predictor(0.1, 0.005);
    assert!((x - (2000.0f64).ln()).abs() < 1e-12);
    let y = DeltaRule::Quadratic(1.0).predictor(0.1, 0.01);
    assert!((y - (1000.0f64).ln()).abs() < 1e-12);
}
