//! One function per subcommand. Each writes its files through the bundle
//! and returns the summary stored in the manifest.

use std::f64::consts::PI;

use serde_json::{json, Value};

use bhwave::bounds::{bilinear_probe, cn_table, find_xstar, op_norm_f_sin2x, op_norm_f_sinx};
use bhwave::dynamics::{
    cfl_limit, frame_fit, reconstruction_error, sweep_lifespan, DeltaRule, Frame, LifespanOptions, LifespanRecord,
    SimConfig, StopReason, WaveProvider,
};
use bhwave::report::{lifespan_plot, Cell, PlotSpec, Schema, Series, Style, Subcommand, Table};
use bhwave::spectrum::{assemble_l, kernel_check, nonres_scan, spectrum_report};
use bhwave::wave::{eps_derivative, eval_taylor, solve_wave, taylor_table};
use bhwave::TrigField;

use crate::output::Bundle;
use crate::params::Params;
use crate::Failure;

type Defaults = &'static [(&'static str, Option<&'static str>)];

pub fn defaults(cmd: Subcommand) -> Defaults {
    match cmd {
        Subcommand::Wave => &[
            ("eps", None),
            ("modes", Some("64")),
            ("method", Some("newton")),
            ("order", Some("30")),
            ("tol", Some("1e-13")),
            ("table-order", None),
        ],
        Subcommand::Constants => &[
            ("all", None),
            ("part", Some("all")),
            ("modes", Some("200")),
            ("trials", Some("8")),
            ("n-max", Some("20")),
        ],
        Subcommand::Spectrum => &[
            ("eps", None),
            ("modes", Some("256")),
            ("wave-modes", None),
            ("window", Some("8")),
            ("scan-M", None),
            ("kernel", None),
        ],
        Subcommand::Simulate => &[
            ("eps", None),
            ("delta", Some("0")),
            ("modes", Some("64")),
            ("dt", Some("auto")),
            ("t-end", Some("10")),
            ("frame", Some("comoving")),
            ("record-every", Some("10")),
        ],
        Subcommand::Lifespan => &[
            ("eps", Some("0.16,0.08,0.04")),
            ("rule", Some("linear")),
            ("c", Some("0.05")),
            ("modes", Some("32")),
            ("dt", Some("auto")),
            ("t-max", Some("1000")),
            ("record-every", Some("auto")),
            ("frame", Some("comoving")),
            ("follow", None),
        ],
        Subcommand::Frame => &[
            ("input", None),
            ("eps", Some("0.1")),
            ("shift", Some("0")),
            ("pert", Some("0")),
            ("eps-guess", None),
            ("a-guess", None),
            ("modes", Some("64")),
        ],
    }
}

pub fn dispatch(cmd: Subcommand, p: &Params, seed: u64, out: &mut Bundle) -> Result<Value, Failure> {
    match cmd {
        Subcommand::Wave => wave(p, out),
        Subcommand::Constants => constants(p, seed, out),
        Subcommand::Spectrum => spectrum(p, out),
        Subcommand::Simulate => simulate(p, out),
        Subcommand::Lifespan => lifespan(p, out),
        Subcommand::Frame => frame(p, out),
    }
}

fn wave(p: &Params, out: &mut Bundle) -> Result<Value, Failure> {
    let eps = p.eps("eps")?;
    let modes: usize = p.get("modes")?;
    let tol: f64 = p.get("tol")?;
    let w = match p.choice("method", &["newton", "taylor"])? {
        "newton" => solve_wave(eps, modes, tol)?,
        _ => eval_taylor(&taylor_table(p.get("order")?)?, eps, modes)?,
    };
    out.json("wave.json", &w)?;
    let mut t = Table::new(Schema::WaveCoefficients);
    for k in 1..=w.u.truncation() {
        t.push(vec![Cell::Int(k as i64), Cell::Float(w.u.cos_coef(k))])?;
    }
    out.table("wave_coefficients.csv", &t)?;
    if let Some(order) = p.opt::<usize>("table-order")? {
        let table = taylor_table(order)?;
        let t = Table::from_csv_as(Schema::TaylorTable, &table.to_csv())?;
        out.table("taylor_table.csv", &t)?;
    }
    Ok(json!({ "eps": w.eps, "v": w.v, "residual_norm": w.residual_norm, "modes": modes }))
}

fn constants(p: &Params, seed: u64, out: &mut Bundle) -> Result<Value, Failure> {
    let part = if p.flag("all")? { "all" } else { p.choice("part", &["all", "norms", "cn", "xstar"])? };
    let modes: usize = p.get("modes")?;
    let mut result = json!({});
    if matches!(part, "all" | "norms") {
        let reports = [
            ("bound_f_sinx.json", op_norm_f_sinx(modes)?),
            ("bound_f_sin2x.json", op_norm_f_sin2x(modes)?),
            ("bound_bilinear.json", bilinear_probe(modes, p.get("trials")?, seed)?),
        ];
        let mut all = true;
        for (name, r) in &reports {
            out.json(name, r)?;
            all &= r.satisfied;
        }
        result["bounds_satisfied"] = json!(all);
    }
    if matches!(part, "all" | "cn") {
        let n_max: u64 = p.get("n-max")?;
        if n_max == 0 {
            return Err(Failure::usage("`n-max` must be at least 1"));
        }
        let rows = cn_table(n_max);
        let mut t = Table::new(Schema::Constants);
        for &(n, c) in &rows {
            t.push(vec![Cell::Int(n as i64), Cell::Float(c)])?;
        }
        out.table("cn_table.csv", &t)?;
        let (arg, max) = rows.iter().fold((0, f64::NEG_INFINITY), |a, &(n, c)| if c > a.1 { (n, c) } else { a });
        result["cn_argmax"] = json!(arg);
        result["cn_max"] = json!(max);
    }
    if matches!(part, "all" | "xstar") {
        result["xstar"] = json!(find_xstar()?);
    }
    Ok(result)
}

fn spectrum(p: &Params, out: &mut Bundle) -> Result<Value, Failure> {
    let eps = p.eps("eps")?;
    let modes: usize = p.get("modes")?;
    // the matrix needs four times the wave's bandwidth
    let wave_modes = p.opt::<usize>("wave-modes")?.unwrap_or(modes / 4);
    let w = solve_wave(eps, wave_modes.max(2), 1e-13)?;
    let mut report = spectrum_report(&w, modes, p.get("window")?)?;
    if let Some(m) = p.opt::<usize>("scan-M")? {
        report.nonres = Some(nonres_scan(eps, m)?);
    }
    if p.flag("kernel")? {
        let (du, dv) = eps_derivative(&w, 1e-4, 1e-13)?;
        report.kernel_defects = Some(kernel_check(&w, &assemble_l(&w, modes)?, &du, dv));
    }
    out.json("spectrum.json", &report)?;
    let mut t = Table::new(Schema::Spectrum);
    for (i, &(n, lam)) in report.lam.iter().enumerate() {
        let pred = report.taylor_pred[i].1.im;
        let rem = report.remainder.iter().find(|r| r.0 == n).map_or(f64::NAN, |r| r.1);
        t.push(vec![Cell::Int(n), Cell::Float(lam.re), Cell::Float(lam.im), Cell::Float(pred), Cell::Float(rem)])?;
    }
    out.table("spectrum.csv", &t)?;
    Ok(json!({
        "eps": eps,
        "c_eps": report.c_eps,
        "nonres_min": report.nonres.as_ref().map(|n| n.min),
        "kernel_defects": report.kernel_defects,
    }))
}

fn sim_config(p: &Params, eps: f64, t_span: f64, record: Option<usize>) -> Result<SimConfig, Failure> {
    let modes: usize = p.get("modes")?;
    let amp = 1.5 * eps.abs() + 0.1;
    let dt = match p.str("dt")? {
        "auto" => 0.9 * cfl_limit(modes, amp),
        _ => p.get("dt")?,
    };
    let record = match record {
        Some(r) => r,
        None => match p.str("record-every")? {
            "auto" => ((0.5 / dt).ceil() as usize).max(1),
            _ => p.get("record-every")?,
        },
    };
    if !(t_span > 0.0 && t_span.is_finite()) {
        return Err(Failure::usage("the time span must be positive"));
    }
    let frame = match p.choice("frame", &["lab", "comoving"])? {
        "lab" => Frame::Lab,
        // the run fills in v_eps
        _ => Frame::Comoving(f64::NAN),
    };
    Ok(SimConfig::new(modes, dt, frame, record, &TrigField::cos_mode(1, amp, modes))?)
}

fn run_table(r: &LifespanRecord) -> Result<Table, Failure> {
    let mut t = Table::new(Schema::Run);
    for s in &r.samples {
        t.push([s.t, s.l2, s.mean, s.max_slope, s.tail_fraction, s.eps, s.a, s.g_h4].map(Cell::Float).to_vec())?;
    }
    Ok(t)
}

fn trace_plot(records: &[LifespanRecord]) -> PlotSpec {
    PlotSpec {
        title: "perturbation size".into(),
        x_label: "t".into(),
        y_label: "||g||_H4".into(),
        log_y: true,
        series: records
            .iter()
            .map(|r| Series {
                label: format!("eps = {}", r.eps),
                points: r.samples.iter().map(|s| (s.t, s.g_h4)).collect(),
                style: Style::Line,
            })
            .collect(),
        ..Default::default()
    }
}

fn simulate(p: &Params, out: &mut Bundle) -> Result<Value, Failure> {
    let eps = p.eps("eps")?;
    let delta: f64 = p.get("delta")?;
    let t_end: f64 = p.get("t-end")?;
    let cfg = sim_config(p, eps, t_end, Some(p.get("record-every")?))?;
    let mut opts = LifespanOptions::new(t_end);
    opts.run_to_t_max = true;
    let r = bhwave::dynamics::lifespan_run(eps, delta, &cfg, &opts)?;
    out.table("run.csv", &run_table(&r)?)?;
    out.svg("run.svg", trace_plot(std::slice::from_ref(&r)))?;
    let last = r.samples.last();
    Ok(json!({
        "eps": eps,
        "delta": delta,
        "dt": cfg.dt,
        "t_end": last.map(|s| s.t),
        "stop_reason": r.stop_reason,
        "thresholds": r.thresholds,
        "final_g_h4": last.map(|s| s.g_h4),
        "final_eps": last.map(|s| s.eps),
    }))
}

fn lifespan(p: &Params, out: &mut Bundle) -> Result<Value, Failure> {
    let eps_list = p.eps_list("eps")?;
    if eps_list.iter().any(|&e| e == 0.0) {
        return Err(Failure::usage("amplitudes must be nonzero"));
    }
    let c: f64 = p.get("c")?;
    let rule = match p.choice("rule", &["linear", "quadratic"])? {
        "linear" => DeltaRule::Linear(c),
        _ => DeltaRule::Quadratic(c),
    };
    let t_max: f64 = p.get("t-max")?;
    let eps_max = eps_list.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    let cfg = sim_config(p, eps_max, t_max, None)?;
    let mut opts = LifespanOptions::new(t_max);
    opts.follow_thresholds = p.flag("follow")?;
    let sweep = sweep_lifespan(&eps_list, rule, &cfg, &opts)?;
    let mut summary = Table::new(Schema::Sweep);
    let mut runs = Vec::new();
    for (i, r) in sweep.records.iter().enumerate() {
        summary.push(vec![
            Cell::Float(r.eps),
            Cell::Float(r.delta),
            Cell::Float(r.t_obs),
            Cell::Text(r.stop_reason.as_str().into()),
        ])?;
        let name = format!("run_{i:03}.csv");
        out.table(&name, &run_table(r)?)?;
        runs.push(json!({ "eps": r.eps, "file": name, "thresholds": r.thresholds, "stop_reason": r.stop_reason }));
    }
    out.table("sweep.csv", &summary)?;
    let pts: Vec<(f64, f64)> = sweep
        .records
        .iter()
        .filter(|r| r.stop_reason == StopReason::Doubling)
        .map(|r| (rule.predictor(r.eps, r.delta), r.t_obs))
        .collect();
    let x_label = match rule {
        DeltaRule::Linear(_) => "1/(eps delta)",
        DeltaRule::Quadratic(_) => "eps/delta^2",
    };
    out.svg("lifespan.svg", lifespan_plot(&pts, sweep.fit.as_ref(), x_label))?;
    out.svg("traces.svg", trace_plot(&sweep.records))?;
    Ok(json!({ "rule": rule, "fit": sweep.fit, "runs": runs, "dt": cfg.dt, "record_every": cfg.record_every }))
}

fn frame(p: &Params, out: &mut Bundle) -> Result<Value, Failure> {
    let modes: usize = p.get("modes")?;
    let eps = p.eps("eps")?;
    let shift: f64 = p.get("shift")?;
    let mut provider = WaveProvider::new(modes, 1e-13)?;
    let f = match p.opt::<String>("input")? {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| Failure::usage(format!("cannot read {path}: {e}")))?;
            TrigField::from_json(&text)?
        }
        None => {
            let u = provider.get(eps)?.wave.u.clone();
            let pert: f64 = p.get("pert")?;
            u.add(&TrigField::cos_mode(2, pert, modes)).shift(shift)
        }
    };
    let eps_guess = match p.opt::<f64>("eps-guess")? {
        Some(e) => e,
        None => eps,
    };
    let a_guess = p.opt::<f64>("a-guess")?.unwrap_or(shift).rem_euclid(2.0 * PI);
    let st = frame_fit(&f, eps_guess, a_guess, &mut provider)?;
    let rec = reconstruction_error(&f, &st, &mut provider)?;
    out.json("frame.json", &json!({ "state": st, "reconstruction_error": rec }))?;
    Ok(json!({
        "eps": st.eps,
        "a": st.a,
        "g_l2": bhwave::spectral::l2(&st.g),
        "fit_residual": st.fit_residual,
        "iterations": st.iterations,
        "reconstruction_error": rec,
    }))
}
