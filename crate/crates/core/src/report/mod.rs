//! Files written by the command-line tool: CSV tables, `key = value`
//! configs, SVG plots and JSON manifests.

mod config;
mod svg;
mod table;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use config::{emit_config, parse_config};
pub use svg::{render_svg, PlotSpec, Series, Style};
pub use table::{Cell, Schema, Table};

use crate::dynamics::LinearFit;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subcommand {
    Wave,
    Constants,
    Spectrum,
    Simulate,
    Lifespan,
    Frame,
}

impl Subcommand {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Wave => "wave",
            Self::Constants => "constants",
            Self::Spectrum => "spectrum",
            Self::Simulate => "simulate",
            Self::Lifespan => "lifespan",
            Self::Frame => "frame",
        }
    }
}

/// Everything needed to rerun a command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub subcommand: Subcommand,
    pub parameters: BTreeMap<String, String>,
    pub output_dir: String,
    pub seed: u64,
}

/// The JSON written next to every set of outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub run_spec: RunSpec,
    pub version: String,
    /// Files written by the run, relative to the output directory.
    pub outputs: Vec<String>,
    pub result: serde_json::Value,
}

impl Manifest {
    pub fn new(run_spec: RunSpec, outputs: Vec<String>, result: serde_json::Value) -> Self {
        Self {
            run_spec,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs,
            result,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Log-log scatter of `(x, T)` with the fitted line and its slope.
pub fn lifespan_plot(points: &[(f64, f64)], fit: Option<&LinearFit>, x_label: &str) -> PlotSpec {
    let mut series = vec![Series {
        label: "T_obs".into(),
        points: points.iter().map(|&(x, t)| (x.exp(), t)).collect(),
        style: Style::Markers,
    }];
    let mut note = None;
    if let Some(f) = fit {
        let (lo, hi) = points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
        series.push(Series {
            label: "fit".into(),
            points: [lo, hi].iter().map(|&x| (x.exp(), (f.intercept + f.slope * x).exp())).collect(),
            style: Style::Line,
        });
        note = Some(format!("slope {:.3} ± {:.3}", f.slope, f.slope_stderr));
    }
    PlotSpec {
        title: "lifespan".into(),
        x_label: x_label.into(),
        y_label: "T_obs".into(),
        log_x: true,
        log_y: true,
        series,
        note,
        description: None,
    }
}
