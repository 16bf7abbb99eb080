//! Output directory handling. Every file is written to a temporary name in
//! the same directory and renamed into place.

use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use bhwave::report::{render_svg, Manifest, PlotSpec, RunSpec, Table};
use bhwave::Result;

pub struct Bundle {
    dir: PathBuf,
    spec: RunSpec,
    written: Vec<String>,
    notices: Vec<String>,
}

impl Bundle {
    pub fn new(dir: PathBuf, spec: RunSpec) -> Self {
        Self {
            dir,
            spec,
            written: Vec::new(),
            notices: Vec::new(),
        }
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.dir.join(name)).map_err(|e| e.error)?;
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_string());
        }
        Ok(())
    }

    pub fn table(&mut self, name: &str, table: &Table) -> Result<()> {
        self.write_bytes(name, table.to_csv().as_bytes())
    }

    /// Writes `{"run_spec": …, "report": …}`.
    pub fn json<T: Serialize>(&mut self, name: &str, report: &T) -> Result<()> {
        let v = json!({ "run_spec": self.spec, "report": report });
        let mut s = serde_json::to_string_pretty(&v)?;
        s.push('\n');
        self.write_bytes(name, s.as_bytes())
    }

    /// Renders the plot with the run spec in its description; an empty
    /// plot is skipped with a notice.
    pub fn svg(&mut self, name: &str, mut plot: PlotSpec) -> Result<()> {
        plot.description = Some(serde_json::to_string(&self.spec)?);
        match render_svg(&plot) {
            Ok(svg) => self.write_bytes(name, svg.as_bytes()),
            Err(_) => {
                let msg = format!("{name}: nothing to plot, skipped");
                eprintln!("bhwave: {msg}");
                self.notices.push(msg);
                Ok(())
            }
        }
    }

    pub fn finish(mut self, mut result: Value) -> Result<()> {
        if !self.notices.is_empty() {
            result["notices"] = json!(self.notices);
        }
        let mut outputs = self.written.clone();
        outputs.push("manifest.json".into());
        let m = Manifest::new(self.spec.clone(), outputs, result);
        self.write_bytes("manifest.json", m.to_json()?.as_bytes())
    }

    /// `error.json` with the run spec and the failure.
    pub fn write_failure(&mut self, err: &bhwave::Error) -> Result<()> {
        let v = json!({
            "run_spec": self.spec,
            "error": { "kind": format!("{err:?}").split([' ', '{', '(']).next().unwrap_or(""), "message": err.to_string() },
        });
        let mut s = serde_json::to_string_pretty(&v)?;
        s.push('\n');
        self.write_bytes("error.json", s.as_bytes())
    }
}
