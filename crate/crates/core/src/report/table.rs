//! CSV tables with fixed headers.

use std::fmt::Write as _;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::wave::{format_rational, parse_rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Int,
    Float,
    /// Exact `p/q`, or a float for double-precision tables.
    Number,
    StopReason,
}

/// The table layouts written by the command-line tool.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Schema {
    /// `k, cos_coef` of a wave profile.
    WaveCoefficients,
    /// `n, k, u` Taylor coefficients.
    TaylorTable,
    /// `n, C_n`.
    Constants,
    /// Matched eigenvalues against their expansion.
    Spectrum,
    /// Per-run simulation trace.
    Run,
    /// One line per lifespan run.
    Sweep,
}

impl Schema {
    pub const ALL: [Schema; 6] = [
        Schema::WaveCoefficients,
        Schema::TaylorTable,
        Schema::Constants,
        Schema::Spectrum,
        Schema::Run,
        Schema::Sweep,
    ];

    pub fn header(self) -> &'static [&'static str] {
        match self {
            Self::WaveCoefficients => &["k", "cos_coef"],
            Self::TaylorTable => &["n", "k", "u"],
            Self::Constants => &["n", "C_n"],
            Self::Spectrum => &["n", "re_lambda", "im_lambda", "taylor_pred", "remainder"],
            Self::Run => &["t", "l2", "mean", "max_slope", "tail_fraction", "eps", "a", "g_h4"],
            Self::Sweep => &["eps", "delta", "T_obs", "stop_reason"],
        }
    }

    fn kinds(self) -> &'static [Kind] {
        use Kind::*;
        match self {
            Self::WaveCoefficients => &[Int, Float],
            Self::TaylorTable => &[Int, Int, Number],
            Self::Constants => &[Int, Float],
            Self::Spectrum => &[Int, Float, Float, Float, Float],
            Self::Run => &[Float; 8],
            Self::Sweep => &[Float, Float, Float, StopReason],
        }
    }

    /// The schema whose header line is `line`.
    pub fn from_header(line: &str) -> Option<Schema> {
        let cols: Vec<&str> = line.trim_end_matches('\r').split(',').collect();
        Self::ALL.into_iter().find(|s| s.header() == cols.as_slice())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Rational(BigRational),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Float(x) => Some(*x),
            Cell::Rational(q) => num_traits::ToPrimitive::to_f64(q),
            Cell::Text(_) => None,
        }
    }

    fn fits(&self, kind: Kind) -> bool {
        match (self, kind) {
            (Cell::Int(_), Kind::Int) | (Cell::Float(_), Kind::Float) => true,
            (Cell::Rational(_) | Cell::Float(_), Kind::Number) => true,
            (Cell::Text(s), Kind::StopReason) => crate::dynamics::StopReason::parse(s).is_ok(),
            _ => false,
        }
    }

    fn emit(&self, out: &mut String) {
        match self {
            Cell::Int(i) => write!(out, "{i}"),
            Cell::Float(x) => write!(out, "{x:e}"),
            Cell::Rational(q) => write!(out, "{}", format_rational(q)),
            Cell::Text(s) => write!(out, "{s}"),
        }
        .expect("writing to a String");
    }

    fn parse(s: &str, kind: Kind) -> Result<Cell> {
        let bad = || Error::Parse(format!("bad cell {s:?}"));
        match kind {
            Kind::Int => s.parse().map(Cell::Int).map_err(|_| bad()),
            Kind::Float => s.parse().map(Cell::Float).map_err(|_| bad()),
            Kind::Number => parse_rational(s)
                .map(Cell::Rational)
                .or_else(|_| s.parse().map(Cell::Float).map_err(|_| bad())),
            Kind::StopReason => crate::dynamics::StopReason::parse(s).map(|r| Cell::Text(r.as_str().into())),
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<BigRational> for Cell {
    fn from(v: BigRational) -> Self {
        Cell::Rational(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    schema: Schema,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(schema: Schema) -> Self {
        Self { schema, rows: Vec::new() }
    }

    pub fn schema(&self) -> Schema {
        self.schema
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends a row after checking its shape against the schema.
    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        let kinds = self.schema.kinds();
        if row.len() != kinds.len() || !row.iter().zip(kinds).all(|(c, &k)| c.fits(k)) {
            return Err(Error::Parse(format!("row does not match {:?}", self.schema)));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Column `j` as floats; text cells give `None`.
    pub fn column_f64(&self, j: usize) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.get(j).and_then(Cell::as_f64)).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.schema.header().join(",");
        out.push('\n');
        for row in &self.rows {
            for (j, c) in row.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                c.emit(&mut out);
            }
            out.push('\n');
        }
        out
    }

    /// Parses a table, taking the schema from the header line.
    pub fn from_csv(text: &str) -> Result<Table> {
        let first = text.lines().next().ok_or_else(|| Error::Parse("empty table".into()))?;
        let schema = Schema::from_header(first).ok_or_else(|| Error::Parse(format!("unknown header {first:?}")))?;
        Self::from_csv_as(schema, text)
    }

    /// Parses a table that must have the given schema.
    pub fn from_csv_as(schema: Schema, text: &str) -> Result<Table> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(text.as_bytes());
        let header = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?;
        if header.iter().ne(schema.header().iter().copied()) {
            return Err(Error::Parse(format!("header does not match {schema:?}")));
        }
        let kinds = schema.kinds();
        let mut table = Table::new(schema);
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            if rec.len() != kinds.len() {
                return Err(Error::Parse(format!("expected {} fields, got {}", kinds.len(), rec.len())));
            }
            let row = rec.iter().zip(kinds).map(|(s, &k)| Cell::parse(s, k)).collect::<Result<Vec<_>>>()?;
            table.rows.push(row);
        }
        Ok(table)
    }
}
