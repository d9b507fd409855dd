//! Convergence tables and their CSV form.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "method,dt,group_size,rmse,mean_estimate,wall_seconds";

/// Estimation method of a study curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Bridge,
    EulerMaruyama { dt: f64 },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Bridge => "bridge",
            Method::EulerMaruyama { .. } => "em",
        }
    }

    pub fn dt(&self) -> Option<f64> {
        match self {
            Method::Bridge => None,
            Method::EulerMaruyama { dt } => Some(*dt),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Bridge => write!(f, "bridge"),
            Method::EulerMaruyama { dt } => write!(f, "em(dt={dt})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub method: Method,
    pub group_size: usize,
    pub rmse: f64,
    /// Average of the bootstrap group means.
    pub mean_estimate: f64,
    /// Modelled wall time of one group: per-sample cost times group size.
    pub wall_seconds: f64,
}

/// Rows grouped by method (in study order), ascending group size within each.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Distinct methods in row order.
    pub fn methods(&self) -> Vec<Method> {
        let mut out: Vec<Method> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.method) {
                out.push(r.method);
            }
        }
        out
    }

    pub fn rows_for(&self, method: Method) -> impl Iterator<Item = &ConvergenceRow> {
        self.rows.iter().filter(move |r| r.method == method)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 1));
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let dt = r.method.dt().map(fmt_decimal).unwrap_or_default();
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.method.name(),
                dt,
                r.group_size,
                fmt_decimal(r.rmse),
                fmt_decimal(r.mean_estimate),
                fmt_decimal(r.wall_seconds)
            ));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some(CSV_HEADER) {
            return Err(Error::config("CSV header does not match"));
        }
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            let bad = |what: &str| Error::config(format!("CSV line {}: {what}", n + 2));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad("expected 6 fields"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad("invalid number"));
            let method = match (f[0], f[1]) {
                ("bridge", "") => Method::Bridge,
                ("em", dt) => Method::EulerMaruyama { dt: num(dt)? },
                _ => return Err(bad("unknown method")),
            };
            rows.push(ConvergenceRow {
                method,
                group_size: f[2].parse().map_err(|_| bad("invalid group size"))?,
                rmse: num(f[3])?,
                mean_estimate: num(f[4])?,
                wall_seconds: num(f[5])?,
            });
        }
        Ok(Self { rows })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text)
    }
}

/// Scientific notation with 17 significant digits, which round-trips any `f64`.
fn fmt_decimal(v: f64) -> String {
    format!("{v:.16e}")
}
