//! Matplotlib script reproducing the two-panel convergence figure from a CSV.

use std::fmt::Write as _;
use std::path::Path;

use super::table::ConvergenceTable;
use crate::error::{Error, Result};

/// Script text that reads `csv_name` (relative to the script's directory).
pub fn plot_script(table: &ConvergenceTable, csv_name: &str) -> Result<String> {
    let methods = table.methods();
    if methods.is_empty() {
        return Err(Error::config("cannot plot an empty table"));
    }
    let mut curves = String::new();
    for m in &methods {
        let dt = m.dt().map(|d| format!("{d:.16e}")).unwrap_or_default();
        let _ = writeln!(curves, "    (\"{}\", \"{dt}\", \"{m}\"),", m.name());
    }
    Ok(format!(
        r#"#!/usr/bin/env python3
"""RMSE against group size and against wall time, one curve per method."""
import csv
import os

import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
CSV_PATH = os.path.join(HERE, "{csv_name}")

# (method, dt, label)
CURVES = [
{curves}]


def load():
    with open(CSV_PATH, newline="") as f:
        return list(csv.DictReader(f))


def main():
    rows = load()
    fig, (ax_n, ax_t) = plt.subplots(1, 2, figsize=(10, 4))
    for method, dt, label in CURVES:
        sel = [r for r in rows if r["method"] == method and r["dt"] == dt]
        sel.sort(key=lambda r: int(r["group_size"]))
        m = [int(r["group_size"]) for r in sel]
        rmse = [float(r["rmse"]) for r in sel]
        wall = [float(r["wall_seconds"]) for r in sel]
        ax_n.loglog(m, rmse, marker="o", label=label)
        ax_t.loglog(wall, rmse, marker="o", label=label)
    ax_n.set_xlabel("sample size")
    ax_t.set_xlabel("wall time [s]")
    for ax in (ax_n, ax_t):
        ax.set_ylabel("RMSE")
        ax.grid(True, which="both", alpha=0.3)
    ax_n.legend()
    fig.tight_layout()
    fig.savefig(os.path.splitext(CSV_PATH)[0] + ".png", dpi=150)


if __name__ == "__main__":
    main()
"#
    ))
}

/// Writes the script to `script_path`, pointing at `csv_path` relative to it.
pub fn emit_plot_script(
    table: &ConvergenceTable,
    csv_path: &Path,
    script_path: &Path,
) -> Result<()> {
    let csv_name = relative_name(csv_path, script_path);
    let text = plot_script(table, &csv_name)?;
    std::fs::write(script_path, text).map_err(|e| Error::io(script_path, e))
}

/// `csv_path` relative to the directory of `script_path` when possible.
fn relative_name(csv_path: &Path, script_path: &Path) -> String {
    let script_dir = script_path.parent().unwrap_or(Path::new(""));
    let abs = |p: &Path| std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf());
    let (csv_abs, dir_abs) = (abs(csv_path), abs(script_dir));
    match csv_abs.strip_prefix(&dir_abs) {
        Ok(rel) => rel.to_string_lossy().into_owned(),
        Err(_) => csv_abs.to_string_lossy().into_owned(),
    }
}
