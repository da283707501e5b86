use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::commands::{ConstantsReport, ConvergeReport, OracleReport, SpectrumReport};
use crate::error::Result;

pub enum Report {
    Constants(ConstantsReport),
    Spectrum(SpectrumReport),
    Converge(ConvergeReport),
    Oracle(OracleReport),
}

#[derive(Serialize)]
struct ConstantRow {
    quantity: &'static str,
    i: Option<usize>,
    j: Option<usize>,
    value: f64,
}

fn constant_rows(r: &ConstantsReport) -> Vec<ConstantRow> {
    let scalar = |quantity, value| ConstantRow { quantity, i: None, j: None, value };
    let mut out = Vec::new();
    for (i, &t) in r.theta.iter().enumerate() {
        out.push(ConstantRow { quantity: "theta", i: Some(i), j: None, value: t });
    }
    out.push(scalar("A", r.a));
    out.push(scalar("B", r.b));
    out.push(scalar("lambda0", r.lambda0));
    out.push(scalar("beta", r.beta));
    for (quantity, m) in [("Pi", &r.pi), ("boundary_A", &r.boundary_a), ("boundary_B", &r.boundary_b)] {
        for (i, row) in m.iter().enumerate() {
            for (j, &value) in row.iter().enumerate() {
                out.push(ConstantRow { quantity, i: Some(i), j: Some(j), value });
            }
        }
    }
    out.push(scalar("selfadjoint_residual", r.selfadjoint_residual));
    out.push(scalar("rank_margin", r.rank_margin));
    out
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

impl Report {
    pub fn name(&self) -> &'static str {
        match self {
            Report::Constants(_) => "constants",
            Report::Spectrum(_) => "spectrum",
            Report::Converge(_) => "converge",
            Report::Oracle(_) => "oracle",
        }
    }
}

/// Write `<name>.csv` and `<name>_summary.json` into `dir`; returns both paths.
pub fn write_report(report: &Report, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{}.csv", report.name()));
    let json_path = dir.join(format!("{}_summary.json", report.name()));
    match report {
        Report::Constants(r) => {
            write_csv(&csv_path, &constant_rows(r))?;
            write_json(&json_path, r)?;
        }
        Report::Spectrum(r) => {
            write_csv(&csv_path, &r.rows)?;
            write_json(&json_path, r)?;
        }
        Report::Converge(r) => {
            write_csv(&csv_path, &r.rows)?;
            #[derive(Serialize)]
            struct Summary<'a> {
                fits: &'a [super::RateFit],
                hs_monotone: bool,
                max_tail_bound: f64,
                notes: &'a [String],
            }
            write_json(
                &json_path,
                &Summary {
                    fits: &r.fits,
                    hs_monotone: r.hs_monotone,
                    max_tail_bound: r.max_tail_bound,
                    notes: &r.notes,
                },
            )?;
        }
        Report::Oracle(r) => {
            write_csv(&csv_path, &r.checks)?;
            write_json(&json_path, r)?;
        }
    }
    Ok((csv_path, json_path))
}
