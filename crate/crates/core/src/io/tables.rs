use std::io::Write;

use crate::diagnostics::{DiagnosticsReport, MassProbe, SeriesRow};
use crate::error::{Error, Result};
use crate::flow::ComparisonRow;
use crate::residuals::{OrderRow, ResidualReport};

use super::csv::{fmt_num, write_table};

pub const SERIES_FILE: &str = "series.csv";
pub const MASS_FILE: &str = "mass_series.csv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.json";
pub const RESIDUALS_FILE: &str = "residuals.csv";
pub const ORDERS_FILE: &str = "orders.csv";
pub const COMPARISON_FILE: &str = "comparison.csv";

fn finish<W: Write>(w: csv::Writer<W>) -> Result<()> {
    w.into_inner().map_err(|e| Error::Io(e.into_error()))?.flush()?;
    Ok(())
}

/// One row per recorded state: curvature extremes, then the mass at each probe, then `D`.
pub fn write_series_csv<W: Write>(out: W, reports: &[DiagnosticsReport], probes: &[f64]) -> Result<()> {
    let header = SeriesRow::header(probes);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_table(out, &header, reports.iter().map(|r| r.series_row.values()))
}

pub fn write_mass_csv<W: Write>(out: W, mass: &MassProbe) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend(mass.radii.iter().map(|r| format!("m_r={r}")));
    w.write_record(&header)?;
    for (t, row) in mass.times.iter().zip(&mass.masses) {
        w.write_record(std::iter::once(*t).chain(row.iter().copied()).map(fmt_num))?;
    }
    finish(w)
}

pub fn write_residuals_csv<W: Write>(out: W, reports: &[ResidualReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "equation",
        "form",
        "M",
        "t",
        "max_residual",
        "rms_residual",
        "max_abs_residual",
        "worst_node",
    ])?;
    for r in reports {
        w.write_record([
            r.equation.clone(),
            r.form.name().to_string(),
            r.m.to_string(),
            fmt_num(r.t),
            fmt_num(r.max_residual),
            fmt_num(r.rms_residual),
            fmt_num(r.max_abs_residual),
            r.worst_node.to_string(),
        ])?;
    }
    finish(w)
}

/// One row per statement. `oracle` records whether the symbolic substitution
/// check confirmed the statement, so printed and derived forms of the same
/// equation can be read side by side.
pub fn write_orders_csv<W: Write>(out: W, rows: &[OrderRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let grids = rows.first().map_or([0; 3], |r| r.grids);
    let mut header: Vec<String> = [
        "equation",
        "observed_order",
        "verdict",
        "form",
        "oracle",
        "order_coarse",
        "order_fine",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(grids.iter().map(|m| format!("max_residual_M={m}")));
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.equation.clone(),
            fmt_num(r.observed_order),
            r.verdict.name().to_string(),
            r.spec.form.name().to_string(),
            if r.spec.oracle_holds { "holds" } else { "fails" }.to_string(),
            fmt_num(r.order_coarse),
            fmt_num(r.order_fine),
        ];
        rec.extend(r.max_residual.iter().map(|v| fmt_num(*v)));
        w.write_record(&rec)?;
    }
    finish(w)
}

pub fn write_comparison_csv<W: Write>(out: W, rows: &[ComparisonRow]) -> Result<()> {
    write_table(
        out,
        &["tau", "t_modified", "sup_rel_diff_psi", "sup_rel_diff_phi"],
        rows.iter()
            .map(|r| vec![r.tau, r.t_modified, r.sup_rel_diff_psi, r.sup_rel_diff_phi]),
    )
}
