//! CSV diagnostics log.

use std::path::Path;

use icflow::roundness::{DiagnosticsRecord, SphereFitResult};

use crate::CliError;

const FIXED: &[&str] = &[
    "t",
    "Theta",
    "R_t",
    "u_min",
    "u_max",
    "osc_u",
    "rho_plus",
    "rho_minus",
    "osc_support",
    "v_max",
    "grad_phi_sq_max",
    "w_max",
    "H_min",
    "H_max",
    "pinch_d1",
    "pinch_d2",
    "pinch_d3",
    "hausdorff",
    "scaled_hausdorff",
];

/// Column names for an ambient space ℝ^{dim}.
pub fn header(dim: usize) -> Vec<String> {
    let mut h: Vec<String> = FIXED.iter().map(|s| s.to_string()).collect();
    h.extend((0..dim).map(|i| format!("center_{i}")));
    h.push("dt".into());
    h
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Writes one row per record. Fit columns (R_t, hausdorff, the support
/// oscillation about the fitted center) come from `fit` when present and are
/// NaN otherwise.
pub fn emit_csv(path: &Path, dim: usize, records: &[DiagnosticsRecord], fit: Option<&SphereFitResult>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))?;
    w.write_record(header(dim)).map_err(|e| CliError::csv(path, e))?;
    for (k, r) in records.iter().enumerate() {
        let f = fit.and_then(|f| f.samples.get(k));
        let pinch = |i: usize| r.pinch.get(i).map_or(f64::NAN, |x| x.1);
        let mut row = vec![
            num(r.t),
            num(r.theta),
            num(f.map_or(f64::NAN, |f| f.r_t)),
            num(r.u_min),
            num(r.u_max),
            num(r.osc_u),
            num(r.rho_plus),
            num(r.rho_minus),
            num(f.map_or(r.osc_support, |f| f.osc_support)),
            num(r.v_max),
            num(r.grad_phi_sq_max),
            num(r.w_max),
            num(r.h_min),
            num(r.h_max),
            num(pinch(0)),
            num(pinch(1)),
            num(pinch(2)),
            num(f.map_or(f64::NAN, |f| f.hausdorff)),
            num(f.map_or(f64::NAN, |f| f.scaled_hausdorff)),
        ];
        row.extend(r.center.iter().map(|&c| num(c)));
        row.push(num(r.dt));
        w.write_record(&row).map_err(|e| CliError::csv(path, e))?;
    }
    w.flush().map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// A CSV file as named numeric columns.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let mut r = csv::Reader::from_path(path).map_err(|e| CliError::csv(path, e))?;
        let columns: Vec<String> = r
            .headers()
            .map_err(|e| CliError::csv(path, e))?
            .iter()
            .map(|s| s.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| CliError::csv(path, e))?;
            let row = rec
                .iter()
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|e| CliError::Input {
                        path: path.to_path_buf(),
                        msg: format!("row {}: `{s}`: {e}", i + 2),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Table { columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}
