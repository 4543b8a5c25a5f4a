//! CSV serialization of scan results.
//!
//! Metadata and summary values go in `#` comment lines ahead of the header.
//! Numbers carry 12 significant digits and lines end in LF, so identical
//! runs produce identical bytes.

use std::fmt::Write as _;

use subradiance::experiments::ScanResult;
use subradiance::model::fmt_f64;

pub fn to_csv(r: &ScanResult) -> String {
    let mut s = String::new();
    for (k, v) in &r.metadata {
        let _ = writeln!(s, "# {k} = {v}");
    }
    let dims: Vec<usize> = r.rows.iter().filter_map(|row| row.fock_dim).collect();
    if let (Some(lo), Some(hi)) = (dims.iter().min(), dims.iter().max()) {
        let _ = writeln!(s, "# fock_dim_range = {lo}..{hi}");
    }
    for (k, v) in &r.summary {
        let _ = writeln!(s, "# summary {k} = {}", fmt_f64(*v));
    }

    let series = r.has_series();
    let converged = r.has_convergence();
    let mut header: Vec<&str> = Vec::new();
    if series {
        header.push("curve");
    }
    header.extend(r.columns.iter().map(String::as_str));
    if converged {
        header.push("converged");
    }
    s.push_str(&header.join(","));
    s.push('\n');

    for row in &r.rows {
        let mut cells: Vec<String> = Vec::with_capacity(header.len());
        if series {
            cells.push(row.series.clone());
        }
        cells.extend(row.values.iter().map(|&v| fmt_f64(v)));
        if converged {
            cells.push(row.converged.unwrap_or(true).to_string());
        }
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}
