//! CSV emission and parsing for spectrum reports and sweeps.

use crate::error::{Error, Result};
use crate::spectrum::{SpectrumReport, SweepRow};

use super::svg::PlotData;

/// Shortest decimal form of `x` rounded to 12 significant digits.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("valid float");
    format!("{rounded}")
}

fn warnings_line(warnings: &[String]) -> String {
    if warnings.is_empty() {
        String::new()
    } else {
        format!("# warnings: {}\n", warnings.join("; ").replace('\n', " "))
    }
}

/// One-row CSV of a spectrum report: `alpha,band_top,count,oracle_gap,lambda_k_1,...`.
pub fn spectrum_csv(report: &SpectrumReport) -> String {
    let mut header = vec!["alpha".to_string(), "band_top".into(), "count".into(), "oracle_gap".into()];
    header.extend((1..=report.count).map(|j| format!("lambda_k_{j}")));
    let mut row = vec![
        format_number(report.alpha),
        format_number(report.ac_band[1]),
        report.count.to_string(),
        report.oracle_gap.map(format_number).unwrap_or_default(),
    ];
    row.extend(report.eigenvalues.iter().map(|e| format_number(e.lambda_k)));
    format!("{}\n{}\n{}", header.join(","), row.join(","), warnings_line(&report.warnings))
}

/// Sweep CSV: `alpha,band_top,count,eig_1,...` with empty cells for absent eigenvalues.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let width = rows.iter().map(|r| r.eigenvalues.len()).max().unwrap_or(0);
    let mut out = String::from("alpha,band_top,count");
    for j in 1..=width {
        out.push_str(&format!(",eig_{j}"));
    }
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{}", format_number(r.alpha), format_number(r.band_top), r.count));
        for j in 0..width {
            out.push(',');
            if let Some(v) = r.eigenvalues.get(j) {
                out.push_str(&format_number(*v));
            }
        }
        out.push('\n');
    }
    let warnings: Vec<String> = rows.iter().flat_map(|r| r.warnings.iter().cloned()).collect();
    out.push_str(&warnings_line(&warnings));
    out
}

/// Reads a sweep CSV back; comment lines (`#`) are skipped.
pub fn parse_sweep_csv(text: &str) -> Result<PlotData> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Schema(e.to_string()))?.clone();
    let names: Vec<&str> = header.iter().collect();
    if names.len() < 3 || names[..3] != ["alpha", "band_top", "count"] {
        return Err(Error::Schema(format!("expected header alpha,band_top,count,eig_1,..., got {names:?}")));
    }
    for (j, name) in names[3..].iter().enumerate() {
        if *name != format!("eig_{}", j + 1) {
            return Err(Error::Schema(format!("unexpected column {name:?}")));
        }
    }
    let cell = |v: &str, what: &str, line: u64| -> Result<f64> {
        v.trim()
            .parse::<f64>()
            .map_err(|_| Error::Schema(format!("line {line}: bad {what} value {v:?}")))
    };
    let width = names.len() - 3;
    let mut data = PlotData::default();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Schema(e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        data.alpha.push(cell(&record[0], "alpha", line)?);
        data.band_top.push(cell(&record[1], "band_top", line)?);
        let count = record[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Schema(format!("line {line}: bad count {:?}", &record[2])))?;
        let mut eigs = Vec::with_capacity(width);
        for j in 0..width {
            let v = record[3 + j].trim();
            eigs.push(if v.is_empty() { None } else { Some(cell(v, "eigenvalue", line)?) });
        }
        if eigs.iter().filter(|e| e.is_some()).count() != count {
            return Err(Error::Schema(format!("line {line}: count {count} does not match the eigenvalue cells")));
        }
        data.eigenvalues.push(eigs);
    }
    if data.alpha.is_empty() {
        return Err(Error::Schema("sweep CSV has no rows".into()));
    }
    Ok(data)
}
