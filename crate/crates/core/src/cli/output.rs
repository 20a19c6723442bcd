//! Result rows and their CSV encoding.

use std::cmp::Ordering;
use std::io::Write;

use serde::Serialize;

use super::CliError;

pub const CSV_HEADER: [&str; 10] = [
    "engine",
    "metric",
    "T_db",
    "axis_name",
    "axis_value",
    "value",
    "ci_half_width",
    "n_trials",
    "config_hash",
    "seed",
];

/// One value from one engine. Empty optional fields are empty CSV cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub engine: String,
    pub metric: String,
    #[serde(rename = "T_db")]
    pub t_db: Option<f64>,
    pub axis_name: String,
    pub axis_value: Option<f64>,
    pub value: f64,
    pub ci_half_width: Option<f64>,
    pub n_trials: Option<u64>,
    pub config_hash: String,
    pub seed: u64,
}

fn cmp_opt(a: Option<f64>, b: Option<f64>) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some(x), Some(y)) => x.total_cmp(&y),
    }
}

/// Stable order: engine, metric, threshold, then axis value.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        a.engine
            .cmp(&b.engine)
            .then_with(|| a.metric.cmp(&b.metric))
            .then_with(|| cmp_opt(a.t_db, b.t_db))
            .then_with(|| a.axis_name.cmp(&b.axis_name))
            .then_with(|| cmp_opt(a.axis_value, b.axis_value))
    });
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the header and the rows in [`sort_rows`] order.
pub fn write_csv<W: Write>(out: W, rows: &[ResultRow]) -> Result<(), CliError> {
    let mut rows = rows.to_vec();
    sort_rows(&mut rows);
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Pipeline(format!("writing CSV: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in &rows {
        w.write_record([
            r.engine.clone(),
            r.metric.clone(),
            cell(r.t_db),
            r.axis_name.clone(),
            cell(r.axis_value),
            r.value.to_string(),
            cell(r.ci_half_width),
            r.n_trials.map(|n| n.to_string()).unwrap_or_default(),
            r.config_hash.clone(),
            r.seed.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| CliError::Pipeline(format!("writing CSV: {e}")))
}

pub fn csv_string(rows: &[ResultRow]) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("CSV is UTF-8"))
}
