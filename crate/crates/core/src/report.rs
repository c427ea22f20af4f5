//! CSV export, figure series and JSON config loading.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::experiments::{derive_case_v, CaseId, ExperimentError, ResultRow, ResultTable};
use crate::sim::{Policy, SimConfig, SimError};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    InvalidConfig(#[from] SimError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("no results for case {0}")]
    MissingCase(CaseId),
    #[error("unknown figure {0} (expected 1 to 6)")]
    UnknownFigure(u8),
}

/// Result-table columns, in file order.
pub const CSV_HEADER: [&str; 15] = [
    "case_id",
    "algorithm",
    "sweep_value",
    "seed",
    "epoch_window",
    "offered_self",
    "offered_nbr",
    "forwarded_self",
    "forwarded_nbr",
    "dropped_self",
    "dropped_nbr",
    "drop_ratio",
    "malicious_fraction",
    "throughput",
    "utilization",
];

/// One line of a result CSV, as read back from disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub case_id: String,
    pub algorithm: Policy,
    pub sweep_value: u32,
    pub seed: u64,
    pub epoch_window: u64,
    pub offered_self: u64,
    pub offered_nbr: u64,
    pub forwarded_self: u64,
    pub forwarded_nbr: u64,
    pub dropped_self: u64,
    pub dropped_nbr: u64,
    pub drop_ratio: f64,
    pub malicious_fraction: f64,
    pub throughput: f64,
    pub utilization: f64,
}

/// Fixed six-decimal rendering used for every float column.
pub fn format_float(x: f64) -> String {
    format!("{x:.6}")
}

fn record(row: &ResultRow) -> [String; 15] {
    [
        row.case_id.clone(),
        row.algorithm.to_string(),
        row.sweep_value.to_string(),
        row.seed.to_string(),
        row.epoch_window.to_string(),
        row.own.offered.to_string(),
        row.neighbor.offered.to_string(),
        row.own.forwarded.to_string(),
        row.neighbor.forwarded.to_string(),
        row.own.dropped.to_string(),
        row.neighbor.dropped.to_string(),
        format_float(row.drop_ratio),
        format_float(row.malicious_fraction),
        format_float(row.throughput),
        format_float(row.utilization),
    ]
}

fn csv_writer<W: Write>(writer: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer)
}

/// Writes `table` with a header line; returns the number of bytes written.
pub fn emit_csv<W: Write>(table: &ResultTable, writer: W) -> Result<usize, ReportError> {
    let mut out = csv_writer(CountingWriter {
        inner: writer,
        bytes: 0,
    });
    out.write_record(CSV_HEADER)?;
    for row in &table.rows {
        out.write_record(record(row))?;
    }
    out.flush()?;
    let counting = out.into_inner().map_err(|e| e.into_error())?;
    Ok(counting.bytes)
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<CsvRow>, ReportError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(CSV_HEADER) {
        return Err(ReportError::Csv(csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!(
                "unexpected header: {}",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ))));
    }
    rdr.deserialize()
        .map(|r| r.map_err(ReportError::from))
        .collect()
}

struct CountingWriter<W> {
    inner: W,
    bytes: usize,
}

impl<W: Write> Write for CountingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.bytes += n;
        Ok(n)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

/// Points of one algorithm in one figure.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub algorithm: Policy,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSeries {
    pub figure: u8,
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub series: Vec<Series>,
}

/// Builds one figure from the case tables.
///
/// Figures 1 to 4 plot the seed-averaged drop ratio of Cases I to IV against
/// the sweep value. Figure 5 plots the raw mean malicious fraction per drop
/// bucket, pooled over all given tables, at the buckets both algorithms
/// reach; figure 6 is the same after isotonic smoothing.
pub fn figure_series(tables: &[ResultTable], figure: u8) -> Result<FigureSeries, ReportError> {
    match figure {
        1..=4 => {
            let case = CaseId::ALL[figure as usize - 1];
            let table = tables
                .iter()
                .find(|t| t.rows.first().is_some_and(|r| r.case_id == case.as_str()))
                .ok_or(ReportError::MissingCase(case))?;
            let algorithms: Vec<Policy> = table
                .rows
                .iter()
                .map(|r| r.algorithm)
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            let series = algorithms
                .into_iter()
                .map(|algorithm| Series {
                    algorithm,
                    points: table
                        .mean_by_sweep(algorithm, |r| r.drop_ratio)
                        .into_iter()
                        .map(|(x, y)| (x as f64, y))
                        .collect(),
                })
                .collect();
            Ok(FigureSeries {
                figure,
                x_label: "neighbor_packets_per_window",
                y_label: "drop_ratio",
                series,
            })
        }
        5 | 6 => {
            let curves = derive_case_v(tables)?;
            let shared = curves.shared_buckets();
            let series = curves
                .curves
                .keys()
                .map(|&algorithm| {
                    let curve = if figure == 5 {
                        curves.curve(algorithm).to_vec()
                    } else {
                        curves.smoothed(algorithm)
                    };
                    let points = curve
                        .iter()
                        .filter(|b| shared.contains(&b.lower_pct))
                        .map(|b| (b.lower_pct as f64, b.mean_malicious))
                        .collect();
                    Series { algorithm, points }
                })
                .collect();
            Ok(FigureSeries {
                figure,
                x_label: "drop_bucket_pct",
                y_label: "malicious_fraction",
                series,
            })
        }
        other => Err(ReportError::UnknownFigure(other)),
    }
}

/// Writes a figure as `figure,algorithm,x,y` rows.
pub fn emit_figure_csv<W: Write>(fig: &FigureSeries, writer: W) -> Result<(), ReportError> {
    let mut out = csv_writer(writer);
    out.write_record(["figure", "algorithm", fig.x_label, fig.y_label])?;
    for s in &fig.series {
        for &(x, y) in &s.points {
            out.write_record([
                fig.figure.to_string(),
                s.algorithm.to_string(),
                format_float(x),
                format_float(y),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Parses and validates a JSON simulation config. Unknown keys are rejected.
pub fn parse_config(json: &str) -> Result<SimConfig, ReportError> {
    let config: SimConfig = serde_json::from_str(json)?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<SimConfig, ReportError> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Seed-averaged metric per sweep value, keyed by algorithm.
pub fn sweep_means(
    table: &ResultTable,
    metric: impl Fn(&ResultRow) -> f64 + Copy,
) -> BTreeMap<Policy, Vec<(u32, f64)>> {
    [Policy::Ctc, Policy::Dsr]
        .into_iter()
        .map(|a| (a, table.mean_by_sweep(a, metric)))
        .filter(|(_, v)| !v.is_empty())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::ClassTally;

    fn row(case_id: &str, algorithm: Policy, sweep_value: u32, seed: u64, drop: f64) -> ResultRow {
        ResultRow {
            case_id: case_id.into(),
            algorithm,
            sweep_value,
            seed,
            epoch_window: 10,
            own: ClassTally {
                offered: 3,
                forwarded: 2,
                dropped: 1,
            },
            neighbor: ClassTally {
                offered: 0,
                forwarded: 0,
                dropped: 0,
            },
            drop_ratio: drop,
            malicious_fraction: 0.0,
            throughput: 2.0,
            utilization: f64::NAN,
        }
    }

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(1.0 / 3.0), "0.333333");
        assert_eq!(format_float(0.0), "0.000000");
        assert_eq!(format_float(0.5), "0.500000");
    }

    #[test]
    fn csv_layout() {
        let table = ResultTable::new(vec![row("I", Policy::Ctc, 100, 1, 1.0 / 3.0)]);
        let mut buf = Vec::new();
        let n = emit_csv(&table, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(n, text.len());
        let lines: Vec<&str> = text.split_terminator('\n').collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(
            lines[1],
            "I,ctc,100,1,10,3,0,2,0,1,0,0.333333,0.000000,2.000000,NaN"
        );
        assert!(!text.contains('\r'));
    }

    #[test]
    fn csv_round_trip() {
        let table = ResultTable::new(vec![
            row("II", Policy::Dsr, 200, 3, 0.25),
            row("II", Policy::Ctc, 200, 3, 0.125),
        ]);
        let mut buf = Vec::new();
        emit_csv(&table, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].algorithm, Policy::Ctc);
        assert_eq!(back[0].drop_ratio, 0.125);
        assert!(back[1].utilization.is_nan());
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn figure_means_over_seeds() {
        let table = ResultTable::new(vec![
            row("III", Policy::Ctc, 100, 1, 0.1),
            row("III", Policy::Ctc, 100, 2, 0.3),
            row("III", Policy::Dsr, 100, 1, 0.5),
        ]);
        let fig = figure_series(std::slice::from_ref(&table), 3).unwrap();
        assert_eq!(fig.series[0].algorithm, Policy::Ctc);
        assert_eq!(fig.series[0].points.len(), 1);
        assert!((fig.series[0].points[0].1 - 0.2).abs() < 1e-12);
        assert_eq!(fig.series[1].points, vec![(100.0, 0.5)]);

        assert!(matches!(
            figure_series(std::slice::from_ref(&table), 1),
            Err(ReportError::MissingCase(CaseId::I))
        ));
        assert!(matches!(
            figure_series(&[table], 7),
            Err(ReportError::UnknownFigure(7))
        ));
    }

    #[test]
    fn config_parsing() {
        let config =
            parse_config(r#"{"epochs": 5, "policy": "dsr", "neighbor_rate_fn": "increasing:1:2"}"#)
                .unwrap();
        assert_eq!(config.epochs, 5);
        assert_eq!(config.policy, Policy::Dsr);
        assert!(matches!(
            parse_config(r#"{"epoch": 5}"#),
            Err(ReportError::Json(_))
        ));
        assert!(matches!(
            parse_config(r#"{"base_drop_prob": 1.5}"#),
            Err(ReportError::InvalidConfig(_))
        ));
    }
}
