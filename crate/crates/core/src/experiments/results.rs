//! CSV encoding of [`MetricsRow`]s.
//!
//! Reals are written with Rust's shortest round-trip formatting, so reading a
//! file back reproduces the rows exactly. A missing Test 1 time is an empty
//! field.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{ExperimentError, MetricsRow};

pub const CSV_HEADER: [&str; 11] = [
    "protocol",
    "placement",
    "node_count",
    "seed",
    "test1_s",
    "test2_fails",
    "test3_pct",
    "test4_avg_energy",
    "delivered",
    "dropped",
    "avg_hops",
];

fn record(row: &MetricsRow) -> [String; 11] {
    [
        row.protocol.name().to_string(),
        row.placement.name().to_string(),
        row.node_count.to_string(),
        row.seed.to_string(),
        row.test1_first_sink_neighbor_fail_time.map(|t| t.to_string()).unwrap_or_default(),
        row.test2_failed_node_count.to_string(),
        row.test3_active_sink_neighbor_pct.to_string(),
        row.test4_avg_remaining_energy.to_string(),
        row.delivered.to_string(),
        row.dropped.to_string(),
        row.avg_path_hops.to_string(),
    ]
}

/// Writes the header and one line per row.
pub fn write_rows<W: Write>(rows: &[MetricsRow], out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for row in rows {
        w.write_record(record(row)).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(rows: &[MetricsRow], path: &Path) -> Result<(), ExperimentError> {
    if rows.is_empty() {
        return Err(ExperimentError::Format("no rows to write".into()));
    }
    write_rows(rows, File::create(path)?)
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<MetricsRow>, ExperimentError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_error)?;
    if header.iter().ne(CSV_HEADER) {
        return Err(ExperimentError::Format(format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let line = i + 2;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let bad = |k: usize, what: &str| {
            ExperimentError::Format(format!("line {line}, column {}: {what} `{}`", CSV_HEADER[k], field(k)))
        };
        let num = |k: usize| field(k).parse::<f64>().map_err(|_| bad(k, "expected a number, got"));
        let int = |k: usize| field(k).parse::<u64>().map_err(|_| bad(k, "expected an integer, got"));
        rows.push(MetricsRow {
            protocol: field(0).parse().map_err(|_| bad(0, "unknown protocol"))?,
            placement: field(1).parse().map_err(|_| bad(1, "unknown placement"))?,
            node_count: int(2)? as usize,
            seed: int(3)?,
            test1_first_sink_neighbor_fail_time: if field(4).is_empty() { None } else { Some(num(4)?) },
            test2_failed_node_count: int(5)? as usize,
            test3_active_sink_neighbor_pct: num(6)?,
            test4_avg_remaining_energy: num(7)?,
            delivered: int(8)?,
            dropped: int(9)?,
            avg_path_hops: num(10)?,
        });
    }
    Ok(rows)
}

pub fn read_csv(path: &Path) -> Result<Vec<MetricsRow>, ExperimentError> {
    read_rows(File::open(path)?)
}

fn csv_error(e: csv::Error) -> ExperimentError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => ExperimentError::Io(io),
            other => ExperimentError::Format(format!("{other:?}")),
        }
    } else {
        ExperimentError::Format(e.to_string())
    }
}
