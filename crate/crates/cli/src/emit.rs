//! CSV and JSON output.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::Result;
use crate::spec::SweepSpec;
use crate::sweep::SweepRow;

pub const CSV_COLUMNS: [&str; 14] = [
    "sweep_name",
    "sweep_value",
    "p_t1t2",
    "p_t1t2p",
    "p_t1pt2",
    "p_t1pt2p",
    "p_t1p_x",
    "p_x_t2",
    "p_xx",
    "f",
    "lower_margin",
    "violated",
    "backend",
    "tail",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Writes the fixed columns, header first, even when there are no rows.
pub fn write_csv(rows: &[SweepRow], out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        w.serialize((
            &r.sweep_name,
            r.sweep_value,
            r.p_t1t2,
            r.p_t1t2p,
            r.p_t1pt2,
            r.p_t1pt2p,
            r.p_t1p_x,
            r.p_x_t2,
            r.p_xx,
            r.f,
            r.lower_margin,
            r.violated,
            &r.backend,
            r.tail,
        ))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Meta<'a> {
    spec: Vec<BTreeMap<&'static str, String>>,
    version: &'a str,
    /// Seconds since the Unix epoch; `SOURCE_DATE_EPOCH` overrides the clock.
    timestamp: u64,
}

#[derive(Serialize)]
struct Document<'a> {
    meta: Meta<'a>,
    rows: &'a [SweepRow],
}

fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        })
}

/// Rows plus a header echoing the specs. NaN values become `null`.
pub fn write_json(specs: &[SweepSpec], rows: &[SweepRow], mut out: impl Write) -> Result<()> {
    let doc = Document {
        meta: Meta {
            spec: specs.iter().map(SweepSpec::to_pairs).collect(),
            version: env!("CARGO_PKG_VERSION"),
            timestamp: timestamp(),
        },
        rows,
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn emit(specs: &[SweepSpec], rows: &[SweepRow], format: Format, out: impl Write) -> Result<()> {
    match format {
        Format::Csv => write_csv(rows, out),
        Format::Json => write_json(specs, rows, out),
    }
}
