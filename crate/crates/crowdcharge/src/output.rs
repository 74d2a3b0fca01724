//! CSV emission.
//!
//! Floats are written with Rust's shortest-roundtrip formatting, so a file
//! is a pure function of the numbers in it and byte-level comparison of two
//! runs is meaningful.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::engine::{HeadlineRow, RunResult, SummaryRow, METRIC_NAMES};
use crate::error::{Error, Result};
use crate::metrics::MetricsRow;

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One metrics row per iteration, schema pinned by [`MetricsRow`].
pub fn write_run_csv(path: &Path, result: &RunResult) -> Result<()> {
    let mut out = String::new();
    out.push_str(MetricsRow::csv_header());
    out.push('\n');
    for row in &result.rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    write_file(path, &out)
}

/// The run's full contact trace, all iterations concatenated.
pub fn write_contacts_csv(path: &Path, result: &RunResult) -> Result<()> {
    let mut out = String::from("a,b,start,end,location\n");
    for window in &result.contacts {
        for c in window {
            writeln!(
                out,
                "{},{},{},{},{}",
                c.node_a, c.node_b, c.start_minute, c.end_minute, c.location
            )
            .expect("writing to a String cannot fail");
        }
    }
    write_file(path, &out)
}

/// Per-iteration mean and sample standard deviation of every metric.
pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut out = String::from("iteration");
    for name in METRIC_NAMES {
        write!(out, ",{name}_mean,{name}_std").expect("writing to a String cannot fail");
    }
    out.push('\n');
    for row in rows {
        write!(out, "{}", row.iteration).expect("writing to a String cannot fail");
        for k in 0..METRIC_NAMES.len() {
            write!(out, ",{},{}", row.means[k], row.stds[k])
                .expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// The three-protocol capacity-reduction comparison.
pub fn write_headline_csv(path: &Path, rows: &[HeadlineRow]) -> Result<()> {
    let mut out = String::from("protocol,early_capacity_reduction,reduction_vs_balance\n");
    for row in rows {
        writeln!(
            out,
            "{},{},{}",
            row.protocol, row.early_capacity_reduction, row.reduction_vs_balance
        )
        .expect("writing to a String cannot fail");
    }
    write_file(path, &out)
}
