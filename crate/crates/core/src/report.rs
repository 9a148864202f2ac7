//! Per-length run summaries and the table rendered from them.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::search::ClassificationResult;

/// Lengths covered by the summary table.
pub const REPORT_LENGTHS: [usize; 10] = [32, 36, 40, 44, 48, 52, 56, 60, 64, 68];

/// Published class counts, in the order of [`REPORT_LENGTHS`].
pub const PUBLISHED: [&str; 10] = ["53", "1", "116", "1518", "2", "2", ">= 3001", "3", ">= 1", "?"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub n: usize,
    pub class_count: usize,
    pub survivor_count: usize,
    /// Only some leading patterns of `r_A` were searched.
    pub restricted: bool,
    /// The search covered its whole candidate range.
    pub complete: bool,
}

impl RunSummary {
    pub fn from_result(r: &ClassificationResult, complete: bool) -> Self {
        RunSummary {
            n: r.n,
            class_count: r.class_count,
            survivor_count: r.survivor_count,
            restricted: r.prefix_filter.is_some(),
            complete,
        }
    }

    pub fn file_name(n: usize) -> String {
        format!("{n}.summary.json")
    }

    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(Self::file_name(self.n));
        fs::write(&path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(path)
    }

    fn cell(&self) -> (String, &'static str) {
        match (self.complete, self.restricted) {
            (true, false) => (self.class_count.to_string(), "computed"),
            (true, true) => (format!(">= {}", self.class_count), "restricted"),
            (false, _) => (format!(">= {}", self.class_count), "partial"),
        }
    }
}

/// Reads every `*.summary.json` in `dir`; a missing directory is empty.
pub fn load_summaries(dir: &Path) -> Result<Vec<RunSummary>> {
    let mut out = Vec::new();
    if !dir.exists() {
        return Ok(out);
    }
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(".summary.json")) {
            out.push(serde_json::from_slice(&fs::read(&path)?)?);
        }
    }
    out.sort_by_key(|s: &RunSummary| s.n);
    Ok(out)
}

/// Table of class counts per length next to the published values.
pub fn render_report(summaries: &[RunSummary]) -> String {
    let mut out = String::new();
    writeln!(out, "{:>4} | {:>10} | {:>10} | status", "n", "N(n)", "published").unwrap();
    writeln!(out, "{:-<5}+{:-<12}+{:-<12}+{:-<13}", "", "", "", "").unwrap();
    for (n, published) in REPORT_LENGTHS.iter().zip(PUBLISHED) {
        let (value, status) = summaries
            .iter()
            .find(|s| s.n == *n)
            .map_or(("-".to_string(), "not computed"), RunSummary::cell);
        writeln!(out, "{n:>4} | {value:>10} | {published:>10} | {status}").unwrap();
    }
    out
}
