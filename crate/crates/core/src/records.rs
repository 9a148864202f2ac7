//! Line-delimited JSON records of codes and their verified properties.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infoset::{codewords_up_to_weight, min_weight};
use crate::negacirculant::NegaPair;

/// Where a record came from. The serialized names are fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    /// The curated list of length-40 codes.
    #[serde(rename = "table1")]
    Length40List,
    /// A code known from earlier literature, kept as a reference point.
    #[serde(rename = "table2-ref")]
    Reference,
    /// The length-68 code of minimum weight 15.
    #[serde(rename = "sec4.6")]
    Length68,
    #[serde(rename = "search")]
    Search,
    /// Imported from a published plain-text list.
    #[serde(rename = "external-url")]
    ExternalList,
}

/// Field order here is the serialized key order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeRecord {
    pub n: usize,
    pub ra: Vec<u8>,
    pub rb: Vec<u8>,
    pub self_dual: bool,
    pub min_weight: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_weight_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_id: Option<usize>,
    pub source: Source,
}

impl CodeRecord {
    /// Computes the properties of `pair`; the minimum-weight count only when
    /// `with_count` is set.
    pub fn from_pair(pair: &NegaPair, source: Source, with_count: bool) -> CodeRecord {
        let c = pair.code();
        let d = min_weight(&c);
        CodeRecord {
            n: pair.length(),
            ra: pair.ra.to_trits(),
            rb: pair.rb.to_trits(),
            self_dual: pair.is_self_dual(),
            min_weight: d,
            min_weight_count: with_count.then(|| 2 * codewords_up_to_weight(&c, d).len() as u64),
            class_id: None,
            source,
        }
    }

    pub fn pair(&self) -> Result<NegaPair> {
        let p = NegaPair::from_trits(&self.ra, &self.rb)?;
        if p.length() != self.n {
            return Err(Error::Dimension { expected: self.n, found: p.length() });
        }
        Ok(p)
    }

    /// Recomputes every recorded property; `Some(description)` on the first
    /// disagreement.
    pub fn check(&self) -> Result<Option<String>> {
        let p = self.pair()?;
        if p.is_self_dual() != self.self_dual {
            return Ok(Some(format!("self_dual is {}, recorded {}", p.is_self_dual(), self.self_dual)));
        }
        let c = p.code();
        let d = min_weight(&c);
        if d != self.min_weight {
            return Ok(Some(format!("min_weight is {d}, recorded {}", self.min_weight)));
        }
        if let Some(count) = self.min_weight_count {
            let actual = 2 * codewords_up_to_weight(&c, d).len() as u64;
            if actual != count {
                return Ok(Some(format!("min_weight_count is {actual}, recorded {count}")));
            }
        }
        Ok(None)
    }
}

/// Reads one record per nonblank line.
pub fn read_records(reader: impl BufRead) -> Result<Vec<CodeRecord>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_records(mut writer: impl Write, records: &[CodeRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut writer, r)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Parses plain rows: each nonblank line not starting with `#` holds the
/// trits of `r_A` followed by those of `r_B`, in any mix of separators
/// (spaces, commas, brackets, or none). Other characters on a line, such
/// as a leading index followed by `:` or `)`, are rejected unless they
/// are separators.
pub fn import_plain_rows(text: &str) -> Result<Vec<NegaPair>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse { line: i + 1, message };
        let mut trits = Vec::new();
        for ch in line.chars() {
            match ch {
                '0'..='2' => trits.push(ch as u8 - b'0'),
                ' ' | '\t' | ',' | ';' | '(' | ')' | '[' | ']' => {}
                other => return Err(err(format!("unexpected character {other:?}"))),
            }
        }
        if trits.is_empty() || trits.len() % 2 != 0 {
            return Err(err(format!("{} trits cannot be split into two equal rows", trits.len())));
        }
        let (a, b) = trits.split_at(trits.len() / 2);
        out.push(NegaPair::from_trits(a, b).map_err(|e| err(e.to_string()))?);
    }
    Ok(out)
}
