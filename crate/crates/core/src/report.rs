//! Comparison records and their JSON, CSV and TSV serializations.
//!
//! CSV columns are fixed: `name, params, lhs, rhs, ratio, notes`. Numbers are
//! written with 17 significant digits; `params` is a `;`-separated list of
//! `key=json-value` pairs in key order. All writes go to a temporary file in
//! the target directory and are renamed into place.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{invalid, Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CSV_COLUMNS: [&str; 6] = ["name", "params", "lhs", "rhs", "ratio", "notes"];

/// One measured quantity against the bound it is compared with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs/rhs`, absent when `rhs ≤ 0`.
    pub ratio: Option<f64>,
    pub notes: String,
}

pub fn ratio_of(lhs: f64, rhs: f64) -> Option<f64> {
    (rhs > 0.0).then(|| lhs / rhs)
}

impl BoundRecord {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        BoundRecord { name: name.into(), params: BTreeMap::new(), lhs, rhs, ratio: ratio_of(lhs, rhs), notes: String::new() }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn note(mut self, text: impl AsRef<str>) -> Self {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(text.as_ref());
        self
    }

    pub fn param_f64(&self, key: &str) -> Option<f64> {
        self.params.get(key).and_then(Value::as_f64)
    }

    /// Whether the stored ratio is exactly `lhs/rhs` recomputed.
    pub fn ratio_consistent(&self) -> bool {
        match (self.ratio, ratio_of(self.lhs, self.rhs)) {
            (None, None) => true,
            (Some(a), Some(b)) => a == b || (a.is_nan() && b.is_nan()),
            _ => false,
        }
    }

    fn params_cell(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={}", serde_json::to_string(v).unwrap_or_default()))
            .collect::<Vec<_>>()
            .join(";")
    }
}

fn cmp_values(a: &Value, b: &Value) -> Ordering {
    match (a.as_f64(), b.as_f64()) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        _ => a.to_string().cmp(&b.to_string()),
    }
}

/// Deterministic order: by name, then parameters key by key (numbers compared
/// numerically).
pub fn record_order(a: &BoundRecord, b: &BoundRecord) -> Ordering {
    a.name.cmp(&b.name).then_with(|| {
        let mut ia = a.params.iter();
        let mut ib = b.params.iter();
        loop {
            match (ia.next(), ib.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ka, va)), Some((kb, vb))) => {
                    let o = ka.cmp(kb).then_with(|| cmp_values(va, vb));
                    if o != Ordering::Equal {
                        return o;
                    }
                }
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub generated_unix: u64,
}

impl Header {
    pub fn now() -> Self {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Header { generated_unix: secs }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub header: Header,
    pub tool_version: String,
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub records: Vec<BoundRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Both,
}

impl Report {
    pub fn new(command: impl Into<String>, params: BTreeMap<String, Value>, mut records: Vec<BoundRecord>) -> Self {
        records.sort_by(record_order);
        Report { header: Header::now(), tool_version: TOOL_VERSION.to_string(), command: command.into(), params, records }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Invalid(format!("json: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("json: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Records whose ratio does not match `lhs/rhs`.
    pub fn inconsistent_records(&self) -> Vec<&BoundRecord> {
        self.records.iter().filter(|r| !r.ratio_consistent()).collect()
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        write_atomic(path, text.as_bytes())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, &csv_bytes(&self.records)?)
    }

    /// Writes `<stem>.json` and/or `<stem>.csv` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str, format: Format) -> Result<Vec<std::path::PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        if matches!(format, Format::Json | Format::Both) {
            let p = dir.join(format!("{stem}.json"));
            self.write_json(&p)?;
            out.push(p);
        }
        if matches!(format, Format::Csv | Format::Both) {
            let p = dir.join(format!("{stem}.csv"));
            self.write_csv(&p)?;
            out.push(p);
        }
        Ok(out)
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_bytes(records: &[BoundRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Invalid(format!("csv: {e}"));
    w.write_record(CSV_COLUMNS).map_err(err)?;
    for r in records {
        w.write_record([
            r.name.clone(),
            r.params_cell(),
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            r.ratio.map(fmt_f64).unwrap_or_default(),
            r.notes.clone(),
        ])
        .map_err(err)?;
    }
    w.into_inner().map_err(|e| Error::Invalid(format!("csv: {e}")))
}

/// Parse a CSV written by [`csv_bytes`].
pub fn read_csv(text: &str) -> Result<Vec<BoundRecord>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let err = |e: csv::Error| Error::Invalid(format!("csv: {e}"));
    let headers = rd.headers().map_err(err)?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_COLUMNS {
        return invalid(format!("unexpected csv columns {headers:?}"));
    }
    let num = |s: &str| -> Result<f64> { s.parse::<f64>().map_err(|e| Error::Invalid(format!("bad number {s:?}: {e}"))) };
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(err)?;
        let mut params = BTreeMap::new();
        if !row[1].is_empty() {
            for kv in row[1].split(';') {
                let (k, v) = kv.split_once('=').ok_or_else(|| Error::Invalid(format!("bad param {kv:?}")))?;
                let v: Value = serde_json::from_str(v).map_err(|e| Error::Invalid(format!("bad param value {v:?}: {e}")))?;
                params.insert(k.to_string(), v);
            }
        }
        out.push(BoundRecord {
            name: row[0].to_string(),
            params,
            lhs: num(&row[2])?,
            rhs: num(&row[3])?,
            ratio: if row[4].is_empty() { None } else { Some(num(&row[4])?) },
            notes: row[5].to_string(),
        });
    }
    Ok(out)
}

/// Two-column `x\ty` table for plotting.
pub fn write_tsv(path: &Path, rows: &[(f64, f64)]) -> Result<()> {
    let mut s = String::from("x\ty\n");
    for (x, y) in rows {
        s.push_str(&format!("{}\t{}\n", fmt_f64(*x), fmt_f64(*y)));
    }
    write_atomic(path, s.as_bytes())
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::from(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<BoundRecord> {
        vec![
            BoundRecord::new("b", 1.0 / 3.0, 0.7).param("n", 10),
            BoundRecord::new("b", 0.1, 0.0).param("n", 4).note("degenerate"),
            BoundRecord::new("a", std::f64::consts::PI, 2.0).param("delta", 0.125).param("tag", "x,y"),
        ]
    }

    #[test]
    fn ordering_is_numeric() {
        let r = Report::new("t", BTreeMap::new(), sample());
        let names: Vec<_> = r.records.iter().map(|r| (r.name.clone(), r.param_f64("n"))).collect();
        assert_eq!(names, vec![("a".into(), None), ("b".into(), Some(4.0)), ("b".into(), Some(10.0))]);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let recs = sample();
        let bytes = csv_bytes(&recs).unwrap();
        let back = read_csv(std::str::from_utf8(&bytes).unwrap()).unwrap();
        assert_eq!(back, recs);
        assert!(back.iter().all(|r| r.ratio_consistent()));
    }

    #[test]
    fn json_round_trip_and_files() {
        let dir = tempfile::tempdir().unwrap();
        let r = Report::new("t", BTreeMap::from([("seed".to_string(), Value::from(0))]), sample());
        let files = r.write(dir.path(), "out", Format::Both).unwrap();
        assert_eq!(files.len(), 2);
        let back = Report::load(&files[0]).unwrap();
        assert_eq!(back, r);
        assert!(back.inconsistent_records().is_empty());
        write_tsv(&dir.path().join("p.tsv"), &[(1.0, 0.5)]).unwrap();
        let t = fs::read_to_string(dir.path().join("p.tsv")).unwrap();
        assert!(t.starts_with("x\ty\n1.0000000000000000e0\t"));
    }
}
