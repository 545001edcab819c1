//! CSV and JSON formats shared by the command-line tool and the plotting scripts.
//!
//! A walk is stored as `<stem>.csv` (`n,W_n,x_1..x_M`, one row per length) plus
//! `<stem>.json` (everything else). The CSV depends only on the presentation
//! and the parameters, so reruns produce identical bytes.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimator::{CogrowthEstimate, GammaEstimate};
use crate::oracle::{ExactTable, ExactValue, SequenceKind};
use crate::presentation::{parse_presentation, Presentation};
use crate::series::{RFunctionTable, RValue};
use crate::walker::{ProposalStats, WalkParams, WalkRecord};
use crate::words::Word;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> IoError + '_ {
    move |source| IoError::Csv { path: path.to_path_buf(), source }
}

fn format_err(path: &Path, msg: impl Into<String>) -> IoError {
    IoError::Format {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

fn writer(path: &Path) -> Result<csv::Writer<File>, IoError> {
    csv::Writer::from_path(path).map_err(csv_err(path))
}

fn reader(path: &Path) -> Result<csv::Reader<File>, IoError> {
    csv::Reader::from_path(path).map_err(csv_err(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut f = File::create(path).map_err(io_err(path))?;
    serde_json::to_writer_pretty(&mut f, value).map_err(|source| IoError::Json { path: path.to_path_buf(), source })?;
    f.write_all(b"\n").map_err(io_err(path))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let mut text = String::new();
    File::open(path).map_err(io_err(path))?.read_to_string(&mut text).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| IoError::Json { path: path.to_path_buf(), source })
}

/// SHA-256 of a file's bytes, hex encoded.
pub fn file_digest(path: &Path) -> Result<String, IoError> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    Ok(crate::presentation::sha256_hex(&bytes))
}

/// Everything about a walk except its histograms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkSidecar {
    pub params: WalkParams,
    pub presentation: String,
    pub digest: String,
    pub parity_even: bool,
    pub relator_acceptance: Vec<u64>,
    pub stats: ProposalStats,
    pub steps_taken: u64,
    pub final_word: String,
    pub trace: Vec<f64>,
    pub runtime_secs: f64,
}

/// Paths `(csv, json)` for a walk stem.
pub fn walk_paths(dir: &Path, stem: &str) -> (PathBuf, PathBuf) {
    (dir.join(format!("{stem}.csv")), dir.join(format!("{stem}.json")))
}

pub fn write_walk_csv(path: &Path, rec: &WalkRecord) -> Result<(), IoError> {
    let mut w = writer(path)?;
    let mut header = vec!["n".to_string(), "W_n".to_string()];
    header.extend((1..=rec.segments()).map(|i| format!("x_{i}")));
    w.write_record(&header).map_err(csv_err(path))?;
    for (n, total) in rec.histogram().iter().enumerate() {
        let mut row = vec![n.to_string(), total.to_string()];
        row.extend(rec.segment_histograms.iter().map(|s| s[n].to_string()));
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_walk(dir: &Path, stem: &str, rec: &WalkRecord, presentation: &Presentation) -> Result<(PathBuf, PathBuf), IoError> {
    let (csv_path, json_path) = walk_paths(dir, stem);
    write_walk_csv(&csv_path, rec)?;
    let sidecar = WalkSidecar {
        params: rec.params.clone(),
        presentation: rec.presentation.clone(),
        digest: rec.digest.clone(),
        parity_even: rec.parity_even,
        relator_acceptance: rec.relator_acceptance.clone(),
        stats: rec.stats.clone(),
        steps_taken: rec.steps_taken,
        final_word: rec.final_word.render(presentation.alphabet().names()),
        trace: rec.trace.clone(),
        runtime_secs: rec.runtime_secs,
    };
    write_json(&json_path, &sidecar)?;
    Ok((csv_path, json_path))
}

/// Reads `<stem>.csv` and its `<stem>.json` sidecar.
pub fn read_walk(csv_path: &Path) -> Result<WalkRecord, IoError> {
    let json_path = csv_path.with_extension("json");
    let sidecar: WalkSidecar = read_json(&json_path)?;
    let presentation = parse_presentation(&sidecar.presentation).map_err(|e| format_err(&json_path, e.to_string()))?;
    let final_word: Word = presentation
        .alphabet()
        .parse_word(&sidecar.final_word)
        .map_err(|e| format_err(&json_path, e.to_string()))?
        .into_iter()
        .collect();

    let mut r = reader(csv_path)?;
    let header = r.headers().map_err(csv_err(csv_path))?.clone();
    if header.len() < 4 || &header[0] != "n" || &header[1] != "W_n" {
        return Err(format_err(csv_path, "expected columns n,W_n,x_1..x_M with M >= 2"));
    }
    let segments = header.len() - 2;
    let mut hist = vec![Vec::new(); segments];
    for (row_index, row) in r.records().enumerate() {
        let row = row.map_err(csv_err(csv_path))?;
        let parse = |i: usize| -> Result<u64, IoError> {
            row.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| format_err(csv_path, format!("row {}: column {} is not a count", row_index + 1, i + 1)))
        };
        if parse(0)? != row_index as u64 {
            return Err(format_err(csv_path, format!("row {} is out of order", row_index + 1)));
        }
        let mut sum = 0;
        for (i, h) in hist.iter_mut().enumerate() {
            let x = parse(i + 2)?;
            sum += x;
            h.push(x);
        }
        if sum != parse(1)? {
            return Err(format_err(csv_path, format!("row {}: W_n is not the sum of the segments", row_index + 1)));
        }
    }
    Ok(WalkRecord {
        params: sidecar.params,
        presentation: sidecar.presentation,
        digest: sidecar.digest,
        parity_even: sidecar.parity_even,
        segment_histograms: hist,
        relator_acceptance: sidecar.relator_acceptance,
        stats: sidecar.stats,
        steps_taken: sidecar.steps_taken,
        final_word,
        trace: sidecar.trace,
        runtime_secs: sidecar.runtime_secs,
    })
}

/// Scientific notation with six significant digits.
fn sci(x: f64) -> String {
    format!("{x:.5e}")
}

pub fn write_estimates_csv(path: &Path, estimates: &[CogrowthEstimate]) -> Result<(), IoError> {
    let mut w = writer(path)?;
    w.write_record(["n", "log_c_n", "c_n", "rel_error", "gamma_n", "gamma_err", "n_candidates"])
        .map_err(csv_err(path))?;
    for e in estimates {
        let (gamma, gamma_err) = if e.n == 0 {
            (String::new(), String::new())
        } else {
            let g = (e.log_value / e.n as f64).exp();
            (g.to_string(), (g * e.rel_error / e.n as f64).to_string())
        };
        w.write_record([
            e.n.to_string(),
            e.log_value.to_string(),
            sci(e.value()),
            e.rel_error.to_string(),
            gamma,
            gamma_err,
            e.n_candidates.to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

#[derive(Debug, Deserialize)]
struct EstimateRow {
    n: usize,
    log_c_n: f64,
    rel_error: f64,
    n_candidates: usize,
}

pub fn read_estimates_csv(path: &Path) -> Result<Vec<CogrowthEstimate>, IoError> {
    reader(path)?
        .deserialize::<EstimateRow>()
        .map(|row| {
            let row = row.map_err(csv_err(path))?;
            Ok(CogrowthEstimate {
                n: row.n,
                log_value: row.log_c_n,
                rel_error: row.rel_error,
                provenance: Vec::new(),
                n_candidates: row.n_candidates,
            })
        })
        .collect()
}

pub fn write_gamma_csv(path: &Path, gammas: &[GammaEstimate]) -> Result<(), IoError> {
    let mut w = writer(path)?;
    w.write_record(["n", "gamma_n", "gamma_err", "lower", "upper"]).map_err(csv_err(path))?;
    for g in gammas {
        w.write_record([
            g.n.to_string(),
            g.gamma.to_string(),
            g.gamma_error.to_string(),
            g.lower.to_string(),
            g.upper.to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// A coefficient file: `n,value` with exact integers or fractions, or
/// `n,log_value` with natural logs.
#[derive(Clone, Debug, PartialEq)]
pub enum CoefficientFile {
    Exact(Vec<BigRational>),
    Log(Vec<f64>),
}

pub fn write_exact_coefficients(path: &Path, coeffs: &[BigRational]) -> Result<(), IoError> {
    let mut w = writer(path)?;
    w.write_record(["n", "value"]).map_err(csv_err(path))?;
    for (n, c) in coeffs.iter().enumerate() {
        w.write_record([n.to_string(), c.to_string()]).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_log_coefficients(path: &Path, logs: &[f64]) -> Result<(), IoError> {
    let mut w = writer(path)?;
    w.write_record(["n", "log_value"]).map_err(csv_err(path))?;
    for (n, c) in logs.iter().enumerate() {
        w.write_record([n.to_string(), c.to_string()]).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Reads a coefficient file. Rows must cover `n = 0, 1, 2, …` in order.
pub fn read_coefficients(path: &Path) -> Result<CoefficientFile, IoError> {
    let mut r = reader(path)?;
    let header = r.headers().map_err(csv_err(path))?.clone();
    let log = match (header.get(0), header.get(1)) {
        (Some("n"), Some("value")) => false,
        (Some("n"), Some("log_value")) => true,
        _ => return Err(format_err(path, "expected header 'n,value' or 'n,log_value'")),
    };
    let mut exact = Vec::new();
    let mut logs = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row.map_err(csv_err(path))?;
        let n: usize = row[0]
            .trim()
            .parse()
            .map_err(|_| format_err(path, format!("row {}: bad index '{}'", i + 1, &row[0])))?;
        if n != i {
            return Err(format_err(path, format!("row {}: expected n = {i}, found {n}", i + 1)));
        }
        let v = row[1].trim();
        if log {
            logs.push(v.parse().map_err(|_| format_err(path, format!("row {}: bad log value '{v}'", i + 1)))?);
        } else {
            exact.push(parse_rational(v).ok_or_else(|| format_err(path, format!("row {}: '{v}' is not an integer or fraction", i + 1)))?);
        }
    }
    Ok(if log { CoefficientFile::Log(logs) } else { CoefficientFile::Exact(exact) })
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            (b != BigInt::from(0)).then(|| BigRational::new(a, b))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Known coefficients for the estimator, from a coefficient file. Zero entries are skipped.
pub fn read_anchors(path: &Path) -> Result<Vec<CogrowthEstimate>, IoError> {
    let anchors = match read_coefficients(path)? {
        CoefficientFile::Exact(v) => v
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > BigRational::from_integer(0.into()))
            .map(|(n, c)| {
                let x = num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::INFINITY);
                CogrowthEstimate::exact(n, x)
            })
            .collect(),
        CoefficientFile::Log(v) => v
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_finite())
            .map(|(n, &l)| CogrowthEstimate {
                log_value: l,
                ..CogrowthEstimate::exact(n, 1.0)
            })
            .collect(),
    };
    Ok(anchors)
}

pub fn write_exact_table(path: &Path, table: &ExactTable) -> Result<(), IoError> {
    let mut w = writer(path)?;
    w.write_record(["n", "value", "kind", "group", "source"]).map_err(csv_err(path))?;
    for (n, v) in &table.values {
        w.write_record([
            n.to_string(),
            v.to_string(),
            table.kind.symbol().to_string(),
            table.group.clone(),
            table.source.clone(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_exact_table(path: &Path) -> Result<ExactTable, IoError> {
    let mut r = reader(path)?;
    let mut values = std::collections::BTreeMap::new();
    let mut meta: Option<(SequenceKind, String, String)> = None;
    for row in r.records() {
        let row = row.map_err(csv_err(path))?;
        if row.len() != 5 {
            return Err(format_err(path, "expected columns n,value,kind,group,source"));
        }
        let n: usize = row[0].parse().map_err(|_| format_err(path, format!("bad index '{}'", &row[0])))?;
        let value = match row[1].split_once('e') {
            Some((mantissa, exponent)) => ExactValue::Rounded {
                mantissa: mantissa.to_string(),
                exponent: exponent.parse().map_err(|_| format_err(path, format!("bad value '{}'", &row[1])))?,
            },
            None => ExactValue::Exact(row[1].parse().map_err(|_| format_err(path, format!("bad value '{}'", &row[1])))?),
        };
        values.insert(n, value);
        let kind = row[2].parse().map_err(|e: String| format_err(path, e))?;
        meta.get_or_insert((kind, row[3].to_string(), row[4].to_string()));
    }
    let (kind, group, source) = meta.ok_or_else(|| format_err(path, "empty table"))?;
    Ok(ExactTable {
        group,
        kind,
        horizon: values.keys().next_back().copied().unwrap_or(0),
        values,
        source,
    })
}

pub fn write_r_table(path: &Path, table: &RFunctionTable) -> Result<(), IoError> {
    let mut w = writer(path)?;
    w.write_record(["n", "k"]).map_err(csv_err(path))?;
    for (n, v) in &table.values {
        let k = match v {
            RValue::K(k) => k.to_string(),
            RValue::BeyondHorizon => "beyond-horizon".to_string(),
        };
        w.write_record([n.to_string(), k]).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// `n, ln c_n, ln(c_n (n+1)^(1+α) β^n)`.
pub fn write_model_csv(path: &Path, log_c: &[f64], curve: &[f64]) -> Result<(), IoError> {
    let mut w = writer(path)?;
    w.write_record(["n", "log_c_n", "log_weight"]).map_err(csv_err(path))?;
    for (n, (c, y)) in log_c.iter().zip(curve).enumerate() {
        w.write_record([n.to_string(), c.to_string(), y.to_string()]).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::gamma_series;
    use crate::oracle::published_f_table;
    use crate::presentation::Preset;
    use crate::walker::run_walk;

    #[test]
    fn walk_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let p = Preset::Braid3.presentation().unwrap();
        let params = WalkParams {
            segments: 4,
            ..WalkParams::new(1.0, 0.3, 8_000, 2)
        };
        let rec = run_walk(&p, &params).unwrap();
        let (csv_path, _) = write_walk(dir.path(), "braid", &rec, &p).unwrap();
        let back = read_walk(&csv_path).unwrap();
        assert_eq!(back, rec);
        let first = std::fs::read(&csv_path).unwrap();
        write_walk_csv(&csv_path, &run_walk(&p, &params).unwrap()).unwrap();
        assert_eq!(std::fs::read(&csv_path).unwrap(), first);
    }

    #[test]
    fn walk_csv_is_validated() {
        let dir = tempfile::tempdir().unwrap();
        let p = Preset::FreeAbelian(2).presentation().unwrap();
        let rec = run_walk(&p, &WalkParams::new(0.0, 0.2, 1_000, 2)).unwrap();
        let (csv_path, _) = write_walk(dir.path(), "z2", &rec, &p).unwrap();
        let text = std::fs::read_to_string(&csv_path).unwrap();
        let broken = text.replacen("\n0,", "\n0,1", 1);
        std::fs::write(&csv_path, broken).unwrap();
        assert!(matches!(read_walk(&csv_path), Err(IoError::Format { .. })));
    }

    #[test]
    fn estimates_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("est.csv");
        let ests = vec![
            CogrowthEstimate::exact(0, 1.0),
            CogrowthEstimate {
                rel_error: 0.01,
                n_candidates: 3,
                ..CogrowthEstimate::exact(10, 19.9988)
            },
        ];
        write_estimates_csv(&path, &ests).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("n,log_c_n,c_n,rel_error,gamma_n,gamma_err,n_candidates\n"));
        assert!(text.contains(",1.99988e1,"), "{text}");
        let back = read_estimates_csv(&path).unwrap();
        assert_eq!(back, ests);
        let gpath = dir.path().join("gamma.csv");
        write_gamma_csv(&gpath, &gamma_series(&ests)).unwrap();
        assert_eq!(std::fs::read_to_string(&gpath).unwrap().lines().count(), 2);
    }

    #[test]
    fn coefficients_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let coeffs: Vec<BigRational> = vec![
            BigRational::from_integer(1.into()),
            BigRational::new((-3).into(), 7.into()),
            BigRational::from_integer("123456789012345678901234567890".parse().unwrap()),
        ];
        write_exact_coefficients(&path, &coeffs).unwrap();
        assert_eq!(read_coefficients(&path).unwrap(), CoefficientFile::Exact(coeffs));
        write_log_coefficients(&path, &[0.0, -1.5]).unwrap();
        assert_eq!(read_coefficients(&path).unwrap(), CoefficientFile::Log(vec![0.0, -1.5]));
        std::fs::write(&path, "n,value\n0,1\n2,5\n").unwrap();
        assert!(read_coefficients(&path).is_err());
        std::fs::write(&path, "n,value\n0,1\n1,0\n2,20\n").unwrap();
        let anchors = read_anchors(&path).unwrap();
        assert_eq!(anchors.iter().map(|a| a.n).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn exact_table_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let t = published_f_table();
        write_exact_table(&path, &t).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\n48,1.3920e14,c,thompson-f,published\n"));
        assert_eq!(read_exact_table(&path).unwrap(), t);
    }
}
