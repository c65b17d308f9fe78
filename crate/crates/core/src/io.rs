//! CSV and JSON artifacts. Numbers are written with Rust's shortest
//! round-trip formatting, so a written file parses back to identical bits.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{CompactonProfile, ModelParams, NlsProfile, PeriodicProfile};

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Write equal-length columns under `headers`.
pub fn write_columns(path: &Path, headers: &[&str], columns: &[&[f64]]) -> Result<()> {
    if headers.len() != columns.len() {
        return Err(Error::Io(format!("{} headers for {} columns", headers.len(), columns.len())));
    }
    let rows = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != rows) {
        return Err(Error::Io("columns have different lengths".into()));
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(headers).map_err(csv_err)?;
    let mut record = Vec::with_capacity(columns.len());
    for i in 0..rows {
        record.clear();
        record.extend(columns.iter().map(|c| c[i].to_string()));
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a numeric CSV whose header must equal `headers`. Row numbers in
/// errors count the header as row 1.
pub fn read_columns(path: &Path, headers: &[&str]) -> Result<Vec<Vec<f64>>> {
    let file = File::open(path)?;
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let found = r.headers().map_err(|e| Error::Parse { row: 1, msg: e.to_string() })?.clone();
    let found: Vec<&str> = found.iter().map(str::trim).collect();
    if found != headers {
        return Err(Error::Parse { row: 1, msg: format!("expected header {:?}, found {:?}", headers.join(","), found.join(",")) });
    }
    let mut cols = vec![Vec::new(); headers.len()];
    for (k, rec) in r.records().enumerate() {
        let row = k + 2;
        let rec = rec.map_err(|e| Error::Parse { row, msg: e.to_string() })?;
        if rec.len() != headers.len() {
            return Err(Error::Parse { row, msg: format!("expected {} fields, found {}", headers.len(), rec.len()) });
        }
        for (j, field) in rec.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                row,
                msg: format!("column '{}' holds non-numeric value '{field}'", headers[j]),
            })?;
            cols[j].push(v);
        }
    }
    Ok(cols)
}

/// Sidecar manifest written next to every profile CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileManifest {
    pub p: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub c: f64,
    pub v: Option<f64>,
    pub half_width: Option<f64>,
    pub period: Option<f64>,
    pub n: usize,
}

impl ProfileManifest {
    pub fn params(&self) -> ModelParams {
        ModelParams::new(self.p, self.a, self.b, self.c)
    }
}

/// `profile.csv` → `profile.csv.json`.
pub fn manifest_path(csv_path: &Path) -> PathBuf {
    let mut s = csv_path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse { row: e.line(), msg: e.to_string() })
}

fn manifest(params: &ModelParams, v: Option<f64>, half_width: Option<f64>, period: Option<f64>, n: usize) -> ProfileManifest {
    ProfileManifest { p: params.p, a: params.a, b: params.b, c: params.c, v, half_width, period, n }
}

/// `x,phi,dphi` plus the sidecar manifest. Returns the manifest path.
pub fn write_profile(path: &Path, prof: &CompactonProfile) -> Result<PathBuf> {
    write_columns(path, &["x", "phi", "dphi"], &[&prof.xs, &prof.phi, &prof.dphi])?;
    let m = manifest_path(path);
    write_json(&m, &manifest(&prof.params, None, Some(prof.half_width), None, prof.len()))?;
    Ok(m)
}

pub fn write_periodic(path: &Path, prof: &PeriodicProfile) -> Result<PathBuf> {
    write_columns(path, &["x", "phi", "dphi"], &[&prof.xs, &prof.phi, &prof.dphi])?;
    let m = manifest_path(path);
    write_json(&m, &manifest(&prof.params, None, None, Some(prof.period), prof.xs.len()))?;
    Ok(m)
}

/// `x,phi,theta,re,im` plus the sidecar manifest.
pub fn write_nls_profile(path: &Path, q: &NlsProfile) -> Result<PathBuf> {
    let b = &q.base;
    write_columns(path, &["x", "phi", "theta", "re", "im"], &[&b.xs, &b.phi, &q.theta, &q.re, &q.im])?;
    let m = manifest_path(path);
    write_json(&m, &manifest(&b.params, Some(q.v), Some(b.half_width), None, b.len()))?;
    Ok(m)
}

/// Samples read back from a profile CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSamples {
    pub xs: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
}

pub fn read_profile(path: &Path) -> Result<ProfileSamples> {
    let mut cols = read_columns(path, &["x", "phi", "dphi"])?;
    if cols[0].is_empty() {
        return Err(Error::Parse { row: 2, msg: "profile has no data rows".into() });
    }
    let dphi = cols.pop().unwrap_or_default();
    let phi = cols.pop().unwrap_or_default();
    let xs = cols.pop().unwrap_or_default();
    Ok(ProfileSamples { xs, phi, dphi })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = std::env::temp_dir().join(format!("compacton-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cols.csv");
        let a = [0.1, 1.0 / 3.0, f64::INFINITY, -f64::INFINITY, 1e-300, -0.0];
        let b = [std::f64::consts::PI, 2.0, 3.0, 4.0, 5.0, 6.0];
        write_columns(&path, &["a", "b"], &[&a, &b]).unwrap();
        let back = read_columns(&path, &["a", "b"]).unwrap();
        for (u, v) in a.iter().zip(&back[0]) {
            assert_eq!(u.to_bits(), v.to_bits());
        }
        assert!(matches!(read_columns(&path, &["x", "b"]), Err(Error::Parse { row: 1, .. })));
        std::fs::write(&path, "x,phi,dphi\n1,2,3\n1,oops,3\n").unwrap();
        match read_profile(&path) {
            Err(Error::Parse { row, msg }) => {
                assert_eq!(row, 3);
                assert!(msg.contains("phi"));
            }
            other => panic!("{other:?}"),
        }
        std::fs::write(&path, "x,phi,dphi\n").unwrap();
        assert!(matches!(read_profile(&path), Err(Error::Parse { .. })));
        std::fs::remove_dir_all(&dir).ok();
    }
}
