//! CSV and JSON files.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! spectra file read back reproduces the sampled values bit for bit.
//! Non-finite densities are written as `inf`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rmt_core::{DensityCurve, DensityValue, Spectrum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const SPECTRA_HEADER: [&str; 4] = ["trial", "re", "im", "is_real"];
pub const PREDICTION_HEADER: [&str; 3] = ["x", "rho_r_pred", "rho_c_axis_pred"];
pub const CURVE_HEADER: [&str; 5] = ["x", "rho_r_hat", "rho_r_pred", "rho_c_hat", "rho_c_pred"];

pub fn fmt(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_density(v: DensityValue) -> String {
    match v {
        DensityValue::Finite(x) => fmt(x),
        DensityValue::Infinite => "inf".into(),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    File::create(path).map(BufWriter::new).map_err(CliError::io(path))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::Io { path: path.to_path_buf(), source },
        other => CliError::Usage(format!("{}: {other:?}", path.display())),
    }
}

/// One row per eigenvalue, conjugates included: reals first, then each pair
/// as `+im`, `−im`.
pub fn write_spectra(path: &Path, spectra: &[Spectrum]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let e = csv_err(path);
    w.write_record(SPECTRA_HEADER).map_err(&e)?;
    for (trial, s) in spectra.iter().enumerate() {
        let t = trial.to_string();
        for &x in s.real_eigs() {
            w.write_record([t.as_str(), &fmt(x), "0.0", "1"]).map_err(&e)?;
        }
        for &(re, im) in s.complex_pairs() {
            let re = fmt(re);
            w.write_record([t.as_str(), &re, &fmt(im), "0"]).map_err(&e)?;
            w.write_record([t.as_str(), &re, &fmt(-im), "0"]).map_err(&e)?;
        }
    }
    w.flush().map_err(CliError::io(path))
}

/// Reads a spectra file written by [`write_spectra`]; every trial must have
/// exactly `n` rows and trials must be numbered `0, 1, …` in order.
pub fn read_spectra(path: &Path, n: usize) -> Result<Vec<Spectrum>> {
    let bad = |row: usize, msg: String| CliError::Usage(format!("{}: row {row}: {msg}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = r.headers().map_err(csv_err(path))?;
    if header.iter().ne(SPECTRA_HEADER) {
        return Err(CliError::Usage(format!("{}: expected header {}", path.display(), SPECTRA_HEADER.join(","))));
    }
    let mut out = Vec::new();
    let mut pending = TrialRows::default();
    let mut row = 1;
    for rec in r.records() {
        row += 1;
        let rec = rec.map_err(csv_err(path))?;
        if rec.len() != 4 {
            return Err(bad(row, "expected 4 fields".into()));
        }
        let trial: usize = rec[0].parse().map_err(|_| bad(row, "bad trial index".into()))?;
        let re: f64 = rec[1].parse().map_err(|_| bad(row, "bad re".into()))?;
        let im: f64 = rec[2].parse().map_err(|_| bad(row, "bad im".into()))?;
        if trial != out.len() {
            if trial != out.len() + 1 || pending.rows == 0 {
                return Err(bad(row, "trials must be numbered 0, 1, 2, ... in order".into()));
            }
            out.push(pending.finish(n).map_err(|m| bad(row, format!("trial {}: {m}", out.len())))?);
        }
        pending.rows += 1;
        match &rec[3] {
            "1" => pending.reals.push(re),
            "0" if im > 0.0 => pending.pairs.push((re, im)),
            "0" if im < 0.0 => pending.lower += 1,
            "0" => return Err(bad(row, "complex row with zero imaginary part".into())),
            _ => return Err(bad(row, "is_real must be 0 or 1".into())),
        }
    }
    if pending.rows > 0 {
        out.push(pending.finish(n).map_err(|m| bad(row, format!("trial {}: {m}", out.len())))?);
    }
    Ok(out)
}

#[derive(Default)]
struct TrialRows {
    reals: Vec<f64>,
    pairs: Vec<(f64, f64)>,
    lower: usize,
    rows: usize,
}

impl TrialRows {
    fn finish(&mut self, n: usize) -> Result<Spectrum, String> {
        let t = std::mem::take(self);
        if t.rows != n {
            return Err(format!("{} rows, expected n = {n}", t.rows));
        }
        if t.lower != t.pairs.len() {
            return Err("unmatched conjugate rows".into());
        }
        Spectrum::new(n, t.reals, t.pairs).map_err(|e| e.to_string())
    }
}

/// `# key = value` comment lines, then the prediction table.
pub fn write_prediction(path: &Path, curve: &DensityCurve) -> Result<()> {
    let mut f = create(path)?;
    let support: Vec<String> = curve.support.intervals.iter().map(|&(a, b)| format!("[{}, {}]", fmt(a), fmt(b))).collect();
    writeln!(f, "# norm_const = {}", fmt(curve.norm_const)).map_err(CliError::io(path))?;
    writeln!(f, "# support = {}", support.join(" U ")).map_err(CliError::io(path))?;
    let mut w = csv::Writer::from_writer(f);
    let e = csv_err(path);
    w.write_record(PREDICTION_HEADER).map_err(&e)?;
    for i in 0..curve.xs.len() {
        w.write_record([fmt(curve.xs[i]), fmt_density(curve.rho_r[i]), fmt_density(curve.rho_c_axis[i])]).map_err(&e)?;
    }
    w.flush().map_err(CliError::io(path))
}

/// Plot data for the fit: empirical and predicted densities per bin.
pub struct CurveRow {
    pub x: f64,
    pub rho_r_hat: f64,
    pub rho_r_pred: f64,
    pub rho_c_hat: f64,
    pub rho_c_pred: DensityValue,
}

pub fn write_curve(path: &Path, rows: &[CurveRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let e = csv_err(path);
    w.write_record(CURVE_HEADER).map_err(&e)?;
    for r in rows {
        w.write_record([fmt(r.x), fmt(r.rho_r_hat), fmt(r.rho_r_pred), fmt(r.rho_c_hat), fmt_density(r.rho_c_pred)]).map_err(&e)?;
    }
    w.flush().map_err(CliError::io(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = create(path)?;
    serde_json::to_writer_pretty(&mut f, value).map_err(|e| CliError::Io { path: path.into(), source: e.into() })?;
    writeln!(f).and_then(|_| f.flush()).map_err(CliError::io(path))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(CliError::io(path))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// `dir/spectra.csv` pairs with `dir/spectra.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().and_then(|s| s.to_str()).unwrap_or("output");
    output.with_file_name(format!("{stem}.manifest.json"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectra_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let spectra = vec![
            Spectrum::new(3, vec![0.1 + 0.2], vec![(1.0 / 3.0, 2.5e-17)]).unwrap(),
            Spectrum::new(3, vec![-1e-300, 7.0, f64::MIN_POSITIVE], vec![]).unwrap(),
        ];
        write_spectra(&path, &spectra).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1 + 6);
        assert_eq!(read_spectra(&path, 3).unwrap(), spectra);
        assert!(read_spectra(&path, 4).is_err());
    }

    #[test]
    fn malformed_rows_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        for body in ["0,1.0,0.0,1\n2,1.0,0.0,1\n", "0,1.0,0.5,0\n", "0,x,0.0,1\n", "0,1.0,0.0,2\n"] {
            std::fs::write(&path, format!("trial,re,im,is_real\n{body}")).unwrap();
            let err = read_spectra(&path, 1).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{body}: {err}");
        }
        std::fs::write(&path, "a,b\n").unwrap();
        assert!(read_spectra(&path, 1).is_err());
    }

    #[test]
    fn manifest_names() {
        assert_eq!(manifest_path(Path::new("out/spectra.csv")), Path::new("out/spectra.manifest.json"));
        assert_eq!(fmt(0.5), "0.5");
        assert_eq!(fmt_density(DensityValue::Infinite), "inf");
    }
}
