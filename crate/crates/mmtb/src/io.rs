//! On-disk formats: long CSV observations, newline-delimited sample records,
//! and ground-truth sidecars.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::Array3;

use crate::error::{Error, Result};
use crate::sampler::{ChainDiagnostics, PosteriorDraw, SampleChain};
use crate::simulator::GroundTruth;
use crate::tensor::DataTensor;

const HEADER: &str = "subject,measurement,time,value";

/// Reads a long-format CSV (one row per cell, 1-based indices) into a dense
/// tensor. Dimensions are inferred from the maximum indices; every cell must
/// appear exactly once.
pub fn read_long_csv(path: impl AsRef<Path>) -> Result<DataTensor> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines().enumerate();

    let header = match lines.next() {
        Some((_, line)) => line.map_err(|e| Error::io(path, e))?,
        None => {
            return Err(Error::MalformedHeader {
                path: path.into(),
                found: String::new(),
            })
        }
    };
    if header.trim_end() != HEADER {
        return Err(Error::MalformedHeader {
            path: path.into(),
            found: header,
        });
    }

    // (subject, measurement, time) 1-based, value.
    let mut rows: Vec<(usize, usize, usize, f64, usize)> = Vec::new();
    let (mut n, mut r, mut t) = (0usize, 0usize, 0usize);
    for (idx, line) in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != 4 {
            return Err(Error::MalformedRow {
                path: path.into(),
                line: lineno,
                reason: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let parse_idx = |field: &str, name: &str| -> Result<usize> {
            field
                .parse::<usize>()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| Error::MalformedRow {
                    path: path.into(),
                    line: lineno,
                    reason: format!("{name} index `{field}` is not a positive integer"),
                })
        };
        let si = parse_idx(fields[0], "subject")?;
        let ri = parse_idx(fields[1], "measurement")?;
        let ti = parse_idx(fields[2], "time")?;
        let value: f64 = fields[3].parse().map_err(|_| Error::MalformedRow {
            path: path.into(),
            line: lineno,
            reason: format!("value `{}` does not parse as a real number", fields[3]),
        })?;
        if !value.is_finite() {
            return Err(Error::NonFiniteValue {
                path: path.into(),
                line: lineno,
                value: fields[3].to_string(),
            });
        }
        n = n.max(si);
        r = r.max(ri);
        t = t.max(ti);
        rows.push((si, ri, ti, value, lineno));
    }
    if rows.is_empty() {
        return Err(Error::MalformedRow {
            path: path.into(),
            line: 1,
            reason: "file contains no data rows".into(),
        });
    }

    // NaN marks a not-yet-seen cell; inputs are known finite at this point.
    let mut values = Array3::from_elem((n, r, t), f64::NAN);
    for (si, ri, ti, value, lineno) in rows {
        let cell = [si - 1, ri - 1, ti - 1];
        if !values[cell].is_nan() {
            return Err(Error::DuplicateCell {
                path: path.into(),
                subject: si,
                measurement: ri,
                time: ti,
                line: lineno,
            });
        }
        values[cell] = value;
    }
    for ((i, m, s), v) in values.indexed_iter() {
        if v.is_nan() {
            return Err(Error::MissingCell {
                path: path.into(),
                subject: i + 1,
                measurement: m + 1,
                time: s + 1,
            });
        }
    }
    Ok(DataTensor::new(values))
}

/// Writes a tensor as long CSV; inverse of `read_long_csv`.
pub fn write_long_csv(data: &DataTensor, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut write = |line: String| -> Result<()> {
        out.write_all(line.as_bytes())
            .and_then(|_| out.write_all(b"\n"))
            .map_err(|e| Error::io(path, e))
    };
    write(HEADER.to_string())?;
    for i in 0..data.n_subjects() {
        for r in 0..data.n_measurements() {
            for t in 0..data.n_timesteps() {
                write(format!("{},{},{},{}", i + 1, r + 1, t + 1, data.value(i, r, t)))?;
            }
        }
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Serializes a chain as newline-delimited JSON: one header record with the
/// config echo and diagnostics, then one record per retained draw.
pub fn write_samples(chain: &SampleChain, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if chain.draws.is_empty() {
        return Err(Error::EmptyChain);
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let header = serde_json::json!({
        "config": chain.config,
        "diagnostics": chain.diagnostics,
    });
    serde_json::to_writer(&mut out, &header).map_err(|e| Error::Serde(e.to_string()))?;
    out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    for draw in &chain.draws {
        serde_json::to_writer(&mut out, draw).map_err(|e| Error::Serde(e.to_string()))?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_samples(path: impl AsRef<Path>) -> Result<SampleChain> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let header_line = lines
        .next()
        .ok_or(Error::EmptyChain)?
        .map_err(|e| Error::io(path, e))?;
    #[derive(serde::Deserialize)]
    struct Header {
        config: crate::config::RunConfig,
        diagnostics: ChainDiagnostics,
    }
    let header: Header =
        serde_json::from_str(&header_line).map_err(|e| Error::Serde(e.to_string()))?;
    let mut draws = Vec::new();
    for line in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let draw: PosteriorDraw =
            serde_json::from_str(&line).map_err(|e| Error::Serde(e.to_string()))?;
        draws.push(draw);
    }
    if draws.is_empty() {
        return Err(Error::EmptyChain);
    }
    Ok(SampleChain {
        config: header.config,
        draws,
        diagnostics: header.diagnostics,
    })
}

pub fn write_ground_truth(truth: &GroundTruth, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, truth).map_err(|e| Error::Serde(e.to_string()))?;
    out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_ground_truth(path: impl AsRef<Path>) -> Result<GroundTruth> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::Serde(e.to_string()))
}
