//! The `t,h` series format: UTF-8, header line, one sample per LF-terminated
//! line.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const HEADER: [&str; 2] = ["t", "h"];

/// The `h` column in file order.
pub fn load_series_csv(path: &Path) -> Result<Vec<f64>> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::io(path, e))?;
    parse_series(&text, path)
}

pub fn parse_series(text: &str, path: &Path) -> Result<Vec<f64>> {
    let malformed = |line: u64, reason: String| Error::Malformed {
        path: path.to_owned(),
        line,
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| malformed(1, e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != HEADER {
        if headers.is_empty() {
            return Err(Error::NoSamples {
                path: path.to_owned(),
            });
        }
        return Err(malformed(1, "expected header `t,h`".to_owned()));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(malformed(
                line,
                format!("expected 2 fields, found {}", record.len()),
            ));
        }
        record[0]
            .parse::<f64>()
            .map_err(|e| malformed(line, format!("t: {e}")))?;
        let h: f64 = record[1]
            .parse()
            .map_err(|e| malformed(line, format!("h: {e}")))?;
        if !h.is_finite() {
            return Err(malformed(line, "h is not finite".to_owned()));
        }
        out.push(h);
    }
    if out.is_empty() {
        return Err(Error::NoSamples {
            path: path.to_owned(),
        });
    }
    Ok(out)
}

/// Writes `t,h` rows with `t = 0, 1, …`.
pub fn save_series_csv(path: &Path, series: &[f64]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_series(BufWriter::new(file), series).map_err(|e| Error::io(path, e))
}

pub fn write_series<W: Write>(out: W, series: &[f64]) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for (t, h) in series.iter().enumerate() {
        w.write_record([t.to_string(), h.to_string()])?;
    }
    w.flush()
}
