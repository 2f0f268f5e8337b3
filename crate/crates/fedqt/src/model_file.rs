//! Decimal text dump of a trained bundle: one header line naming the model
//! kind and length, then one value per line with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use fedqt_core::fed::ParamBundle;
use fedqt_core::rnn::{Architecture, ModelKind};

use crate::error::{Error, Result};

pub fn render(bundle: &ParamBundle) -> String {
    let mut out = format!(
        "# fedqt model kind={} len={}\n",
        bundle.kind(),
        bundle.len()
    );
    for x in bundle.params() {
        writeln!(out, "{x:.16e}").unwrap();
    }
    out
}

pub fn save(path: &Path, bundle: &ParamBundle) -> Result<()> {
    std::fs::write(path, render(bundle)).map_err(|e| Error::io(path, e))
}

/// Parses a dump and checks it against `arch`.
pub fn parse(text: &str, arch: &Architecture, path: &Path) -> Result<ParamBundle> {
    let malformed = |line: u64, reason: &str| Error::Malformed {
        path: path.to_owned(),
        line,
        reason: reason.to_owned(),
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| malformed(1, "missing header"))?;
    let fields: Vec<&str> = header
        .strip_prefix("# fedqt model ")
        .ok_or_else(|| malformed(1, "bad header"))?
        .split(' ')
        .collect();
    let (kind, len) = match fields[..] {
        [k, l] => (
            k.strip_prefix("kind=")
                .and_then(|k| k.parse::<ModelKind>().ok()),
            l.strip_prefix("len=").and_then(|l| l.parse::<usize>().ok()),
        ),
        _ => (None, None),
    };
    let (kind, len) = kind.zip(len).ok_or_else(|| malformed(1, "bad header"))?;
    if kind != arch.kind() {
        return Err(malformed(1, "model kind does not match configuration"));
    }
    let params = lines
        .enumerate()
        .map(|(i, l)| {
            l.trim()
                .parse::<f64>()
                .map_err(|_| malformed(i as u64 + 2, "not a number"))
        })
        .collect::<Result<Vec<f64>>>()?;
    if params.len() != len {
        return Err(malformed(1, "value count differs from header"));
    }
    Ok(ParamBundle::new(arch, params)?)
}

pub fn load(path: &Path, arch: &Architecture) -> Result<ParamBundle> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse(&text, arch, path)
}
