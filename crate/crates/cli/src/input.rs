//! Spectra, dense matrices and channel specs from the command line.

use std::path::Path;

use absep::linalg::c;
use absep::{ChannelSpec, Matrix, Spectrum};

use crate::{io_error, usage, CliResult};

pub const MAX_DIM_VAR: &str = "ABSEP_MAX_DIM";
pub const DEFAULT_MAX_DIM: usize = 64;

/// Dimension cap from `ABSEP_MAX_DIM`, 64 when unset.
pub fn max_dim() -> CliResult<usize> {
    match std::env::var(MAX_DIM_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|d| *d >= 1)
            .ok_or_else(|| usage(format!("{MAX_DIM_VAR}={v:?} is not a positive integer"))),
        Err(_) => Ok(DEFAULT_MAX_DIM),
    }
}

fn check_dim(dim: usize) -> CliResult<()> {
    let cap = max_dim()?;
    if dim > cap {
        return Err(usage(format!(
            "dimension {dim} exceeds the cap {cap} (set {MAX_DIM_VAR} to raise it)"
        )));
    }
    Ok(())
}

/// Comma-separated eigenvalues, e.g. `0.25,0.25,0.25,0.25`.
pub fn parse_spectrum(text: &str) -> CliResult<Spectrum> {
    let values = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("cannot parse spectrum entry {:?}", t.trim())))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    check_dim(values.len())?;
    Ok(Spectrum::state(values)?)
}

/// Text matrix: a line with the dimension, then one line per row holding
/// `re,im` pairs separated by whitespace. Blank lines and `#` comments are
/// skipped.
pub fn parse_matrix(text: &str) -> CliResult<Matrix> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| usage("empty matrix file"))?;
    let dim: usize = header
        .parse()
        .map_err(|_| usage(format!("first line must be the dimension, got {header:?}")))?;
    if dim == 0 {
        return Err(usage("dimension must be positive"));
    }
    check_dim(dim)?;
    let mut data = Vec::with_capacity(dim * dim);
    for row in 0..dim {
        let line = lines
            .next()
            .ok_or_else(|| usage(format!("expected {dim} rows, found {row}")))?;
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != dim {
            return Err(usage(format!(
                "row {} has {} entries, expected {dim}",
                row + 1,
                entries.len()
            )));
        }
        for e in entries {
            let (re, im) = e
                .split_once(',')
                .ok_or_else(|| usage(format!("entry {e:?} is not a re,im pair")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| usage(format!("cannot parse number {s:?}")))
            };
            data.push(c(parse(re)?, parse(im)?));
        }
    }
    if lines.next().is_some() {
        return Err(usage(format!("more than {dim} rows")));
    }
    Ok(Matrix::from_vec(dim, dim, data)?)
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| io_error(path, e))
}

pub fn read_matrix(path: &Path) -> CliResult<Matrix> {
    parse_matrix(&read_text(path)?)
}

/// A channel spec given inline as JSON or as a path to a JSON file.
pub fn load_channel(arg: &str) -> CliResult<ChannelSpec> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        read_text(Path::new(arg))?
    };
    let spec: ChannelSpec =
        serde_json::from_str(&text).map_err(|e| usage(format!("invalid channel spec: {e}")))?;
    check_dim(spec.dim())?;
    Ok(spec)
}
