//! Plain-text state files.
//!
//! ```text
//! 2
//! 0.5,0 0,-0.5
//! 0,0.5 0.5,0
//! ```
//!
//! Line 1 holds the dimension `d`; each of the next `d` lines holds `d` whitespace-separated
//! `re,im` pairs in row-major order. Blank trailing lines are ignored.

use std::fmt::Write as _;

use super::ComplexMatrix;
use crate::{Complex64, Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_real(token: &str, line: usize) -> Result<f64> {
    let x: f64 = token
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("cannot parse number {token:?}")))?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("non-finite value {token:?}")));
    }
    Ok(x)
}

/// Parses a square complex matrix. Validity as a density matrix is checked separately.
pub fn parse_state(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file, expected dimension"))?;
    let dim: usize = header
        .parse()
        .map_err(|_| parse_err(1, format!("expected dimension, got {header:?}")))?;
    if dim == 0 {
        return Err(parse_err(1, "dimension must be positive"));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for row in 0..dim {
        let (lineno, line) = lines
            .next()
            .ok_or_else(|| parse_err(row + 2, format!("missing row {row} of {dim}")))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != dim {
            return Err(parse_err(
                lineno,
                format!("expected {dim} entries, found {}", tokens.len()),
            ));
        }
        for tok in tokens {
            let (re, im) = tok
                .split_once(',')
                .ok_or_else(|| parse_err(lineno, format!("entry {tok:?} is not a re,im pair")))?;
            data.push(Complex64::new(parse_real(re, lineno)?, parse_real(im, lineno)?));
        }
    }
    if let Some((lineno, extra)) = lines.find(|(_, l)| !l.is_empty()) {
        return Err(parse_err(lineno, format!("unexpected trailing content {extra:?}")));
    }
    ComplexMatrix::new(dim, dim, data)
}

/// Renders a square matrix; numbers use the shortest round-trip representation.
pub fn format_state(m: &ComplexMatrix) -> String {
    assert!(m.is_square(), "state files hold square matrices");
    let mut out = format!("{}\n", m.rows());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|j| format!("{},{}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}
