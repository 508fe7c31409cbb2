//! Text encodings for lists of exact matrices.
//!
//! Rationals are always written as `"num/den"` strings.
//!
//! * JSON: an array of matrices, each an array of rows, each an array of
//!   `"num/den"` strings.
//! * Triplet: for each matrix a header line `matrix <index> <rows> <cols>`
//!   followed by one `r c num/den` line per nonzero entry, row-major.

use thiserror::Error;

use crate::exactlinalg::{format_rational, parse_rational, ExactMatrix, LinalgError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid matrix JSON: {0}")]
    Json(String),
}

pub fn matrix_to_json(m: &ExactMatrix) -> serde_json::Value {
    serde_json::Value::Array(
        m.to_dense()
            .iter()
            .map(|row| {
                serde_json::Value::Array(
                    row.iter()
                        .map(|q| serde_json::Value::String(format_rational(q)))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn matrices_to_json(ms: &[ExactMatrix]) -> serde_json::Value {
    serde_json::Value::Array(ms.iter().map(matrix_to_json).collect())
}

pub fn matrix_from_json(value: &serde_json::Value) -> Result<ExactMatrix, FormatError> {
    let bad = |msg: &str| FormatError::Json(msg.to_string());
    let rows = value
        .as_array()
        .ok_or_else(|| bad("matrix must be an array of rows"))?;
    let dense = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| bad("row must be an array"))?
                .iter()
                .map(|cell| {
                    let s = cell
                        .as_str()
                        .ok_or_else(|| bad("entries must be \"num/den\" strings"))?;
                    Ok(parse_rational(s)?)
                })
                .collect::<Result<Vec<_>, FormatError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExactMatrix::from_dense(dense)?)
}

pub fn write_triplets(ms: &[ExactMatrix]) -> String {
    let mut out = String::new();
    for (k, m) in ms.iter().enumerate() {
        out.push_str(&format!("matrix {} {} {}\n", k, m.rows(), m.cols()));
        for (r, c, q) in m.triplets() {
            out.push_str(&format!("{} {} {}\n", r, c, format_rational(q)));
        }
    }
    out
}

pub fn parse_triplets(text: &str) -> Result<Vec<ExactMatrix>, FormatError> {
    struct Pending {
        rows: usize,
        cols: usize,
        entries: Vec<(usize, usize, crate::exactlinalg::Rational)>,
    }
    let mut out = Vec::new();
    let mut current: Option<Pending> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let err = |message: &str| FormatError::Syntax {
            line: line_no,
            message: message.to_string(),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [] => continue,
            ["matrix", _, rows, cols] => {
                if let Some(p) = current.take() {
                    out.push(ExactMatrix::from_triplets(p.rows, p.cols, p.entries)?);
                }
                current = Some(Pending {
                    rows: rows.parse().map_err(|_| err("bad row count"))?,
                    cols: cols.parse().map_err(|_| err("bad column count"))?,
                    entries: Vec::new(),
                });
            }
            [r, c, q] => {
                let p = current
                    .as_mut()
                    .ok_or_else(|| err("entry before matrix header"))?;
                p.entries.push((
                    r.parse().map_err(|_| err("bad row index"))?,
                    c.parse().map_err(|_| err("bad column index"))?,
                    parse_rational(q)?,
                ));
            }
            _ => return Err(err("expected `matrix k rows cols` or `r c num/den`")),
        }
    }
    if let Some(p) = current {
        out.push(ExactMatrix::from_triplets(p.rows, p.cols, p.entries)?);
    }
    Ok(out)
}
