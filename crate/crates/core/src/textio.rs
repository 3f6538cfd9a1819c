//! The text matrix format for matroids, and the content digest that
//! certificates bind to.
//!
//! Format: a header line `p r n`, then `r` lines of exactly `n` base-p
//! digits with no separators (digits `0-9` then `a`, `b`, `c` for 10-12),
//! then optionally one line `labels: l0 l1 ... l(n-1)`. Column j is
//! element j.

use crate::gf::GfVec;
use crate::matroid::{Matroid, MatroidError};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Header { line: usize, msg: String },
    #[error("line {line}, column {col}: {msg}")]
    Cell { line: usize, col: usize, msg: String },
    #[error("line {line}: expected {expected} digits, found {found}")]
    RaggedRow { line: usize, expected: usize, found: usize },
    #[error("expected {expected} rows, found {found}")]
    MissingRows { expected: usize, found: usize },
    #[error("line {line}: labels line must list {expected} labels, found {found}")]
    Labels { line: usize, expected: usize, found: usize },
    #[error(transparent)]
    Matroid(#[from] MatroidError),
}

fn digit_value(c: char) -> Option<u8> {
    match c {
        '0'..='9' => Some(c as u8 - b'0'),
        'a' => Some(10),
        'b' => Some(11),
        'c' => Some(12),
        _ => None,
    }
}

fn digit_char(v: u8) -> char {
    match v {
        0..=9 => (b'0' + v) as char,
        10 => 'a',
        11 => 'b',
        12 => 'c',
        _ => unreachable!("residues are < 13"),
    }
}

/// Parses the matroid text format. Elements are ordered as columns appear.
pub fn parse_matroid(text: &str) -> Result<Matroid, ParseError> {
    let mut lines = text.lines().enumerate();
    let (hline_no, header) = lines
        .next()
        .ok_or(ParseError::Header { line: 1, msg: "empty input".into() })?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(ParseError::Header {
            line: hline_no + 1,
            msg: format!("expected `p r n`, found {header:?}"),
        });
    }
    let parse_int = |s: &str, what: &str| -> Result<usize, ParseError> {
        s.parse::<usize>().map_err(|_| ParseError::Header {
            line: hline_no + 1,
            msg: format!("bad {what} {s:?}"),
        })
    };
    let p = parse_int(parts[0], "prime")? as u8;
    let r = parse_int(parts[1], "row count")?;
    let n = parse_int(parts[2], "column count")?;
    let mut rows: Vec<Vec<u8>> = Vec::with_capacity(r);
    let mut labels: Option<Vec<String>> = None;
    for (line_no, line) in lines {
        let line_trim = line.trim_end();
        if line_trim.is_empty() {
            continue;
        }
        if rows.len() == r {
            if let Some(rest) = line_trim.strip_prefix("labels:") {
                let ls: Vec<String> = rest.split_whitespace().map(String::from).collect();
                if ls.len() != n {
                    return Err(ParseError::Labels {
                        line: line_no + 1,
                        expected: n,
                        found: ls.len(),
                    });
                }
                labels = Some(ls);
                continue;
            }
            return Err(ParseError::Header {
                line: line_no + 1,
                msg: "unexpected content after matrix rows".into(),
            });
        }
        let mut row = Vec::with_capacity(n);
        for (col, ch) in line_trim.chars().enumerate() {
            let v = digit_value(ch).ok_or(ParseError::Cell {
                line: line_no + 1,
                col: col + 1,
                msg: format!("non-digit character {ch:?}"),
            })?;
            if v >= p {
                return Err(ParseError::Cell {
                    line: line_no + 1,
                    col: col + 1,
                    msg: format!("digit {v} is not a residue mod {p}"),
                });
            }
            row.push(v);
        }
        if row.len() != n {
            return Err(ParseError::RaggedRow {
                line: line_no + 1,
                expected: n,
                found: row.len(),
            });
        }
        rows.push(row);
    }
    if rows.len() != r {
        return Err(ParseError::MissingRows { expected: r, found: rows.len() });
    }
    let mut columns = Vec::with_capacity(n);
    for j in 0..n {
        let coords: Vec<u8> = (0..r).map(|i| rows[i][j]).collect();
        columns.push(GfVec::new(p, coords).map_err(MatroidError::from)?);
    }
    let m = match labels {
        Some(ls) => Matroid::with_labels(p, r, columns, ls)?,
        None => Matroid::new(p, r, columns)?,
    };
    Ok(m)
}

/// Emits the canonical text for a matroid. Labels are written only when
/// they differ from the defaults `e0 e1 ...`.
pub fn emit_matroid(m: &Matroid) -> String {
    let mut out = format!("{} {} {}\n", m.p(), m.ambient_dim(), m.size());
    for i in 0..m.ambient_dim() {
        for e in 0..m.size() {
            out.push(digit_char(m.vector(e).coords()[i]));
        }
        out.push('\n');
    }
    let default_labels = (0..m.size()).all(|e| m.label(e) == format!("e{e}"));
    if !default_labels {
        out.push_str("labels:");
        for e in 0..m.size() {
            out.push(' ');
            out.push_str(m.label(e));
        }
        out.push('\n');
    }
    out
}

/// Content digest certificates bind to: SHA-256 of the LF-normalized
/// header and matrix rows (labels excluded).
pub fn matroid_digest(m: &Matroid) -> String {
    let mut canonical = format!("{} {} {}\n", m.p(), m.ambient_dim(), m.size());
    for i in 0..m.ambient_dim() {
        for e in 0..m.size() {
            canonical.push(digit_char(m.vector(e).coords()[i]));
        }
        canonical.push('\n');
    }
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    format!("{:x}", hasher.finalize())
}
