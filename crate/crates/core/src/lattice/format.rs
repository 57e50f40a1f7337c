//! Plain-text basis files:
//!
//! ```text
//! 2
//! 1 0
//! 1/2 3
//! t: 1/3 -2
//! ```
//!
//! Line 1 is the dimension, then one basis vector per line, then an
//! optional target line. Blank lines are ignored.

use super::Basis;
use crate::error::{Error, Result};
use crate::rational::{self, QVec};

pub const MAX_FILE_DIM: usize = 64;

#[derive(Clone, Debug)]
pub struct BasisFile {
    pub basis: Basis,
    pub target: Option<QVec>,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_row(text: &str, n: usize, line: usize) -> Result<QVec> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.len() != n {
        return Err(perr(line, format!("expected {n} entries, found {}", toks.len())));
    }
    toks.iter().map(|t| rational::parse_q(t).map_err(|m| perr(line, m))).collect()
}

pub fn parse_basis_file(text: &str) -> Result<BasisFile> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (ln, head) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
    let n: usize = head.parse().map_err(|_| perr(ln, format!("bad dimension {head:?}")))?;
    if n == 0 {
        return Err(perr(ln, "dimension must be positive"));
    }
    if n > MAX_FILE_DIM {
        return Err(perr(ln, format!("dimension {n} exceeds {MAX_FILE_DIM}")));
    }
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let (ln, l) = lines.next().ok_or_else(|| perr(ln + i + 1, "missing basis row"))?;
        if l.starts_with("t:") {
            return Err(perr(ln, "missing basis row"));
        }
        rows.push(parse_row(l, n, ln)?);
    }
    let target = match lines.next() {
        None => None,
        Some((ln, l)) => {
            let rest = l.strip_prefix("t:").ok_or_else(|| perr(ln, "expected target line \"t: ...\""))?;
            Some(parse_row(rest, n, ln)?)
        }
    };
    if let Some((ln, _)) = lines.next() {
        return Err(perr(ln, "trailing content"));
    }
    let basis = Basis::new(rows)?;
    Ok(BasisFile { basis, target })
}

/// Parse a whitespace-separated target of the given length.
pub fn parse_target(text: &str, n: usize) -> Result<QVec> {
    parse_row(text, n, 1)
}

pub fn format_basis_file(basis: &Basis, target: Option<&[rational::Q]>) -> String {
    let mut out = format!("{}\n", basis.rank());
    for r in basis.rows() {
        out.push_str(&rational::format_qvec(r));
        out.push('\n');
    }
    if let Some(t) = target {
        out.push_str("t: ");
        out.push_str(&rational::format_qvec(t));
        out.push('\n');
    }
    out
}
