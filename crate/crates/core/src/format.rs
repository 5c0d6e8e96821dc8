//! Text formats for matrices, permutation families and blocked sequences.
//!
//! Matrix: a header line `m n`, then `m` lines of exactly `n` characters from
//! `{0,1}`. Family: a header line `count n`, then one permutation per line as
//! space-separated images. Sequence: whitespace-separated tokens where a `|`
//! token separates blocks.

use crate::domain::{BlockedSequence, Matrix01, PermFamily, Permutation};
use crate::error::{Error, Result};

/// Lines of `text` with their 1-based numbers; a single trailing newline is allowed.
fn numbered_lines(text: &str) -> Vec<(usize, &str)> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    if body.is_empty() && text.len() <= 1 {
        return Vec::new();
    }
    body.split('\n').enumerate().map(|(i, l)| (i + 1, l)).collect()
}

fn parse_header(line: Option<&(usize, &str)>, what: &str) -> Result<(usize, usize)> {
    let (no, text) = line.ok_or_else(|| Error::parse(1, format!("missing {what} header")))?;
    let parts: Vec<&str> = text.split(' ').collect();
    if parts.len() != 2 {
        return Err(Error::parse(*no, format!("malformed {what} header {text:?}")));
    }
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::parse(*no, format!("malformed {what} header {text:?}")))
    };
    Ok((parse(parts[0])?, parse(parts[1])?))
}

pub fn parse_matrix(text: &str) -> Result<Matrix01> {
    let lines = numbered_lines(text);
    let (m, n) = parse_header(lines.first(), "matrix")?;
    if lines.len() < m + 1 {
        return Err(Error::parse(
            lines.len() + 1,
            format!("expected {m} rows, found {}", lines.len().saturating_sub(1)),
        ));
    }
    if let Some((no, _)) = lines.get(m + 1) {
        return Err(Error::parse(*no, "unexpected content after the last row"));
    }
    let mut out = Matrix01::zeros(m, n);
    for (r, (no, line)) in lines[1..].iter().enumerate() {
        for (c, ch) in line.chars().enumerate() {
            match ch {
                '0' => {}
                '1' if c < n => out.set(r + 1, c + 1, true),
                '1' => {}
                other => {
                    return Err(Error::parse(*no, format!("illegal character {other:?}")));
                }
            }
        }
        let len = line.chars().count();
        if len != n {
            return Err(Error::parse(*no, format!("row has length {len}, expected {n}")));
        }
    }
    Ok(out)
}

pub fn serialize_matrix(matrix: &Matrix01) -> String {
    let mut out = format!("{} {}\n", matrix.rows(), matrix.cols());
    for r in 1..=matrix.rows() {
        for c in 1..=matrix.cols() {
            out.push(if matrix.get(r, c) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

pub fn parse_family(text: &str) -> Result<PermFamily> {
    let lines = numbered_lines(text);
    let (count, n) = parse_header(lines.first(), "family")?;
    if lines.len() != count + 1 {
        return Err(Error::parse(
            lines.len().max(1),
            format!("expected {count} permutations, found {}", lines.len().saturating_sub(1)),
        ));
    }
    let mut members = Vec::with_capacity(count);
    for (no, line) in &lines[1..] {
        let image = line
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::parse(*no, format!("illegal token {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if image.len() != n {
            return Err(Error::parse(*no, format!("expected {n} values, found {}", image.len())));
        }
        let p = Permutation::new(image).map_err(|e| Error::parse(*no, e.to_string()))?;
        members.push(p);
    }
    PermFamily::new(n, members)
}

pub fn serialize_family(family: &PermFamily) -> String {
    let mut out = format!("{} {}\n", family.len(), family.n());
    for p in family.iter() {
        let parts: Vec<String> = p.image().iter().map(|v| v.to_string()).collect();
        out.push_str(&parts.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_sequence(text: &str) -> Result<BlockedSequence<String>> {
    let mut blocks = vec![Vec::new()];
    for tok in text.split_whitespace() {
        if tok == "|" {
            blocks.push(Vec::new());
        } else {
            blocks.last_mut().expect("at least one block").push(tok.to_string());
        }
    }
    if blocks.len() == 1 && blocks[0].is_empty() {
        blocks.clear();
    }
    BlockedSequence::from_blocks(blocks).map_err(|e| Error::parse(1, e.to_string()))
}

pub fn serialize_sequence<T: ToString + Clone + Eq + std::hash::Hash>(
    seq: &BlockedSequence<T>,
) -> String {
    let blocks: Vec<String> = seq
        .blocks()
        .map(|b| b.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" "))
        .collect();
    let mut out = blocks.join(" | ");
    out.push('\n');
    out
}
