//! The `cfg` text format.
//!
//! ```text
//! cfg <v> <b>
//! <ascending point indices of line 0>
//! ...
//! ```
//!
//! Tokens are separated by single spaces, lines end with LF, and `#` starts a
//! comment that runs to the end of the line. Blank (or comment-only) lines are
//! skipped. Anything else that does not fit the grammar is an error.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::incidence::IncidenceStructure;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_index(token: &str, line: usize) -> Result<usize> {
    if token.is_empty() {
        return Err(parse_err(line, "empty token (separate fields with a single space)"));
    }
    if !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(parse_err(line, format!("unexpected token {token:?}")));
    }
    token.parse().map_err(|_| parse_err(line, format!("integer out of range: {token}")))
}

/// Parses a `cfg` document. Line order is preserved as written.
pub fn parse(text: &str) -> Result<IncidenceStructure> {
    let mut header: Option<(usize, usize)> = None;
    let mut lines: Vec<Vec<usize>> = Vec::new();

    for (i, raw) in text.split('\n').enumerate() {
        let line_no = i + 1;
        if raw.contains('\r') {
            return Err(parse_err(line_no, "CR found; LF line endings required"));
        }
        let content = match raw.find('#') {
            Some(at) => &raw[..at],
            None => raw,
        };
        let content = content.trim_end_matches(' ');
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split(' ').collect();

        let Some((v, b)) = header else {
            match tokens.as_slice() {
                ["cfg", v, b] => {
                    header = Some((parse_index(v, line_no)?, parse_index(b, line_no)?));
                    continue;
                }
                _ => return Err(parse_err(line_no, "expected header `cfg <v> <b>`")),
            }
        };

        if lines.len() == b {
            return Err(parse_err(line_no, format!("more than the declared {b} lines")));
        }
        let points = tokens
            .iter()
            .map(|t| parse_index(t, line_no))
            .collect::<Result<Vec<_>>>()?;
        if points.len() < 2 {
            return Err(parse_err(line_no, "a line needs at least 2 points"));
        }
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            let what = if w[0] == w[1] { "duplicate index" } else { "indices not ascending" };
            return Err(parse_err(line_no, format!("{what}: {} {}", w[0], w[1])));
        }
        if let Some(&p) = points.iter().find(|&&p| p >= v) {
            return Err(parse_err(line_no, format!("index {p} not below v = {v}")));
        }
        lines.push(points);
    }

    let Some((v, b)) = header else {
        return Err(parse_err(1, "missing header `cfg <v> <b>`"));
    };
    if lines.len() != b {
        return Err(parse_err(
            text.split('\n').count(),
            format!("declared {b} lines, found {}", lines.len()),
        ));
    }
    IncidenceStructure::new(v, lines).map_err(|e| match e {
        Error::Malformed(m) => parse_err(0, m),
        other => other,
    })
}

/// Emits a structure in `cfg` format, lines in stored order.
pub fn emit(structure: &IncidenceStructure) -> String {
    let mut out = String::new();
    writeln!(out, "cfg {} {}", structure.point_count(), structure.line_count()).unwrap();
    for line in structure.lines() {
        let mut first = true;
        for p in line {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{p}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn read_file(path: impl AsRef<std::path::Path>) -> Result<IncidenceStructure> {
    parse(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const C4: &str = "cfg 4 4\n0 1\n0 3\n1 2\n2 3\n";

    #[test]
    fn round_trip_is_byte_identical() {
        let s = parse(C4).unwrap();
        assert_eq!(emit(&s), C4);
    }

    #[test]
    fn comments_and_blank_lines_skipped() {
        let text = "# a square\ncfg 4 4 # header\n0 1\n\n0 3 # left\n1 2\n2 3";
        let s = parse(text).unwrap();
        assert_eq!(emit(&s), C4);
    }

    #[test]
    fn rejects_bad_input() {
        let bad = [
            ("", "missing header"),
            ("cfg 4\n", "expected header"),
            ("cfg 4 1 7\n0 1\n", "expected header"),
            ("cfg 4 1\n0 1 x\n", "unexpected token"),
            ("cfg 4 1\n0  1\n", "empty token"),
            ("cfg 4 1\n0\t1\n", "unexpected token"),
            ("cfg 4 1\n1 1\n", "duplicate index"),
            ("cfg 4 1\n2 1\n", "not ascending"),
            ("cfg 4 1\n0 4\n", "not below"),
            ("cfg 4 1\n0\n", "at least 2"),
            ("cfg 4 2\n0 1\n", "declared 2"),
            ("cfg 4 1\n0 1\n2 3\n", "more than"),
            ("cfg 4 1\r\n0 1\n", "CR"),
            ("cfg 4 2\n0 1\n0 1\n", "duplicates"),
            ("cfg -4 1\n0 1\n", "unexpected token"),
        ];
        for (text, needle) in bad {
            let err = parse(text).expect_err(text).to_string();
            assert!(err.contains(needle), "{text:?}: {err}");
        }
    }
}
