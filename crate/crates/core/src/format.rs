//! Text format for partial and complete matrices.
//!
//! ```text
//! 3
//! 1 -1 ?
//! -1 1 ?
//! ? ? 1
//! ```
//!
//! The first line is the order, followed by one line per row. Tokens are
//! integers, rationals `p/q`, or `?` for an unspecified cell. Blank lines and
//! lines starting with `#` are ignored.

use std::fmt;
use std::str::FromStr;

use crate::classes::PartialMatrix;
use crate::error::{Error, Result};
use crate::exact::{parse_rational, ExactMatrix, Rational, MAX_ORDER};

/// Non-empty, non-comment lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_partial(text: &str) -> Result<PartialMatrix> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let n: usize = header.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("expected matrix order, found `{header}`"),
    })?;
    if n == 0 || n > MAX_ORDER {
        return Err(Error::Parse {
            line,
            msg: format!("order must be in 1..={MAX_ORDER}"),
        });
    }
    let mut rows = Vec::with_capacity(n);
    for (line, row) in lines.by_ref().take(n) {
        let cells = row
            .split_whitespace()
            .map(|tok| match tok {
                "?" => Ok(None),
                t => parse_rational(t)
                    .map(Some)
                    .map_err(|msg| Error::Parse { line, msg }),
            })
            .collect::<Result<Vec<_>>>()?;
        if cells.len() != n {
            return Err(Error::Parse {
                line,
                msg: format!("expected {n} entries, found {}", cells.len()),
            });
        }
        rows.push(cells);
    }
    if rows.len() != n {
        return Err(Error::Parse {
            line: text.lines().count() + 1,
            msg: format!("expected {n} rows, found {}", rows.len()),
        });
    }
    if let Some((line, extra)) = lines.next() {
        return Err(Error::Parse {
            line,
            msg: format!("unexpected trailing content `{extra}`"),
        });
    }
    PartialMatrix::new(rows)
}

/// Parses a matrix in which every cell must be specified.
pub fn parse_matrix(text: &str) -> Result<ExactMatrix> {
    let p = parse_partial(text)?;
    p.to_exact().ok_or(Error::Parse {
        line: 1,
        msg: "matrix has unspecified cells".into(),
    })
}

impl FromStr for PartialMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_partial(s)
    }
}

impl FromStr for ExactMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_matrix(s)
    }
}

fn cell_token(c: Option<&Rational>) -> String {
    c.map_or_else(|| "?".to_string(), |v| v.to_string())
}

impl fmt::Display for PartialMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.order();
        writeln!(f, "{n}")?;
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| cell_token(self.get(i, j))).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Serde helpers storing matrices as their text format.
pub mod matrix_text {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &ExactMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(m)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ExactMatrix, D::Error> {
        let s = String::deserialize(d)?;
        parse_matrix(&s).map_err(serde::de::Error::custom)
    }
}

pub mod partial_text {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        p: &PartialMatrix,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(p)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<PartialMatrix, D::Error> {
        let s = String::deserialize(d)?;
        parse_partial(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn parses_rationals_and_unspecified() {
        let p = parse_partial("2\n1/2 ?\n-3 4\n").unwrap();
        assert_eq!(p.get(0, 0), Some(&rat(1, 2)));
        assert_eq!(p.get(0, 1), None);
        assert_eq!(p.get(1, 0), Some(&rat(-3, 1)));
        assert_eq!(p.to_string(), "2\n1/2 ?\n-3 4\n");
    }

    #[test]
    fn integers_print_without_denominator() {
        let p = parse_partial("1\n6/3\n").unwrap();
        assert_eq!(p.to_string(), "1\n2\n");
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = parse_partial("2\n1 2 3\n4 5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn rejects_zero_denominator() {
        assert!(parse_partial("1\n1/0\n").is_err());
    }

    #[test]
    fn rejects_missing_rows_and_trailing_content() {
        assert!(parse_partial("2\n1 2\n").is_err());
        assert!(parse_partial("1\n1\n2\n").is_err());
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let p = parse_partial("# header\n\n2\n1 0\n\n0 1\n").unwrap();
        assert!(p.is_fully_specified());
    }

    #[test]
    fn parse_matrix_requires_all_cells() {
        assert!(parse_matrix("2\n1 ?\n0 1\n").is_err());
        assert_eq!(parse_matrix("2\n1 0\n0 1\n").unwrap().det(), rat(1, 1));
    }
}
