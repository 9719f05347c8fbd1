//! Minimal tab-separated reader/writer shared by every flat-file format.
//!
//! Free-text cells escape `\`, tab, CR and LF as `\\`, `\t`, `\r`, `\n`.
//! Blank lines and lines starting with `#` are skipped.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// A data row: 1-based line number and its cells.
pub(crate) struct Row<'a> {
    pub line: usize,
    pub cells: Vec<&'a str>,
}

impl<'a> Row<'a> {
    pub fn get(&self, i: usize) -> &'a str {
        self.cells.get(i).copied().unwrap_or("")
    }

    /// Trimmed cell, `None` when empty or missing.
    pub fn opt(&self, i: usize) -> Option<&'a str> {
        let v = self.get(i).trim();
        (!v.is_empty()).then_some(v)
    }
}

/// Splits `text` into rows after checking the header. Rows must have between
/// `min_cols` and the header width cells.
pub(crate) fn rows<'a>(
    path: &Path,
    text: &'a str,
    header: &[&str],
    min_cols: usize,
) -> Result<Vec<Row<'a>>> {
    rows_with_extra(path, text, header, &[], min_cols)
}

/// Like [`rows`], but the header may carry the `extra` columns too; rows are
/// then allowed up to the full width.
pub(crate) fn rows_with_extra<'a>(
    path: &Path,
    text: &'a str,
    header: &[&str],
    extra: &[&str],
    min_cols: usize,
) -> Result<Vec<Row<'a>>> {
    let mut lines = text.lines().enumerate();
    let width = loop {
        match lines.next() {
            None => return Err(Error::parse(path, 1, "missing header row")),
            Some((_, l)) if l.trim().is_empty() || l.starts_with('#') => continue,
            Some((i, l)) => {
                let cols: Vec<&str> = l.trim_end_matches('\r').split('\t').collect();
                let base_ok = cols.len() >= header.len() && cols[..header.len()] == *header;
                let extra_ok = cols.len() == header.len()
                    || (cols.len() == header.len() + extra.len() && cols[header.len()..] == *extra);
                if !(base_ok && extra_ok) {
                    return Err(Error::parse(
                        path,
                        i + 1,
                        format!("expected header `{}`", header.join("\\t")),
                    ));
                }
                break cols.len();
            }
        }
    };
    let mut out = Vec::new();
    for (i, l) in lines {
        let l = l.trim_end_matches('\r');
        if l.trim().is_empty() || l.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = l.split('\t').collect();
        if cells.len() < min_cols || cells.len() > width {
            return Err(Error::parse(
                path,
                i + 1,
                format!(
                    "expected {} columns, found {}",
                    if min_cols == width {
                        width.to_string()
                    } else {
                        format!("{min_cols}..={width}")
                    },
                    cells.len()
                ),
            ));
        }
        out.push(Row { line: i + 1, cells });
    }
    Ok(out)
}

/// One entry per non-blank, non-comment line.
pub(crate) fn list(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape(s: &str) -> String {
    if !s.contains('\\') {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_mismatch_reports_line() {
        let err = rows(Path::new("f"), "# c\nid\tname\n", &["id", "label"], 2)
            .err()
            .unwrap();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn width_checked() {
        let text = "a\tb\tc\n1\t2\t3\n1\t2\n";
        let err = rows(Path::new("f"), text, &["a", "b", "c"], 3)
            .err()
            .unwrap();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert_eq!(
            rows(Path::new("f"), text, &["a", "b", "c"], 2)
                .unwrap()
                .len(),
            2
        );
    }

    #[test]
    fn extra_columns_only_when_declared() {
        let text = "a\tb\tx\n1\t2\t3\n";
        assert!(rows(Path::new("f"), text, &["a", "b"], 2).is_err());
        let r = rows_with_extra(Path::new("f"), text, &["a", "b"], &["x"], 2).unwrap();
        assert_eq!(r[0].get(2), "3");
    }

    proptest! {
        #[test]
        fn escape_round_trips(s in ".*") {
            let e = escape(&s);
            prop_assert!(!e.contains('\t') && !e.contains('\n'));
            prop_assert_eq!(unescape(&e), s);
        }
    }
}
