//! Small helpers shared by the TSV writers and readers.

use std::io::{self, BufRead};

use crate::error::{Error, Result};

/// Six decimal places, ties to even, never `-0.000000`.
pub fn real(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

pub fn optional_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

pub fn check_header(first: Option<io::Result<String>>, header: &str) -> Result<()> {
    match first.transpose()? {
        Some(line) if line.trim_end_matches('\r') == header => Ok(()),
        _ => Err(Error::Header {
            expected: header.replace('\t', "<TAB>"),
        }),
    }
}

/// Check the first line against `header` and return the remaining
/// non-empty lines with their 1-based line numbers.
pub fn read_rows<R: BufRead>(reader: R, header: &str) -> Result<Vec<(usize, String)>> {
    let mut lines = reader.lines();
    check_header(lines.next(), header)?;
    let mut rows = Vec::new();
    for (offset, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if !line.is_empty() {
            rows.push((offset + 2, line.to_string()));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_ties_to_even() {
        assert_eq!(real(0.0078125), "0.007812");
        assert_eq!(real(0.0234375), "0.023438");
        assert_eq!(real(0.5), "0.500000");
        assert_eq!(real(1.0 / 3.0), "0.333333");
    }

    #[test]
    fn no_negative_zero() {
        assert_eq!(real(-0.0), "0.000000");
        assert_eq!(real(-1e-9), "0.000000");
        assert_eq!(real(-0.25), "-0.250000");
        assert_eq!(optional_real(None), "");
    }
}
