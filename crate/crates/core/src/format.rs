//! Number formatting and `#` metadata headers shared by every output file.

use std::io::Write;

use crate::error::Result;

/// Prints `v` with 9 significant digits in the style of C's `%.9g`:
/// trailing zeros are trimmed and exponent notation is used for very small
/// or very large magnitudes.
pub fn format_sig9(v: f64) -> String {
    const DIGITS: i32 = 9;
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Ordered `key: value` pairs written as `# key: value` lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Metadata {
    entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new() -> Self {
        Metadata::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn extend(&mut self, other: &Metadata) {
        self.entries.extend(other.entries.iter().cloned());
    }

    /// Parses the text of one `#` line back into an entry.
    pub fn push_line(&mut self, line: &str) {
        let body = line.strip_prefix('#').unwrap_or(line);
        let body = body.strip_prefix(' ').unwrap_or(body);
        match body.split_once(": ") {
            Some((k, v)) => self.push(k, v),
            None => self.push(body, ""),
        }
    }

    pub fn write(&self, mut out: impl Write) -> Result<()> {
        for (k, v) in &self.entries {
            if v.is_empty() {
                writeln!(out, "# {k}")?;
            } else {
                writeln!(out, "# {k}: {v}")?;
            }
        }
        Ok(())
    }
}
