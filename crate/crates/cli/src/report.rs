//! `key = value` reports.

use std::fmt::Write as _;

/// Ten significant digits: positional notation for exponents in `[-3, 10)`, scientific
/// otherwise.
pub fn fmt10(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0.000000000".into();
    }
    let e = v.abs().log10().floor() as i32;
    if (-3..10).contains(&e) {
        let s = format!("{:.*}", (9 - e) as usize, v);
        // Rounding can carry into a new leading digit (9.9999999999 -> 10.000000000).
        let digits = s.chars().filter(|c| c.is_ascii_digit()).count();
        let lead_zeros = if e < 0 { (-e) as usize } else { 0 };
        if digits > 10 + lead_zeros && e + 1 < 10 {
            return format!("{:.*}", (8 - e).max(0) as usize, v);
        }
        s
    } else {
        format!("{v:.9e}")
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn text(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.lines.push((key.into(), value.into()));
        self
    }

    pub fn num(&mut self, key: impl Into<String>, v: f64) -> &mut Self {
        self.text(key, fmt10(v))
    }

    pub fn opt(&mut self, key: impl Into<String>, v: Option<f64>) -> &mut Self {
        self.text(key, v.map(fmt10).unwrap_or_else(|| "none".into()))
    }

    pub fn int(&mut self, key: impl Into<String>, v: usize) -> &mut Self {
        self.text(key, v.to_string())
    }

    pub fn flag(&mut self, key: impl Into<String>, v: bool) -> &mut Self {
        self.text(key, v.to_string())
    }

    pub fn list(&mut self, key: impl Into<String>, v: &[f64]) -> &mut Self {
        self.text(key, v.iter().map(|x| fmt10(*x)).collect::<Vec<_>>().join(", "))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}
