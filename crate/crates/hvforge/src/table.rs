//! Fixed-width ASCII tables.

use std::fmt::Write;

#[derive(Debug, Clone, Default)]
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn numeric(s: &str) -> bool {
    !s.is_empty() && s.parse::<f64>().is_ok()
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    /// Two-column key/value table.
    pub fn key_value() -> Self {
        Self::new(["field", "value"])
    }

    pub fn row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) -> &mut Self {
        let mut cells: Vec<String> = cells.into_iter().map(Into::into).collect();
        cells.resize(self.headers.len(), String::new());
        self.rows.push(cells);
        self
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Numbers are right-aligned, text left-aligned.
    pub fn render(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.len());
            }
        }
        let rule: String = widths
            .iter()
            .map(|w| "-".repeat(w + 2))
            .collect::<Vec<_>>()
            .join("+");
        let mut out = String::new();
        let line = |out: &mut String, cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| {
                    if numeric(c) {
                        format!(" {c:>w$} ")
                    } else {
                        format!(" {c:<w$} ")
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", parts.join("|").trim_end());
        };
        line(&mut out, &self.headers);
        let _ = writeln!(out, "{rule}");
        for r in &self.rows {
            line(&mut out, r);
        }
        out
    }
}

/// Six decimals, or scientific notation for very small magnitudes.
pub fn fmt_f(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:.3e}")
    } else {
        format!("{x:.6}")
    }
}

pub fn fmt_opt_bool(b: Option<bool>) -> String {
    match b {
        Some(true) => "yes".into(),
        Some(false) => "NO".into(),
        None => "n/a".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alignment() {
        let mut t = Table::new(["name", "L"]);
        t.row(["octahedron", "8"]).row(["cube", "6"]);
        let s = t.render();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], " name       | L");
        assert_eq!(lines[1], "------------+---");
        assert_eq!(lines[2], " octahedron | 8");
        assert_eq!(lines[3], " cube       | 6");
    }

    #[test]
    fn small_numbers() {
        assert_eq!(fmt_f(0.5), "0.500000");
        assert_eq!(fmt_f(1.5e-13), "1.500e-13");
        assert_eq!(fmt_f(0.0), "0.000000");
    }
}
