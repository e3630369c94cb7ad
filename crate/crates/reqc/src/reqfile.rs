//! Requirements files.
//!
//! Requirements are separated by blank lines. A line `#id: NAME` names the
//! requirement that follows it; unnamed requirements get `R<n>` by position.
//! Lines starting with `//` are comments.

use std::fmt;

use reqc_core::syntax::{parse_requirement, Diagnostic, Requirement, Severity};

/// One requirement paragraph and where it sits in the file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Paragraph {
    pub id: String,
    pub text: String,
    /// 1-based line of the first text line.
    pub line: usize,
}

/// A diagnostic located in a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileDiagnostic {
    pub file: String,
    pub line: usize,
    pub col: usize,
    pub severity: Severity,
    pub message: String,
}

impl FileDiagnostic {
    pub fn new(file: &str, line: usize, col: usize, severity: Severity, message: impl Into<String>) -> Self {
        FileDiagnostic { file: file.into(), line, col, severity, message: message.into() }
    }

    /// Shifts a diagnostic relative to `p` into file coordinates.
    pub fn from_paragraph(file: &str, p: &Paragraph, d: &Diagnostic) -> Self {
        let mut message = d.message.clone();
        if !d.expected.is_empty() {
            message.push_str(&format!(" (expected one of: {})", d.expected.join(", ")));
        }
        FileDiagnostic::new(file, p.line + d.line - 1, d.col, d.severity, message)
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for FileDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}: {}", self.file, self.line, self.col, self.severity, self.message)
    }
}

/// Splits a requirements file into paragraphs.
pub fn split(file: &str, src: &str) -> Result<Vec<Paragraph>, Vec<FileDiagnostic>> {
    let mut out: Vec<Paragraph> = Vec::new();
    let mut errors = Vec::new();
    let mut pending_id: Option<(String, usize)> = None;
    let mut cur: Option<Paragraph> = None;
    let close = |cur: &mut Option<Paragraph>, out: &mut Vec<Paragraph>| {
        if let Some(mut p) = cur.take() {
            while p.text.ends_with('\n') {
                p.text.pop();
            }
            out.push(p);
        }
    };
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if let Some(id) = t.strip_prefix("#id:") {
            close(&mut cur, &mut out);
            let id = id.trim();
            if id.is_empty() || id.chars().any(char::is_whitespace) {
                errors.push(FileDiagnostic::new(file, line, 1, Severity::Error, format!("bad requirement id '{id}'")));
            }
            pending_id = Some((id.to_string(), line));
        } else if t.is_empty() {
            close(&mut cur, &mut out);
        } else {
            let text = if t.starts_with("//") { "" } else { raw };
            match &mut cur {
                Some(p) => {
                    p.text.push('\n');
                    p.text.push_str(text);
                }
                None if text.is_empty() => {}
                None => {
                    let id = match pending_id.take() {
                        Some((id, _)) => id,
                        None => format!("R{}", out.len() + 1),
                    };
                    cur = Some(Paragraph { id, text: text.to_string(), line });
                }
            }
        }
    }
    close(&mut cur, &mut out);
    if let Some((id, line)) = pending_id {
        errors.push(FileDiagnostic::new(file, line, 1, Severity::Error, format!("id '{id}' names no requirement")));
    }
    for (k, p) in out.iter().enumerate() {
        if out[..k].iter().any(|q| q.id == p.id) {
            errors.push(FileDiagnostic::new(file, p.line, 1, Severity::Error, format!("duplicate requirement id '{}'", p.id)));
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        errors.sort_by_key(|d| d.line);
        Err(errors)
    }
}

/// Parses one paragraph, giving the requirement its id.
pub fn parse(file: &str, p: &Paragraph) -> Result<Requirement, Vec<FileDiagnostic>> {
    match parse_requirement(&p.text) {
        Ok(mut r) => {
            r.id = p.id.clone();
            Ok(r)
        }
        Err(ds) => Err(ds.iter().map(|d| FileDiagnostic::from_paragraph(file, p, d)).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paragraphs_ids_and_comments() {
        let src = "// header\n\n#id: first\nAt each time step,\n  [a] holds.\n\n\nAt system start, [b] holds.\n// trailing\n";
        let ps = split("f", src).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!((ps[0].id.as_str(), ps[0].line), ("first", 4));
        assert_eq!(ps[0].text, "At each time step,\n  [a] holds.");
        assert_eq!((ps[1].id.as_str(), ps[1].line), ("R2", 8));
        assert!(parse("f", &ps[1]).is_ok());
    }

    #[test]
    fn syntax_errors_map_to_file_lines() {
        let src = "\n\nAt each time step,\n  [a & ] holds.\n";
        let ps = split("reqs.txt", src).unwrap();
        let e = &parse("reqs.txt", &ps[0]).unwrap_err()[0];
        assert_eq!(e.line, 4);
        assert!(e.to_string().starts_with("reqs.txt:4:"), "{e}");
    }

    #[test]
    fn duplicate_ids_are_errors() {
        let e = split("f", "#id: x\nAt each time step, [a] holds.\n\n#id: x\nAt each time step, [b] holds.\n").unwrap_err();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].line, 5);
    }
}
