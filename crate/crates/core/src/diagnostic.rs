//! Source spans and structured diagnostics shared by every stage of the
//! pipeline.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A half-open byte range into a source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    pub fn len(self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// Stable diagnostic codes. The string forms are part of the JSON output and
/// must not change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Code {
    #[serde(rename = "LEX")]
    Lex,
    #[serde(rename = "PARSE")]
    Parse,
    #[serde(rename = "SORT")]
    Sort,
    #[serde(rename = "MISMATCH")]
    Mismatch,
    #[serde(rename = "CAPACITY")]
    Capacity,
    #[serde(rename = "INFER")]
    Infer,
    #[serde(rename = "CHECK")]
    Check,
    #[serde(rename = "IMPORT")]
    Import,
    #[serde(rename = "TIER")]
    Tier,
    #[serde(rename = "CACHE")]
    Cache,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::Lex => "LEX",
            Code::Parse => "PARSE",
            Code::Sort => "SORT",
            Code::Mismatch => "MISMATCH",
            Code::Capacity => "CAPACITY",
            Code::Infer => "INFER",
            Code::Check => "CHECK",
            Code::Import => "IMPORT",
            Code::Tier => "TIER",
            Code::Cache => "CACHE",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub primary_span: Span,
    pub notes: Vec<(Span, String)>,
}

impl Diagnostic {
    pub fn error(code: Code, span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            primary_span: span,
            notes: Vec::new(),
        }
    }

    pub fn warning(code: Code, span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(code, span, message)
        }
    }

    pub fn with_note(mut self, span: Span, note: impl Into<String>) -> Diagnostic {
        self.notes.push((span, note.into()));
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Render with a source excerpt and a caret underline.
    pub fn render(&self, file: &str, source: &str) -> String {
        let severity = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let mut out = format!("{severity}[{}]: {}\n", self.code, self.message);
        render_excerpt(&mut out, file, source, self.primary_span);
        for (span, note) in &self.notes {
            out.push_str(&format!("   = note: {note}\n"));
            if *span != self.primary_span {
                render_excerpt(&mut out, file, source, *span);
            }
        }
        out
    }
}

/// 1-based line and column (in chars) of a byte offset.
pub fn line_col(source: &str, offset: usize) -> (usize, usize) {
    let offset = floor_char_boundary(source, offset.min(source.len()));
    let before = &source[..offset];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    let col = source[line_start..offset].chars().count() + 1;
    (line, col)
}

fn floor_char_boundary(s: &str, mut i: usize) -> usize {
    while i > 0 && !s.is_char_boundary(i) {
        i -= 1;
    }
    i
}

fn render_excerpt(out: &mut String, file: &str, source: &str, span: Span) {
    let (line, col) = line_col(source, span.start);
    out.push_str(&format!("  --> {file}:{line}:{col}\n"));
    let Some(text) = source.lines().nth(line - 1) else {
        return;
    };
    let gutter = line.to_string().len();
    let pad = " ".repeat(gutter);
    let line_start = source[..floor_char_boundary(source, span.start.min(source.len()))]
        .rfind('\n')
        .map_or(0, |i| i + 1);
    let line_end = line_start + text.len();
    let end = floor_char_boundary(source, span.end.clamp(span.start, line_end).min(source.len()));
    let start = floor_char_boundary(source, span.start.min(source.len()));
    let width = source[start..end.max(start)].chars().count().max(1);
    out.push_str(&format!("{pad} |\n{line} | {text}\n"));
    out.push_str(&format!(
        "{pad} | {}{}\n",
        " ".repeat(col - 1),
        "^".repeat(width)
    ));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caret_rendering_points_at_span() {
        let src = "def a : U := b;\ndef c : U := d;\n";
        let d = Diagnostic::error(Code::Check, Span::new(29, 30), "bad");
        let text = d.render("m.stt", src);
        assert!(text.starts_with("error[CHECK]: bad\n"));
        assert!(text.contains("m.stt:2:14"));
        assert!(text.contains("2 | def c : U := d;"));
        assert!(text.contains("  |              ^\n"));
    }

    #[test]
    fn line_col_counts_chars_not_bytes() {
        let src = "λ x . y";
        assert_eq!(line_col(src, "λ x".len()), (1, 4));
    }
}
