use std::fmt;

use serde::{Deserialize, Serialize};

/// Location of a token or construct in scenario text.
///
/// `line` and `column` are 1-based, `column` and `length` count characters,
/// and `offset` is the byte offset of the first character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
    pub offset: usize,
}

impl SourceSpan {
    /// Whether the span lies within `text`.
    pub fn is_within(&self, text: &str) -> bool {
        if self.line == 0 || self.column == 0 || self.offset > text.len() {
            return false;
        }
        if !text.is_char_boundary(self.offset) {
            return false;
        }
        text[self.offset..].chars().count() >= self.length
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// Stable diagnostic codes.
pub mod codes {
    pub const SYNTAX: &str = "E001";
    pub const DUPLICATE_ID: &str = "E002";
    pub const UNKNOWN_REFERENCE: &str = "E003";
    pub const PLEASANT_MARKER: &str = "E004";
    pub const PLACEMENT_KEYS: &str = "E005";
    pub const CROSS_SUBJECT_RESEMBLANCE: &str = "E006";
    pub const INTENSITY_RANGE: &str = "E007";
    pub const CONFIG: &str = "E008";
    pub const SUBJECT: &str = "E009";
    pub const SELF_RELATION: &str = "E010";
    pub const UNKNOWN_PRAGMA: &str = "W001";
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub span: SourceSpan,
    /// Other locations involved, e.g. the first declaration of a duplicate.
    pub related: Vec<SourceSpan>,
}

impl Diagnostic {
    pub fn error(code: &'static str, span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            span,
            related: Vec::new(),
        }
    }

    pub fn warning(code: &'static str, span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Self::error(code, span, message)
        }
    }

    pub fn with_related(mut self, span: SourceSpan) -> Self {
        self.related.push(span);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}[{}]: {}",
            self.span, self.severity, self.code, self.message
        )?;
        for rel in &self.related {
            write!(f, " (see {rel})")?;
        }
        Ok(())
    }
}
