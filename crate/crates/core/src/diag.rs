//! Source positions and diagnostics shared by every phase.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Index of a source file inside a [`SourceMap`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FileId(pub u32);

/// A 1-based line/column position inside one source file.
///
/// Positions are metadata: two spans always compare equal, so syntax trees
/// and models compare structurally regardless of where they were parsed from.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Span {
    pub file: FileId,
    pub line: u32,
    pub column: u32,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl Span {
    pub fn new(file: FileId, line: u32, column: u32) -> Self {
        Span { file, line, column }
    }

    /// Ordering key; `Ord` is deliberately not implemented because equality
    /// ignores positions.
    pub fn key(&self) -> (u32, u32, u32) {
        (self.file.0, self.line, self.column)
    }
}

/// Files known to a compilation, so spans can be rendered with a path.
#[derive(Clone, Debug, Default)]
pub struct SourceMap {
    files: Vec<PathBuf>,
}

impl SourceMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, path: impl AsRef<Path>) -> FileId {
        self.files.push(path.as_ref().to_path_buf());
        FileId(self.files.len() as u32 - 1)
    }

    pub fn path(&self, id: FileId) -> &Path {
        self.files
            .get(id.0 as usize)
            .map(PathBuf::as_path)
            .unwrap_or_else(|| Path::new("<unknown>"))
    }
}

/// A fully rendered source position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SourcePos {
    pub file: PathBuf,
    pub line: u32,
    pub column: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => f.write_str("error"),
            Severity::Warning => f.write_str("warning"),
        }
    }
}

/// A single finding from the parser, resolver or checker.
///
/// Codes are stable: `P0xx` lexing/parsing, `R0xx` name resolution and
/// typing, `W1`..`W10` core context conditions, `E1` executable profile,
/// `A1`/`A2` analysis profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(code: &'static str, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, code, message: message.into(), span }
    }

    pub fn warning(code: &'static str, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, code, message: message.into(), span }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    pub fn pos(&self, sources: &SourceMap) -> SourcePos {
        SourcePos {
            file: sources.path(self.span.file).to_path_buf(),
            line: self.span.line,
            column: self.span.column,
        }
    }

    /// `file:line:col: severity[code]: message`
    pub fn render(&self, sources: &SourceMap) -> String {
        format!(
            "{}:{}:{}: {}[{}]: {}",
            sources.path(self.span.file).display(),
            self.span.line,
            self.span.column,
            self.severity,
            self.code,
            self.message
        )
    }

    /// One JSON object with the fields `code, severity, file, line, column, message`.
    pub fn render_json(&self, sources: &SourceMap) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            code: &'a str,
            severity: Severity,
            file: String,
            line: u32,
            column: u32,
            message: &'a str,
        }
        serde_json::to_string(&Line {
            code: self.code,
            severity: self.severity,
            file: sources.path(self.span.file).display().to_string(),
            line: self.span.line,
            column: self.span.column,
            message: &self.message,
        })
        .expect("diagnostic serializes")
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

/// Stable sort by source position, then code.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| a.span.key().cmp(&b.span.key()).then(a.code.cmp(b.code)));
}
