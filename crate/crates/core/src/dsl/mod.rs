//! The `.elens` case notation: parser with positioned diagnostics, canonical
//! serializer and linter.
//!
//! ```text
//! case hr-screening "Explainable candidate screening"
//! schema 1
//! threshold 100
//!
//! principle transparency {
//!   segment explainability {
//!     loss L6 "Loss of explainability"
//!     hazard H7 links [L6] "Explanations on the model or outputs are wrong"
//!   }
//! }
//!
//! goalgraph {
//!   goal G0 "All ethical hazards are mitigated"
//!   task T1 bound R1 "Document the method"
//!   and G0 <- [T1]
//! }
//!
//! checklist {
//!   question Q1 in transparency/explainability stage design desideratum complete extended links [R1] "How?"
//! }
//! ```
//!
//! Link kinds are inferred from the endpoint kinds. Keywords are contextual,
//! `#` starts a comment and strings take `\\ \" \n \t \r` escapes.

mod build;
mod lexer;
mod lint;
mod parser;
mod serialize;

pub use lint::lint;
pub use serialize::serialize;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::keyword::keyword_enum;
use crate::model::AssuranceCase;

/// 1-based position of a diagnostic. Columns count characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SourceSpan {
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl SourceSpan {
    pub fn new(line: u32, column: u32, length: u32) -> Self {
        Self {
            line: line.max(1),
            column: column.max(1),
            length: length.max(1),
        }
    }

    /// Fallback span for diagnostics without a source position.
    pub const START: SourceSpan = SourceSpan {
        line: 1,
        column: 1,
        length: 1,
    };

    /// Span from the start of `self` to the end of `end` on the same line.
    pub(crate) fn to(self, end: SourceSpan) -> SourceSpan {
        if end.line == self.line && end.column >= self.column {
            SourceSpan::new(self.line, self.column, end.column + end.length - self.column)
        } else {
            self
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

keyword_enum! {
    pub enum Severity: "severity" {
        Error => "error",
        Warning => "warning",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub span: SourceSpan,
    pub message: String,
    pub code: String,
}

impl ParseDiagnostic {
    pub fn error(code: &str, span: SourceSpan, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            span,
            message: message.into(),
            code: code.to_string(),
        }
    }

    pub fn warning(code: &str, span: SourceSpan, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            span,
            message: message.into(),
            code: code.to_string(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} [{}]: {}", self.span, self.severity, self.code, self.message)
    }
}

/// Where each declaration of a parsed case came from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceMap {
    pub header: Option<SourceSpan>,
    pub elements: BTreeMap<String, SourceSpan>,
    pub goal_nodes: BTreeMap<String, SourceSpan>,
    pub questions: BTreeMap<String, SourceSpan>,
}

impl SourceMap {
    pub fn element(&self, id: &str) -> SourceSpan {
        self.elements
            .get(id)
            .copied()
            .or(self.header)
            .unwrap_or(SourceSpan::START)
    }

    pub fn header(&self) -> SourceSpan {
        self.header.unwrap_or(SourceSpan::START)
    }
}

/// CRLF becomes LF and a leading byte-order mark is dropped.
fn normalize(src: &str) -> String {
    src.strip_prefix('\u{feff}').unwrap_or(src).replace("\r\n", "\n")
}

/// Parses a case. The result has an empty audit trail.
pub fn parse(src: &str) -> Result<AssuranceCase, Vec<ParseDiagnostic>> {
    parse_with_map(src).map(|(case, _)| case)
}

/// Parses a case and reports where each declaration sits in the source.
pub fn parse_with_map(src: &str) -> Result<(AssuranceCase, SourceMap), Vec<ParseDiagnostic>> {
    let src = normalize(src);
    let (tokens, mut diags) = lexer::lex(&src);
    let last_line = src.split('\n').count() as u32;
    let last_len = src.split('\n').next_back().map_or(0, |l| l.chars().count()) as u32;
    let end = SourceSpan::new(last_line, last_len.max(1), 1);
    let (ast, syntax) = parser::Parser::new(tokens, end).parse_file();
    diags.extend(syntax);
    let built = build::build(ast);
    let mut diags: Vec<ParseDiagnostic> = diags.into_iter().chain(built.diags).collect();
    diags.sort_by(|a, b| a.span.cmp(&b.span).then_with(|| a.message.cmp(&b.message)));
    diags.dedup();
    match built.case {
        Some(case) if !diags.iter().any(ParseDiagnostic::is_error) => Ok((case, built.map)),
        _ => Err(diags),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ElementKind;

    #[test]
    fn single_loss() {
        let src = "case c1 \"t\"\nloss L1 in transparency/traceability \"Loss of documentation related to data, its collection, and preprocessing\"\n";
        let case = parse(src).unwrap();
        assert_eq!(case.elements_of(ElementKind::Loss).count(), 1);
        assert_eq!(
            case.principle("transparency").unwrap().segments[0].as_str(),
            "traceability"
        );
    }

    #[test]
    fn unknown_link_target() {
        let src = "case c1 \"t\"\nprinciple p {\n  segment s {\n    hazard H7 links [L9] \"x\"\n  }\n}\n";
        let diags = parse(src).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].message, "unknown link target L9");
        assert_eq!(diags[0].span, SourceSpan::new(4, 22, 2));
    }

    #[test]
    fn crlf_equals_lf() {
        let lf = "case c1 \"t\"\nprinciple p {\n  segment s {\n    loss L1 \"a\"\n  }\n}\n";
        assert_eq!(parse(lf).unwrap(), parse(&lf.replace('\n', "\r\n")).unwrap());
    }

    #[test]
    fn recovers_and_reports_several_errors() {
        let src = "case c1 \"t\"\nprinciple p {\n  segment s {\n    loss L1 bogus \"a\"\n    hazard H1 links [L1 \"b\"\n    loss L2 \"ok\"\n  }\n}\nwat\n";
        let diags = parse(src).unwrap_err();
        let lines: Vec<u32> = diags.iter().map(|d| d.span.line).collect();
        assert_eq!(lines, vec![4, 5, 9], "{diags:#?}");
        let src_lines: Vec<&str> = src.split('\n').collect();
        for d in &diags {
            let len = src_lines[d.span.line as usize - 1].chars().count() as u32;
            assert!(d.span.column + d.span.length - 1 <= len.max(1));
        }
    }

    #[test]
    fn missing_header() {
        let diags = parse("loss L1 in p/s \"x\"\n").unwrap_err();
        assert_eq!(diags[0].span, SourceSpan::new(1, 1, 4));
    }

    #[test]
    fn empty_source() {
        let diags = parse("").unwrap_err();
        assert_eq!(diags[0].span, SourceSpan::START);
    }
}
