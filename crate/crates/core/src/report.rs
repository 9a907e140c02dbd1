//! Full and summary reports as JSON or Markdown. Output depends only on the
//! case state, so the same state always renders to the same bytes.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::assessors::MetricOutcome;
use crate::checklist::{AnswerContent, QuestionType};
use crate::keyword::keyword_enum;
use crate::model::{AssuranceCase, Violation};
use crate::stpa::{StpaError, TraceMatrix};
use crate::workflow::{AnswerStatus, CaseStatus, RegulatorRecord, ReviewComment};

keyword_enum! {
    pub enum ReportKind: "report kind" {
        Full => "full",
        Summary => "summary",
    }
}

keyword_enum! {
    pub enum PrincipleStatus: "principle status" {
        Assured => "assured",
        InProgress => "in_progress",
        NotStarted => "not_started",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipleRow {
    pub principle: String,
    pub questions: usize,
    pub accepted: usize,
    /// Segments passed in order before the first failure.
    pub segments_passed: Vec<String>,
    pub status: PrincipleStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub mitigated: bool,
    pub root: Option<String>,
    pub root_satisfaction: Option<i32>,
    pub threshold: i32,
    pub unresolved: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionEntry {
    pub id: String,
    pub principle: String,
    pub segment: String,
    pub stage: String,
    pub desideratum: String,
    pub qtype: QuestionType,
    pub requirement_links: Vec<String>,
    pub text: String,
    pub retired: bool,
    pub status: Option<AnswerStatus>,
    pub version: u32,
    pub answer: Option<AnswerContent>,
    pub comments: Vec<ReviewComment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullSection {
    pub questions: Vec<QuestionEntry>,
    pub trace_matrix: Option<TraceMatrix>,
    pub violations: Vec<Violation>,
    pub regulator_reviews: Vec<RegulatorRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: ReportKind,
    pub case_id: String,
    pub title: String,
    pub status: CaseStatus,
    /// Number of audit records; identifies the case state rendered.
    pub audit_len: usize,
    pub principles: Vec<PrincipleRow>,
    pub verdict: VerdictSummary,
    pub coverage_gaps: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full: Option<FullSection>,
}

impl AssuranceCase {
    pub fn generate_report(&self, kind: ReportKind) -> Report {
        let coverage = self.coverage_report();
        let principles = coverage
            .rows
            .iter()
            .map(|row| {
                let questions: Vec<_> = self
                    .checklist()
                    .active()
                    .filter(|q| q.principle.as_str() == row.principle)
                    .collect();
                let answered = questions
                    .iter()
                    .filter(|q| self.answer(q.id.as_str()).is_some())
                    .count();
                let accepted = questions
                    .iter()
                    .filter(|q| {
                        self.answer(q.id.as_str())
                            .is_some_and(|a| a.status == AnswerStatus::Accepted)
                    })
                    .count();
                let gating = self.gate_segments(&row.principle).ok();
                let gated = gating.as_ref().is_none_or(|g| g.passed);
                let status = if !questions.is_empty() && accepted == questions.len() && gated {
                    PrincipleStatus::Assured
                } else if answered > 0 {
                    PrincipleStatus::InProgress
                } else {
                    PrincipleStatus::NotStarted
                };
                PrincipleRow {
                    principle: row.principle.clone(),
                    questions: questions.len(),
                    accepted,
                    segments_passed: gating
                        .map(|g| {
                            g.segments
                                .iter()
                                .filter(|s| s.pass)
                                .map(|s| s.segment.to_string())
                                .collect()
                        })
                        .unwrap_or_default(),
                    status,
                }
            })
            .collect();
        let verdict = match self.verdict(None) {
            Ok(v) => VerdictSummary {
                mitigated: v.mitigated,
                root: Some(v.root.to_string()),
                root_satisfaction: Some(v.root_satisfaction.value()),
                threshold: v.threshold.value(),
                unresolved: v.unresolved.iter().map(ToString::to_string).collect(),
                error: None,
            },
            Err(e) => VerdictSummary {
                mitigated: false,
                root: None,
                root_satisfaction: None,
                threshold: self.threshold().value(),
                unresolved: Vec::new(),
                error: Some(e.to_string()),
            },
        };
        let coverage_gaps = coverage.gaps().into_iter().map(|(p, s)| format!("{p}/{s}")).collect();
        let full = (kind == ReportKind::Full).then(|| self.full_section());
        Report {
            kind,
            case_id: self.id().to_string(),
            title: self.title().to_string(),
            status: self.status(),
            audit_len: self.audit().len(),
            principles,
            verdict,
            coverage_gaps,
            full,
        }
    }

    fn full_section(&self) -> FullSection {
        let questions = self
            .checklist()
            .questions()
            .map(|q| {
                let a = self.answer(q.id.as_str());
                QuestionEntry {
                    id: q.id.to_string(),
                    principle: q.principle.to_string(),
                    segment: q.segment.to_string(),
                    stage: q.stage.to_string(),
                    desideratum: q.desideratum.to_string(),
                    qtype: q.qtype.clone(),
                    requirement_links: q.requirement_links.iter().map(ToString::to_string).collect(),
                    text: q.text.clone(),
                    retired: q.retired,
                    status: a.map(|a| a.status),
                    version: a.map_or(0, |a| a.version),
                    answer: a.map(|a| a.content.clone()),
                    comments: a.map(|a| a.comments.clone()).unwrap_or_default(),
                }
            })
            .collect();
        let (trace_matrix, violations) = match self.build_trace_matrix() {
            Ok(m) => (Some(m), Vec::new()),
            Err(StpaError::IncompleteCase(v)) => (None, v),
            Err(_) => (None, Vec::new()),
        };
        FullSection {
            questions,
            trace_matrix,
            violations,
            regulator_reviews: self.regulator_reviews().to_vec(),
        }
    }
}

fn blockquote(out: &mut String, text: &str) {
    for line in text.split('\n') {
        let _ = writeln!(out, "> {line}");
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# {} report: {}\n",
            if self.kind == ReportKind::Full {
                "Full"
            } else {
                "Summary"
            },
            self.title
        );
        let _ = writeln!(out, "- Case: `{}`", self.case_id);
        let _ = writeln!(out, "- Status: {}", self.status);
        let _ = writeln!(out, "- Audit records: {}\n", self.audit_len);

        out.push_str(
            "## Principles\n\n| Principle | Questions | Accepted | Segments passed | Status |\n|---|---|---|---|---|\n",
        );
        for p in &self.principles {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                p.principle,
                p.questions,
                p.accepted,
                p.segments_passed.join(", "),
                p.status
            );
        }

        out.push_str("\n## Verdict\n\n");
        let v = &self.verdict;
        match &v.error {
            Some(e) => {
                let _ = writeln!(out, "Not evaluable: {e}");
            }
            None => {
                let _ = writeln!(
                    out,
                    "All ethical hazards are mitigated: **{}** (root `{}` at {}, threshold {})",
                    if v.mitigated { "yes" } else { "no" },
                    v.root.as_deref().unwrap_or("?"),
                    v.root_satisfaction.map_or("?".to_string(), |s| s.to_string()),
                    v.threshold
                );
                if !v.unresolved.is_empty() {
                    let _ = writeln!(out, "\nUnresolved: {}", v.unresolved.join(", "));
                }
            }
        }

        out.push_str("\n## Coverage gaps\n\n");
        if self.coverage_gaps.is_empty() {
            out.push_str("None.\n");
        } else {
            for g in &self.coverage_gaps {
                let _ = writeln!(out, "- {g}");
            }
        }

        if let Some(full) = &self.full {
            out.push_str("\n## Questions\n");
            for q in &full.questions {
                let _ = writeln!(out, "\n### {}{}\n", q.id, if q.retired { " (retired)" } else { "" });
                let _ = writeln!(
                    out,
                    "- {}/{} at {}, desideratum {}",
                    q.principle, q.segment, q.stage, q.desideratum
                );
                if !q.requirement_links.is_empty() {
                    let _ = writeln!(out, "- Requirements: {}", q.requirement_links.join(", "));
                }
                let _ = writeln!(
                    out,
                    "- Status: {} (version {})\n",
                    q.status.map_or("unanswered".to_string(), |s| s.to_string()),
                    q.version
                );
                blockquote(&mut out, &q.text);
                if let Some(a) = &q.answer {
                    out.push_str("\nAnswer:\n\n");
                    match (a, &q.qtype) {
                        (AnswerContent::Choice { index }, QuestionType::MultipleChoice { options }) => {
                            let _ = writeln!(out, "{}", options.get(*index).map_or("?", String::as_str));
                        }
                        (AnswerContent::Text { body }, _) => blockquote(&mut out, body),
                        (AnswerContent::MetricResult(r), _) => {
                            let value = match &r.outcome {
                                MetricOutcome::Value { value } => value.to_string(),
                                MetricOutcome::Undefined => "undefined".to_string(),
                                MetricOutcome::Failed { error } => format!("failed: {error}"),
                            };
                            let _ = writeln!(out, "{} = {value} (input sha256 `{}`)", r.metric, r.inputs_digest);
                        }
                        (other, _) => {
                            let _ = writeln!(out, "{other:?}");
                        }
                    }
                }
                for c in &q.comments {
                    let _ = writeln!(
                        out,
                        "\n{} {} ({}) on version {} at {}:\n",
                        c.author_role,
                        c.verdict,
                        c.author,
                        c.answer_version,
                        c.timestamp.to_rfc3339()
                    );
                    blockquote(&mut out, &c.text);
                }
            }
            out.push_str("\n## Traceability matrix\n\n");
            match &full.trace_matrix {
                Some(m) => out.push_str(&m.to_markdown()),
                None => {
                    out.push_str("Case is incomplete:\n\n");
                    for v in &full.violations {
                        let _ = writeln!(out, "- {} rule ({}): {}", v.element_id, v.rule, v.message);
                    }
                }
            }
            if !full.regulator_reviews.is_empty() {
                out.push_str("\n## Regulator decisions\n");
                for r in &full.regulator_reviews {
                    let _ = writeln!(
                        out,
                        "\n- #{} {} by {} at {}",
                        r.seq,
                        r.decision,
                        r.regulator,
                        r.timestamp.to_rfc3339()
                    );
                    if !r.flagged_questions.is_empty() {
                        let flagged: Vec<&str> = r.flagged_questions.iter().map(|q| q.as_str()).collect();
                        let _ = writeln!(out, "  flagged: {}", flagged.join(", "));
                    }
                    if !r.comment.is_empty() {
                        out.push('\n');
                        blockquote(&mut out, &r.comment);
                    }
                }
            }
        }
        out
    }
}
