//! Hierarchical checklist instrument: principle → segment → question, tagged
//! by lifecycle stage and desideratum, with coverage reporting.

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assessors::{MetricKind, MetricResult};
use crate::keyword::keyword_enum;
use crate::model::{
    Actor, AssuranceCase, ElementId, ElementKind, Entry, Ident, LifecycleStage, QuestionId, StakeholderRole,
    MANDATORY_PRINCIPLES,
};
use crate::workflow::{AnswerStatus, ReviewComment};

keyword_enum! {
    pub enum Desideratum: "desideratum" {
        Relevant => "relevant",
        Complete => "complete",
        Balanced => "balanced",
        Accurate => "accurate",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum QuestionType {
    MultipleChoice { options: Vec<String> },
    ExtendedResponse,
    Algorithmic { metric: MetricKind },
}

impl QuestionType {
    pub fn label(&self) -> &'static str {
        match self {
            QuestionType::MultipleChoice { .. } => "multiple choice",
            QuestionType::ExtendedResponse => "extended response",
            QuestionType::Algorithmic { .. } => "algorithmic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub id: QuestionId,
    pub principle: Ident,
    pub segment: Ident,
    pub stage: LifecycleStage,
    pub desideratum: Desideratum,
    pub qtype: QuestionType,
    #[serde(default)]
    pub requirement_links: Vec<ElementId>,
    pub text: String,
    /// Retired questions stay on record but drop out of coverage and
    /// certification.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub retired: bool,
}

impl Question {
    pub fn is_active(&self) -> bool {
        !self.retired
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checklist {
    questions: BTreeMap<QuestionId, Question>,
}

impl Checklist {
    pub fn questions(&self) -> impl Iterator<Item = &Question> {
        self.questions.values()
    }

    pub fn active(&self) -> impl Iterator<Item = &Question> {
        self.questions.values().filter(|q| q.is_active())
    }

    pub fn question(&self, id: &str) -> Option<&Question> {
        self.questions.get(&QuestionId::key(id))
    }

    pub fn len(&self) -> usize {
        self.questions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.questions.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AnswerContent {
    Choice { index: usize },
    Text { body: String },
    MetricResult(MetricResult),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Answer {
    pub question_id: QuestionId,
    pub content: AnswerContent,
    pub status: AnswerStatus,
    /// Number of submissions so far.
    pub version: u32,
    #[serde(default)]
    pub comments: Vec<ReviewComment>,
    /// Audit sequence number of the last write to this answer.
    pub updated_seq: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChecklistError {
    #[error("duplicate question id `{0}`")]
    DuplicateId(QuestionId),
    #[error("unknown principle `{0}`")]
    UnknownPrinciple(String),
    #[error("principle `{principle}` has no segment `{segment}`")]
    UnknownSegment { principle: String, segment: String },
    #[error("`{0}` is not a requirement of this case")]
    UnknownRequirement(String),
    #[error("invalid question `{id}`: {reason}")]
    InvalidQuestion { id: QuestionId, reason: String },
    #[error("unknown question `{0}`")]
    UnknownQuestion(String),
    #[error("question `{0}` is retired")]
    Retired(QuestionId),
    #[error("question `{0}` already has an answer and can only be retired")]
    Answered(QuestionId),
    #[error("role {role} may not {action}")]
    Forbidden {
        role: StakeholderRole,
        action: &'static str,
    },
    #[error("answer does not fit question `{id}`: {reason}")]
    TypeMismatch { id: QuestionId, reason: String },
    #[error("answer to `{id}` is {status} and cannot be edited")]
    AnswerLocked { id: QuestionId, status: AnswerStatus },
}

impl AssuranceCase {
    pub fn register_question(
        &mut self,
        mut question: Question,
        actor: &Actor,
        at: DateTime<Utc>,
    ) -> Result<(), ChecklistError> {
        if self.checklist().question(question.id.as_str()).is_some() {
            return Err(ChecklistError::DuplicateId(question.id));
        }
        let principle = self
            .principle(question.principle.as_str())
            .ok_or_else(|| ChecklistError::UnknownPrinciple(question.principle.to_string()))?;
        if !principle.has_segment(&question.segment) {
            return Err(ChecklistError::UnknownSegment {
                principle: question.principle.to_string(),
                segment: question.segment.to_string(),
            });
        }
        if question.text.trim().is_empty() {
            return Err(ChecklistError::InvalidQuestion {
                id: question.id,
                reason: "question text must not be empty".into(),
            });
        }
        if let QuestionType::MultipleChoice { options } = &question.qtype {
            let mut distinct: Vec<&str> = options.iter().map(|o| o.trim()).filter(|o| !o.is_empty()).collect();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() < 2 || distinct.len() != options.len() {
                return Err(ChecklistError::InvalidQuestion {
                    id: question.id,
                    reason: "multiple choice needs at least two distinct, non-empty options".into(),
                });
            }
        }
        for r in &question.requirement_links {
            match self.element(r.as_str()) {
                Some(e) if e.kind == ElementKind::Requirement => {}
                _ => return Err(ChecklistError::UnknownRequirement(r.to_string())),
            }
        }
        question.requirement_links.sort();
        question.requirement_links.dedup();
        let entry = Entry::new("register_question", &question.id);
        self.checklist_mut().questions.insert(question.id.clone(), question);
        self.record(actor, at, entry);
        Ok(())
    }

    /// Excludes a question from coverage and certification while keeping it
    /// and any answer on record.
    pub fn retire_question(&mut self, id: &str, actor: &Actor, at: DateTime<Utc>) -> Result<(), ChecklistError> {
        let q = self
            .checklist_mut()
            .questions
            .get_mut(&QuestionId::key(id))
            .ok_or_else(|| ChecklistError::UnknownQuestion(id.to_string()))?;
        if q.retired {
            return Err(ChecklistError::Retired(q.id.clone()));
        }
        q.retired = true;
        let entry = Entry::new("retire_question", &q.id).states(Some("active"), "retired");
        self.record(actor, at, entry);
        Ok(())
    }

    /// Deletes a question that has never been answered.
    pub fn remove_question(&mut self, id: &str, actor: &Actor, at: DateTime<Utc>) -> Result<(), ChecklistError> {
        let q = self
            .checklist()
            .question(id)
            .ok_or_else(|| ChecklistError::UnknownQuestion(id.to_string()))?;
        if self.answer(id).is_some() {
            return Err(ChecklistError::Answered(q.id.clone()));
        }
        let entry = Entry::new("remove_question", &q.id);
        self.checklist_mut().questions.remove(&QuestionId::key(id));
        self.record(actor, at, entry);
        Ok(())
    }

    /// Checks that `content` fits the question type.
    pub fn check_answer_content(&self, question: &Question, content: &AnswerContent) -> Result<(), ChecklistError> {
        let mismatch = |reason: String| ChecklistError::TypeMismatch {
            id: question.id.clone(),
            reason,
        };
        match (&question.qtype, content) {
            (QuestionType::MultipleChoice { options }, AnswerContent::Choice { index }) => {
                if *index >= options.len() {
                    return Err(mismatch(format!(
                        "choice {index} is out of range for {} options",
                        options.len()
                    )));
                }
            }
            (QuestionType::ExtendedResponse, AnswerContent::Text { body }) => {
                if body.trim().is_empty() {
                    return Err(mismatch("response text must not be empty".into()));
                }
            }
            (QuestionType::Algorithmic { metric }, AnswerContent::MetricResult(result)) => {
                if result.metric != *metric {
                    return Err(mismatch(format!("expected a {metric} result, got {}", result.metric)));
                }
            }
            (qtype, _) => return Err(mismatch(format!("{} question needs a matching answer", qtype.label()))),
        }
        Ok(())
    }

    /// Stores supplier content. New answers start as drafts; an answer under
    /// requested changes keeps that status until it is resubmitted.
    pub fn answer_question(
        &mut self,
        question_id: &str,
        content: AnswerContent,
        actor: &Actor,
        at: DateTime<Utc>,
    ) -> Result<(), ChecklistError> {
        if actor.role != StakeholderRole::AiSupplier {
            return Err(ChecklistError::Forbidden {
                role: actor.role,
                action: "answer questions",
            });
        }
        let question = self
            .checklist()
            .question(question_id)
            .ok_or_else(|| ChecklistError::UnknownQuestion(question_id.to_string()))?;
        if question.retired {
            return Err(ChecklistError::Retired(question.id.clone()));
        }
        self.check_answer_content(question, &content)?;
        let qid = question.id.clone();
        let seq = self.audit().len() as u64 + 1;
        let prior = self.answer(question_id).map(|a| a.status);
        let status = match prior {
            None | Some(AnswerStatus::Draft) => AnswerStatus::Draft,
            Some(AnswerStatus::ChangesRequested) => AnswerStatus::ChangesRequested,
            Some(status) => return Err(ChecklistError::AnswerLocked { id: qid, status }),
        };
        let answers = self.answers_mut();
        match answers.get_mut(&qid) {
            Some(a) => {
                a.content = content;
                a.updated_seq = seq;
            }
            None => {
                answers.insert(
                    qid.clone(),
                    Answer {
                        question_id: qid.clone(),
                        content,
                        status,
                        version: 0,
                        comments: Vec::new(),
                        updated_seq: seq,
                    },
                );
            }
        }
        self.record(actor, at, Entry::new("answer", &qid).states(prior, status));
        Ok(())
    }

    /// Question counts per principle and lifecycle stage. Rows cover every
    /// declared principle plus any mandatory principle not declared.
    pub fn coverage_report(&self) -> CoverageReport {
        let mut principles: Vec<String> = self.principles().iter().map(|p| p.id.to_string()).collect();
        for m in MANDATORY_PRINCIPLES {
            if !principles.iter().any(|p| p == m) {
                principles.push(m.to_string());
            }
        }
        let mut rows: Vec<CoverageRow> = principles
            .into_iter()
            .map(|principle| CoverageRow {
                principle,
                cells: LifecycleStage::ALL
                    .iter()
                    .map(|&stage| CoverageCell {
                        stage,
                        question_count: 0,
                        answered: 0,
                        accepted: 0,
                        gap: true,
                    })
                    .collect(),
            })
            .collect();
        for q in self.checklist().active() {
            let Some(row) = rows.iter_mut().find(|r| r.principle == q.principle.as_str()) else {
                continue;
            };
            let cell = &mut row.cells[q.stage as usize];
            cell.question_count += 1;
            cell.gap = false;
            if let Some(a) = self.answer(q.id.as_str()) {
                cell.answered += 1;
                if a.status == AnswerStatus::Accepted {
                    cell.accepted += 1;
                }
            }
        }
        let total_questions = self.checklist().active().count();
        CoverageReport { rows, total_questions }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageCell {
    pub stage: LifecycleStage,
    pub question_count: usize,
    pub answered: usize,
    pub accepted: usize,
    pub gap: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub principle: String,
    pub cells: Vec<CoverageCell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub rows: Vec<CoverageRow>,
    pub total_questions: usize,
}

impl CoverageReport {
    /// `(principle, stage)` pairs without any question.
    pub fn gaps(&self) -> Vec<(&str, LifecycleStage)> {
        self.rows
            .iter()
            .flat_map(|r| {
                r.cells
                    .iter()
                    .filter(|c| c.gap)
                    .map(move |c| (r.principle.as_str(), c.stage))
            })
            .collect()
    }

    pub fn row(&self, principle: &str) -> Option<&CoverageRow> {
        self.rows.iter().find(|r| r.principle == principle)
    }
}
