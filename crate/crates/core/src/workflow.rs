//! Supplier → validator → regulator feedback loop: answer status machine,
//! derived case status and the audit trail.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checklist::Answer;
use crate::keyword::keyword_enum;
use crate::model::{Actor, AssuranceCase, AuditRecord, ElementId, Entry, QuestionId, StakeholderRole};

keyword_enum! {
    pub enum AnswerStatus: "answer status" {
        Draft => "draft",
        Submitted => "submitted",
        ChangesRequested => "changes_requested",
        Accepted => "accepted",
    }
}

keyword_enum! {
    pub enum AnswerEvent: "answer event" {
        Submit => "submit",
        Accept => "accept",
        RequestChanges => "request_changes",
        RegulatorFlag => "regulator_flag",
    }
}

impl AnswerStatus {
    /// The answer status machine. Accepted answers reopen only through a
    /// regulator flag.
    pub fn apply(self, event: AnswerEvent) -> Result<AnswerStatus, WorkflowError> {
        use AnswerEvent as E;
        use AnswerStatus as S;
        match (self, event) {
            (S::Draft | S::ChangesRequested, E::Submit) => Ok(S::Submitted),
            (S::Submitted, E::Accept) => Ok(S::Accepted),
            (S::Submitted, E::RequestChanges) => Ok(S::ChangesRequested),
            (S::Accepted, E::RegulatorFlag) => Ok(S::ChangesRequested),
            (from, event) => Err(WorkflowError::IllegalTransition {
                from: from.to_string(),
                event: event.to_string(),
            }),
        }
    }

    /// Whether any event moves `self` to `to`.
    pub fn can_reach(self, to: AnswerStatus) -> bool {
        AnswerEvent::ALL.iter().any(|&e| self.apply(e) == Ok(to))
    }
}

keyword_enum! {
    pub enum CaseStatus: "case status" {
        Drafting => "drafting",
        UnderValidation => "under_validation",
        ValidatorApproved => "validator_approved",
        RegulatorReview => "regulator_review",
        RegulatorFlagged => "regulator_flagged",
        Certified => "certified",
    }
}

keyword_enum! {
    pub enum ReviewVerdict: "review verdict" {
        Accept => "accept",
        RequestChanges => "request_changes",
    }
}

keyword_enum! {
    pub enum RegulatorDecision: "regulator decision" {
        Approve => "approve",
        Flag => "flag",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewComment {
    pub author: String,
    pub author_role: StakeholderRole,
    pub verdict: ReviewVerdict,
    pub text: String,
    pub timestamp: DateTime<Utc>,
    /// The submission this comment judges.
    pub answer_version: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegulatorRecord {
    /// Audit sequence number of the decision.
    pub seq: u64,
    pub regulator: String,
    pub decision: RegulatorDecision,
    #[serde(default)]
    pub flagged_questions: Vec<QuestionId>,
    pub comment: String,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorkflowError {
    #[error("role {role} may not {action}")]
    Forbidden {
        role: StakeholderRole,
        action: &'static str,
    },
    #[error("cannot {event} from {from}")]
    IllegalTransition { from: String, event: String },
    #[error("unknown question `{0}`")]
    UnknownQuestion(String),
    #[error("question `{0}` is retired")]
    Retired(QuestionId),
    #[error("question `{0}` has no answer")]
    NoAnswer(QuestionId),
    #[error("question `{0}` links no requirement and cannot be accepted")]
    UnlinkedQuestion(QuestionId),
    #[error("a change request needs a comment")]
    MissingComment,
    #[error("a flag decision needs at least one flagged question")]
    EmptyFlagList,
}

fn require(actor: &Actor, role: StakeholderRole, action: &'static str) -> Result<(), WorkflowError> {
    if actor.role == role {
        Ok(())
    } else {
        Err(WorkflowError::Forbidden {
            role: actor.role,
            action,
        })
    }
}

impl AssuranceCase {
    fn answer_for_event(&self, question_id: &str) -> Result<&Answer, WorkflowError> {
        let q = self
            .checklist()
            .question(question_id)
            .ok_or_else(|| WorkflowError::UnknownQuestion(question_id.to_string()))?;
        if q.retired {
            return Err(WorkflowError::Retired(q.id.clone()));
        }
        self.answer(question_id)
            .ok_or_else(|| WorkflowError::NoAnswer(q.id.clone()))
    }

    fn next_seq(&self) -> u64 {
        self.audit().len() as u64 + 1
    }

    pub fn submit_answer(&mut self, question_id: &str, actor: &Actor, at: DateTime<Utc>) -> Result<(), WorkflowError> {
        require(actor, StakeholderRole::AiSupplier, "submit answers")?;
        let answer = self.answer_for_event(question_id)?;
        let prior = answer.status;
        let status = prior.apply(AnswerEvent::Submit)?;
        let qid = answer.question_id.clone();
        let seq = self.next_seq();
        let a = self.answers_mut().get_mut(&qid).unwrap();
        a.status = status;
        a.version += 1;
        a.updated_seq = seq;
        self.record(actor, at, Entry::new("submit", &qid).states(Some(prior), status));
        Ok(())
    }

    /// Validator verdict on the current submission.
    pub fn review_answer(
        &mut self,
        question_id: &str,
        verdict: ReviewVerdict,
        text: impl Into<String>,
        actor: &Actor,
        at: DateTime<Utc>,
    ) -> Result<(), WorkflowError> {
        require(actor, StakeholderRole::EthicsValidator, "review answers")?;
        let text = text.into();
        let answer = self.answer_for_event(question_id)?;
        let prior = answer.status;
        let event = match verdict {
            ReviewVerdict::Accept => AnswerEvent::Accept,
            ReviewVerdict::RequestChanges => AnswerEvent::RequestChanges,
        };
        let status = prior.apply(event)?;
        let qid = answer.question_id.clone();
        if verdict == ReviewVerdict::Accept
            && self
                .checklist()
                .question(question_id)
                .unwrap()
                .requirement_links
                .is_empty()
        {
            return Err(WorkflowError::UnlinkedQuestion(qid));
        }
        if verdict == ReviewVerdict::RequestChanges && text.trim().is_empty() {
            return Err(WorkflowError::MissingComment);
        }
        let seq = self.next_seq();
        let a = self.answers_mut().get_mut(&qid).unwrap();
        a.status = status;
        a.updated_seq = seq;
        let answer_version = a.version;
        a.comments.push(ReviewComment {
            author: actor.user.clone(),
            author_role: actor.role,
            verdict,
            text,
            timestamp: at,
            answer_version,
        });
        self.record(actor, at, Entry::new("review", &qid).states(Some(prior), status));
        Ok(())
    }

    /// Approve certifies a case under regulator review. Flag reopens the
    /// listed accepted answers; it is also allowed on a certified case.
    pub fn regulator_review(
        &mut self,
        decision: RegulatorDecision,
        flagged: &[QuestionId],
        comment: impl Into<String>,
        actor: &Actor,
        at: DateTime<Utc>,
    ) -> Result<(), WorkflowError> {
        require(actor, StakeholderRole::Regulator, "record regulator decisions")?;
        let comment = comment.into();
        let prior = self.status();
        let allowed = match decision {
            RegulatorDecision::Approve => prior == CaseStatus::RegulatorReview,
            RegulatorDecision::Flag => matches!(prior, CaseStatus::RegulatorReview | CaseStatus::Certified),
        };
        if !allowed {
            return Err(WorkflowError::IllegalTransition {
                from: prior.to_string(),
                event: decision.to_string(),
            });
        }
        let mut flagged: Vec<QuestionId> = match decision {
            RegulatorDecision::Approve => Vec::new(),
            RegulatorDecision::Flag => flagged.to_vec(),
        };
        flagged.sort();
        flagged.dedup();
        if decision == RegulatorDecision::Flag && flagged.is_empty() {
            return Err(WorkflowError::EmptyFlagList);
        }
        for q in &flagged {
            self.answer_for_event(q.as_str())?
                .status
                .apply(AnswerEvent::RegulatorFlag)?;
        }
        let seq = self.next_seq();
        for q in &flagged {
            let a = self.answers_mut().get_mut(q).unwrap();
            a.status = AnswerStatus::ChangesRequested;
            a.updated_seq = seq;
            let answer_version = a.version;
            a.comments.push(ReviewComment {
                author: actor.user.clone(),
                author_role: actor.role,
                verdict: ReviewVerdict::RequestChanges,
                text: comment.clone(),
                timestamp: at,
                answer_version,
            });
        }
        self.regulator_reviews_mut().push(RegulatorRecord {
            seq,
            regulator: actor.user.clone(),
            decision,
            flagged_questions: flagged,
            comment,
            timestamp: at,
        });
        let new = self.status();
        let target = self.id().to_string();
        self.record(
            actor,
            at,
            Entry::new(format!("regulator_{decision}"), target).states(Some(prior), new),
        );
        Ok(())
    }

    /// Case status, derived from answer statuses and regulator records.
    pub fn status(&self) -> CaseStatus {
        let active: Vec<Option<&Answer>> = self.checklist().active().map(|q| self.answer(q.id.as_str())).collect();
        let last_write = active.iter().flatten().map(|a| a.updated_seq).max().unwrap_or(0);
        let last_decision = self.regulator_reviews().last();
        let all_accepted = !active.is_empty()
            && active
                .iter()
                .all(|a| a.is_some_and(|a| a.status == AnswerStatus::Accepted));
        if all_accepted {
            return match last_decision {
                Some(r) if r.decision == RegulatorDecision::Approve && r.seq > last_write => CaseStatus::Certified,
                _ => CaseStatus::RegulatorReview,
            };
        }
        if let Some(r) = last_decision {
            if r.decision == RegulatorDecision::Flag && r.seq >= last_write {
                return CaseStatus::RegulatorFlagged;
            }
        }
        if active.iter().flatten().any(|a| a.status == AnswerStatus::Submitted) {
            CaseStatus::UnderValidation
        } else {
            CaseStatus::Drafting
        }
    }

    /// A requirement is accepted when at least one active question links it
    /// and every such question has an accepted answer.
    pub fn requirement_accepted(&self, requirement: &ElementId) -> bool {
        let mut linked = self
            .checklist()
            .active()
            .filter(|q| q.requirement_links.contains(requirement))
            .peekable();
        linked.peek().is_some()
            && linked.all(|q| {
                self.answer(q.id.as_str())
                    .is_some_and(|a| a.status == AnswerStatus::Accepted)
            })
    }

    /// Audit records in sequence order, optionally restricted to one target.
    pub fn audit_trail(&self, target: Option<&str>) -> Vec<&AuditRecord> {
        self.audit()
            .iter()
            .filter(|r| target.is_none_or(|t| r.target == t))
            .collect()
    }
}
