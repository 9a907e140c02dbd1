//! An independent model of the answer and case workflow, used to drive
//! random traces against the real implementation.

use std::collections::BTreeMap;

use elens_core::checklist::AnswerContent;
use elens_core::model::{Actor, AssuranceCase, QuestionId, StakeholderRole};
use elens_core::workflow::{AnswerStatus, CaseStatus, RegulatorDecision, ReviewVerdict};
use rand::Rng;

pub const SMALL_CASE: &str = r#"case small "Small"
principle transparency {
  segment explainability {
    loss L1 "l"
    hazard H1 links [L1] "h"
    constraint EC1 links [H1] "c"
    recommendation DR1 links [EC1] "d"
    requirement R1 links [DR1] verify demonstration "r"
  }
}
goalgraph {
  goal G0 "All ethical hazards are mitigated"
  softgoal M1 bound H1 "H1 mitigated"
  task T1 bound R1 "r"
  and G0 <- [M1]
  and M1 <- [T1]
}
checklist {
  question Q1 in transparency/explainability stage design desideratum complete extended links [R1] "a"
  question Q2 in transparency/explainability stage deployment desideratum relevant choice ["yes", "no"] links [R1] "b"
  question Q3 in transparency/explainability stage monitoring desideratum accurate extended links [R1] "c"
}
"#;

/// Independent model of what the workflow should allow.
#[derive(Default)]
pub struct Model {
    pub answers: BTreeMap<String, AnswerStatus>,
    pub approved: bool,
    pub flagged: bool,
}

impl Model {
    pub fn all_accepted(&self) -> bool {
        self.answers.len() == 3 && self.answers.values().all(|s| *s == AnswerStatus::Accepted)
    }

    pub fn status(&self) -> CaseStatus {
        if self.all_accepted() {
            if self.approved {
                CaseStatus::Certified
            } else {
                CaseStatus::RegulatorReview
            }
        } else if self.flagged {
            CaseStatus::RegulatorFlagged
        } else if self.answers.values().any(|s| *s == AnswerStatus::Submitted) {
            CaseStatus::UnderValidation
        } else {
            CaseStatus::Drafting
        }
    }

    pub fn wrote(&mut self) {
        self.approved = false;
        self.flagged = false;
    }
}

#[derive(Debug, Clone)]
pub enum Op {
    Answer(String),
    Submit(String),
    Accept(String),
    RequestChanges(String),
    Approve,
    Flag(Vec<String>),
}

pub fn content(q: &str) -> AnswerContent {
    if q == "Q2" {
        AnswerContent::Choice { index: 0 }
    } else {
        AnswerContent::Text {
            body: format!("answer to {q}"),
        }
    }
}

pub fn legal_ops(m: &Model, r: &mut impl Rng) -> Vec<Op> {
    let mut ops = Vec::new();
    for q in ["Q1", "Q2", "Q3"] {
        match m.answers.get(q) {
            None => ops.push(Op::Answer(q.into())),
            Some(AnswerStatus::Draft | AnswerStatus::ChangesRequested) => {
                ops.push(Op::Answer(q.into()));
                ops.push(Op::Submit(q.into()));
            }
            Some(AnswerStatus::Submitted) => {
                ops.push(Op::Accept(q.into()));
                ops.push(Op::RequestChanges(q.into()));
            }
            Some(AnswerStatus::Accepted) => {}
        }
    }
    if m.all_accepted() {
        if !m.approved {
            ops.push(Op::Approve);
        }
        let mut flagged: Vec<String> = ["Q1", "Q2", "Q3"]
            .iter()
            .filter(|_| r.random_bool(0.5))
            .map(|s| s.to_string())
            .collect();
        if flagged.is_empty() {
            flagged.push("Q2".into());
        }
        ops.push(Op::Flag(flagged));
    }
    ops
}

pub fn apply(case: &mut AssuranceCase, op: &Op, actor: &Actor, step: i64) -> bool {
    let at = super::at(step);
    match op {
        Op::Answer(q) => case.answer_question(q, content(q), actor, at).is_ok(),
        Op::Submit(q) => case.submit_answer(q, actor, at).is_ok(),
        Op::Accept(q) => case.review_answer(q, ReviewVerdict::Accept, "", actor, at).is_ok(),
        Op::RequestChanges(q) => case
            .review_answer(q, ReviewVerdict::RequestChanges, "please revise", actor, at)
            .is_ok(),
        Op::Approve => case
            .regulator_review(RegulatorDecision::Approve, &[], "ok", actor, at)
            .is_ok(),
        Op::Flag(qs) => {
            let ids: Vec<QuestionId> = qs.iter().map(|q| QuestionId::new(q.as_str()).unwrap()).collect();
            case.regulator_review(RegulatorDecision::Flag, &ids, "re-check", actor, at)
                .is_ok()
        }
    }
}

pub fn proper_actor(op: &Op) -> Actor {
    match op {
        Op::Answer(_) | Op::Submit(_) => super::supplier(),
        Op::Accept(_) | Op::RequestChanges(_) => super::validator(),
        Op::Approve | Op::Flag(_) => super::regulator(),
    }
}

pub fn advance(m: &mut Model, op: &Op) {
    match op {
        Op::Answer(q) => {
            let next = match m.answers.get(q) {
                Some(AnswerStatus::ChangesRequested) => AnswerStatus::ChangesRequested,
                _ => AnswerStatus::Draft,
            };
            m.answers.insert(q.clone(), next);
            m.wrote();
        }
        Op::Submit(q) => {
            m.answers.insert(q.clone(), AnswerStatus::Submitted);
            m.wrote();
        }
        Op::Accept(q) => {
            m.answers.insert(q.clone(), AnswerStatus::Accepted);
            m.wrote();
        }
        Op::RequestChanges(q) => {
            m.answers.insert(q.clone(), AnswerStatus::ChangesRequested);
            m.wrote();
        }
        Op::Approve => m.approved = true,
        Op::Flag(qs) => {
            for q in qs {
                m.answers.insert(q.clone(), AnswerStatus::ChangesRequested);
            }
            m.approved = false;
            m.flagged = true;
        }
    }
}

pub const ROLES: [StakeholderRole; 7] = [
    StakeholderRole::AiSupplier,
    StakeholderRole::AiSupplierAdmin,
    StakeholderRole::Regulator,
    StakeholderRole::SystemAdmin,
    StakeholderRole::EthicsValidator,
    StakeholderRole::AiUser,
    StakeholderRole::Visitor,
];
