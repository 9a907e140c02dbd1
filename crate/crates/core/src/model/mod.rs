//! Typed in-memory model of an assurance case: element catalog, trace-link
//! schema, traceability queries and the completeness rule set.

mod audit;
mod case;
mod element;
mod id;
mod link;
mod trace;

pub(crate) use audit::Entry;
pub use audit::{Actor, AuditRecord};
pub use case::{default_principles, AssuranceCase, CaseId, Principle, MANDATORY_PRINCIPLES, SCHEMA_VERSION};
pub use element::{
    ActionRef, CaseElement, ElementKind, GuideMode, LifecycleStage, StakeholderRole, VerificationMethod,
};
pub use id::{natural_cmp, ElementId, GoalId, Ident, InvalidId, QuestionId};
pub use link::{LinkKind, TraceLink};
pub use trace::{CompletenessRule, Direction, TraceChain, Violation};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("link endpoint `{0}` does not exist")]
    UnknownEndpoint(ElementId),
    #[error("{link} cannot connect {from_kind} `{from}` to {to_kind} `{to}`")]
    KindMismatch {
        link: LinkKind,
        from: ElementId,
        from_kind: ElementKind,
        to: ElementId,
        to_kind: ElementKind,
    },
    #[error("link {from}->{to} ({kind}) already exists")]
    DuplicateLink {
        from: ElementId,
        to: ElementId,
        kind: LinkKind,
    },
    #[error("link {from}->{to} ({kind}) does not exist")]
    UnknownLink {
        from: ElementId,
        to: ElementId,
        kind: LinkKind,
    },
    #[error("element `{0}` cannot link to itself")]
    SelfLink(ElementId),
    #[error("question links are derived from checklist questions and cannot be stored directly")]
    QuestionLinkNotStored,
    #[error("principle registry is closed once answers exist; cannot extend `{0}`")]
    RegistryClosed(Ident),
    #[error("audit sequence gap: expected {expected}, found {found}")]
    AuditGap { expected: u64, found: u64 },
}
