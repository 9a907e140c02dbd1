use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::element::StakeholderRole;

/// Who performs a mutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Actor {
    pub user: String,
    pub role: StakeholderRole,
}

impl Actor {
    pub fn new(user: impl Into<String>, role: StakeholderRole) -> Self {
        Self {
            user: user.into(),
            role,
        }
    }
}

/// One entry of a case's append-only audit trail.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub seq: u64,
    pub actor: String,
    pub role: StakeholderRole,
    pub action: String,
    pub target: String,
    pub timestamp: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior_state: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub new_state: Option<String>,
}

/// Builder for the record a mutation is about to append.
#[derive(Debug, Clone)]
pub(crate) struct Entry {
    pub action: String,
    pub target: String,
    pub prior_state: Option<String>,
    pub new_state: Option<String>,
}

impl Entry {
    pub fn new(action: impl Into<String>, target: impl ToString) -> Self {
        Self {
            action: action.into(),
            target: target.to_string(),
            prior_state: None,
            new_state: None,
        }
    }

    pub fn states(mut self, prior: Option<impl ToString>, new: impl ToString) -> Self {
        self.prior_state = prior.map(|p| p.to_string());
        self.new_state = Some(new.to_string());
        self
    }
}
