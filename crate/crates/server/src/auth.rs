//! Bearer tokens mapped to a user name and stakeholder role.
//!
//! ```toml
//! [[token]]
//! token = "s3cret-supplier"
//! user = "sam"
//! role = "ai_supplier"
//! ```

use std::collections::HashMap;
use std::path::Path;

use elens_core::model::{Actor, StakeholderRole};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TokenFileError {
    #[error("cannot read token file: {0}")]
    Read(#[from] std::io::Error),
    #[error("invalid token file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("token for `{0}` is empty")]
    Empty(String),
    #[error("token for `{0}` is listed twice")]
    Duplicate(String),
}

#[derive(Debug, Deserialize)]
struct TokenFile {
    #[serde(default)]
    token: Vec<TokenEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct TokenEntry {
    token: String,
    user: String,
    role: StakeholderRole,
}

#[derive(Debug, Clone, Default)]
pub struct TokenTable {
    by_token: HashMap<String, Actor>,
}

impl TokenTable {
    pub fn from_toml(text: &str) -> Result<Self, TokenFileError> {
        let file: TokenFile = toml::from_str(text)?;
        let mut by_token = HashMap::new();
        for e in file.token {
            if e.token.is_empty() {
                return Err(TokenFileError::Empty(e.user));
            }
            if by_token.insert(e.token, Actor::new(e.user.clone(), e.role)).is_some() {
                return Err(TokenFileError::Duplicate(e.user));
            }
        }
        Ok(Self { by_token })
    }

    pub fn load(path: &Path) -> Result<Self, TokenFileError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn insert(&mut self, token: impl Into<String>, actor: Actor) {
        self.by_token.insert(token.into(), actor);
    }

    pub fn lookup(&self, token: &str) -> Option<&Actor> {
        self.by_token.get(token)
    }
}

/// Who a request acts as when it carries no token.
pub fn anonymous() -> Actor {
    Actor::new("anonymous", StakeholderRole::Visitor)
}

/// Roles limited to the public summary of certified cases.
pub fn is_public_role(role: StakeholderRole) -> bool {
    matches!(role, StakeholderRole::Visitor | StakeholderRole::AiUser)
}

/// Roles allowed to upload new cases.
pub fn can_author(role: StakeholderRole) -> bool {
    matches!(
        role,
        StakeholderRole::AiSupplier | StakeholderRole::AiSupplierAdmin | StakeholderRole::SystemAdmin
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tokens() {
        let t = TokenTable::from_toml(
            "[[token]]\ntoken = \"a\"\nuser = \"sam\"\nrole = \"ai_supplier\"\n\n[[token]]\ntoken = \"b\"\nuser = \"rex\"\nrole = \"regulator\"\n",
        )
        .unwrap();
        assert_eq!(t.lookup("b").unwrap().role, StakeholderRole::Regulator);
        assert!(t.lookup("c").is_none());
    }

    #[test]
    fn rejects_bad_files() {
        assert!(TokenTable::from_toml("[[token]]\ntoken = \"a\"\nuser = \"x\"\nrole = \"wizard\"\n").is_err());
        let dup = "[[token]]\ntoken = \"a\"\nuser = \"x\"\nrole = \"visitor\"\n[[token]]\ntoken = \"a\"\nuser = \"y\"\nrole = \"visitor\"\n";
        assert!(matches!(TokenTable::from_toml(dup), Err(TokenFileError::Duplicate(_))));
    }
}
