//! GRL-style goal graph: intentional elements, decomposition / contribution /
//! dependency links, numeric satisfaction propagation, the hazard-mitigation
//! verdict and sequential segment gating.
//!
//! Propagation rules, evaluated bottom-up over the decomposition and
//! contribution links (dependency links are structural only):
//!
//! * AND decomposition: minimum of the children.
//! * OR decomposition: maximum of the children.
//! * contributions: `Σ child × weight`, divided by 100 with truncation toward
//!   zero, then clamped to `[-100, 100]`. Weights: make 100, help 50,
//!   some_positive 25, unknown 0, some_negative −25, hurt −50, break −100.
//!
//! A node receives either decomposition or contribution links, never both.

mod dot;
mod graph;
mod propagate;
mod verdict;

pub use graph::GoalGraph;
pub use propagate::SatisfactionMap;
pub use verdict::{SegmentGate, SegmentGating, Verdict};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::keyword::keyword_enum;
use crate::model::{ElementId, GoalId, StakeholderRole};

/// Satisfaction level in `[-100, 100]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct Satisfaction(i32);

impl Satisfaction {
    pub const MIN: Satisfaction = Satisfaction(-100);
    pub const NONE: Satisfaction = Satisfaction(0);
    pub const MAX: Satisfaction = Satisfaction(100);

    pub fn new(value: i32) -> Result<Self, GoalError> {
        if (-100..=100).contains(&value) {
            Ok(Self(value))
        } else {
            Err(GoalError::OutOfRange(value))
        }
    }

    pub(crate) fn clamped(value: i64) -> Self {
        Self(value.clamp(-100, 100) as i32)
    }

    pub fn value(self) -> i32 {
        self.0
    }
}

impl TryFrom<i32> for Satisfaction {
    type Error = GoalError;

    fn try_from(value: i32) -> Result<Self, GoalError> {
        Satisfaction::new(value)
    }
}

impl From<Satisfaction> for i32 {
    fn from(s: Satisfaction) -> i32 {
        s.0
    }
}

impl fmt::Display for Satisfaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

keyword_enum! {
    pub enum GoalKind: "goal kind" {
        Goal => "goal",
        Softgoal => "softgoal",
        Task => "task",
        Resource => "resource",
        Belief => "belief",
    }
}

keyword_enum! {
    pub enum Decomposition: "decomposition" {
        And => "and",
        Or => "or",
    }
}

keyword_enum! {
    pub enum Contribution: "contribution" {
        Make => "make",
        Help => "help",
        SomePositive => "some_positive",
        Unknown => "unknown",
        SomeNegative => "some_negative",
        Hurt => "hurt",
        Break => "break",
    }
}

impl Contribution {
    pub fn weight(self) -> i64 {
        match self {
            Contribution::Make => 100,
            Contribution::Help => 50,
            Contribution::SomePositive => 25,
            Contribution::Unknown => 0,
            Contribution::SomeNegative => -25,
            Contribution::Hurt => -50,
            Contribution::Break => -100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalLinkKind {
    Decomposition(Decomposition),
    Contribution(Contribution),
    Dependency,
}

impl fmt::Display for GoalLinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GoalLinkKind::Decomposition(d) => write!(f, "{d}"),
            GoalLinkKind::Contribution(c) => write!(f, "{c}"),
            GoalLinkKind::Dependency => f.write_str("depends"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalNode {
    pub id: GoalId,
    pub kind: GoalKind,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actor: Option<StakeholderRole>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub satisfaction: Option<Satisfaction>,
    /// Case element this node stands for: a requirement whose acceptance
    /// drives a leaf, or a hazard / UAIA whose mitigation the node claims.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_element: Option<ElementId>,
}

impl GoalNode {
    pub fn new(id: GoalId, kind: GoalKind, label: impl Into<String>) -> Self {
        Self {
            id,
            kind,
            label: label.into(),
            actor: None,
            satisfaction: None,
            bound_element: None,
        }
    }

    pub fn bound_to(mut self, element: ElementId) -> Self {
        self.bound_element = Some(element);
        self
    }

    pub fn with_actor(mut self, actor: StakeholderRole) -> Self {
        self.actor = Some(actor);
        self
    }

    pub fn with_satisfaction(mut self, s: Satisfaction) -> Self {
        self.satisfaction = Some(s);
        self
    }
}

/// A link from a child (`from`) into its parent (`to`). For dependencies,
/// `from` is the depender and `to` the dependee.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GoalLink {
    pub from: GoalId,
    pub to: GoalId,
    pub kind: GoalLinkKind,
}

impl GoalLink {
    pub fn new(from: GoalId, to: GoalId, kind: GoalLinkKind) -> Self {
        Self { from, to, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GoalError {
    #[error("satisfaction {0} is outside [-100, 100]")]
    OutOfRange(i32),
    #[error("unknown goal node `{0}`")]
    UnknownNode(String),
    #[error("duplicate goal node `{0}`")]
    DuplicateNode(GoalId),
    #[error("goal link {from}->{to} ({kind}) already exists")]
    DuplicateLink {
        from: GoalId,
        to: GoalId,
        kind: GoalLinkKind,
    },
    #[error("goal node `{0}` cannot link to itself")]
    SelfLink(GoalId),
    #[error("`{0}` has incoming links and is not a leaf")]
    NotALeaf(GoalId),
    #[error("leaf `{0}` has no satisfaction assigned")]
    UnassignedLeaf(GoalId),
    #[error("goal graph has a cycle through `{0}`")]
    CyclicGraph(GoalId),
    #[error("`{0}` receives both decomposition and contribution links")]
    MixedIncoming(GoalId),
    #[error("`{0}` mixes AND and OR decomposition")]
    MixedDecomposition(GoalId),
    #[error("evaluation order is not a topological order of the graph: {0}")]
    InvalidOrder(String),
    #[error("goal graph has no root")]
    NoRoot,
    #[error("goal graph has several top-level nodes ({0}); declare a root")]
    AmbiguousRoot(String),
    #[error("unknown principle `{0}`")]
    UnknownPrinciple(String),
    #[error("principle `{0}` declares no segments")]
    EmptyPrinciple(String),
}
