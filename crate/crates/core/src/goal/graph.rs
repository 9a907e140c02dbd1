use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Decomposition, GoalError, GoalLink, GoalLinkKind, GoalNode, Satisfaction};
use crate::model::GoalId;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalGraph {
    nodes: BTreeMap<GoalId, GoalNode>,
    links: BTreeSet<GoalLink>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root: Option<GoalId>,
}

impl GoalGraph {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &GoalNode> {
        self.nodes.values()
    }

    pub fn node(&self, id: &str) -> Option<&GoalNode> {
        self.nodes.get(&GoalId::key(id))
    }

    pub fn links(&self) -> impl Iterator<Item = &GoalLink> {
        self.links.iter()
    }

    /// Decomposition and contribution links into `id`.
    pub fn incoming<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a GoalLink> + 'a {
        self.links
            .iter()
            .filter(move |l| l.to.as_str() == id && l.kind != GoalLinkKind::Dependency)
    }

    /// A leaf has no incoming decomposition or contribution links.
    pub fn is_leaf(&self, id: &str) -> bool {
        self.incoming(id).next().is_none()
    }

    pub fn leaves(&self) -> impl Iterator<Item = &GoalNode> {
        self.nodes.values().filter(|n| self.is_leaf(n.id.as_str()))
    }

    pub fn declared_root(&self) -> Option<&GoalId> {
        self.root.as_ref()
    }

    /// The declared root, or else the single node that feeds no parent.
    pub fn root(&self) -> Result<&GoalId, GoalError> {
        if let Some(root) = &self.root {
            return Ok(root);
        }
        let tops: Vec<&GoalId> = self
            .nodes
            .keys()
            .filter(|id| {
                !self
                    .links
                    .iter()
                    .any(|l| &l.from == *id && l.kind != GoalLinkKind::Dependency)
            })
            .collect();
        match tops.as_slice() {
            [] => Err(GoalError::NoRoot),
            [one] => Ok(one),
            many => Err(GoalError::AmbiguousRoot(
                many.iter().map(|id| id.as_str()).collect::<Vec<_>>().join(", "),
            )),
        }
    }

    pub fn set_root(&mut self, id: &str) -> Result<(), GoalError> {
        let node = self
            .nodes
            .get(&GoalId::key(id))
            .ok_or_else(|| GoalError::UnknownNode(id.to_string()))?;
        self.root = Some(node.id.clone());
        Ok(())
    }

    pub fn add_node(&mut self, node: GoalNode) -> Result<(), GoalError> {
        if self.nodes.contains_key(&node.id) {
            return Err(GoalError::DuplicateNode(node.id));
        }
        self.nodes.insert(node.id.clone(), node);
        Ok(())
    }

    /// Adds a link. AND and OR decomposition may not be mixed into one
    /// parent; mixing decomposition with contribution is reported by
    /// [`GoalGraph::propagate`].
    pub fn add_link(&mut self, link: GoalLink) -> Result<(), GoalError> {
        for end in [&link.from, &link.to] {
            if !self.nodes.contains_key(end) {
                return Err(GoalError::UnknownNode(end.to_string()));
            }
        }
        if link.from == link.to {
            return Err(GoalError::SelfLink(link.from));
        }
        if self.links.contains(&link) {
            return Err(GoalError::DuplicateLink {
                from: link.from,
                to: link.to,
                kind: link.kind,
            });
        }
        if let GoalLinkKind::Decomposition(d) = link.kind {
            let clash = self
                .incoming(link.to.as_str())
                .any(|l| matches!(l.kind, GoalLinkKind::Decomposition(other) if other != d));
            if clash {
                return Err(GoalError::MixedDecomposition(link.to));
            }
        }
        self.links.insert(link);
        Ok(())
    }

    /// Sets the satisfaction of a leaf.
    pub fn assign_leaf(&mut self, id: &str, value: i32) -> Result<(), GoalError> {
        let satisfaction = Satisfaction::new(value)?;
        if !self.nodes.contains_key(&GoalId::key(id)) {
            return Err(GoalError::UnknownNode(id.to_string()));
        }
        if !self.is_leaf(id) {
            return Err(GoalError::NotALeaf(self.nodes[&GoalId::key(id)].id.clone()));
        }
        self.nodes.get_mut(&GoalId::key(id)).unwrap().satisfaction = Some(satisfaction);
        Ok(())
    }

    pub(crate) fn node_mut(&mut self, id: &str) -> Option<&mut GoalNode> {
        self.nodes.get_mut(&GoalId::key(id))
    }
}

/// Which group of links feeds a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Incoming {
    Leaf,
    Decomposition(Decomposition),
    Contribution,
}

impl GoalGraph {
    pub(crate) fn incoming_group(&self, id: &GoalId) -> Result<Incoming, GoalError> {
        let mut group = Incoming::Leaf;
        for link in self.incoming(id.as_str()) {
            let this = match link.kind {
                GoalLinkKind::Decomposition(d) => Incoming::Decomposition(d),
                GoalLinkKind::Contribution(_) => Incoming::Contribution,
                GoalLinkKind::Dependency => unreachable!("filtered by incoming()"),
            };
            group = match (group, this) {
                (Incoming::Leaf, t) => t,
                (a, b) if a == b => a,
                (Incoming::Decomposition(_), Incoming::Decomposition(_)) => {
                    return Err(GoalError::MixedDecomposition(id.clone()))
                }
                _ => return Err(GoalError::MixedIncoming(id.clone())),
            };
        }
        Ok(group)
    }
}
