use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::graph::{GoalGraph, Incoming};
use super::{Decomposition, GoalError, GoalLinkKind, Satisfaction};
use crate::model::GoalId;

pub type SatisfactionMap = BTreeMap<GoalId, Satisfaction>;

impl GoalGraph {
    /// A topological order (children before parents) with ties broken by id.
    pub fn topological_order(&self) -> Result<Vec<GoalId>, GoalError> {
        let mut indegree: BTreeMap<&GoalId, usize> = self.nodes().map(|n| (&n.id, 0)).collect();
        for l in self.evaluation_links() {
            *indegree.get_mut(&l.to).unwrap() += 1;
        }
        let mut ready: BTreeSet<&GoalId> = indegree.iter().filter(|(_, d)| **d == 0).map(|(id, _)| *id).collect();
        let mut order = Vec::with_capacity(indegree.len());
        while let Some(id) = ready.pop_first() {
            order.push(id.clone());
            for l in self.evaluation_links().filter(|l| &l.from == id) {
                let d = indegree.get_mut(&l.to).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(&l.to);
                }
            }
        }
        if order.len() < indegree.len() {
            let done: HashSet<&GoalId> = order.iter().collect();
            return Err(GoalError::CyclicGraph(self.node_on_cycle(&done)));
        }
        Ok(order)
    }

    fn evaluation_links(&self) -> impl Iterator<Item = &super::GoalLink> {
        self.links().filter(|l| l.kind != GoalLinkKind::Dependency)
    }

    /// Every unprocessed node has an unprocessed predecessor, so walking
    /// predecessors must eventually revisit a node that lies on a cycle.
    fn node_on_cycle(&self, done: &HashSet<&GoalId>) -> GoalId {
        let start = self.nodes().map(|n| &n.id).find(|id| !done.contains(id)).unwrap();
        let mut visited = HashSet::new();
        let mut current = start;
        while visited.insert(current) {
            current = self
                .evaluation_links()
                .filter(|l| &l.to == current && !done.contains(&l.from))
                .map(|l| &l.from)
                .min()
                .unwrap();
        }
        current.clone()
    }

    /// Computes the satisfaction of every node.
    pub fn propagate(&self) -> Result<SatisfactionMap, GoalError> {
        let order = self.topological_order_checked()?;
        self.evaluate(&order)
    }

    /// Evaluates along a caller-supplied order, which must list every node
    /// exactly once with children before parents.
    pub fn evaluate_in_order(&self, order: &[GoalId]) -> Result<SatisfactionMap, GoalError> {
        self.topological_order_checked()?;
        let position: HashMap<&GoalId, usize> = order.iter().enumerate().map(|(i, id)| (id, i)).collect();
        if order.len() != self.nodes().count() || position.len() != order.len() {
            return Err(GoalError::InvalidOrder("must list every node exactly once".into()));
        }
        for id in order {
            if self.node(id.as_str()).is_none() {
                return Err(GoalError::UnknownNode(id.to_string()));
            }
        }
        for l in self.evaluation_links() {
            if position[&l.from] > position[&l.to] {
                return Err(GoalError::InvalidOrder(format!(
                    "`{}` comes after its parent `{}`",
                    l.from, l.to
                )));
            }
        }
        self.evaluate(order)
    }

    fn topological_order_checked(&self) -> Result<Vec<GoalId>, GoalError> {
        for n in self.nodes() {
            self.incoming_group(&n.id)?;
        }
        let order = self.topological_order()?;
        if let Some(leaf) = self.leaves().find(|n| n.satisfaction.is_none()) {
            return Err(GoalError::UnassignedLeaf(leaf.id.clone()));
        }
        Ok(order)
    }

    fn evaluate(&self, order: &[GoalId]) -> Result<SatisfactionMap, GoalError> {
        let mut values = SatisfactionMap::new();
        for id in order {
            let value = match self.incoming_group(id)? {
                Incoming::Leaf => self
                    .node(id.as_str())
                    .and_then(|n| n.satisfaction)
                    .ok_or_else(|| GoalError::UnassignedLeaf(id.clone()))?,
                Incoming::Decomposition(d) => {
                    let children = self.incoming(id.as_str()).map(|l| values[&l.from]);
                    match d {
                        Decomposition::And => children.min(),
                        Decomposition::Or => children.max(),
                    }
                    .expect("decomposition node has children")
                }
                Incoming::Contribution => {
                    let total: i64 = self
                        .incoming(id.as_str())
                        .map(|l| match l.kind {
                            GoalLinkKind::Contribution(c) => i64::from(values[&l.from].value()) * c.weight(),
                            _ => unreachable!("group is contribution-only"),
                        })
                        .sum();
                    Satisfaction::clamped(total / 100)
                }
            };
            values.insert(id.clone(), value);
        }
        Ok(values)
    }
}
