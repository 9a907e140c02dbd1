use serde::{Deserialize, Serialize};

use super::propagate::SatisfactionMap;
use super::{GoalError, GoalGraph, Satisfaction};
use chrono::{DateTime, Utc};

use crate::model::{Actor, AssuranceCase, CaseElement, ElementKind, Entry, GoalId, Ident};

/// Outcome of the "all ethical hazards are mitigated" claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub mitigated: bool,
    pub root: GoalId,
    pub root_satisfaction: Satisfaction,
    pub threshold: Satisfaction,
    /// Hazard-mitigation nodes below the threshold.
    pub unresolved: Vec<GoalId>,
    pub satisfaction: SatisfactionMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentGate {
    pub segment: Ident,
    pub pass: bool,
}

/// Sequential gating of one principle's segments. Evaluation stops at the
/// first failing segment, so `segments` may be shorter than the principle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentGating {
    pub principle: Ident,
    pub segments: Vec<SegmentGate>,
    pub passed: bool,
}

impl AssuranceCase {
    /// Sets a leaf's satisfaction by hand. Requirement-bound leaves are
    /// overridden by answer acceptance when the graph is evaluated.
    pub fn assign_goal_leaf(
        &mut self,
        id: &str,
        value: i32,
        actor: &Actor,
        at: DateTime<Utc>,
    ) -> Result<(), GoalError> {
        let prior = self.goal_graph().node(id).and_then(|n| n.satisfaction);
        self.goal_graph_mut().assign_leaf(id, value)?;
        let entry = Entry::new("assign_goal_leaf", id).states(prior.map(|p| p.to_string()), value);
        self.record(actor, at, entry);
        Ok(())
    }

    /// The goal graph with every requirement-bound leaf set to 100 when the
    /// requirement is accepted and 0 otherwise.
    pub fn bound_goal_graph(&self) -> GoalGraph {
        let mut graph = self.goal_graph().clone();
        let bound: Vec<(GoalId, bool)> = graph
            .leaves()
            .filter_map(|n| {
                let el = self.element(n.bound_element.as_ref()?.as_str())?;
                (el.kind == ElementKind::Requirement).then(|| (n.id.clone(), self.requirement_accepted(&el.id)))
            })
            .collect();
        for (id, accepted) in bound {
            let value = if accepted {
                Satisfaction::MAX
            } else {
                Satisfaction::NONE
            };
            graph.node_mut(id.as_str()).unwrap().satisfaction = Some(value);
        }
        graph
    }

    /// Goal nodes that claim mitigation of a hazard or UAIA, with that element.
    pub fn mitigation_nodes(&self) -> Vec<(&GoalId, &CaseElement)> {
        self.goal_graph()
            .nodes()
            .filter_map(|n| {
                let el = self.element(n.bound_element.as_ref()?.as_str())?;
                matches!(el.kind, ElementKind::Hazard | ElementKind::Uaia).then_some((&n.id, el))
            })
            .collect()
    }

    /// Propagates the bound goal graph and judges the mitigation claim.
    /// `threshold` defaults to the case threshold.
    pub fn verdict(&self, threshold: Option<Satisfaction>) -> Result<Verdict, GoalError> {
        let threshold = threshold.unwrap_or(self.threshold());
        let graph = self.bound_goal_graph();
        let values = graph.propagate()?;
        let root = graph.root()?.clone();
        let root_satisfaction = values[&root];
        let unresolved: Vec<GoalId> = self
            .mitigation_nodes()
            .into_iter()
            .filter(|(id, _)| values[*id] < threshold)
            .map(|(id, _)| id.clone())
            .collect();
        Ok(Verdict {
            mitigated: root_satisfaction >= threshold && unresolved.is_empty(),
            root,
            root_satisfaction,
            threshold,
            unresolved,
            satisfaction: values,
        })
    }

    /// Checks a principle's segments in declared order. A segment passes when
    /// every mitigation node bound to an element of that segment reaches the
    /// case threshold.
    pub fn gate_segments(&self, principle: &str) -> Result<SegmentGating, GoalError> {
        let p = self
            .principle(principle)
            .ok_or_else(|| GoalError::UnknownPrinciple(principle.to_string()))?;
        if p.segments.is_empty() {
            return Err(GoalError::EmptyPrinciple(principle.to_string()));
        }
        let values = self.bound_goal_graph().propagate()?;
        let mitigation = self.mitigation_nodes();
        let mut segments = Vec::new();
        for segment in &p.segments {
            let pass = mitigation
                .iter()
                .filter(|(_, el)| el.principle == p.id && &el.segment == segment)
                .all(|(id, _)| values[*id] >= self.threshold());
            segments.push(SegmentGate {
                segment: segment.clone(),
                pass,
            });
            if !pass {
                break;
            }
        }
        let passed = segments.len() == p.segments.len() && segments.iter().all(|s| s.pass);
        Ok(SegmentGating {
            principle: p.id.clone(),
            segments,
            passed,
        })
    }
}
