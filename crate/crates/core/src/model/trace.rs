//! Traceability queries and the completeness rule set over the STPA chain.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::case::AssuranceCase;
use super::element::ElementKind;
use super::id::ElementId;
use super::ModelError;
use crate::keyword::keyword_enum;

/// Elements reached by a traversal, grouped by hop distance. Each element
/// appears once, at its shortest distance; hops are sorted by id.
pub type TraceChain = Vec<Vec<ElementId>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Towards losses.
    Backward,
    /// Towards requirements and evidence.
    Forward,
}

impl AssuranceCase {
    /// Everything `id` was derived from, hop by hop, ending at the losses.
    pub fn trace_backward(&self, id: &str) -> Result<TraceChain, ModelError> {
        self.trace(id, Direction::Backward)
    }

    /// Everything derived from `id`, hop by hop.
    pub fn trace_forward(&self, id: &str) -> Result<TraceChain, ModelError> {
        self.trace(id, Direction::Forward)
    }

    pub fn trace(&self, id: &str, direction: Direction) -> Result<TraceChain, ModelError> {
        let start = self
            .element(id)
            .ok_or_else(|| ModelError::UnknownElement(id.to_string()))?;
        let mut seen: HashSet<&ElementId> = HashSet::from([&start.id]);
        let mut frontier = vec![&start.id];
        let mut chain = Vec::new();
        while !frontier.is_empty() {
            let mut next = BTreeSet::new();
            for current in &frontier {
                let neighbours: Vec<&ElementId> = match direction {
                    Direction::Backward => self.links_from(current.as_str()).map(|l| &l.to).collect(),
                    Direction::Forward => self.links_to(current.as_str()).map(|l| &l.from).collect(),
                };
                for n in neighbours {
                    if seen.insert(n) {
                        next.insert(n);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next.iter().copied().collect();
            chain.push(next.into_iter().cloned().collect());
        }
        Ok(chain)
    }

    /// Every gap in the chain, sorted by element id then rule. An empty list
    /// means the case is complete.
    pub fn completeness_check(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for e in self.elements() {
            let has = |kinds: &[ElementKind]| {
                self.links_from(e.id.as_str())
                    .any(|l| self.element(l.to.as_str()).is_some_and(|t| kinds.contains(&t.kind)))
            };
            let rule = match e.kind {
                ElementKind::Hazard if !has(&[ElementKind::Loss]) => Some(CompletenessRule::HazardLinksLoss),
                ElementKind::Uaia if !has(&[ElementKind::Hazard]) => Some(CompletenessRule::UaiaLinksHazard),
                ElementKind::CausalScenario if !has(&[ElementKind::Uaia]) => Some(CompletenessRule::ScenarioLinksUaia),
                ElementKind::DesignRecommendation if !has(&[ElementKind::Constraint]) => {
                    Some(CompletenessRule::RecommendationLinksConstraint)
                }
                ElementKind::Constraint if !has(&[ElementKind::Hazard, ElementKind::Uaia]) => {
                    Some(CompletenessRule::ConstraintLinksHazardOrUaia)
                }
                _ => None,
            };
            if let Some(rule) = rule {
                out.push(Violation::new(&e.id, rule));
            }
            if e.kind == ElementKind::Requirement {
                if !has(&[ElementKind::DesignRecommendation]) {
                    out.push(Violation::new(&e.id, CompletenessRule::RequirementLinksRecommendation));
                }
                if e.verification.is_none() {
                    out.push(Violation::new(&e.id, CompletenessRule::RequirementHasVerification));
                }
            }
        }
        out.sort_by(|a, b| a.element_id.cmp(&b.element_id).then(a.rule.cmp(&b.rule)));
        out
    }
}

keyword_enum! {
    /// Completeness rules (a)–(g).
    pub enum CompletenessRule: "completeness rule" {
        HazardLinksLoss => "a",
        UaiaLinksHazard => "b",
        ScenarioLinksUaia => "c",
        RecommendationLinksConstraint => "d",
        RequirementLinksRecommendation => "e",
        RequirementHasVerification => "f",
        ConstraintLinksHazardOrUaia => "g",
    }
}

impl CompletenessRule {
    pub fn describe(self) -> &'static str {
        match self {
            CompletenessRule::HazardLinksLoss => "hazard does not link any loss",
            CompletenessRule::UaiaLinksHazard => "UAIA does not link any hazard",
            CompletenessRule::ScenarioLinksUaia => "causal scenario does not link any UAIA",
            CompletenessRule::RecommendationLinksConstraint => "design recommendation does not link any constraint",
            CompletenessRule::RequirementLinksRecommendation => "requirement does not link any design recommendation",
            CompletenessRule::RequirementHasVerification => "requirement has no verification method",
            CompletenessRule::ConstraintLinksHazardOrUaia => "constraint links neither a hazard nor a UAIA",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub element_id: ElementId,
    pub rule: CompletenessRule,
    pub message: String,
}

impl Violation {
    fn new(id: &ElementId, rule: CompletenessRule) -> Self {
        Self {
            element_id: id.clone(),
            rule,
            message: format!("{id}: {}", rule.describe()),
        }
    }
}
