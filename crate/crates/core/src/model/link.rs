use serde::{Deserialize, Serialize};

use super::element::ElementKind;
use super::id::ElementId;
use crate::keyword::keyword_enum;

keyword_enum! {
    /// Trace-link kinds. Every link points from a downstream artifact to the
    /// upstream artifact it was derived from.
    pub enum LinkKind: "link kind" {
        HazardOfLoss => "hazard_of_loss",
        UaiaOfHazard => "uaia_of_hazard",
        ScenarioOfUaia => "scenario_of_uaia",
        ConstraintOfHazard => "constraint_of_hazard",
        ConstraintOfUaia => "constraint_of_uaia",
        RecommendationOfConstraint => "recommendation_of_constraint",
        RequirementOfRecommendation => "requirement_of_recommendation",
        EvidenceOfRequirement => "evidence_of_requirement",
        /// Derived from checklist questions; never stored as a trace link.
        QuestionOfRequirement => "question_of_requirement",
    }
}

impl LinkKind {
    /// Required `(from, to)` element kinds. `None` for question links, whose
    /// source is a checklist question rather than a case element.
    pub fn endpoints(self) -> Option<(ElementKind, ElementKind)> {
        use ElementKind::*;
        Some(match self {
            LinkKind::HazardOfLoss => (Hazard, Loss),
            LinkKind::UaiaOfHazard => (Uaia, Hazard),
            LinkKind::ScenarioOfUaia => (CausalScenario, Uaia),
            LinkKind::ConstraintOfHazard => (Constraint, Hazard),
            LinkKind::ConstraintOfUaia => (Constraint, Uaia),
            LinkKind::RecommendationOfConstraint => (DesignRecommendation, Constraint),
            LinkKind::RequirementOfRecommendation => (Requirement, DesignRecommendation),
            LinkKind::EvidenceOfRequirement => (Evidence, Requirement),
            LinkKind::QuestionOfRequirement => return None,
        })
    }

    /// The unique element-to-element link kind for a pair of endpoint kinds.
    pub fn infer(from: ElementKind, to: ElementKind) -> Option<LinkKind> {
        LinkKind::ALL
            .iter()
            .copied()
            .find(|k| k.endpoints() == Some((from, to)))
    }
}

/// Depth of a kind in the derivation chain. Every link kind goes strictly
/// from a deeper kind to a shallower one, so stored links can never form a
/// cycle.
pub(crate) fn chain_depth(kind: ElementKind) -> u8 {
    match kind {
        ElementKind::Loss => 0,
        ElementKind::Hazard => 1,
        ElementKind::ControlAction | ElementKind::Uaia => 2,
        ElementKind::CausalScenario | ElementKind::Constraint => 3,
        ElementKind::DesignRecommendation => 4,
        ElementKind::Requirement => 5,
        ElementKind::Evidence => 6,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TraceLink {
    pub from: ElementId,
    pub to: ElementId,
    pub kind: LinkKind,
}

impl TraceLink {
    pub fn new(from: ElementId, to: ElementId, kind: LinkKind) -> Self {
        Self { from, to, kind }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inference_is_unique_per_pair() {
        for &from in ElementKind::ALL {
            for &to in ElementKind::ALL {
                let matches = LinkKind::ALL
                    .iter()
                    .filter(|k| k.endpoints() == Some((from, to)))
                    .count();
                assert!(matches <= 1, "{from}->{to}");
            }
        }
        assert_eq!(
            LinkKind::infer(ElementKind::Constraint, ElementKind::Uaia),
            Some(LinkKind::ConstraintOfUaia)
        );
        assert_eq!(LinkKind::infer(ElementKind::Loss, ElementKind::Hazard), None);
    }

    #[test]
    fn every_link_kind_points_upstream() {
        for kind in LinkKind::ALL {
            if let Some((from, to)) = kind.endpoints() {
                assert!(chain_depth(from) > chain_depth(to), "{kind}");
            }
        }
    }
}
