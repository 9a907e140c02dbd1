//! Ethical-state machine, UAIA slot enumeration and the requirement
//! traceability matrix.

use std::collections::BTreeSet;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::keyword::keyword_enum;
use crate::model::{AssuranceCase, ElementId, ElementKind, GuideMode, LinkKind, Violation};

keyword_enum! {
    pub enum EthicalState: "ethical state" {
        Safe => "safe",
        HazardState => "hazard",
        LossState => "loss",
    }
}

keyword_enum! {
    pub enum EthicalEvent: "ethical event" {
        HazardRaised => "hazard_raised",
        HazardMitigated => "hazard_mitigated",
        LossRealized => "loss_realized",
        LossRecovered => "loss_recovered",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StpaError {
    #[error("no transition from {state} on {event}")]
    IllegalTransition { state: EthicalState, event: EthicalEvent },
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("`{id}` is a {found}, expected a {expected}")]
    KindMismatch {
        id: ElementId,
        expected: ElementKind,
        found: ElementKind,
    },
    #[error("case is incomplete ({} violations)", .0.len())]
    IncompleteCase(Vec<Violation>),
}

/// Losses are only reached through a hazard state, and recovering from a
/// loss leaves the hazard in place.
pub fn transition(state: EthicalState, event: EthicalEvent) -> Result<EthicalState, StpaError> {
    use EthicalEvent as E;
    use EthicalState as S;
    match (state, event) {
        (S::Safe, E::HazardRaised) => Ok(S::HazardState),
        (S::HazardState, E::HazardMitigated) => Ok(S::Safe),
        (S::HazardState, E::LossRealized) => Ok(S::LossState),
        (S::LossState, E::LossRecovered) => Ok(S::HazardState),
        (state, event) => Err(StpaError::IllegalTransition { state, event }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UaiaSlot {
    pub control_action: ElementId,
    pub mode: GuideMode,
    /// UAIAs identified under this guide word; empty marks an analysis gap.
    pub filled_by: Vec<ElementId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub requirement: ElementId,
    pub recommendation: ElementId,
    pub constraint: ElementId,
    pub uaia_or_hazard: ElementId,
    pub losses: Vec<ElementId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceMatrix {
    pub rows: Vec<TraceRow>,
}

pub const MATRIX_CSV_HEADER: &str = "requirement,recommendation,constraint,uaia_or_hazard,losses";

impl TraceMatrix {
    /// CSV with losses joined by `;`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(MATRIX_CSV_HEADER.split(',')).unwrap();
        for r in &self.rows {
            let losses = r.losses.iter().map(ElementId::as_str).collect::<Vec<_>>().join(";");
            w.write_record([
                r.requirement.as_str(),
                r.recommendation.as_str(),
                r.constraint.as_str(),
                r.uaia_or_hazard.as_str(),
                &losses,
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap()
    }

    /// Markdown table for reports.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from(
            "| Requirement | Recommendation | Constraint | UAIA / hazard | Losses |\n|---|---|---|---|---|\n",
        );
        for r in &self.rows {
            let losses = r.losses.iter().map(ElementId::as_str).collect::<Vec<_>>().join(", ");
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                r.requirement, r.recommendation, r.constraint, r.uaia_or_hazard, losses
            );
        }
        out
    }
}

impl AssuranceCase {
    fn expect_kind(&self, id: &str, expected: ElementKind) -> Result<&ElementId, StpaError> {
        let e = self
            .element(id)
            .ok_or_else(|| StpaError::UnknownElement(id.to_string()))?;
        if e.kind != expected {
            return Err(StpaError::KindMismatch {
                id: e.id.clone(),
                expected,
                found: e.kind,
            });
        }
        Ok(&e.id)
    }

    /// A realized loss dominates; otherwise any active hazard puts the system
    /// in a hazard state.
    pub fn classify_state<'a>(
        &self,
        active_hazards: impl IntoIterator<Item = &'a str>,
        realized_losses: impl IntoIterator<Item = &'a str>,
    ) -> Result<EthicalState, StpaError> {
        let mut hazards = 0;
        for h in active_hazards {
            self.expect_kind(h, ElementKind::Hazard)?;
            hazards += 1;
        }
        let mut losses = 0;
        for l in realized_losses {
            self.expect_kind(l, ElementKind::Loss)?;
            losses += 1;
        }
        Ok(match (hazards, losses) {
            (_, 1..) => EthicalState::LossState,
            (1.., 0) => EthicalState::HazardState,
            _ => EthicalState::Safe,
        })
    }

    /// The provided and not-provided slots of a control action, filled from
    /// hazard-linked UAIAs annotated with that action.
    pub fn enumerate_uaia_slots(&self, control_action: &str) -> Result<Vec<UaiaSlot>, StpaError> {
        let action = self.expect_kind(control_action, ElementKind::ControlAction)?;
        Ok(GuideMode::ALL
            .iter()
            .map(|&mode| UaiaSlot {
                control_action: action.clone(),
                mode,
                filled_by: self
                    .elements_of(ElementKind::Uaia)
                    .filter(|u| {
                        u.action
                            .as_ref()
                            .is_some_and(|a| &a.control_action == action && a.mode == mode)
                            && self.links_from(u.id.as_str()).any(|l| l.kind == LinkKind::UaiaOfHazard)
                    })
                    .map(|u| u.id.clone())
                    .collect(),
            })
            .collect())
    }

    /// One row per requirement → recommendation → constraint → UAIA or
    /// hazard path, with the losses upstream of its last element.
    pub fn build_trace_matrix(&self) -> Result<TraceMatrix, StpaError> {
        let violations = self.completeness_check();
        if !violations.is_empty() {
            return Err(StpaError::IncompleteCase(violations));
        }
        fn upstream<'a>(case: &'a AssuranceCase, id: &'a ElementId, kind: LinkKind) -> Vec<&'a ElementId> {
            case.links_from(id.as_str())
                .filter(|l| l.kind == kind)
                .map(|l| &l.to)
                .collect()
        }
        let mut rows = Vec::new();
        for req in self.elements_of(ElementKind::Requirement) {
            for rec in upstream(self, &req.id, LinkKind::RequirementOfRecommendation) {
                for con in upstream(self, rec, LinkKind::RecommendationOfConstraint) {
                    let targets = self
                        .links_from(con.as_str())
                        .filter(|l| matches!(l.kind, LinkKind::ConstraintOfHazard | LinkKind::ConstraintOfUaia));
                    for target in targets.map(|l| &l.to) {
                        let losses: BTreeSet<ElementId> = self
                            .trace_backward(target.as_str())
                            .expect("link targets exist")
                            .into_iter()
                            .flatten()
                            .filter(|id| self.element(id.as_str()).is_some_and(|e| e.kind == ElementKind::Loss))
                            .collect();
                        rows.push(TraceRow {
                            requirement: req.id.clone(),
                            recommendation: rec.clone(),
                            constraint: con.clone(),
                            uaia_or_hazard: target.clone(),
                            losses: losses.into_iter().collect(),
                        });
                    }
                }
            }
        }
        rows.sort_by(|a, b| {
            (&a.requirement, &a.recommendation, &a.constraint, &a.uaia_or_hazard).cmp(&(
                &b.requirement,
                &b.recommendation,
                &b.constraint,
                &b.uaia_or_hazard,
            ))
        });
        Ok(TraceMatrix { rows })
    }
}
