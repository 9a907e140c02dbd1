use serde::{Deserialize, Serialize};

use super::id::{ElementId, Ident};
use crate::keyword::keyword_enum;

keyword_enum! {
    /// STPA artifact kinds, in upstream-to-downstream order.
    pub enum ElementKind: "element kind" {
        Loss => "loss",
        Hazard => "hazard",
        ControlAction => "control_action",
        Uaia => "uaia",
        CausalScenario => "scenario",
        Constraint => "constraint",
        DesignRecommendation => "recommendation",
        Requirement => "requirement",
        Evidence => "evidence",
    }
}

keyword_enum! {
    pub enum VerificationMethod: "verification method" {
        Demonstration => "demonstration",
        BlackBoxTesting => "black_box_testing",
        ScenarioTesting => "scenario_testing",
        AlgorithmicEvaluation => "algorithmic_evaluation",
    }
}

keyword_enum! {
    /// Stages of the AI lifecycle, in order.
    pub enum LifecycleStage: "lifecycle stage" {
        BusinessUseCase => "business_use_case",
        Design => "design",
        DataCollection => "data_collection",
        ModelBuildingTesting => "model_building_testing",
        Deployment => "deployment",
        Monitoring => "monitoring",
    }
}

keyword_enum! {
    /// Guide word under which a UAIA was identified for a control action.
    pub enum GuideMode: "guide mode" {
        Provided => "provided",
        NotProvided => "not_provided",
    }
}

keyword_enum! {
    /// The seven stakeholder groups. Closed: roles cannot be added at runtime.
    pub enum StakeholderRole: "stakeholder role" {
        AiSupplier => "ai_supplier",
        AiSupplierAdmin => "ai_supplier_admin",
        Regulator => "regulator",
        SystemAdmin => "system_admin",
        EthicsValidator => "ethics_validator",
        AiUser => "ai_user",
        Visitor => "visitor",
    }
}

/// Annotation tying a UAIA to the control action it was derived from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionRef {
    pub control_action: ElementId,
    pub mode: GuideMode,
}

/// One typed STPA artifact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseElement {
    pub id: ElementId,
    pub kind: ElementKind,
    pub principle: Ident,
    pub segment: Ident,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lifecycle_stage: Option<LifecycleStage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionRef>,
}

impl CaseElement {
    pub fn new(
        id: ElementId,
        kind: ElementKind,
        principle: Ident,
        segment: Ident,
        description: impl Into<String>,
    ) -> Self {
        Self {
            id,
            kind,
            principle,
            segment,
            description: description.into(),
            verification: None,
            lifecycle_stage: None,
            action: None,
        }
    }

    pub fn with_verification(mut self, method: VerificationMethod) -> Self {
        self.verification = Some(method);
        self
    }

    pub fn with_stage(mut self, stage: LifecycleStage) -> Self {
        self.lifecycle_stage = Some(stage);
        self
    }

    pub fn with_action(mut self, control_action: ElementId, mode: GuideMode) -> Self {
        self.action = Some(ActionRef { control_action, mode });
        self
    }

    /// Checks the element's own invariants, returning a reason on failure.
    pub fn validate(&self) -> Result<(), String> {
        if self.description.trim().is_empty() {
            return Err(format!("{}: description must not be empty", self.id));
        }
        match (self.kind, self.verification) {
            (ElementKind::Requirement, None) => {
                return Err(format!("{}: requirement needs a verification method", self.id))
            }
            (kind, Some(_)) if kind != ElementKind::Requirement => {
                return Err(format!("{}: only requirements carry a verification method", self.id))
            }
            _ => {}
        }
        if self.action.is_some() && self.kind != ElementKind::Uaia {
            return Err(format!("{}: only UAIAs reference a control action", self.id));
        }
        Ok(())
    }
}
