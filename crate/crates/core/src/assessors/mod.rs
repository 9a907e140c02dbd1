//! Algorithmic assessment metrics over supplier-provided files: group
//! fairness of predictions and explanation quality. No model is executed.
//!
//! Faithfulness is the Pearson correlation between feature attributions and
//! the performance drop observed when each feature is removed. Monotonicity
//! is the fraction of consecutive evidence additions that do not lower the
//! predicted likelihood.

mod explain;
mod fairness;
mod input;

pub use explain::{faithfulness_score, monotonicity_score, AttributionSeries, EvidenceSequence};
pub use fairness::{demographic_parity_difference, disparate_impact_ratio, LabeledPredictionSet, PredictionRecord};
pub use input::{digest, read_attributions, read_evidence, read_predictions};

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checklist::{AnswerContent, ChecklistError, QuestionType};
use crate::keyword::keyword_enum;
use crate::model::{Actor, AssuranceCase};

keyword_enum! {
    pub enum MetricKind: "metric" {
        DemographicParity => "demographic_parity",
        DisparateImpact => "disparate_impact",
        Faithfulness => "faithfulness",
        Monotonicity => "monotonicity",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricOutcome {
    Value {
        value: f64,
    },
    /// The metric has no value for this input, e.g. 0/0 disparate impact.
    Undefined,
    /// The input parsed but the metric could not be computed.
    Failed {
        error: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub metric: MetricKind,
    pub outcome: MetricOutcome,
    pub inputs_digest: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
}

impl MetricResult {
    pub fn value(&self) -> Option<f64> {
        match self.outcome {
            MetricOutcome::Value { value } => Some(value),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssessorError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("input has no records")]
    EmptyInput,
    #[error("unknown group `{0}`")]
    UnknownGroup(String),
    #[error("group `{0}` has no records")]
    EmptyGroup(String),
    #[error("need at least two groups, found {0}")]
    TooFewGroups(usize),
    #[error("missing parameter `{0}`")]
    MissingParam(&'static str),
    #[error("need at least {min} values, found {len}")]
    TooShort { len: usize, min: usize },
    #[error("values must be finite")]
    NonFinite,
    #[error("prediction {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("a coordinate has zero variance")]
    DegenerateVariance,
    #[error("question `{0}` is not algorithmic")]
    NotAlgorithmic(String),
    #[error(transparent)]
    Checklist(#[from] ChecklistError),
}

impl AssessorError {
    pub(crate) fn parse(line: u64, message: impl Into<String>) -> Self {
        AssessorError::Parse {
            line,
            message: message.into(),
        }
    }

    /// Errors about the metric rather than the file; these are recorded as
    /// failed results instead of being rejected.
    pub fn is_metric_failure(&self) -> bool {
        matches!(
            self,
            AssessorError::UnknownGroup(_)
                | AssessorError::EmptyGroup(_)
                | AssessorError::TooShort { .. }
                | AssessorError::DegenerateVariance
        )
    }
}

fn fairness_groups(
    data: &LabeledPredictionSet,
    params: &mut BTreeMap<String, String>,
) -> Result<(String, String), AssessorError> {
    let mut pick = |key: &'static str, index: usize| -> Result<String, AssessorError> {
        if let Some(v) = params.get(key) {
            return Ok(v.clone());
        }
        if data.groups().len() != 2 {
            return Err(AssessorError::MissingParam(key));
        }
        let g = data.groups().iter().nth(index).unwrap().clone();
        params.insert(key.to_string(), g.clone());
        Ok(g)
    };
    Ok((pick("group_a", 0)?, pick("group_b", 1)?))
}

fn compute(
    metric: MetricKind,
    bytes: &[u8],
    params: &mut BTreeMap<String, String>,
) -> Result<Result<Option<f64>, AssessorError>, AssessorError> {
    let split = |r: Result<Option<f64>, AssessorError>| match r {
        Err(e) if !e.is_metric_failure() => Err(e),
        other => Ok(other),
    };
    match metric {
        MetricKind::DemographicParity | MetricKind::DisparateImpact => {
            let data = read_predictions(bytes)?;
            let (a, b) = fairness_groups(&data, params)?;
            split(if metric == MetricKind::DemographicParity {
                demographic_parity_difference(&data, &a, &b).map(Some)
            } else {
                disparate_impact_ratio(&data, &a, &b)
            })
        }
        MetricKind::Faithfulness => split(read_attributions(bytes).and_then(|s| faithfulness_score(&s)).map(Some)),
        MetricKind::Monotonicity => split(read_evidence(bytes).map(|s| Some(monotonicity_score(&s)))),
    }
}

/// Runs `metric` on raw file bytes. Unreadable input is an error; a metric
/// that cannot be computed yields a `Failed` outcome.
pub fn evaluate_metric(
    metric: MetricKind,
    bytes: &[u8],
    params: &BTreeMap<String, String>,
) -> Result<MetricResult, AssessorError> {
    let mut params = params.clone();
    let outcome = match compute(metric, bytes, &mut params)? {
        Ok(Some(value)) => MetricOutcome::Value { value },
        Ok(None) => MetricOutcome::Undefined,
        Err(e) => MetricOutcome::Failed { error: e.to_string() },
    };
    Ok(MetricResult {
        metric,
        outcome,
        inputs_digest: digest(bytes),
        params,
    })
}

impl AssuranceCase {
    /// Evaluates the metric of an algorithmic question on `bytes` and stores
    /// the result as the supplier's answer.
    pub fn run_metric(
        &mut self,
        question_id: &str,
        bytes: &[u8],
        params: &BTreeMap<String, String>,
        actor: &Actor,
        at: DateTime<Utc>,
    ) -> Result<MetricResult, AssessorError> {
        let question = self
            .checklist()
            .question(question_id)
            .ok_or_else(|| ChecklistError::UnknownQuestion(question_id.to_string()))?;
        let QuestionType::Algorithmic { metric } = question.qtype else {
            return Err(AssessorError::NotAlgorithmic(question_id.to_string()));
        };
        let result = evaluate_metric(metric, bytes, params)?;
        self.answer_question(question_id, AnswerContent::MetricResult(result.clone()), actor, at)?;
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &[u8] = b"predicted,group\n1,A\n1,A\n1,A\n0,A\n1,B\n0,B\n0,B\n0,B\n";

    #[test]
    fn fairness_fixture() {
        let r = evaluate_metric(MetricKind::DemographicParity, FIXTURE, &BTreeMap::new()).unwrap();
        assert_eq!(r.value(), Some(0.5));
        assert_eq!(r.params["group_a"], "A");
        assert_eq!(r.inputs_digest, digest(FIXTURE));
        assert_eq!(
            r,
            evaluate_metric(MetricKind::DemographicParity, FIXTURE, &BTreeMap::new()).unwrap()
        );
    }

    #[test]
    fn undefined_and_failed() {
        let zero = b"predicted,group\n0,A\n0,B\n";
        let r = evaluate_metric(MetricKind::DisparateImpact, zero, &BTreeMap::new()).unwrap();
        assert_eq!(r.outcome, MetricOutcome::Undefined);
        let flat = b"attribution,performance_drop\n1,0.1\n1,0.2\n";
        let r = evaluate_metric(MetricKind::Faithfulness, flat, &BTreeMap::new()).unwrap();
        assert!(matches!(r.outcome, MetricOutcome::Failed { ref error } if error.contains("variance")));
        assert!(evaluate_metric(MetricKind::Monotonicity, b"nope\n1\n", &BTreeMap::new()).is_err());
    }

    #[test]
    fn group_params() {
        let three = b"predicted,group\n1,A\n0,B\n1,C\n";
        assert_eq!(
            evaluate_metric(MetricKind::DemographicParity, three, &BTreeMap::new()),
            Err(AssessorError::MissingParam("group_a"))
        );
        let params = BTreeMap::from([
            ("group_a".to_string(), "A".to_string()),
            ("group_b".to_string(), "Z".to_string()),
        ]);
        let r = evaluate_metric(MetricKind::DemographicParity, three, &params).unwrap();
        assert!(matches!(r.outcome, MetricOutcome::Failed { .. }));
    }
}
