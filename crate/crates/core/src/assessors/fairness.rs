use std::collections::{BTreeMap, BTreeSet};

use super::AssessorError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionRecord {
    pub predicted_positive: bool,
    pub group: String,
}

/// Binary predictions labelled with a protected-group value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPredictionSet {
    records: Vec<PredictionRecord>,
    groups: BTreeSet<String>,
}

impl LabeledPredictionSet {
    /// Groups are taken from the records; at least two must be present.
    pub fn new(records: Vec<PredictionRecord>) -> Result<Self, AssessorError> {
        let groups = records.iter().map(|r| r.group.clone()).collect();
        Self::with_groups(records, groups)
    }

    /// Declares the group universe explicitly, so a declared group may have
    /// no records.
    pub fn with_groups(records: Vec<PredictionRecord>, groups: BTreeSet<String>) -> Result<Self, AssessorError> {
        if records.is_empty() {
            return Err(AssessorError::EmptyInput);
        }
        if let Some(r) = records.iter().find(|r| !groups.contains(&r.group)) {
            return Err(AssessorError::UnknownGroup(r.group.clone()));
        }
        if groups.len() < 2 {
            return Err(AssessorError::TooFewGroups(groups.len()));
        }
        Ok(Self { records, groups })
    }

    pub fn records(&self) -> &[PredictionRecord] {
        &self.records
    }

    pub fn groups(&self) -> &BTreeSet<String> {
        &self.groups
    }

    /// Positive-prediction rate of one group.
    pub fn rate(&self, group: &str) -> Result<f64, AssessorError> {
        if !self.groups.contains(group) {
            return Err(AssessorError::UnknownGroup(group.to_string()));
        }
        let (mut total, mut positive) = (0usize, 0usize);
        for r in self.records.iter().filter(|r| r.group == group) {
            total += 1;
            positive += usize::from(r.predicted_positive);
        }
        if total == 0 {
            return Err(AssessorError::EmptyGroup(group.to_string()));
        }
        Ok(positive as f64 / total as f64)
    }

    /// Per-group `(positives, count)`.
    pub fn counts(&self) -> BTreeMap<&str, (usize, usize)> {
        let mut out: BTreeMap<&str, (usize, usize)> = self.groups.iter().map(|g| (g.as_str(), (0, 0))).collect();
        for r in &self.records {
            let c = out.get_mut(r.group.as_str()).unwrap();
            c.0 += usize::from(r.predicted_positive);
            c.1 += 1;
        }
        out
    }
}

/// `|rate(a) − rate(b)|`.
pub fn demographic_parity_difference(
    data: &LabeledPredictionSet,
    group_a: &str,
    group_b: &str,
) -> Result<f64, AssessorError> {
    Ok((data.rate(group_a)? - data.rate(group_b)?).abs())
}

/// `min(rate) / max(rate)`; `None` when both rates are zero.
pub fn disparate_impact_ratio(
    data: &LabeledPredictionSet,
    group_a: &str,
    group_b: &str,
) -> Result<Option<f64>, AssessorError> {
    let (a, b) = (data.rate(group_a)?, data.rate(group_b)?);
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    Ok((hi > 0.0).then(|| lo / hi))
}
