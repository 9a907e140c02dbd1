//! CSV readers for supplier-provided metric inputs.

use sha2::{Digest, Sha256};

use super::explain::{AttributionSeries, EvidenceSequence};
use super::fairness::{LabeledPredictionSet, PredictionRecord};
use super::AssessorError;

/// Lowercase hex SHA-256 of the raw input bytes.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn rows(bytes: &[u8], header: &[&str]) -> Result<Vec<(u64, Vec<String>)>, AssessorError> {
    let text = std::str::from_utf8(bytes).map_err(|_| AssessorError::parse(1, "input is not UTF-8"))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());
    let found: Vec<String> = reader
        .headers()
        .map_err(|e| AssessorError::parse(1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if found != header {
        return Err(AssessorError::parse(
            1,
            format!("expected header `{}`, found `{}`", header.join(","), found.join(",")),
        ));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            AssessorError::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        out.push((line, record.iter().map(str::to_string).collect()));
    }
    if out.is_empty() {
        return Err(AssessorError::EmptyInput);
    }
    Ok(out)
}

fn number(line: u64, field: &str, value: &str) -> Result<f64, AssessorError> {
    let v: f64 = value
        .parse()
        .map_err(|_| AssessorError::parse(line, format!("`{field}` is not a number: `{value}`")))?;
    if !v.is_finite() {
        return Err(AssessorError::parse(line, format!("`{field}` must be finite")));
    }
    Ok(v)
}

/// Header `predicted,group`; `predicted` is 0 or 1.
pub fn read_predictions(bytes: &[u8]) -> Result<LabeledPredictionSet, AssessorError> {
    let mut records = Vec::new();
    for (line, row) in rows(bytes, &["predicted", "group"])? {
        let predicted_positive = match row[0].as_str() {
            "0" => false,
            "1" => true,
            other => {
                return Err(AssessorError::parse(
                    line,
                    format!("`predicted` must be 0 or 1, found `{other}`"),
                ))
            }
        };
        if row[1].is_empty() {
            return Err(AssessorError::parse(line, "`group` must not be empty"));
        }
        records.push(PredictionRecord {
            predicted_positive,
            group: row[1].clone(),
        });
    }
    LabeledPredictionSet::new(records)
}

/// Header `attribution,performance_drop`.
pub fn read_attributions(bytes: &[u8]) -> Result<AttributionSeries, AssessorError> {
    let pairs = rows(bytes, &["attribution", "performance_drop"])?
        .into_iter()
        .map(|(line, row)| {
            Ok((
                number(line, "attribution", &row[0])?,
                number(line, "performance_drop", &row[1])?,
            ))
        })
        .collect::<Result<_, AssessorError>>()?;
    AttributionSeries::new(pairs)
}

/// Single column with header `prediction`.
pub fn read_evidence(bytes: &[u8]) -> Result<EvidenceSequence, AssessorError> {
    let values = rows(bytes, &["prediction"])?
        .into_iter()
        .map(|(line, row)| number(line, "prediction", &row[0]))
        .collect::<Result<_, AssessorError>>()?;
    EvidenceSequence::new(values)
}
