use super::AssessorError;

/// `(attribution, performance_drop)` pairs, one per feature.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributionSeries {
    pairs: Vec<(f64, f64)>,
}

impl AttributionSeries {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self, AssessorError> {
        if pairs.len() < 2 {
            return Err(AssessorError::TooShort {
                len: pairs.len(),
                min: 2,
            });
        }
        if pairs.iter().any(|(a, d)| !a.is_finite() || !d.is_finite()) {
            return Err(AssessorError::NonFinite);
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }
}

/// Predicted likelihoods after successive additions of positive evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceSequence {
    predictions: Vec<f64>,
}

impl EvidenceSequence {
    pub fn new(predictions: Vec<f64>) -> Result<Self, AssessorError> {
        if predictions.len() < 2 {
            return Err(AssessorError::TooShort {
                len: predictions.len(),
                min: 2,
            });
        }
        if let Some(&p) = predictions.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(AssessorError::OutOfRange(p));
        }
        Ok(Self { predictions })
    }

    pub fn predictions(&self) -> &[f64] {
        &self.predictions
    }
}

/// Pearson correlation between attributions and performance drops.
pub fn faithfulness_score(series: &AttributionSeries) -> Result<f64, AssessorError> {
    let pairs = series.pairs();
    let constant = |f: fn(&(f64, f64)) -> f64| pairs.iter().all(|p| f(p) == f(&pairs[0]));
    if constant(|p| p.0) || constant(|p| p.1) {
        return Err(AssessorError::DegenerateVariance);
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(AssessorError::DegenerateVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Fraction of consecutive steps that do not decrease.
pub fn monotonicity_score(seq: &EvidenceSequence) -> f64 {
    let p = seq.predictions();
    let up = p.windows(2).filter(|w| w[1] >= w[0]).count();
    up as f64 / (p.len() - 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn faithfulness_extremes() {
        let prop = AttributionSeries::new(vec![(1.0, 2.0), (2.0, 4.0), (3.0, 6.0)]).unwrap();
        assert!((faithfulness_score(&prop).unwrap() - 1.0).abs() < 1e-12);
        let neg = AttributionSeries::new(vec![(1.0, -1.0), (2.0, -2.0), (3.0, -3.0)]).unwrap();
        assert!((faithfulness_score(&neg).unwrap() + 1.0).abs() < 1e-12);
        let flat = AttributionSeries::new(vec![(0.1, 1.0), (0.1, 2.0), (0.1, 3.0)]).unwrap();
        assert_eq!(faithfulness_score(&flat), Err(AssessorError::DegenerateVariance));
        assert_eq!(
            AttributionSeries::new(vec![(1.0, 1.0)]),
            Err(AssessorError::TooShort { len: 1, min: 2 })
        );
    }

    #[test]
    fn monotonicity_examples() {
        let s = |v: &[f64]| monotonicity_score(&EvidenceSequence::new(v.to_vec()).unwrap());
        assert_eq!(s(&[0.1, 0.2, 0.9]), 1.0);
        assert_eq!(s(&[0.9, 0.5, 0.1]), 0.0);
        assert_eq!(s(&[0.1, 0.3, 0.2, 0.5]), 2.0 / 3.0);
        assert_eq!(
            EvidenceSequence::new(vec![0.5]),
            Err(AssessorError::TooShort { len: 1, min: 2 })
        );
        assert_eq!(
            EvidenceSequence::new(vec![0.5, 1.5]),
            Err(AssessorError::OutOfRange(1.5))
        );
    }
}
