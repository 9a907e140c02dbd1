//! One check per acceptance criterion. Each panics with a description of the
//! first mismatch it finds.

use std::collections::BTreeMap;

use elens_core::assessors::{
    demographic_parity_difference, disparate_impact_ratio, faithfulness_score, monotonicity_score, AttributionSeries,
    EvidenceSequence, LabeledPredictionSet, PredictionRecord,
};
use elens_core::dsl::{parse, serialize};
use elens_core::model::{Actor, CompletenessRule, ElementId, ElementKind, TraceLink};
use elens_core::stpa::{transition, EthicalEvent, EthicalState};
use elens_core::workflow::{AnswerEvent, AnswerStatus, CaseStatus, RegulatorDecision};
use rand::seq::IndexedRandom;
use rand::Rng;

use super::workflow_model::{self as wm, Model};

pub fn ids(v: &[&str]) -> Vec<ElementId> {
    v.iter().map(|s| ElementId::new(*s).unwrap()).collect()
}

/// The golden case parses, has the tabulated elements, is complete, and
/// traces R101.1 back to L6.
pub fn golden_case() {
    let case = super::golden();
    let count = |k| case.elements_of(k).count();
    assert_eq!(count(ElementKind::Loss), 8, "losses");
    assert_eq!(count(ElementKind::Hazard), 11, "hazards");
    assert_eq!(count(ElementKind::Uaia), 6, "UAIAs");
    assert_eq!(count(ElementKind::CausalScenario), 4, "causal scenarios");
    assert_eq!(count(ElementKind::DesignRecommendation), 4, "design recommendations");
    assert_eq!(count(ElementKind::Requirement), 4, "requirements");
    let mut constraints: Vec<String> = case
        .elements_of(ElementKind::Constraint)
        .map(|e| e.id.to_string())
        .collect();
    constraints.sort();
    let mut expected: Vec<String> = (1..=16)
        .map(|i| format!("EC{i}"))
        .chain(["EC101".to_string()])
        .collect();
    expected.sort();
    assert_eq!(constraints, expected, "constraints");
    for r in ["R101.1", "R101.2", "R101.3", "R101.4"] {
        assert!(
            case.element(r).unwrap().verification.is_some(),
            "{r} has no verification method"
        );
    }
    assert_eq!(case.completeness_check(), vec![], "completeness violations");
    assert_eq!(
        case.trace_backward("R101.1").unwrap(),
        vec![
            ids(&["DR101.1"]),
            ids(&["EC101"]),
            ids(&["UAIA101"]),
            ids(&["H7"]),
            ids(&["L6"])
        ]
    );
}

/// Removing one link of each mandatory class, and then every stored link in
/// turn, yields exactly one violation on the link's source.
pub fn mutation_detection() {
    let base = super::golden();
    let actor = super::supplier();
    let cases = [
        ("H7", "L6", CompletenessRule::HazardLinksLoss),
        ("UAIA101", "H7", CompletenessRule::UaiaLinksHazard),
        ("CS1", "UAIA101", CompletenessRule::ScenarioLinksUaia),
        ("DR101.1", "EC101", CompletenessRule::RecommendationLinksConstraint),
        ("R101.1", "DR101.1", CompletenessRule::RequirementLinksRecommendation),
    ];
    for (from, to, rule) in cases {
        let mut case = base.clone();
        let link: TraceLink = case.links_from(from).find(|l| l.to.as_str() == to).unwrap().clone();
        case.remove_link(&link, &actor, super::at(0)).unwrap();
        let v = case.completeness_check();
        assert_eq!(v.len(), 1, "{from}->{to}: {v:?}");
        assert_eq!(v[0].element_id.as_str(), from, "{from}->{to}");
        assert_eq!(v[0].rule, rule, "{from}->{to}");
    }
    for link in base.links() {
        let mut case = base.clone();
        case.remove_link(link, &actor, super::at(0)).unwrap();
        let v = case.completeness_check();
        assert_eq!(v.len(), 1, "{link:?}: {v:?}");
        assert_eq!(v[0].element_id, link.from, "{link:?}");
    }
}

/// Random cases survive parse(serialize(c)) and serialize is idempotent.
pub fn dsl_round_trip(count: u64) {
    let mut r = super::rng(0x5eed_0001);
    for n in 0..count {
        let src = super::random_source(&mut r, n);
        let case = parse(&src).unwrap_or_else(|d| panic!("case {n} failed to parse: {d:#?}\n{src}"));
        let text = serialize(&case);
        let again = parse(&text).unwrap_or_else(|d| panic!("canonical form of case {n} failed: {d:#?}\n{text}"));
        assert!(
            again.same_structure(&case),
            "case {n} changed structure\n{src}\n---\n{text}"
        );
        assert_eq!(again, case, "case {n}");
        assert_eq!(serialize(&again), text, "case {n} is not idempotent");
    }
}

/// Propagation agrees with the recursive evaluator in any topological order.
pub fn goal_oracle(count: usize) {
    let mut r = super::rng(0x5eed_0002);
    for n in 0..count {
        let g = super::random_dag(&mut r);
        let expected = super::oracle_all(&g);
        let got: BTreeMap<String, i32> = g
            .propagate()
            .unwrap()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.value()))
            .collect();
        assert_eq!(got, expected, "dag {n}: {g:#?}");
        for _ in 0..3 {
            let order = super::random_topological_order(&g, &mut r);
            let shuffled: BTreeMap<String, i32> = g
                .evaluate_in_order(&order)
                .unwrap()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.value()))
                .collect();
            assert_eq!(shuffled, expected, "dag {n} in order {order:?}");
        }
    }
}

pub fn ethical_table() {
    use EthicalEvent as E;
    use EthicalState as S;
    let legal = [
        (S::Safe, E::HazardRaised, S::HazardState),
        (S::HazardState, E::HazardMitigated, S::Safe),
        (S::HazardState, E::LossRealized, S::LossState),
        (S::LossState, E::LossRecovered, S::HazardState),
    ];
    let mut rejected = 0;
    for &s in S::ALL {
        for &e in E::ALL {
            match legal.iter().find(|(ls, le, _)| *ls == s && *le == e) {
                Some((_, _, to)) => assert_eq!(transition(s, e).unwrap(), *to),
                None => {
                    assert!(transition(s, e).is_err(), "{s} --{e}--> should be rejected");
                    rejected += 1;
                }
            }
        }
    }
    assert_eq!((S::ALL.len(), E::ALL.len(), rejected), (3, 4, 8));
}

pub fn answer_table() {
    use AnswerEvent as E;
    use AnswerStatus as S;
    let legal = [
        (S::Draft, E::Submit, S::Submitted),
        (S::ChangesRequested, E::Submit, S::Submitted),
        (S::Submitted, E::Accept, S::Accepted),
        (S::Submitted, E::RequestChanges, S::ChangesRequested),
        (S::Accepted, E::RegulatorFlag, S::ChangesRequested),
    ];
    for &s in S::ALL {
        for &e in E::ALL {
            match legal.iter().find(|(ls, le, _)| *ls == s && *le == e) {
                Some((_, _, to)) => assert_eq!(s.apply(e).unwrap(), *to),
                None => assert!(s.apply(e).is_err(), "{s} --{e}--> should be rejected"),
            }
        }
    }
}

/// Random legal traces, with wrong-role attempts mixed in, track the model;
/// certification implies full acceptance plus an approval, and the audit
/// sequence is gapless.
pub fn random_traces(count: usize) {
    let base = parse(wm::SMALL_CASE).unwrap();
    let mut r = super::rng(0x5eed_0003);
    let mut certified_traces = 0;
    for t in 0..count {
        let mut case = base.clone();
        let mut model = Model::default();
        let mut successes = 0usize;
        let len = r.random_range(1..=30);
        for step in 0..len {
            let ops = wm::legal_ops(&model, &mut r);
            let op = ops.choose(&mut r).unwrap().clone();
            if r.random_bool(0.2) {
                let proper = wm::proper_actor(&op).role;
                let wrong: Vec<_> = wm::ROLES.iter().filter(|&&role| role != proper).collect();
                let wrong = **wrong.choose(&mut r).unwrap();
                let before = case.clone();
                assert!(
                    !wm::apply(&mut case, &op, &Actor::new("mallory", wrong), step),
                    "trace {t}: {op:?} by {wrong}"
                );
                assert_eq!(case, before, "trace {t}: rejected {op:?} changed the case");
            }
            assert!(
                wm::apply(&mut case, &op, &wm::proper_actor(&op), step),
                "trace {t} step {step}: {op:?} rejected"
            );
            successes += 1;
            wm::advance(&mut model, &op);
            let status = case.status();
            assert_eq!(status, model.status(), "trace {t} step {step} after {op:?}");
            if status == CaseStatus::Certified {
                assert!(case
                    .checklist()
                    .active()
                    .all(|q| case.answer(q.id.as_str()).unwrap().status == AnswerStatus::Accepted));
                assert!(case
                    .regulator_reviews()
                    .iter()
                    .any(|rr| rr.decision == RegulatorDecision::Approve));
                for q in case.checklist().active() {
                    assert!(case
                        .audit_trail(Some(q.id.as_str()))
                        .iter()
                        .any(|rec| rec.action == "submit"));
                }
            }
        }
        if case.status() == CaseStatus::Certified {
            certified_traces += 1;
        }
        let seqs: Vec<u64> = case.audit().iter().map(|rec| rec.seq).collect();
        assert_eq!(seqs, (1..=successes as u64).collect::<Vec<_>>(), "trace {t}");
    }
    assert!(certified_traces > 0, "no trace reached certification");
}

pub fn state_machines() {
    ethical_table();
    answer_table();
    random_traces(1000);
}

fn prediction_set(rows: &[(String, bool)]) -> LabeledPredictionSet {
    LabeledPredictionSet::new(
        rows.iter()
            .map(|(g, p)| PredictionRecord {
                predicted_positive: *p,
                group: g.clone(),
            })
            .collect(),
    )
    .unwrap()
}

pub fn fairness_metrics(count: usize) {
    let mut r = super::rng(0x5eed_0004);
    for n in 0..count {
        let groups = ["a", "b", "c"];
        let k = r.random_range(2..=3);
        let mut rows = Vec::new();
        for g in &groups[..k] {
            for _ in 0..r.random_range(1..=10) {
                rows.push((g.to_string(), r.random_bool(0.5)));
            }
        }
        let data = prediction_set(&rows);
        let (ra, rb) = (super::oracle_rate(&rows, "a"), super::oracle_rate(&rows, "b"));
        let dp = demographic_parity_difference(&data, "a", "b").unwrap();
        assert!((dp - (ra - rb).abs()).abs() < 1e-9, "dataset {n}: DP {dp}");
        let di = disparate_impact_ratio(&data, "a", "b").unwrap();
        let expected = if ra.max(rb) == 0.0 {
            None
        } else {
            Some(ra.min(rb) / ra.max(rb))
        };
        match (di, expected) {
            (None, None) => {}
            (Some(x), Some(y)) => assert!((x - y).abs() < 1e-9, "dataset {n}: DI {x} vs {y}"),
            other => panic!("dataset {n}: {other:?}"),
        }
    }
}

pub fn faithfulness(count: usize) {
    let mut r = super::rng(0x5eed_0005);
    for n in 0..count {
        let len = r.random_range(3..12);
        let pairs: Vec<(f64, f64)> = (0..len)
            .map(|_| (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
            .collect();
        let score = faithfulness_score(&AttributionSeries::new(pairs.clone()).unwrap()).unwrap();
        assert!((score - super::oracle_pearson(&pairs)).abs() < 1e-9, "series {n}");
        let (a, b, c, d) = (
            r.random_range(0.1..10.0),
            r.random_range(-5.0..5.0),
            r.random_range(0.1..10.0),
            r.random_range(-5.0..5.0),
        );
        let mapped: Vec<(f64, f64)> = pairs.iter().map(|&(x, y)| (a * x + b, c * y + d)).collect();
        let rescaled = faithfulness_score(&AttributionSeries::new(mapped).unwrap()).unwrap();
        assert!((score - rescaled).abs() < 1e-9, "series {n}");
    }
}

pub fn monotonicity(count: usize) {
    let seq = EvidenceSequence::new(vec![0.1, 0.3, 0.2, 0.5]).unwrap();
    assert!((monotonicity_score(&seq) - 2.0 / 3.0).abs() < 1e-12);
    let mut r = super::rng(0x5eed_0006);
    for _ in 0..count {
        let mut v: Vec<f64> = (0..r.random_range(2..15)).map(|_| r.random_range(0.0..=1.0)).collect();
        v.sort_by(f64::total_cmp);
        assert_eq!(monotonicity_score(&EvidenceSequence::new(v).unwrap()), 1.0);
    }
}

pub fn metric_oracles() {
    fairness_metrics(100);
    faithfulness(100);
    monotonicity(100);
}
