mod common;

use elens_core::model::{ElementId, ElementKind, GuideMode, QuestionId};
use elens_core::report::{PrincipleStatus, ReportKind};
use elens_core::workflow::{CaseStatus, RegulatorDecision};

use common::criteria::ids;

#[test]
fn golden_case_reconstructs_the_tables() {
    common::criteria::golden_case();
    let case = common::golden();
    assert_eq!(case.elements_of(ElementKind::ControlAction).count(), 3);
    assert!(case.trace_backward("L1").unwrap().is_empty());
    assert!(case.trace_forward("R101.1").unwrap().is_empty());
    let forward_l6: Vec<ElementId> = case.trace_forward("L6").unwrap().concat();
    assert!(forward_l6.contains(&ElementId::new("H6").unwrap()));
    assert!(forward_l6.contains(&ElementId::new("H7").unwrap()));
    let forward_uaia: Vec<ElementId> = case.trace_forward("UAIA101").unwrap().concat();
    for id in [
        "EC101", "DR101.1", "DR101.2", "DR101.3", "DR101.4", "R101.1", "R101.2", "R101.3", "R101.4",
    ] {
        assert!(forward_uaia.contains(&ElementId::new(id).unwrap()), "{id}");
    }
    let r = case.element("R101.3").unwrap();
    assert_eq!(r.verification.unwrap().to_string(), "black_box_testing");
    assert_eq!(
        case.element("L1").unwrap().description,
        "Loss of documentation related to data, its collection, and preprocessing"
    );
}

#[test]
fn removing_any_mandatory_link_yields_one_violation() {
    common::criteria::mutation_detection();
}

#[test]
fn uaia_slots_and_matrix() {
    let case = common::golden();
    let slots = case.enumerate_uaia_slots("A").unwrap();
    assert_eq!(slots.len(), 2);
    assert_eq!(slots[0].mode, GuideMode::Provided);
    assert_eq!(slots[0].filled_by, ids(&["UAIA101"]));
    assert_eq!(slots[1].filled_by, ids(&["UAIA104"]));
    let b = case.enumerate_uaia_slots("B").unwrap();
    assert_eq!(
        (b[0].filled_by.clone(), b[1].filled_by.clone()),
        (ids(&["UAIA102"]), ids(&["UAIA105"]))
    );

    let m = case.build_trace_matrix().unwrap();
    assert_eq!(m.rows.len(), 4);
    let row = &m.rows[1];
    assert_eq!(
        (
            &row.requirement,
            &row.recommendation,
            &row.constraint,
            &row.uaia_or_hazard,
            &row.losses
        ),
        (
            &ids(&["R101.2"])[0],
            &ids(&["DR101.2"])[0],
            &ids(&["EC101"])[0],
            &ids(&["UAIA101"])[0],
            &ids(&["L6"])
        )
    );
    for row in &m.rows {
        let chain = case.trace_backward(row.requirement.as_str()).unwrap();
        assert!(chain[0].contains(&row.recommendation));
        assert!(chain[1].contains(&row.constraint));
        assert!(chain[2].contains(&row.uaia_or_hazard));
    }
    assert!(m
        .to_csv()
        .starts_with("requirement,recommendation,constraint,uaia_or_hazard,losses\n"));
}

#[test]
fn checklist_covers_every_principle_and_stage() {
    let case = common::golden();
    let coverage = case.coverage_report();
    assert!(coverage.gaps().is_empty());
    assert_eq!(coverage.rows.len(), 4);
    let total: usize = coverage
        .rows
        .iter()
        .flat_map(|r| &r.cells)
        .map(|c| c.question_count)
        .sum();
    assert_eq!(total, coverage.total_questions);
    assert!(elens_core::dsl::lint(&case, None).iter().all(|d| !d.is_error()));
}

#[test]
fn review_loop_certifies_and_a_flag_reopens() {
    let case = common::certified_golden();
    assert_eq!(case.status(), CaseStatus::Certified);
    assert!(case.verdict(None).unwrap().mitigated);

    let summary = case.generate_report(ReportKind::Summary);
    assert_eq!(summary.principles.len(), 4);
    assert!(
        summary.principles.iter().all(|p| p.status == PrincipleStatus::Assured),
        "{summary:#?}"
    );
    assert!(summary.verdict.mitigated);
    assert_eq!(
        summary.to_json(),
        case.clone().generate_report(ReportKind::Summary).to_json()
    );

    let full = case.generate_report(ReportKind::Full);
    let md = full.to_markdown();
    assert!(md.contains("> Name the \"explanation\" method.\n> Cite the document.\n"));
    assert_eq!(md, case.generate_report(ReportKind::Full).to_markdown());

    let mut flagged = case.clone();
    let qid = QuestionId::new("QT04").unwrap();
    flagged
        .regulator_review(
            RegulatorDecision::Flag,
            &[qid],
            "Faithfulness looks low.",
            &common::regulator(),
            common::at(999),
        )
        .unwrap();
    assert_eq!(flagged.status(), CaseStatus::RegulatorFlagged);
    let v = flagged.verdict(None).unwrap();
    assert!(!v.mitigated);
    assert_eq!(
        v.unresolved.iter().map(|g| g.as_str()).collect::<Vec<_>>(),
        vec!["M101"]
    );
    assert_ne!(
        flagged.generate_report(ReportKind::Summary).to_json(),
        summary.to_json()
    );
}

#[test]
fn segment_gating_follows_declared_order() {
    let case = common::certified_golden();
    let gating = case.gate_segments("transparency").unwrap();
    assert!(gating.passed);
    let names: Vec<&str> = gating.segments.iter().map(|s| s.segment.as_str()).collect();
    assert_eq!(names, ["traceability", "communication", "explainability"]);

    let open = common::golden();
    let gating = open.gate_segments("transparency").unwrap();
    assert!(!gating.passed);
    assert_eq!(gating.segments.last().unwrap().segment.as_str(), "explainability");
}
