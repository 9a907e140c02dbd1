use super::{ParseDiagnostic, SourceMap};
use crate::goal::GoalError;
use crate::model::{AssuranceCase, ElementKind, LinkKind};

/// Completeness violations as errors plus style warnings. Spans come from
/// `map` when the case was parsed; otherwise they fall back to 1:1.
pub fn lint(case: &AssuranceCase, map: Option<&SourceMap>) -> Vec<ParseDiagnostic> {
    let empty = SourceMap::default();
    let map = map.unwrap_or(&empty);
    let mut out = Vec::new();

    for v in case.completeness_check() {
        out.push(ParseDiagnostic::error(
            &format!("rule-{}", v.rule),
            map.element(v.element_id.as_str()),
            format!("rule ({}): {}", v.rule, v.message),
        ));
    }

    for r in case.elements_of(ElementKind::Requirement) {
        if !case.checklist().active().any(|q| q.requirement_links.contains(&r.id)) {
            out.push(ParseDiagnostic::warning(
                "unverifiable-requirement",
                map.element(r.id.as_str()),
                format!("unverifiable requirement {}: no checklist question links it", r.id),
            ));
        }
    }

    for e in case.elements_of(ElementKind::Evidence) {
        let supported = case
            .links_from(e.id.as_str())
            .filter(|l| l.kind == LinkKind::EvidenceOfRequirement)
            .count();
        if supported > 1 {
            out.push(ParseDiagnostic::warning(
                "shared-evidence",
                map.element(e.id.as_str()),
                format!("evidence {} supports {supported} requirements", e.id),
            ));
        }
    }

    for a in case.elements_of(ElementKind::ControlAction) {
        for slot in case.enumerate_uaia_slots(a.id.as_str()).expect("control action exists") {
            if slot.filled_by.is_empty() {
                out.push(ParseDiagnostic::warning(
                    "uaia-slot-gap",
                    map.element(a.id.as_str()),
                    format!("control action {} has no UAIA for guide word `{}`", a.id, slot.mode),
                ));
            }
        }
    }

    let graph = case.bound_goal_graph();
    if !graph.is_empty() {
        let goal_span = |id: &str| map.goal_nodes.get(id).copied().unwrap_or(map.header());
        let found = graph.propagate().err().or_else(|| graph.root().err());
        match found {
            None => {}
            Some(GoalError::UnassignedLeaf(id)) => out.push(ParseDiagnostic::warning(
                "goal-unassigned",
                goal_span(id.as_str()),
                format!("goal leaf {id} has no satisfaction and no bound requirement"),
            )),
            Some(e) => {
                let span = match &e {
                    GoalError::CyclicGraph(id) | GoalError::MixedIncoming(id) | GoalError::MixedDecomposition(id) => {
                        goal_span(id.as_str())
                    }
                    _ => map.header(),
                };
                out.push(ParseDiagnostic::error("goal-graph", span, e.to_string()));
            }
        }
    }

    let coverage = case.coverage_report();
    for row in &coverage.rows {
        let gaps: Vec<String> = row
            .cells
            .iter()
            .filter(|c| c.gap)
            .map(|c| c.stage.to_string())
            .collect();
        if !gaps.is_empty() {
            out.push(ParseDiagnostic::warning(
                "coverage-gap",
                map.header(),
                format!("principle {} has no questions for: {}", row.principle, gaps.join(", ")),
            ));
        }
    }

    out.sort_by(|a, b| (a.span, &a.code, &a.message).cmp(&(b.span, &b.code, &b.message)));
    out
}
