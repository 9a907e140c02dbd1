//! Browser bindings. Every export takes plain strings and returns a JSON
//! document; failures come back as `{"error": "..."}`.

use std::collections::BTreeMap;

use elens_core::assessors::{evaluate_metric, MetricKind};
use elens_core::dsl::{self, ParseDiagnostic};
use elens_core::goal::Satisfaction;
use elens_core::model::{AssuranceCase, Direction, Violation};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

fn render(result: Result<serde_json::Value, String>) -> String {
    result.unwrap_or_else(|error| json!({ "error": error })).to_string()
}

fn parse(src: &str) -> Result<AssuranceCase, String> {
    dsl::parse(src).map_err(|d| d.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))
}

/// The bundled example case in `.elens` form.
#[wasm_bindgen]
pub fn example_case() -> String {
    elens_core::TRANSPARENCY_EXAMPLE.to_string()
}

#[derive(Serialize)]
struct CheckReport {
    ok: bool,
    diagnostics: Vec<ParseDiagnostic>,
    violations: Vec<Violation>,
    counts: BTreeMap<String, usize>,
}

/// Parses and lints a case and runs the completeness rules.
#[wasm_bindgen]
pub fn check_case(src: &str) -> String {
    let report = match dsl::parse_with_map(src) {
        Err(diagnostics) => CheckReport {
            ok: false,
            diagnostics,
            violations: vec![],
            counts: BTreeMap::new(),
        },
        Ok((case, map)) => {
            let mut counts = BTreeMap::new();
            for e in case.elements() {
                *counts.entry(e.kind.to_string()).or_default() += 1;
            }
            let violations = case.completeness_check();
            CheckReport {
                ok: violations.is_empty(),
                diagnostics: dsl::lint(&case, Some(&map)),
                violations,
                counts,
            }
        }
    };
    serde_json::to_string(&report).expect("check report serializes")
}

/// Hop-by-hop trace from an element, back to losses or forward to evidence.
#[wasm_bindgen]
pub fn trace(src: &str, id: &str, forward: bool) -> String {
    render(parse(src).and_then(|case| {
        let direction = if forward {
            Direction::Forward
        } else {
            Direction::Backward
        };
        let chain = case.trace(id, direction).map_err(|e| e.to_string())?;
        Ok(json!({ "id": id, "chain": chain }))
    }))
}

/// Leaves of the case's goal graph with their current satisfaction.
#[wasm_bindgen]
pub fn goal_leaves(src: &str) -> String {
    render(parse(src).map(|case| {
        let graph = case.bound_goal_graph();
        let leaves: Vec<_> = graph
            .leaves()
            .map(|n| json!({ "id": n.id, "label": n.label, "satisfaction": n.satisfaction.map_or(0, |s| s.value()) }))
            .collect();
        json!(leaves)
    }))
}

/// Propagates the goal graph with `overrides` (a JSON object of leaf id to
/// satisfaction) and judges the mitigation claim.
#[wasm_bindgen]
pub fn evaluate_goals(src: &str, overrides: &str) -> String {
    render((|| {
        let case = parse(src)?;
        let overrides: BTreeMap<String, i32> = serde_json::from_str(overrides).map_err(|e| e.to_string())?;
        let mut graph = case.bound_goal_graph();
        for (id, value) in &overrides {
            graph.assign_leaf(id, *value).map_err(|e| e.to_string())?;
        }
        let values = graph.propagate().map_err(|e| e.to_string())?;
        let root = graph.root().map_err(|e| e.to_string())?.clone();
        let threshold: Satisfaction = case.threshold();
        let unresolved: Vec<_> = case
            .mitigation_nodes()
            .into_iter()
            .filter(|(id, _)| values[*id] < threshold)
            .map(|(id, _)| id.clone())
            .collect();
        let root_satisfaction = values[&root];
        Ok(json!({
            "root": root,
            "root_satisfaction": root_satisfaction,
            "threshold": threshold,
            "mitigated": root_satisfaction >= threshold && unresolved.is_empty(),
            "unresolved": unresolved,
            "satisfaction": values,
            "dot": graph.to_dot(Some(&values)),
        }))
    })())
}

/// Computes a metric (`demographic_parity`, `disparate_impact`,
/// `faithfulness` or `monotonicity`) on CSV text. Empty group names fall
/// back to the defaults.
#[wasm_bindgen]
pub fn compute_metric(kind: &str, csv: &str, group_a: &str, group_b: &str) -> String {
    render((|| {
        let kind: MetricKind = kind.parse().map_err(|e: elens_core::UnknownKeyword| e.to_string())?;
        let mut params = BTreeMap::new();
        for (key, value) in [("group_a", group_a), ("group_b", group_b)] {
            if !value.trim().is_empty() {
                params.insert(key.to_string(), value.trim().to_string());
            }
        }
        let result = evaluate_metric(kind, csv.as_bytes(), &params).map_err(|e| e.to_string())?;
        serde_json::to_value(result).map_err(|e| e.to_string())
    })())
}
