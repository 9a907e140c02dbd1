//! Shared generators and independent oracles for the integration tests.

#![allow(dead_code)]

pub mod criteria;
pub mod workflow_model;

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Duration, TimeZone, Utc};
use elens_core::dsl;
use elens_core::goal::{Contribution, Decomposition, GoalGraph, GoalKind, GoalLink, GoalLinkKind, GoalNode};
use elens_core::model::{Actor, AssuranceCase, GoalId, StakeholderRole};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn golden() -> AssuranceCase {
    dsl::parse(elens_core::TRANSPARENCY_EXAMPLE).expect("golden case parses")
}

pub fn at(step: i64) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2026, 1, 1, 0, 0, 0).unwrap() + Duration::seconds(step)
}

pub fn supplier() -> Actor {
    Actor::new("sam", StakeholderRole::AiSupplier)
}

pub fn validator() -> Actor {
    Actor::new("vera", StakeholderRole::EthicsValidator)
}

pub fn regulator() -> Actor {
    Actor::new("rex", StakeholderRole::Regulator)
}

// ---------------------------------------------------------------------------
// Random `.elens` sources

const TEXT_PIECES: &[&str] = &[
    "loss", "of", "data", " ", "é", "→", "\"", "\\", "\n", "\t", "#", "{", "}", "[", "]", "<-", "->", "/", ",", "x",
    "UAIA", "42", "ü", "  ",
];

fn text(r: &mut ChaCha8Rng) -> String {
    let n = r.random_range(1..6);
    let mut s: String = (0..n).map(|_| *TEXT_PIECES.choose(r).unwrap()).collect();
    if s.trim().is_empty() {
        s.push('w');
    }
    s
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

const KINDS: &[(&str, &str)] = &[
    ("loss", "L"),
    ("hazard", "H"),
    ("control_action", "CA"),
    ("uaia", "UAIA"),
    ("scenario", "CS"),
    ("constraint", "EC"),
    ("recommendation", "DR"),
    ("requirement", "R"),
    ("evidence", "E"),
];

/// Upstream kinds an element of `kind` may link to.
fn upstream(kind: &str) -> &'static [&'static str] {
    match kind {
        "hazard" => &["loss"],
        "uaia" => &["hazard"],
        "scenario" => &["uaia"],
        "constraint" => &["hazard", "uaia"],
        "recommendation" => &["constraint"],
        "requirement" => &["recommendation"],
        "evidence" => &["requirement"],
        _ => &[],
    }
}

const STAGES: &[&str] = &[
    "business_use_case",
    "design",
    "data_collection",
    "model_building_testing",
    "deployment",
    "monitoring",
];
const METHODS: &[&str] = &[
    "demonstration",
    "black_box_testing",
    "scenario_testing",
    "algorithmic_evaluation",
];
const ROLES: &[&str] = &["ai_supplier", "regulator", "ethics_validator", "ai_user"];
const GOAL_KINDS: &[&str] = &["goal", "softgoal", "task", "resource", "belief"];
const CONTRIBS: &[&str] = &[
    "make",
    "help",
    "some_positive",
    "unknown",
    "some_negative",
    "hurt",
    "break",
];
const DESIDERATA: &[&str] = &["relevant", "complete", "balanced", "accurate"];
const METRICS: &[&str] = &["demographic_parity", "disparate_impact", "faithfulness", "monotonicity"];

struct GenElement {
    kind: &'static str,
    id: String,
    line: String,
}

/// A random valid case in non-canonical source form: declarations are
/// shuffled, principles may be reopened and elements may sit outside blocks.
pub fn random_source(r: &mut ChaCha8Rng, n: u64) -> String {
    let mut principles: Vec<(String, Vec<String>)> = Vec::new();
    for p in 0..r.random_range(1..4) {
        let segs = (0..r.random_range(1..4)).map(|s| format!("seg_{p}_{s}")).collect();
        principles.push((format!("principle_{p}"), segs));
    }

    let mut by_kind: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let mut elements: Vec<(usize, usize, GenElement)> = Vec::new();
    for &(kind, prefix) in KINDS {
        for i in 0..r.random_range(0..4) {
            let id = if r.random_bool(0.3) {
                format!("{prefix}{}.{}", i + 1, r.random_range(1..12))
            } else {
                format!("{prefix}{}", i * 3 + 1)
            };
            let mut line = format!("{kind} {id}");
            let candidates: Vec<&String> = upstream(kind)
                .iter()
                .flat_map(|k| by_kind.get(k).into_iter().flatten())
                .collect();
            let mut links: Vec<&String> = candidates.iter().copied().filter(|_| r.random_bool(0.5)).collect();
            links.shuffle(r);
            let mut clauses = Vec::new();
            if !links.is_empty() {
                clauses.push(format!(
                    "links [{}]",
                    links.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
                ));
            }
            if kind == "requirement" {
                clauses.push(format!("verify {}", METHODS.choose(r).unwrap()));
            }
            if r.random_bool(0.3) {
                clauses.push(format!("stage {}", STAGES.choose(r).unwrap()));
            }
            if kind == "uaia" {
                if let Some(ca) = by_kind.get("control_action").and_then(|v| v.choose(r)) {
                    if r.random_bool(0.7) {
                        let mode = if r.random_bool(0.5) { "provided" } else { "not_provided" };
                        clauses.push(format!("action {ca} {mode}"));
                    }
                }
            }
            clauses.shuffle(r);
            for c in clauses {
                line.push(' ');
                line.push_str(&c);
            }
            line.push(' ');
            line.push_str(&quote(&text(r)));
            let p = r.random_range(0..principles.len());
            let s = r.random_range(0..principles[p].1.len());
            by_kind.entry(kind).or_default().push(id.clone());
            elements.push((p, s, GenElement { kind, id, line }));
        }
    }

    let mut out = format!("# generated case {n}\ncase gen-{n} {}\n", quote(&text(r)));
    let mut header = vec![format!("threshold {}", r.random_range(-100..=100))];
    if r.random_bool(0.5) {
        header.push("schema 1".into());
    }
    header.shuffle(r);
    for h in header {
        out.push_str(&h);
        out.push('\n');
    }

    // Elements outside blocks must come after the control actions they use
    // only semantically, so any order works; keep a few out of the blocks.
    let mut loose = Vec::new();
    let mut in_blocks: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
    for (p, s, e) in &elements {
        if r.random_bool(0.2) {
            let (kind, rest) = e.line.split_at(e.kind.len());
            let (id, tail) = rest[1..].split_at(e.id.len());
            loose.push(format!(
                "{kind} {id} in {}/{}{tail}",
                principles[*p].0, principles[*p].1[*s]
            ));
        } else {
            in_blocks.entry((*p, *s)).or_default().push(e.line.clone());
        }
    }
    for (pi, (p, segs)) in principles.iter().enumerate() {
        out.push_str(&format!("\nprinciple {p} {{\n"));
        for (si, s) in segs.iter().enumerate() {
            let mut lines = in_blocks.remove(&(pi, si)).unwrap_or_default();
            lines.shuffle(r);
            if lines.is_empty() && r.random_bool(0.5) {
                out.push_str(&format!("  segment {s} {{}}\n"));
                continue;
            }
            out.push_str(&format!("  segment {s} {{\n"));
            for l in lines {
                out.push_str(&format!("    {l}   # note\n"));
            }
            out.push_str("  }\n");
        }
        out.push_str("}\n");
    }
    loose.shuffle(r);
    for l in loose {
        out.push_str(&l);
        out.push('\n');
    }

    let element_ids: Vec<&String> = elements.iter().map(|(_, _, e)| &e.id).collect();
    if r.random_bool(0.8) {
        out.push_str(&random_goal_source(r, &element_ids));
    }

    let requirements = by_kind.get("requirement").cloned().unwrap_or_default();
    let nq = r.random_range(0..6);
    if nq > 0 {
        let mut qs = Vec::new();
        for q in 0..nq {
            let p = principles.choose(r).unwrap();
            let s = p.1.choose(r).unwrap();
            let mut line = format!(
                "  question Q{} in {}/{} stage {} desideratum {}",
                q * 7 + 1,
                p.0,
                s,
                STAGES.choose(r).unwrap(),
                DESIDERATA.choose(r).unwrap()
            );
            match r.random_range(0..3) {
                0 => {
                    let n = r.random_range(2..5);
                    let opts: Vec<String> = (0..n).map(|i| quote(&format!("{}{i}", text(r)))).collect();
                    line.push_str(&format!(" choice [{}]", opts.join(", ")));
                }
                1 => line.push_str(" extended"),
                _ => line.push_str(&format!(" metric {}", METRICS.choose(r).unwrap())),
            }
            let links: Vec<&str> = requirements
                .iter()
                .filter(|_| r.random_bool(0.5))
                .map(String::as_str)
                .collect();
            if !links.is_empty() {
                line.push_str(&format!(" links [{}]", links.join(", ")));
            }
            if r.random_bool(0.2) {
                line.push_str(" retired");
            }
            line.push_str(&format!(" {}\n", quote(&text(r))));
            qs.push(line);
        }
        qs.shuffle(r);
        out.push_str("\nchecklist {\n");
        for q in qs {
            out.push_str(&q);
        }
        out.push_str("}\n");
    }
    out
}

fn random_goal_source(r: &mut ChaCha8Rng, elements: &[&String]) -> String {
    let n = r.random_range(1..8);
    let ids: Vec<String> = (0..n).map(|i| format!("G{}", i * 2)).collect();
    let mut lines = Vec::new();
    for id in &ids {
        let mut line = format!("  {} {id}", GOAL_KINDS.choose(r).unwrap());
        if r.random_bool(0.4) {
            line.push_str(&format!(" actor {}", ROLES.choose(r).unwrap()));
        }
        if r.random_bool(0.4) {
            if let Some(e) = elements.choose(r) {
                line.push_str(&format!(" bound {e}"));
            }
        }
        if r.random_bool(0.5) {
            line.push_str(&format!(" sat {}", r.random_range(-100..=100)));
        }
        line.push_str(&format!(" {}", quote(&text(r))));
        lines.push(line);
    }
    // Parents have lower indices than their children.
    for parent in 0..n {
        let children: Vec<usize> = (parent + 1..n).filter(|_| r.random_bool(0.4)).collect();
        if children.is_empty() {
            continue;
        }
        match r.random_range(0..3) {
            0 | 1 => {
                let d = if r.random_bool(0.5) { "and" } else { "or" };
                let names: Vec<&str> = children.iter().map(|c| ids[*c].as_str()).collect();
                lines.push(format!("  {d} {} <- [{}]", ids[parent], names.join(", ")));
            }
            _ => {
                for c in children {
                    lines.push(format!(
                        "  contrib {} <- {} {}",
                        ids[parent],
                        ids[c],
                        CONTRIBS.choose(r).unwrap()
                    ));
                }
            }
        }
    }
    for _ in 0..r.random_range(0..3) {
        let a = ids.choose(r).unwrap();
        let b = ids.choose(r).unwrap();
        if a != b {
            lines.push(format!("  depends {a} -> {b}"));
        }
    }
    lines.sort();
    lines.dedup();
    lines.shuffle(r);
    if r.random_bool(0.5) {
        lines.push(format!("  root {}", ids[0]));
    }
    format!("\ngoalgraph {{\n{}\n}}\n", lines.join("\n"))
}

// ---------------------------------------------------------------------------
// Random goal DAGs and a recursive evaluator

pub fn gid(s: &str) -> GoalId {
    GoalId::new(s).unwrap()
}

/// A random evaluable DAG of at most 8 nodes. Node `N{i}` only feeds parents
/// with smaller indices.
pub fn random_dag(r: &mut ChaCha8Rng) -> GoalGraph {
    let n = r.random_range(1..=8);
    let mut g = GoalGraph::default();
    let mut parents_of: Vec<Vec<(usize, GoalLinkKind)>> = vec![Vec::new(); n];
    let mut has_children = vec![false; n];
    for (parent, has) in has_children.iter_mut().enumerate() {
        let children: Vec<usize> = (parent + 1..n).filter(|_| r.random_bool(0.45)).collect();
        if children.is_empty() {
            continue;
        }
        *has = true;
        let group = r.random_range(0..3);
        for c in children {
            let kind = match group {
                0 => GoalLinkKind::Decomposition(Decomposition::And),
                1 => GoalLinkKind::Decomposition(Decomposition::Or),
                _ => GoalLinkKind::Contribution(*Contribution::ALL.choose(r).unwrap()),
            };
            parents_of[c].push((parent, kind));
        }
    }
    for (i, &has) in has_children.iter().enumerate() {
        let mut node = GoalNode::new(
            gid(&format!("N{i}")),
            *GoalKind::ALL.choose(r).unwrap(),
            format!("node {i}"),
        );
        if !has {
            node = node.with_satisfaction(elens_core::goal::Satisfaction::new(r.random_range(-100..=100)).unwrap());
        }
        g.add_node(node).unwrap();
    }
    for (child, parents) in parents_of.iter().enumerate() {
        for (parent, kind) in parents {
            g.add_link(GoalLink::new(
                gid(&format!("N{child}")),
                gid(&format!("N{parent}")),
                *kind,
            ))
            .unwrap();
        }
    }
    // Dependencies in either direction; they must not influence evaluation.
    for _ in 0..r.random_range(0..3) {
        let a = r.random_range(0..n);
        let b = r.random_range(0..n);
        if a != b {
            let _ = g.add_link(GoalLink::new(
                gid(&format!("N{a}")),
                gid(&format!("N{b}")),
                GoalLinkKind::Dependency,
            ));
        }
    }
    g
}

fn weight(c: Contribution) -> i64 {
    match c {
        Contribution::Make => 100,
        Contribution::Help => 50,
        Contribution::SomePositive => 25,
        Contribution::Unknown => 0,
        Contribution::SomeNegative => -25,
        Contribution::Hurt => -50,
        Contribution::Break => -100,
    }
}

/// Recursive evaluation straight from the rules, memoising nothing.
pub fn oracle_value(g: &GoalGraph, id: &str) -> i32 {
    let links: Vec<&GoalLink> = g
        .links()
        .filter(|l| l.to.as_str() == id && l.kind != GoalLinkKind::Dependency)
        .collect();
    if links.is_empty() {
        return g.node(id).unwrap().satisfaction.unwrap().value();
    }
    let values: Vec<(i32, GoalLinkKind)> = links
        .iter()
        .map(|l| (oracle_value(g, l.from.as_str()), l.kind))
        .collect();
    match values[0].1 {
        GoalLinkKind::Decomposition(Decomposition::And) => values.iter().map(|v| v.0).min().unwrap(),
        GoalLinkKind::Decomposition(Decomposition::Or) => values.iter().map(|v| v.0).max().unwrap(),
        _ => {
            let mut sum = 0i64;
            for (v, k) in &values {
                let GoalLinkKind::Contribution(c) = k else {
                    unreachable!()
                };
                sum += i64::from(*v) * weight(*c);
            }
            let q = sum / 100;
            q.clamp(-100, 100) as i32
        }
    }
}

pub fn oracle_all(g: &GoalGraph) -> BTreeMap<String, i32> {
    g.nodes()
        .map(|n| (n.id.to_string(), oracle_value(g, n.id.as_str())))
        .collect()
}

/// A topological order drawn uniformly among ready nodes at each step.
pub fn random_topological_order(g: &GoalGraph, r: &mut ChaCha8Rng) -> Vec<GoalId> {
    let eval: Vec<&GoalLink> = g.links().filter(|l| l.kind != GoalLinkKind::Dependency).collect();
    let mut done: BTreeSet<GoalId> = BTreeSet::new();
    let mut order = Vec::new();
    let all: Vec<GoalId> = g.nodes().map(|n| n.id.clone()).collect();
    while order.len() < all.len() {
        let ready: Vec<&GoalId> = all
            .iter()
            .filter(|id| !done.contains(*id))
            .filter(|id| eval.iter().filter(|l| &l.to == *id).all(|l| done.contains(&l.from)))
            .collect();
        let pick = (*ready.choose(r).unwrap()).clone();
        done.insert(pick.clone());
        order.push(pick);
    }
    order
}

// ---------------------------------------------------------------------------
// Metric oracles

/// Positive rate of a group by counting records.
pub fn oracle_rate(records: &[(String, bool)], group: &str) -> f64 {
    let mut total = 0u32;
    let mut positive = 0u32;
    for (g, p) in records {
        if g == group {
            total += 1;
            if *p {
                positive += 1;
            }
        }
    }
    f64::from(positive) / f64::from(total)
}

/// Textbook sample Pearson correlation.
pub fn oracle_pearson(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len() as f64;
    let (sx, sy, sxx, syy, sxy) = pairs.iter().fold((0.0, 0.0, 0.0, 0.0, 0.0), |acc, &(x, y)| {
        (acc.0 + x, acc.1 + y, acc.2 + x * x, acc.3 + y * y, acc.4 + x * y)
    });
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}

// ---------------------------------------------------------------------------
// Driving the golden case through the review loop

pub const PREDICTIONS_CSV: &str = include_str!("../../examples/inputs/predictions.csv");
pub const ATTRIBUTIONS_CSV: &str = include_str!("../../examples/inputs/attributions.csv");
pub const EVIDENCE_CSV: &str = include_str!("../../examples/inputs/evidence.csv");

/// Answers and submits every active question as the supplier.
pub fn answer_all(case: &mut AssuranceCase, step: &mut i64) {
    use elens_core::assessors::MetricKind;
    use elens_core::checklist::{AnswerContent, QuestionType};
    let questions: Vec<_> = case.checklist().active().cloned().collect();
    for q in questions {
        *step += 1;
        let id = q.id.as_str();
        match &q.qtype {
            QuestionType::MultipleChoice { .. } => {
                case.answer_question(id, AnswerContent::Choice { index: 0 }, &supplier(), at(*step))
                    .unwrap();
            }
            QuestionType::ExtendedResponse => {
                let body = format!("Measures for {id}:\n- documented\n- reviewed \"quarterly\"");
                case.answer_question(id, AnswerContent::Text { body }, &supplier(), at(*step))
                    .unwrap();
            }
            QuestionType::Algorithmic { metric } => {
                let input = match metric {
                    MetricKind::DemographicParity | MetricKind::DisparateImpact => PREDICTIONS_CSV,
                    MetricKind::Faithfulness => ATTRIBUTIONS_CSV,
                    MetricKind::Monotonicity => EVIDENCE_CSV,
                };
                case.run_metric(id, input.as_bytes(), &BTreeMap::new(), &supplier(), at(*step))
                    .unwrap();
            }
        }
        *step += 1;
        case.submit_answer(id, &supplier(), at(*step)).unwrap();
    }
}

/// Runs the full supplier, validator and regulator loop on the golden case,
/// with one round of requested changes on the first question.
pub fn certified_golden() -> AssuranceCase {
    use elens_core::workflow::{RegulatorDecision, ReviewVerdict};
    let mut case = golden();
    let mut step = 0;
    answer_all(&mut case, &mut step);
    let ids: Vec<String> = case.checklist().active().map(|q| q.id.to_string()).collect();
    step += 1;
    case.review_answer(
        &ids[0],
        ReviewVerdict::RequestChanges,
        "Name the \"explanation\" method.\nCite the document.",
        &validator(),
        at(step),
    )
    .unwrap();
    step += 1;
    case.submit_answer(&ids[0], &supplier(), at(step)).unwrap();
    for id in &ids {
        step += 1;
        case.review_answer(
            id,
            ReviewVerdict::Accept,
            "Evidence is sufficient.",
            &validator(),
            at(step),
        )
        .unwrap();
    }
    step += 1;
    case.regulator_review(
        RegulatorDecision::Approve,
        &[],
        "No further violations.",
        &regulator(),
        at(step),
    )
    .unwrap();
    case
}
