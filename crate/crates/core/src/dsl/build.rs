//! Semantic pass: syntax tree to validated case.

use std::collections::HashSet;
use std::str::FromStr;

use chrono::{DateTime, Utc};

use super::parser::{Ast, ElementDecl, GoalLinkShape, QuestionTypeDecl, Spanned};
use super::{ParseDiagnostic, SourceMap, SourceSpan};
use crate::checklist::{ChecklistError, Question, QuestionType};
use crate::goal::{GoalError, GoalLink, GoalLinkKind, GoalNode, Satisfaction};
use crate::model::{
    Actor, AssuranceCase, CaseElement, CaseId, ElementId, ElementKind, GoalId, Ident, LinkKind, ModelError, Principle,
    QuestionId, StakeholderRole, TraceLink, SCHEMA_VERSION,
};

pub(crate) struct Built {
    pub case: Option<AssuranceCase>,
    pub map: SourceMap,
    pub diags: Vec<ParseDiagnostic>,
}

struct Builder {
    diags: Vec<ParseDiagnostic>,
    actor: Actor,
    at: DateTime<Utc>,
}

impl Builder {
    fn err(&mut self, code: &str, span: SourceSpan, message: impl Into<String>) {
        self.diags.push(ParseDiagnostic::error(code, span, message));
    }

    /// Parses a keyword or id, reporting failures at the value's span.
    fn value<T: FromStr>(&mut self, s: &Spanned) -> Option<T>
    where
        T::Err: std::fmt::Display,
    {
        match s.text.parse() {
            Ok(v) => Some(v),
            Err(e) => {
                self.err("invalid-value", s.span, e.to_string());
                None
            }
        }
    }

    fn number(&mut self, s: &Spanned, what: &str) -> Option<i64> {
        match s.text.parse() {
            Ok(v) => Some(v),
            Err(_) => {
                self.err(
                    "invalid-value",
                    s.span,
                    format!("{what} must be an integer, found `{}`", s.text),
                );
                None
            }
        }
    }
}

pub(crate) fn build(ast: Ast) -> Built {
    let mut b = Builder {
        diags: Vec::new(),
        actor: Actor::new("parser", StakeholderRole::SystemAdmin),
        at: DateTime::<Utc>::UNIX_EPOCH,
    };
    let mut map = SourceMap::default();
    let Some((id, title)) = &ast.header else {
        return Built {
            case: None,
            map,
            diags: b.diags,
        };
    };
    map.header = Some(id.span);
    let case_id = b.value::<CaseId>(id).unwrap_or_else(|| CaseId::new("invalid").unwrap());
    let mut case = AssuranceCase::new(case_id, title.clone());
    let mut threshold = Satisfaction::MAX;
    if let Some(s) = &ast.schema {
        if let Some(v) = b.number(s, "schema") {
            if v != i64::from(SCHEMA_VERSION) {
                b.err(
                    "schema",
                    s.span,
                    format!("unsupported schema version {v}; this reader supports {SCHEMA_VERSION}"),
                );
            }
        }
    }
    if let Some(t) = &ast.threshold {
        if let Some(v) = b.number(t, "threshold") {
            match i32::try_from(v)
                .map_err(|_| GoalError::OutOfRange(i32::MAX))
                .and_then(Satisfaction::new)
            {
                Ok(s) => threshold = s,
                Err(_) => b.err("invalid-value", t.span, format!("threshold {v} is outside [-100, 100]")),
            }
        }
    }
    case.set_authored(title.clone(), threshold, SCHEMA_VERSION);

    for p in &ast.principles {
        let Some(id) = b.value::<Ident>(&p.id) else { continue };
        let segments: Vec<Ident> = p.segments.iter().filter_map(|s| b.value::<Ident>(s)).collect();
        case.declare_principle(Principle { id, segments }, &b.actor, b.at)
            .expect("registry open while parsing");
    }

    let stored = build_elements(&mut b, &mut case, &mut map, &ast.elements);
    build_links(&mut b, &mut case, &ast.elements, &stored);
    build_goals(&mut b, &mut case, &mut map, &ast);
    build_questions(&mut b, &mut case, &mut map, &ast);

    case.take_audit();
    Built {
        case: Some(case),
        map,
        diags: b.diags,
    }
}

/// Returns the indices of the declarations that were stored.
fn build_elements(
    b: &mut Builder,
    case: &mut AssuranceCase,
    map: &mut SourceMap,
    decls: &[ElementDecl],
) -> HashSet<usize> {
    let mut stored = HashSet::new();
    // Control actions first so UAIA action references resolve regardless of
    // declaration order.
    let mut ordered: Vec<(usize, ElementKind)> = decls
        .iter()
        .enumerate()
        .filter_map(|(i, d)| b.value::<ElementKind>(&d.kind).map(|k| (i, k)))
        .collect();
    ordered.sort_by_key(|(_, k)| *k != ElementKind::ControlAction);
    for (i, kind) in ordered {
        let d = &decls[i];
        let (Some(id), Some(principle), Some(segment)) = (
            b.value::<ElementId>(&d.id),
            b.value::<Ident>(&d.principle),
            b.value::<Ident>(&d.segment),
        ) else {
            continue;
        };
        let mut e = CaseElement::new(id, kind, principle, segment, d.description.clone());
        if let Some(v) = &d.verify {
            let Some(m) = b.value(v) else { continue };
            e = e.with_verification(m);
        }
        if let Some(s) = &d.stage {
            let Some(stage) = b.value(s) else { continue };
            e = e.with_stage(stage);
        }
        if let Some((a, m)) = &d.action {
            let (Some(a), Some(m)) = (b.value::<ElementId>(a), b.value(m)) else {
                continue;
            };
            e = e.with_action(a, m);
        }
        let id = e.id.to_string();
        match case.add_element(e, &b.actor, b.at) {
            Ok(()) => {
                map.elements.insert(id, d.id.span);
                stored.insert(i);
            }
            Err(ModelError::DuplicateId(id)) => b.err("duplicate-id", d.id.span, format!("duplicate id {id}")),
            Err(ModelError::UnknownElement(a)) => {
                let span = d.action.as_ref().map_or(d.id.span, |(a, _)| a.span);
                b.err("unknown-action", span, format!("unknown control action {a}"));
            }
            Err(e) => b.err("invalid-element", d.id.span, e.to_string()),
        }
    }
    stored
}

fn build_links(b: &mut Builder, case: &mut AssuranceCase, decls: &[ElementDecl], stored: &HashSet<usize>) {
    let mut links = Vec::new();
    for (i, d) in decls.iter().enumerate() {
        if !stored.contains(&i) {
            continue;
        }
        let from = case.element(&d.id.text).expect("stored element");
        for target in &d.links {
            let Some(to) = case.element(&target.text) else {
                b.err(
                    "unknown-link-target",
                    target.span,
                    format!("unknown link target {}", target.text),
                );
                continue;
            };
            let Some(kind) = LinkKind::infer(from.kind, to.kind) else {
                b.err(
                    "kind-mismatch",
                    target.span,
                    format!("{} {} cannot link to {} {}", from.kind, from.id, to.kind, to.id),
                );
                continue;
            };
            links.push((TraceLink::new(from.id.clone(), to.id.clone(), kind), target.span));
        }
    }
    for (link, span) in links {
        if let Err(e) = case.add_link(link, &b.actor, b.at) {
            b.err("invalid-link", span, e.to_string());
        }
    }
}

fn build_goals(b: &mut Builder, case: &mut AssuranceCase, map: &mut SourceMap, ast: &Ast) {
    let mut graph = case.goal_graph().clone();
    for n in &ast.goal_nodes {
        let (Some(kind), Some(id)) = (b.value(&n.kind), b.value::<GoalId>(&n.id)) else {
            continue;
        };
        let mut node = GoalNode::new(id, kind, n.label.clone());
        if let Some(a) = &n.actor {
            let Some(role) = b.value(a) else { continue };
            node = node.with_actor(role);
        }
        if let Some(el) = &n.bound {
            match case.element(&el.text) {
                Some(e) => node = node.bound_to(e.id.clone()),
                None => {
                    b.err(
                        "unknown-bound-element",
                        el.span,
                        format!("unknown bound element {}", el.text),
                    );
                    continue;
                }
            }
        }
        if let Some(s) = &n.sat {
            let Some(v) = b.number(s, "satisfaction") else { continue };
            match i32::try_from(v).ok().and_then(|v| Satisfaction::new(v).ok()) {
                Some(sat) => node = node.with_satisfaction(sat),
                None => {
                    b.err(
                        "invalid-value",
                        s.span,
                        format!("satisfaction {v} is outside [-100, 100]"),
                    );
                    continue;
                }
            }
        }
        let id = node.id.to_string();
        match graph.add_node(node) {
            Ok(()) => {
                map.goal_nodes.insert(id, n.id.span);
            }
            Err(e) => b.err("duplicate-id", n.id.span, e.to_string()),
        }
    }
    for l in &ast.goal_links {
        let mut pending: Vec<(GoalLink, SourceSpan)> = Vec::new();
        let node = |b: &mut Builder, s: &Spanned| -> Option<GoalId> {
            if graph.node(&s.text).is_none() {
                b.err("unknown-goal", s.span, format!("unknown goal node {}", s.text));
                return None;
            }
            b.value(s)
        };
        match &l.shape {
            GoalLinkShape::Decomposition { op, parent, children } => {
                let (Some(d), Some(parent)) = (b.value(op), node(b, parent)) else {
                    continue;
                };
                for c in children {
                    if let Some(child) = node(b, c) {
                        pending.push((
                            GoalLink::new(child, parent.clone(), GoalLinkKind::Decomposition(d)),
                            c.span,
                        ));
                    }
                }
            }
            GoalLinkShape::Contribution { parent, child, kind } => {
                let (Some(parent), Some(child), Some(kind)) = (node(b, parent), node(b, child), b.value(kind)) else {
                    continue;
                };
                pending.push((GoalLink::new(child, parent, GoalLinkKind::Contribution(kind)), l.span));
            }
            GoalLinkShape::Dependency { depender, dependee } => {
                let (Some(from), Some(to)) = (node(b, depender), node(b, dependee)) else {
                    continue;
                };
                pending.push((GoalLink::new(from, to, GoalLinkKind::Dependency), l.span));
            }
        }
        for (link, span) in pending {
            if let Err(e) = graph.add_link(link) {
                b.err("invalid-goal-link", span, e.to_string());
            }
        }
    }
    match ast.goal_roots.as_slice() {
        [] => {}
        [root] => {
            if let Err(e) = graph.set_root(&root.text) {
                b.err("unknown-goal", root.span, e.to_string());
            }
        }
        [_, extra, ..] => b.err("duplicate-root", extra.span, "goal graph declares more than one root"),
    }
    *case.goal_graph_mut() = graph;
}

fn build_questions(b: &mut Builder, case: &mut AssuranceCase, map: &mut SourceMap, ast: &Ast) {
    for q in &ast.questions {
        let (Some(id), Some(principle), Some(segment), Some(stage), Some(desideratum)) = (
            b.value::<QuestionId>(&q.id),
            b.value::<Ident>(&q.principle),
            b.value::<Ident>(&q.segment),
            b.value(&q.stage),
            b.value(&q.desideratum),
        ) else {
            continue;
        };
        let qtype = match &q.qtype {
            QuestionTypeDecl::Choice(options) => QuestionType::MultipleChoice {
                options: options.clone(),
            },
            QuestionTypeDecl::Extended => QuestionType::ExtendedResponse,
            QuestionTypeDecl::Metric(m) => {
                let Some(metric) = b.value(m) else { continue };
                QuestionType::Algorithmic { metric }
            }
        };
        let links: Vec<ElementId> = q.links.iter().filter_map(|l| b.value(l)).collect();
        if links.len() != q.links.len() {
            continue;
        }
        let question = Question {
            id,
            principle,
            segment,
            stage,
            desideratum,
            qtype,
            requirement_links: links,
            text: q.text.clone(),
            retired: q.retired,
        };
        let id = question.id.to_string();
        match case.register_question(question, &b.actor, b.at) {
            Ok(()) => {
                map.questions.insert(id, q.id.span);
            }
            Err(e) => {
                let span = match &e {
                    ChecklistError::UnknownRequirement(r) => {
                        q.links.iter().find(|l| &l.text == r).map_or(q.id.span, |l| l.span)
                    }
                    ChecklistError::UnknownPrinciple(_) => q.principle.span,
                    ChecklistError::UnknownSegment { .. } => q.segment.span,
                    _ => q.id.span,
                };
                let code = match e {
                    ChecklistError::DuplicateId(_) => "duplicate-id",
                    _ => "invalid-question",
                };
                b.err(code, span, e.to_string());
            }
        }
    }
}
