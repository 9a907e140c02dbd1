use std::fmt::Write;

use crate::checklist::QuestionType;
use crate::goal::GoalLinkKind;
use crate::model::{AssuranceCase, CaseElement, ElementId};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn id_list<'a>(ids: impl IntoIterator<Item = &'a ElementId>) -> String {
    let ids: Vec<&str> = ids.into_iter().map(ElementId::as_str).collect();
    format!("[{}]", ids.join(", "))
}

fn element_line(case: &AssuranceCase, e: &CaseElement) -> String {
    let mut line = format!("{} {}", e.kind, e.id);
    let mut targets: Vec<&ElementId> = case.links_from(e.id.as_str()).map(|l| &l.to).collect();
    targets.sort();
    if !targets.is_empty() {
        let _ = write!(line, " links {}", id_list(targets));
    }
    if let Some(v) = e.verification {
        let _ = write!(line, " verify {v}");
    }
    if let Some(s) = e.lifecycle_stage {
        let _ = write!(line, " stage {s}");
    }
    if let Some(a) = &e.action {
        let _ = write!(line, " action {} {}", a.control_action, a.mode);
    }
    let _ = write!(line, " {}", quote(&e.description));
    line
}

/// Canonical text of a case: principles in declared order, elements sorted
/// by kind then id, goal graph and checklist sorted, two-space indentation
/// and exactly one trailing newline.
pub fn serialize(case: &AssuranceCase) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "case {} {}", case.id(), quote(case.title()));
    let _ = writeln!(out, "schema {}", case.schema_version());
    let _ = writeln!(out, "threshold {}", case.threshold());

    for p in case.principles() {
        out.push('\n');
        if p.segments.is_empty() {
            let _ = writeln!(out, "principle {} {{}}", p.id);
            continue;
        }
        let _ = writeln!(out, "principle {} {{", p.id);
        for s in &p.segments {
            let mut elements: Vec<&CaseElement> = case
                .elements()
                .filter(|e| e.principle == p.id && &e.segment == s)
                .collect();
            if elements.is_empty() {
                let _ = writeln!(out, "  segment {s} {{}}");
                continue;
            }
            elements.sort_by(|a, b| (a.kind, &a.id).cmp(&(b.kind, &b.id)));
            let _ = writeln!(out, "  segment {s} {{");
            for e in elements {
                let _ = writeln!(out, "    {}", element_line(case, e));
            }
            out.push_str("  }\n");
        }
        out.push_str("}\n");
    }

    let graph = case.goal_graph();
    if !graph.is_empty() {
        out.push_str("\ngoalgraph {\n");
        for n in graph.nodes() {
            let mut line = format!("  {} {}", n.kind, n.id);
            if let Some(a) = n.actor {
                let _ = write!(line, " actor {a}");
            }
            if let Some(b) = &n.bound_element {
                let _ = write!(line, " bound {b}");
            }
            if let Some(s) = n.satisfaction {
                let _ = write!(line, " sat {s}");
            }
            let _ = writeln!(out, "{line} {}", quote(&n.label));
        }
        if let Some(root) = graph.declared_root() {
            let _ = writeln!(out, "  root {root}");
        }
        let mut links: Vec<_> = graph.links().collect();
        links.sort_by(|a, b| (&a.to, &a.kind, &a.from).cmp(&(&b.to, &b.kind, &b.from)));
        let mut i = 0;
        while i < links.len() {
            let l = links[i];
            match l.kind {
                GoalLinkKind::Decomposition(d) => {
                    let children: Vec<&str> = links[i..]
                        .iter()
                        .take_while(|o| o.to == l.to && o.kind == l.kind)
                        .map(|o| o.from.as_str())
                        .collect();
                    i += children.len();
                    let _ = writeln!(out, "  {d} {} <- [{}]", l.to, children.join(", "));
                    continue;
                }
                GoalLinkKind::Contribution(c) => {
                    let _ = writeln!(out, "  contrib {} <- {} {c}", l.to, l.from);
                }
                GoalLinkKind::Dependency => {}
            }
            i += 1;
        }
        let mut deps: Vec<_> = links.iter().filter(|l| l.kind == GoalLinkKind::Dependency).collect();
        deps.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));
        for d in deps {
            let _ = writeln!(out, "  depends {} -> {}", d.from, d.to);
        }
        out.push_str("}\n");
    }

    let checklist = case.checklist();
    if !checklist.is_empty() {
        out.push_str("\nchecklist {\n");
        for q in checklist.questions() {
            let mut line = format!(
                "  question {} in {}/{} stage {} desideratum {}",
                q.id, q.principle, q.segment, q.stage, q.desideratum
            );
            match &q.qtype {
                QuestionType::MultipleChoice { options } => {
                    let opts: Vec<String> = options.iter().map(|o| quote(o)).collect();
                    let _ = write!(line, " choice [{}]", opts.join(", "));
                }
                QuestionType::ExtendedResponse => line.push_str(" extended"),
                QuestionType::Algorithmic { metric } => {
                    let _ = write!(line, " metric {metric}");
                }
            }
            if !q.requirement_links.is_empty() {
                let _ = write!(line, " links {}", id_list(&q.requirement_links));
            }
            if q.retired {
                line.push_str(" retired");
            }
            let _ = writeln!(out, "{line} {}", quote(&q.text));
        }
        out.push_str("}\n");
    }
    out
}
