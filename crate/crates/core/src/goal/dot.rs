use std::fmt::Write;

use super::propagate::SatisfactionMap;
use super::{GoalGraph, GoalKind, GoalLinkKind};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl GoalGraph {
    /// Graphviz rendering. Node labels are `id` plus satisfaction (computed
    /// value when given, else the assigned value, else `?`); edge labels are
    /// the link kind. Dependencies are dashed.
    pub fn to_dot(&self, values: Option<&SatisfactionMap>) -> String {
        let mut out = String::from("digraph goals {\n  rankdir=BT;\n");
        for n in self.nodes() {
            let sat = values
                .and_then(|v| v.get(&n.id).copied())
                .or(n.satisfaction)
                .map_or_else(|| "?".to_string(), |s| s.to_string());
            let shape = match n.kind {
                GoalKind::Goal => "ellipse",
                GoalKind::Softgoal => "egg",
                GoalKind::Task => "hexagon",
                GoalKind::Resource => "box",
                GoalKind::Belief => "oval",
            };
            let _ = writeln!(
                out,
                "  {} [label={}, shape={shape}, tooltip={}];",
                quote(n.id.as_str()),
                quote(&format!("{}\n{}", n.id, sat)),
                quote(&n.label)
            );
        }
        for l in self.links() {
            let style = if l.kind == GoalLinkKind::Dependency {
                ", style=dashed"
            } else {
                ""
            };
            let _ = writeln!(
                out,
                "  {} -> {} [label={}{style}];",
                quote(l.from.as_str()),
                quote(l.to.as_str()),
                quote(&l.kind.to_string())
            );
        }
        out.push_str("}\n");
        out
    }
}
