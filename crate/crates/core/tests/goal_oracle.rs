mod common;

use elens_core::goal::Satisfaction;

#[test]
fn five_hundred_random_dags_match_the_recursive_evaluator() {
    common::criteria::goal_oracle(500);
}

#[test]
fn or_branch_at_threshold_counts_as_mitigated() {
    use elens_core::goal::{Decomposition, GoalGraph, GoalKind, GoalLink, GoalLinkKind, GoalNode};
    let mut g = GoalGraph::default();
    g.add_node(GoalNode::new(common::gid("P"), GoalKind::Goal, "p"))
        .unwrap();
    for (id, v) in [("A", 50), ("B", 0)] {
        g.add_node(GoalNode::new(common::gid(id), GoalKind::Task, id).with_satisfaction(Satisfaction::new(v).unwrap()))
            .unwrap();
        g.add_link(GoalLink::new(
            common::gid(id),
            common::gid("P"),
            GoalLinkKind::Decomposition(Decomposition::Or),
        ))
        .unwrap();
    }
    let values = g.propagate().unwrap();
    assert_eq!(values[&common::gid("P")].value(), common::oracle_value(&g, "P"));
    assert!(values[&common::gid("P")] >= Satisfaction::new(50).unwrap());
}
