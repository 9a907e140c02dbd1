import init, {
  example_case,
  check_case,
  trace,
  goal_leaves,
  evaluate_goals,
  compute_metric,
} from "./pkg/elens_wasm.js";

const $ = (id) => document.getElementById(id);

const SAMPLE_CSV = {
  demographic_parity: "predicted,group\n1,A\n1,A\n1,A\n0,A\n1,B\n0,B\n0,B\n0,B\n",
  disparate_impact: "predicted,group\n1,A\n1,A\n1,A\n0,A\n1,B\n0,B\n0,B\n0,B\n",
  faithfulness: "attribution,performance_drop\n0.42,0.31\n0.27,0.22\n0.15,0.05\n0.09,0.11\n0.04,0.01\n",
  monotonicity: "prediction\n0.1\n0.3\n0.2\n0.5\n",
};

function show(id, value) {
  $(id).textContent = typeof value === "string" ? value : JSON.stringify(value, null, 2);
}

function runCheck() {
  const report = JSON.parse(check_case($("source").value));
  const summary = $("check-summary");
  summary.className = report.ok ? "ok" : "bad";
  summary.textContent = report.ok
    ? "complete: no violations"
    : `${report.violations.length} violations, ${report.diagnostics.length} diagnostics`;
  const lines = [
    ...report.diagnostics.map((d) => `${d.span.line}:${d.span.column} ${d.severity} [${d.code}] ${d.message}`),
    ...report.violations.map((v) => `${v.element_id}: ${v.rule}`),
    Object.entries(report.counts).map(([k, n]) => `${k}: ${n}`).join(", "),
  ];
  show("check-output", lines.join("\n"));
  loadLeaves();
}

function runTrace() {
  const result = JSON.parse(trace($("source").value, $("trace-id").value.trim(), $("trace-forward").checked));
  if (result.error) {
    show("trace-output", result.error);
    return;
  }
  show("trace-output", [result.id, ...result.chain.map((hop) => `→ [${hop.join(", ")}]`)].join("\n"));
}

const overrides = {};

function loadLeaves() {
  const leaves = JSON.parse(goal_leaves($("source").value));
  const box = $("leaves");
  box.replaceChildren();
  if (leaves.error) {
    box.textContent = leaves.error;
    return;
  }
  for (const key of Object.keys(overrides)) delete overrides[key];
  for (const leaf of leaves) {
    overrides[leaf.id] = leaf.satisfaction;
    const row = document.createElement("div");
    row.className = "leaf";
    const name = document.createElement("span");
    name.textContent = leaf.id;
    name.title = leaf.label;
    const slider = Object.assign(document.createElement("input"), {
      type: "range", min: -100, max: 100, step: 5, value: leaf.satisfaction,
    });
    const shown = document.createElement("span");
    shown.textContent = leaf.satisfaction;
    slider.addEventListener("input", () => {
      overrides[leaf.id] = Number(slider.value);
      shown.textContent = slider.value;
      evaluate();
    });
    row.append(name, slider, shown);
    box.append(row);
  }
  evaluate();
}

function evaluate() {
  const v = JSON.parse(evaluate_goals($("source").value, JSON.stringify(overrides)));
  const out = $("verdict");
  if (v.error) {
    out.className = "bad";
    out.textContent = v.error;
    return;
  }
  out.className = v.mitigated ? "ok" : "bad";
  const unresolved = v.unresolved.length ? `; below threshold: ${v.unresolved.join(", ")}` : "";
  out.textContent = `${v.root} = ${v.root_satisfaction} (threshold ${v.threshold}): ` +
    `${v.mitigated ? "mitigated" : "not mitigated"}${unresolved}`;
  show("dot", v.dot);
}

function runMetric() {
  const result = JSON.parse(
    compute_metric($("metric-kind").value, $("metric-csv").value, $("group-a").value, $("group-b").value),
  );
  show("metric-output", result);
}

await init();
$("source").value = example_case();
$("metric-csv").value = SAMPLE_CSV.demographic_parity;
$("metric-kind").addEventListener("change", () => {
  $("metric-csv").value = SAMPLE_CSV[$("metric-kind").value];
});
$("check").addEventListener("click", runCheck);
$("trace").addEventListener("click", runTrace);
$("metric").addEventListener("click", runMetric);
runCheck();
