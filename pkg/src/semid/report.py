"""Report payloads shared by the text, JSON and DOT renderers."""

from __future__ import annotations

import json
from importlib import resources

from .diagram import BIDIRECTED, CausalDiagram, inc_set
from .gcrit import all_shallower
from .ident import DependenceGraph, Verdict


def verdict_payload(d: CausalDiagram, v: Verdict) -> dict:
    inc = {}
    for y in v.order:
        edges = inc_set(d, y, v.order)
        if edges:
            inc[y] = [{"param": e.param, "edge": e.render()} for e in edges]
    aux = {}
    for y, (zs, ws) in v.assignment.items():
        aux[y] = {
            "set": list(zs),
            "all_shallower": all_shallower(d, zs, y),
            "witnesses": [{"z": w.z, "path": str(w.path), "param": w.edge.param} for w in ws],
        }
    dep = None
    if v.dependence is not None:
        dep = {
            "nodes": list(v.dependence.nodes),
            "edges": [{"from": a, "to": b, "case": c} for a, b, c in v.dependence.edges],
        }
    return {
        "verdict": v.status,
        "headline": v.headline(),
        "reason": v.reason,
        "culprits": list(v.culprits),
        "ordering": list(v.order),
        "inc": inc,
        "auxiliary_sets": aux,
        "dependence_graph": dep,
        "schedule": list(v.schedule),
        "fast_path": v.fast_path,
        "combinations_tried": v.combinations_tried,
        "diagnostics": list(v.diagnostics),
    }


def render_verdict(payload: dict) -> str:
    lines = [payload["headline"], "ordering: " + ", ".join(payload["ordering"])]
    if payload["inc"]:
        lines.append("Inc sets:")
        for y, edges in payload["inc"].items():
            lines.append(f"  Inc({y}): " + ", ".join(f"{e['param']} [{e['edge']}]" for e in edges))
    if payload["auxiliary_sets"]:
        lines.append("auxiliary sets:")
        for y, entry in payload["auxiliary_sets"].items():
            tag = " (all shallower)" if entry["all_shallower"] else ""
            lines.append(f"  {y}: {{{', '.join(entry['set'])}}}{tag}")
            for w in entry["witnesses"]:
                lines.append(f"    {w['z']}: {w['path']}  via {w['param']}")
    dep = payload["dependence_graph"]
    if dep is not None:
        if dep["edges"]:
            lines.append("dependence graph:")
            lines.extend(f"  {e['from']} -> {e['to']} ({e['case']})" for e in dep["edges"])
        else:
            lines.append("dependence graph: no edges")
    if payload["fast_path"]:
        lines.append("solved in depth order: every auxiliary set lies strictly above its variable")
    if payload["schedule"]:
        lines.append("schedule: " + ", ".join(payload["schedule"]))
    lines.append(f"candidate combinations tried: {payload['combinations_tried']}")
    for msg in payload["diagnostics"]:
        lines.append(f"diagnostic: {msg}")
    if payload.get("ordering_check"):
        chk = payload["ordering_check"]
        lines.append(f"ordering check: {chk['runs']} alternative orderings, {len(chk['disagreements'])} disagreements")
        for dis in chk["disagreements"]:
            lines.append(f"  delta-seed {dis['delta_seed']}: {dis['headline']} (ordering {', '.join(dis['ordering'])})")
    return "\n".join(lines)


def verdict_schema() -> dict:
    return json.loads(resources.files("semid").joinpath("verdict.schema.json").read_text(encoding="utf-8"))


def _q(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def diagram_dot(d: CausalDiagram, name: str = "diagram") -> str:
    """DOT with bidirected arcs drawn as dashed double-headed edges."""
    out = [f"digraph {_q(name)} {{"]
    out.extend(f"  {_q(v)};" for v in d.variables)
    for e in d.edges:
        if e.kind == BIDIRECTED:
            out.append(f"  {_q(e.a)} -> {_q(e.b)} [dir=both, style=dashed, label={_q(e.param)}];")
        else:
            out.append(f"  {_q(e.a)} -> {_q(e.b)} [label={_q(e.param)}];")
    out.append("}")
    return "\n".join(out) + "\n"


def dependence_dot(g: DependenceGraph, name: str = "dependence") -> str:
    out = [f"digraph {_q(name)} {{"]
    out.extend(f"  {_q(v)};" for v in g.nodes)
    out.extend(f"  {_q(a)} -> {_q(b)} [label={_q(c)}];" for a, b, c in g.edges)
    out.append("}")
    return "\n".join(out) + "\n"


def render_summary(summary) -> str:
    data = summary.as_dict()
    lines = [
        f"trials: {data['trials']}, parameters: {data['parameters']}",
        f"worst error: {data['worst_error']:.3e} (tolerance {data['tolerance']:.0e})",
        f"failures: {data['failures']}, ill-conditioned: {data['ill_conditioned']}",
        "per trial:",
    ]
    for t in data["per_trial"]:
        err = "-" if t["error"] is None else f"{t['error']:.3e}"
        extra = f"  {t['message']}" if "message" in t else ""
        lines.append(f"  {t['trial']:4d} seed={t['seed']} {t['status']} error={err} cond={t['max_condition']:.3g}{extra}")
    verdict = "ok" if data["failures"] == 0 and data["worst_error"] <= data["tolerance"] else "FAILED"
    lines.append(
        f"{verdict}: worst error {data['worst_error']:.3e} ≤ {data['tolerance']:.0e}, {data['failures']} failures"
        if verdict == "ok"
        else f"{verdict}: worst error {data['worst_error']:.3e}, {data['failures']} failures"
    )
    return "\n".join(lines)
