"""YAML model files.

Example::

    variables: [X, Z, Y]
    directed:
      - {from: X, to: Z, param: a}
      - {from: Z, to: Y, param: b}
    bidirected:
      - {a: X, b: Y, param: γ}
    params: {a: 0.5, b: 0.4, γ: 0.2}   # optional

Every error carries the line and column of the offending node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path as FsPath

import yaml

from .diagram import CausalDiagram, build_diagram
from .exceptions import DiagramError, ModelFileError

TOP_KEYS = ("variables", "directed", "bidirected", "params")
EDGE_KEYS = {"directed": ("from", "to", "param"), "bidirected": ("a", "b", "param")}

FIXTURES = ("SMOKE", "IV", "COLL", "BOW", "WIDE12")


@dataclass
class ModelFile:
    variables: list[str]
    directed: list[tuple[str, str, str]] = field(default_factory=list)
    bidirected: list[tuple[str, str, str]] = field(default_factory=list)
    params: dict[str, float] | None = None

    def diagram(self) -> CausalDiagram:
        return build_diagram(self.variables, self.directed, self.bidirected)

    def to_dict(self) -> dict:
        out: dict = {"variables": list(self.variables)}
        if self.directed:
            out["directed"] = [{"from": a, "to": b, "param": p} for a, b, p in self.directed]
        if self.bidirected:
            out["bidirected"] = [{"a": a, "b": b, "param": p} for a, b, p in self.bidirected]
        if self.params is not None:
            out["params"] = dict(self.params)
        return out

    @classmethod
    def from_diagram(cls, d: CausalDiagram, params=None) -> "ModelFile":
        spec = d.to_spec()
        return cls(spec["variables"], spec["directed"], spec["bidirected"], dict(params) if params else None)


def _fail(node, message):
    mark = node.start_mark
    raise ModelFileError(message, mark.line + 1, mark.column + 1)


def _scalar(node, what) -> str:
    if not isinstance(node, yaml.ScalarNode) or node.value == "":
        _fail(node, f"{what} must be a non-empty name")
    if not node.value.isidentifier():
        _fail(node, f"{what} {node.value!r} is not a valid name")
    return node.value


def _mapping(node, allowed, what) -> dict:
    if not isinstance(node, yaml.MappingNode):
        _fail(node, f"{what} must be a mapping")
    out = {}
    for k, v in node.value:
        key = k.value if isinstance(k, yaml.ScalarNode) else None
        if key not in allowed:
            _fail(k, f"unknown key {key!r} in {what}; expected one of {', '.join(allowed)}")
        if key in out:
            _fail(k, f"duplicate key {key!r} in {what}")
        out[key] = v
    return out


def _sequence(node, what) -> list:
    if not isinstance(node, yaml.SequenceNode):
        _fail(node, f"{what} must be a list")
    return node.value


def _number(node, name) -> float:
    if not isinstance(node, yaml.ScalarNode):
        _fail(node, f"value of {name} must be a number")
    try:
        return float(node.value)
    except ValueError:
        _fail(node, f"value of {name} must be a number, got {node.value!r}")


def parse_model(text: str) -> ModelFile:
    try:
        root = yaml.compose(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line, col = (mark.line + 1, mark.column + 1) if mark else (None, None)
        raise ModelFileError(exc.problem or str(exc), line, col) from None
    if root is None:
        raise ModelFileError("empty model file", 1, 1)
    top = _mapping(root, TOP_KEYS, "model file")
    if "variables" not in top:
        _fail(root, "missing required key 'variables'")
    variables = [_scalar(n, "variable") for n in _sequence(top["variables"], "variables")]
    edges: dict[str, list[tuple[str, str, str]]] = {}
    nodes = {}
    for kind, keys in EDGE_KEYS.items():
        edges[kind] = []
        if kind not in top:
            continue
        for item in _sequence(top[kind], kind):
            entry = _mapping(item, keys, f"{kind} edge")
            for k in keys:
                if k not in entry:
                    _fail(item, f"{kind} edge is missing {k!r}")
            triple = tuple(_scalar(entry[k], k) for k in keys)
            edges[kind].append(triple)
            nodes[(kind, len(edges[kind]) - 1)] = item
    params = None
    if "params" in top:
        pmap = top["params"]
        if not isinstance(pmap, yaml.MappingNode):
            _fail(pmap, "params must be a mapping")
        params = {}
        for k, v in pmap.value:
            name = _scalar(k, "parameter")
            if name in params:
                _fail(k, f"duplicate parameter {name!r}")
            params[name] = _number(v, name)
    model = ModelFile(variables, edges["directed"], edges["bidirected"], params)
    try:
        d = model.diagram()
    except DiagramError as exc:
        _fail(root, str(exc))
    if params is not None:
        unknown = sorted(set(params) - set(d.params))
        if unknown:
            _fail(top["params"], "params block names unknown parameters: " + ", ".join(unknown))
    return model


def dump_model(model: ModelFile) -> str:
    return yaml.safe_dump(model.to_dict(), sort_keys=False, allow_unicode=True, default_flow_style=None)


def fixture_text(name: str) -> str:
    return resources.files("semid").joinpath("fixtures", f"{name.lower()}.yaml").read_text(encoding="utf-8")


def load_fixture(name: str) -> ModelFile:
    return parse_model(fixture_text(name))


def load_model(source: str) -> ModelFile:
    """Read a model from a file path, or from a shipped fixture by name."""
    path = FsPath(source)
    if not path.exists() and source.upper() in FIXTURES:
        return load_fixture(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelFileError(f"cannot read {source}: {exc.strerror}") from None
    return parse_model(text)
