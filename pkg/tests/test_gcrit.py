import itertools

import numpy as np
import pytest
import sympy

from oracles import symbolic_coefficient_matrix
from semid.diagram import build_diagram, depth, enumerate_unblocked_paths, inc_set, ordering_delta, subpath
from semid.exceptions import EmptyIncSet, MalformedWitness
from semid.gcrit import (
    Witness,
    WitnessSet,
    all_shallower,
    build_phi_system,
    check_g_criterion,
    find_auxiliary_set,
    find_witness,
    iter_auxiliary_sets,
    numeric_rank_oracle,
    pair_conflicts,
)
from semid.random_models import random_diagram
from semid.wright import decompose


def _poly(p):
    return str(p)


def _path(d, x, y, text):
    (p,) = [p for p in enumerate_unblocked_paths(d, x, y) if str(p) == text]
    return p


def _witness(d, y, *specs):
    ws = []
    for z, text in specs:
        p = _path(d, z, y, text)
        ws.append(Witness(z, p, p.edges[-1]))
    return WitnessSet(y, tuple(ws))


def test_phi_smoke(smoke):
    sys = build_phi_system(smoke, ["Z", "X"], "Y")
    assert sys.unknowns == ("b", "γ")
    rz, rx = sys.rows
    assert [_poly(c) for c in rz.coeffs] == ["1", "a"]
    assert [_poly(c) for c in rx.coeffs] == ["a", "1"]
    assert not rz.intercept and not rx.intercept


def test_phi_coll(coll):
    sys = build_phi_system(coll, ["Z1", "Z2"], "Y")
    assert sys.unknowns == ("λ1", "λ2")
    r1, r2 = sys.rows
    assert [_poly(c) for c in r1.coeffs] == ["a", "b"]
    assert [_poly(c) for c in r2.coeffs] == ["c*a", "c*b"]


def test_phi_single_edge():
    d = build_diagram(["X", "Y"], [("X", "Y", "λ")])
    (row,) = build_phi_system(d, ["X"], "Y").rows
    assert [_poly(c) for c in row.coeffs] == ["1"]


def test_phi_errors(smoke):
    with pytest.raises(EmptyIncSet):
        build_phi_system(smoke, ["Y"], "X")
    with pytest.raises(ValueError):
        build_phi_system(smoke, ["Y", "X"], "Y")


@pytest.mark.parametrize("seed", range(25))
def test_reconstruction_and_intercept_law(seed):
    d = random_diagram(6, seed, 0.4, 0.4)
    order = ordering_delta(d)
    for y in d.variables:
        if not inc_set(d, y, order):
            continue
        zs = [v for v in d.variables if v != y]
        sys = build_phi_system(d, zs, y, order)
        for row in sys.rows:
            assert row.reconstruct(sys.unknowns).canonical() == decompose(d, row.z, y).canonical()
            if depth(d, row.z) < depth(d, y) or (
                depth(d, row.z) == depth(d, y) and order.index(row.z) < order.index(y)
            ):
                assert not row.intercept


def test_g_criterion_iv(iv):
    w = _witness(iv, "Y", ("U", "U -> W -> Y"), ("W", "W <-> Y"))
    assert check_g_criterion(iv, w, "Y")


def test_g_criterion_coll(coll):
    w = _witness(coll, "Y", ("Z1", "Z1 -> X1 -> Y"), ("Z2", "Z2 -> Z1 -> X2 -> Y"))
    assert not check_g_criterion(coll, w, "Y")
    assert pair_conflicts(w.witnesses[0], w.witnesses[1], "Y") == ["Z1"]


def test_g_criterion_single_edge():
    d = build_diagram(["X", "Y"], [("X", "Y", "λ")])
    assert check_g_criterion(d, _witness(d, "Y", ("X", "X -> Y")), "Y")


def test_g_criterion_needs_distinct_inc_edges(smoke):
    w = _witness(smoke, "Y", ("Z", "Z -> Y"), ("X", "X -> Z -> Y"))
    assert not check_g_criterion(smoke, w, "Y")


def test_malformed_witness(smoke):
    p = _path(smoke, "X", "Y", "X <-> Y")
    with pytest.raises(MalformedWitness):
        check_g_criterion(smoke, WitnessSet("Y", (Witness("Z", p, p.edges[0]),)), "Y")
    q = _path(smoke, "Z", "Y", "Z -> Y")
    with pytest.raises(MalformedWitness):
        check_g_criterion(smoke, WitnessSet("Y", (Witness("X", p, q.edges[0]),)), "Y")


def test_find_auxiliary_set_smoke(smoke):
    found = dict(find_auxiliary_set(smoke, "Y"))
    assert ("Z", "X") in found
    assert [str(w.path) for w in found[("Z", "X")]] == ["Z -> Y", "X <-> Y"]


def test_find_auxiliary_set_bow(bow):
    assert find_auxiliary_set(bow, "Y") == []


def test_find_auxiliary_set_coll(coll):
    found = find_auxiliary_set(coll, "Y")
    sets = [frozenset(zs) for zs, _ in found]
    assert sets[0] == {"X1", "X2"}
    assert frozenset({"Z1", "Z2"}) not in sets
    assert [str(w.path) for w in found[0][1]] == ["X2 -> Y", "X1 -> Y"]


def test_all_shallower_candidates_first():
    for seed in range(30):
        d = random_diagram(6, seed, 0.4, 0.3)
        for y in d.variables:
            if not inc_set(d, y):
                continue
            flags = [all_shallower(d, zs, y) for zs, _ in iter_auxiliary_sets(d, y)]
            assert flags == sorted(flags, reverse=True)


def test_witness_bijection():
    for seed in range(30):
        d = random_diagram(6, seed, 0.4, 0.4)
        order = ordering_delta(d)
        for y in d.variables:
            inc = inc_set(d, y, order)
            if not inc:
                continue
            for zs, w in iter_auxiliary_sets(d, y, order):
                assert sorted(e.index for e in (x.edge for x in w)) == sorted(e.index for e in inc)
                assert w.variables == zs
                assert check_g_criterion(d, w, y, order)


@pytest.mark.parametrize(
    "name, zs, det",
    [("iv", ("U", "W"), "c"), ("smoke", ("Z", "X"), "1 - a**2"), ("coll", ("Z1", "Z2"), "0")],
)
def test_rank_oracle_examples(request, name, zs, det):
    d = request.getfixturevalue(name)
    inc = [e.param for e in inc_set(d, "Y")]
    A = symbolic_coefficient_matrix(d, zs, "Y", inc)
    assert sympy.expand(A.det() - sympy.sympify(det, locals={"c": sympy.Symbol("c")})) == 0
    assert numeric_rank_oracle(d, zs, "Y", seed=0) == (det != "0")


def test_rank_oracle_size_check(smoke):
    with pytest.raises(ValueError):
        numeric_rank_oracle(smoke, ("Z",), "Y", seed=0)


def _instances(n_instances, seed0=0):
    rng = np.random.default_rng(seed0)
    out = []
    s = 0
    while len(out) < n_instances:
        s += 1
        n = int(rng.integers(3, 8))
        d = random_diagram(n, 10_000 + s, 0.45, 0.35)
        ys = [y for y in d.variables if 1 <= len(inc_set(d, y)) <= 4]
        if not ys:
            continue
        y = ys[int(rng.integers(len(ys)))]
        k = len(inc_set(d, y))
        others = [v for v in d.variables if v != y]
        if len(others) < k:
            continue
        zs = tuple(rng.choice(others, size=k, replace=False))
        out.append((d, y, zs, s))
    return out


def test_differential_g_vs_rank():
    for d, y, zs, s in _instances(150):
        g = find_witness(d, zs, y) is not None
        assert g == numeric_rank_oracle(d, zs, y, seed=s), (d.to_spec(), y, zs)


def test_exchange_soundness():
    checked = 0
    for seed in range(60):
        d = random_diagram(6, seed, 0.5, 0.4)
        order = ordering_delta(d)
        for y in d.variables:
            inc = {e.param for e in inc_set(d, y, order)}
            if len(inc) < 2:
                continue
            paths = {
                z: [p for p in enumerate_unblocked_paths(d, z, y) if p.edges[-1].param in inc]
                for z in d.variables
                if z != y
            }
            for zi, zj in itertools.permutations(paths, 2):
                for pi, pj in itertools.product(paths[zi][:4], paths[zj][:4]):
                    if pi.edges[-1] == pj.edges[-1]:
                        continue
                    wi, wj = Witness(zi, pi, pi.edges[-1]), Witness(zj, pj, pj.edges[-1])
                    for u in pair_conflicts(wi, wj, y):
                        for a, b in ((pi, pj), (pj, pi)):
                            joined = subpath(a, a.source, u).concat(subpath(b, u, y))
                            assert joined.is_unblocked()
                            checked += 1
    assert checked > 100
