"""Randomised invariants over small lattices."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from aog_explainer import aog
from aog_explainer.harsanyi import reconstruction_residual, shapley_values, spectrum_from_table
from aog_explainer.lattice import SubsetTable, mask_of, mobius, popcounts, superset_sums, zeta
from aog_explainer.metrics import build_assignment, iou_top_m, jaccard, rho_unfaith
from aog_explainer.sparsify import PruneConfig, explained_ratio, greedy_prune, project_ball, ratio
from aog_explainer.verification import brute_superset_sum, si_direct_all, sti_direct_all, unfaith_brute

finite = st.floats(-100, 100, allow_nan=False, allow_infinity=False)
settings.register_profile("suite", max_examples=60, deadline=None)
settings.load_profile("suite")


@st.composite
def tables(draw, n_min=1, n_max=6):
    n = draw(st.integers(n_min, n_max))
    return draw(arrays(np.float64, 1 << n, elements=finite))


@given(tables())
def test_round_trip(v):
    scale = max(1.0, np.max(np.abs(v)))
    assert np.max(np.abs(zeta(mobius(v)) - v)) < 1e-9 * scale
    assert np.max(np.abs(mobius(zeta(v)) - v)) < 1e-9 * scale * len(v)


@given(tables(), st.floats(-3, 3), st.floats(-3, 3), st.data())
def test_linearity(u, a, b, data):
    v = data.draw(arrays(np.float64, len(u), elements=finite))
    lhs = mobius(a * u + b * v)
    rhs = a * mobius(u) + b * mobius(v)
    assert np.allclose(lhs, rhs, atol=1e-9 * max(1.0, np.max(np.abs(u)) + np.max(np.abs(v))) * len(u))


@given(tables())
def test_efficiency_and_faithfulness(v):
    spec = spectrum_from_table(SubsetTable.from_array(v))
    assert reconstruction_residual(spec.w.values, v) <= 1e-9 * max(np.max(np.abs(v)), 1e-300)
    assert abs(spec.w.values.sum() - v[-1]) <= 1e-9 * max(1.0, np.max(np.abs(v))) * len(v)


@given(tables(), st.data())
def test_uniqueness_witness(v, data):
    w = mobius(v)
    s = data.draw(st.integers(0, len(v) - 1))
    w2 = w.copy()
    w2[s] += 1e-3
    assert np.max(np.abs(zeta(w2) - v)) > 1e-9 * max(1.0, np.max(np.abs(v)))


@given(tables(n_max=5))
def test_superset_sum_matches_brute(t):
    assert np.allclose(superset_sums(t), brute_superset_sum(t), atol=1e-9 * max(1.0, np.max(np.abs(t))) * len(t))


@given(tables(n_min=2, n_max=5))
def test_shapley_efficiency(v):
    spec = spectrum_from_table(SubsetTable.from_array(v))
    assert abs(shapley_values(spec).sum() - (v[-1] - v[0])) < 1e-8 * max(1.0, np.max(np.abs(v))) * len(v)


@given(tables(n_min=2, n_max=5), st.integers(1, 5))
def test_derived_equals_direct(v, k):
    from aog_explainer.harsanyi import si_array, sti_array

    n = len(v).bit_length() - 1
    w = mobius(v)
    scale = max(1.0, np.max(np.abs(v))) * len(v)
    assert np.allclose(si_array(w), si_direct_all(v), atol=1e-8 * scale)
    k = min(k, n)
    assert np.allclose(sti_array(w, k), sti_direct_all(v, k), atol=1e-8 * scale)


@given(tables(n_min=1, n_max=4))
def test_prune_argmin_and_bookkeeping(v):
    spec = spectrum_from_table(SubsetTable.from_array(v))
    w = spec.w.values
    _, trace = greedy_prune(spec, PruneConfig(max_patterns=0))
    alive = set(range(len(v)))
    scale = max(1.0, np.max(np.abs(v))) ** 2 * len(v)
    for t in trace:
        before = unfaith_brute(v, alive, w)
        cost = {u: unfaith_brute(v, alive - {u}, w) - before for u in alive}
        best = min(cost.values())
        assert cost[t.mask] <= best + 1e-8 * scale
        assert abs(cost[t.mask] - t.delta) <= 1e-8 * scale
        alive.discard(t.mask)
        kept = np.where(np.isin(np.arange(len(w)), list(alive)), w, 0.0)
        l1 = float(np.abs(kept).sum())
        delta = spec.v_full - float(kept.sum())
        assert t.r_omega == ratio(l1, delta)


@given(tables(n_min=2, n_max=5), st.floats(0.05, 1.0))
def test_min_ratio_respected(v, bound):
    spec = spectrum_from_table(SubsetTable.from_array(v))
    expl, trace = greedy_prune(spec, PruneConfig(min_ratio=bound))
    assert expl.r_omega >= bound
    assert expl.r_omega == explained_ratio(expl)
    assert 0.0 <= expl.r_omega <= 1.0


@given(tables(n_min=2, n_max=5))
def test_harsanyi_rho_never_worse(v):
    spec = spectrum_from_table(SubsetTable.from_array(v))
    h = rho_unfaith(v, build_assignment("harsanyi", spec))
    for method, k in (("shapley_as_effects", None), ("occlusion_as_effects", None), ("si", None), ("sti", 2)):
        assert h <= rho_unfaith(v, build_assignment(method, spec, k)) + 1e-12


@given(tables(), st.data())
def test_jaccard_properties(w, data):
    w2 = data.draw(arrays(np.float64, len(w), elements=finite))
    j = jaccard(w, w2)
    assert 0.0 <= j <= 1.0
    assert j == jaccard(w2, w)
    assert jaccard(w, w) == 1.0


@given(st.integers(3, 6), st.data())
def test_iou_permutation_equivariant(n, data):
    w = data.draw(arrays(np.float64, 1 << n, elements=st.integers(-20, 20).map(float)))
    w = w + np.arange(1 << n) * 1e-3  # break magnitude ties so rankings are unambiguous
    truth = data.draw(st.sets(st.integers(1, (1 << n) - 1), min_size=1, max_size=4))
    perm = data.draw(st.permutations(range(n)))

    def relabel(s):
        return mask_of(perm[i] for i in range(n) if s >> i & 1)

    w_p = np.zeros_like(w)
    for s in range(1 << n):
        w_p[relabel(s)] = w[s]
    assert iou_top_m(w, truth) == iou_top_m(w_p, {relabel(t) for t in truth})


@st.composite
def pattern_sets(draw):
    n = draw(st.integers(2, 7))
    masks = draw(st.lists(st.integers(1, (1 << n) - 1), min_size=1, max_size=10, unique=True))
    weights = draw(st.lists(st.floats(-5, 5).filter(lambda x: abs(x) > 1e-3), min_size=len(masks), max_size=len(masks)))
    return n, masks, weights


@given(pattern_sets())
def test_aog_semantics_and_trace(case):
    n, masks, weights = case
    g, trace = aog.build_aog(n, masks, weights)
    table = np.zeros(1 << n)
    for m, w in zip(masks, weights):
        table[m] = w
    assert np.allclose(aog.evaluate_all(g), zeta(table), atol=1e-9)
    totals = [t.total for t in trace]
    assert all(b < a for a, b in zip(totals, totals[1:]))
    assert all(r >= 2 for r in g.references())
    assert abs(aog.description_length(g)[0] - totals[-1]) < 1e-9
    assert aog.to_json(aog.from_json(aog.to_json(g))) == aog.to_json(g)
    frontier = 0
    for p in g.patterns:
        frontier |= aog.extract_parse_graph(g, p.mask).frontier
    assert frontier == np.bitwise_or.reduce(masks)


@given(st.integers(1, 6), st.data())
def test_project_ball(n, data):
    r = np.array(data.draw(st.lists(finite, min_size=n, max_size=n)))
    r0 = np.array(data.draw(st.lists(finite, min_size=n, max_size=n)))
    tau = np.array(data.draw(st.lists(st.floats(0, 10), min_size=n, max_size=n)))
    out = project_ball(r, r0, tau)
    assert np.all((out - r0) ** 2 <= tau)


def test_popcounts_match_bit_count():
    assert all(popcounts(7)[s] == bin(s).count("1") for s in range(128))
