import numpy as np
import pytest

from aog_explainer import aog
from aog_explainer.errors import ConfigError
from aog_explainer.lattice import zeta

# two-pattern toy: {1,2} and {1,2,3}, both with w = 2
TOY_MASKS, TOY_W = [0b011, 0b111], [2.0, 2.0]
TOY_L_BEFORE = 7.6096404744368105
TOY_L_AFTER = 3.6731833362179582


def _subset_sums(n, masks, weights):
    table = np.zeros(1 << n)
    for m, w in zip(masks, weights):
        table[m] += w
    return zeta(table)


def test_toy_description_length():
    g = aog.from_patterns(3, TOY_MASKS, TOY_W)
    total, l_vocab, l_pat = aog.description_length(g)
    assert total == pytest.approx(7.61, abs=5e-3)
    assert l_vocab == pytest.approx(3.80, abs=1e-2)
    assert l_pat == pytest.approx(3.80, abs=1e-2)
    # p = (0.4, 0.4, 0.2), kappa = 2.5
    h = -(2 * 0.4 * np.log2(0.4) + 0.2 * np.log2(0.2))
    assert l_vocab == pytest.approx(2.5 * h, abs=1e-12)
    assert total == pytest.approx(TOY_L_BEFORE, abs=1e-12)


def test_toy_gain_and_build():
    g = aog.from_patterns(3, TOY_MASKS, TOY_W)
    assert aog.coalition_gain(g, 0b011) == pytest.approx(-1.97, abs=5e-3)
    built, trace = aog.build_aog(3, TOY_MASKS, TOY_W)
    assert built.coalitions == (0b011,)
    assert len(trace) == 2
    assert trace[0].total == pytest.approx(TOY_L_BEFORE, abs=1e-12)
    assert trace[1].total == pytest.approx(3.67, abs=5e-3)
    assert trace[1].total == pytest.approx(TOY_L_AFTER, abs=1e-12)
    assert aog.description_length(built)[0] == pytest.approx(trace[1].total, abs=1e-9)


def test_single_pattern_single_leaf():
    g = aog.from_patterns(1, [1], [4.0])
    assert aog.description_length(g) == (0.0, 0.0, 0.0)


def test_doubling_weights():
    a = aog.description_length(aog.from_patterns(3, TOY_MASKS, TOY_W))
    b = aog.description_length(aog.from_patterns(3, TOY_MASKS, [2 * w for w in TOY_W]))
    assert b[1] == pytest.approx(a[1] / 2, abs=1e-12)
    assert b[2] == pytest.approx(a[2], abs=1e-12)


def test_gain_of_disjoint_alpha_is_not_negative():
    g = aog.from_patterns(6, [0b000011, 0b001100], [1.0, 2.0])
    assert aog.coalition_gain(g, 0b110000) >= 0.0
    with pytest.raises(ConfigError):
        aog.coalition_gain(g, 0b000001)


def test_unshared_alpha_rejected():
    built, trace = aog.build_aog(4, [0b0111, 0b1000], [1.0, 1.0])
    assert built.coalitions == ()
    assert len(trace) == 1


def test_disjoint_patterns_no_coalitions():
    built, _ = aog.build_aog(6, [0b000011, 0b001100, 0b110000], [1.0, -2.0, 0.5])
    assert built.coalitions == ()


def test_shared_pair_becomes_coalition():
    # {x4,x5,x6} and {x5,x6,x7} share {x5,x6}
    built, _ = aog.build_aog(7, [0b0111000, 0b1110000], [1.0, 1.0])
    assert built.coalitions == (0b0110000,)
    p = built.patterns[built.pattern_index(0b0111000)]
    assert p.leaves == 0b0001000 and p.coalitions == (0,)
    pg = aog.extract_parse_graph(built, 0b0111000)
    assert {"c0", "x4", "x5", "x6"} <= pg.nodes
    assert pg.frontier == 0b0111000


def test_evaluate_matches_subset_sums_all_masks(rng):
    n = 10
    masks = [int(m) for m in rng.choice(np.arange(1, 1 << n), size=25, replace=False)]
    weights = rng.normal(size=25).tolist()
    g, trace = aog.build_aog(n, masks, weights)
    expected = _subset_sums(n, masks, weights)
    np.testing.assert_allclose(aog.evaluate_all(g), expected, atol=1e-9)
    for s in rng.integers(0, 1 << n, size=50):
        assert aog.evaluate_aog(g, int(s)) == pytest.approx(expected[s], abs=1e-9)
    assert aog.evaluate_aog(g, (1 << n) - 1) == pytest.approx(sum(weights))


def test_missing_leaf_silences_pattern():
    g = aog.from_patterns(3, [0b111], [5.0])
    assert aog.evaluate_aog(g, 0b011) == 0.0
    assert aog.evaluate_aog(g, 0b111) == 5.0


def test_build_invariants(rng):
    n = 8
    masks = sorted({int(m) for m in rng.integers(1, 1 << n, size=30)})
    weights = rng.normal(size=len(masks)).tolist()
    g, trace = aog.build_aog(n, masks, weights)
    totals = [t.total for t in trace]
    assert all(b < a for a, b in zip(totals, totals[1:]))
    assert all(r >= 2 for r in g.references())
    # replay the accepted rewrites and check semantics and bookkeeping at each step
    h = aog.from_patterns(n, masks, weights)
    ref = aog.evaluate_all(h)
    for t in trace[1:]:
        h = aog.rewrite(h, t.alpha)
        np.testing.assert_array_equal(aog.evaluate_all(h), ref)
        assert aog.description_length(h)[0] == pytest.approx(t.total, abs=1e-9)


def test_parse_graph_coverage():
    g, _ = aog.build_aog(3, TOY_MASKS, TOY_W)
    plain = aog.from_patterns(3, [0b101], [1.0])
    pg = aog.extract_parse_graph(plain, 0b101)
    assert pg.nodes == {"root", "p0", "x1", "x3"}
    union = set()
    for m in TOY_MASKS:
        union |= set(aog.extract_parse_graph(g, m).edges)
    assert union == set(aog.edges(g))
    with pytest.raises(ConfigError):
        aog.extract_parse_graph(g, 0b100)


def test_exports():
    plain = aog.from_patterns(3, [0b011, 0b100], [1.0, -2.0])
    assert len(aog.layers(plain)) == 3
    dot = aog.to_dot(plain)
    assert dot.count("rank=same") == 3
    neg = [line for line in dot.splitlines() if '"p1" [' in line][0]
    assert 'class="negative"' in neg
    g, _ = aog.build_aog(3, TOY_MASKS, TOY_W, meta={"config_hash": "0123"})
    text = aog.to_json(g)
    assert aog.to_json(aog.from_json(text)) == text
    assert "config_hash=0123" in aog.to_dot(g)


def test_malformed_json():
    with pytest.raises(ConfigError):
        aog.from_json("{not json")


def test_invalid_description_rejected():
    with pytest.raises(ConfigError):
        aog.AndOrGraph(3, (0b011,), (aog.PatternNode(0b111, 1.0, 0b001, (0,)),))
