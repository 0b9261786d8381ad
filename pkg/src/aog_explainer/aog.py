"""And-Or graph built from a sparse pattern set by greedy MDL coalition extraction.

Layers, bottom to top: input leaves, AND coalition nodes (flat leaf sets),
AND pattern nodes carrying ``w_S``, and a summing OR root.  The vocabulary
is leaves plus coalitions; a member's count is the total ``|w_S|`` of the
patterns that reference it directly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .lattice import check_capacity, members, popcount, variable_names

KAPPA_SCALE = 10.0


@dataclass(frozen=True)
class PatternNode:
    """AND node for one pattern: individual leaves plus referenced coalitions."""

    mask: int
    weight: float
    leaves: int
    coalitions: tuple[int, ...] = ()


@dataclass(frozen=True)
class AndOrGraph:
    n: int
    coalitions: tuple[int, ...]
    patterns: tuple[PatternNode, ...]
    variables: tuple[str, ...] = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        check_capacity(self.n)
        if not self.variables:
            object.__setattr__(self, "variables", tuple(variable_names(self.n)))
        for c in self.coalitions:
            if popcount(c) < 2 or c >> self.n:
                raise ConfigError(f"invalid coalition mask {c}")
        for p in self.patterns:
            expanded = p.leaves
            for k in p.coalitions:
                if not 0 <= k < len(self.coalitions):
                    raise ConfigError(f"pattern {p.mask} references unknown coalition {k}")
                if expanded & self.coalitions[k]:
                    raise ConfigError(f"pattern {p.mask} description overlaps itself")
                expanded |= self.coalitions[k]
            if expanded != p.mask:
                raise ConfigError(f"description of pattern {p.mask} expands to {expanded}")

    @property
    def root_total(self) -> float:
        return float(sum(p.weight for p in self.patterns))

    def pattern_index(self, mask: int) -> int:
        for k, p in enumerate(self.patterns):
            if p.mask == int(mask):
                return k
        raise ConfigError(f"pattern {mask} is not in the graph")

    def references(self) -> list[int]:
        """Number of patterns pointing at each coalition."""
        refs = [0] * len(self.coalitions)
        for p in self.patterns:
            for k in p.coalitions:
                refs[k] += 1
        return refs


def from_patterns(n: int, masks, weights, variables=None, meta=None) -> AndOrGraph:
    """Graph with no coalitions: every pattern points straight at its leaves."""
    patterns = tuple(PatternNode(int(m), float(w), int(m)) for m, w in zip(masks, weights))
    if not patterns:
        raise ConfigError("an And-Or graph needs at least one pattern")
    return AndOrGraph(n, (), patterns, tuple(variables or ()), dict(meta or {}))


# --- description length --------------------------------------------------


def vocabulary_counts(g: AndOrGraph) -> np.ndarray:
    """Counts for leaves ``0..n-1`` followed by coalitions."""
    counts = np.zeros(g.n + len(g.coalitions))
    for p in g.patterns:
        a = abs(p.weight)
        for i in members(p.leaves):
            counts[i] += a
        for k in p.coalitions:
            counts[g.n + k] += a
    return counts


def _entropy_bits(counts: np.ndarray) -> float:
    total = counts.sum()
    if total <= 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def description_length(g: AndOrGraph) -> tuple[float, float, float]:
    """``(total, L(M), L_M(g))`` in bits.

    ``L(M) = kappa * H(p)`` with ``kappa = 10 / Z`` and ``Z = sum |w_S|``;
    ``L_M(g)`` is the ``|w_S| / Z``-weighted mean over patterns of the code
    length of their descriptions.
    """
    if not g.patterns:
        raise ConfigError("description length of an empty pattern set")
    z = float(sum(abs(p.weight) for p in g.patterns))
    counts = vocabulary_counts(g)
    total = counts.sum()
    l_vocab = KAPPA_SCALE / z * _entropy_bits(counts)
    l_pat = 0.0
    for p in g.patterns:
        code = 0.0
        for m in members(p.leaves) + [g.n + k for k in p.coalitions]:
            code -= np.log2(counts[m] / total)
        l_pat += abs(p.weight) / z * code
    return float(l_vocab + l_pat), float(l_vocab), float(l_pat)


def _length_from_counts(counts: np.ndarray, z: float) -> float:
    # L(M) + L_M(g) collapse to H(p) * (10 + sum counts) / Z
    return _entropy_bits(counts) * (KAPPA_SCALE + counts.sum()) / z


def rewrite(g: AndOrGraph, alpha: int) -> AndOrGraph:
    """Add coalition ``alpha`` and point every pattern still holding all its leaves at it."""
    k = len(g.coalitions)
    patterns = tuple(
        PatternNode(p.mask, p.weight, p.leaves & ~alpha, p.coalitions + (k,)) if p.leaves & alpha == alpha else p
        for p in g.patterns
    )
    return AndOrGraph(g.n, g.coalitions + (alpha,), patterns, g.variables, dict(g.meta))


def coalition_gain(g: AndOrGraph, alpha: int) -> float:
    """``[L(g, M + alpha) - L(g, M)] / |alpha|`` with eligible descriptions rewritten."""
    alpha = int(alpha)
    if popcount(alpha) < 2 or alpha >> g.n:
        raise ConfigError("a coalition needs at least two input variables")
    before = description_length(g)[0]
    after = description_length(rewrite(g, alpha))[0]
    return (after - before) / popcount(alpha)


@dataclass(frozen=True)
class BuildStep:
    step: int
    alpha: int
    gain: float
    total: float
    shared: int


def build_aog(
    n: int,
    masks,
    weights,
    variables=None,
    meta=None,
) -> tuple[AndOrGraph, list[BuildStep]]:
    """Greedy coalition extraction.

    Candidates are pairwise intersections of the patterns' individually held
    leaves with at least two members.  Each round accepts the candidate with
    the most negative gain (ties: larger coalition, then lower mask) and
    stops when no candidate shortens the description or the best one is
    held by fewer than two patterns.
    """
    g = from_patterns(n, masks, weights, variables, meta)
    weight = np.abs(np.array([p.weight for p in g.patterns]))
    z = float(weight.sum())
    counts = vocabulary_counts(g)
    total = _length_from_counts(counts, z)
    trace = [BuildStep(0, 0, 0.0, float(total), 0)]
    while True:
        leaves = np.array([p.leaves for p in g.patterns], dtype=np.int64)
        cands = set()
        for a in range(len(leaves)):
            inter = leaves[a] & leaves[a + 1 :]
            cands.update(int(c) for c in inter if popcount(int(c)) >= 2)
        if not cands:
            break
        best = None
        for alpha in cands:
            holds = (leaves & alpha) == alpha
            c_alpha = float(weight[holds].sum())
            trial = np.append(counts, c_alpha)
            for i in members(alpha):
                trial[i] -= c_alpha
            trial[np.abs(trial) <= 1e-12 * z] = 0.0
            gain = (_length_from_counts(trial, z) - total) / popcount(alpha)
            key = (gain, -popcount(alpha), alpha)
            if best is None or key < best[0]:
                best = (key, alpha, int(holds.sum()), trial)
        (gain, _, alpha), _, shared, trial = best
        if gain >= 0 or shared < 2:
            break
        g = rewrite(g, alpha)
        counts = vocabulary_counts(g)
        total = total + gain * popcount(alpha)
        trace.append(BuildStep(len(trace), alpha, float(gain), float(total), shared))
    return g, trace


def build_from_explanation(expl, variables=None, meta=None) -> tuple[AndOrGraph, list[BuildStep]]:
    w = expl.w.values
    return build_aog(expl.n, list(expl.omega), [float(w[m]) for m in expl.omega], variables, meta)


# --- evaluation ----------------------------------------------------------


def evaluate_aog(g: AndOrGraph, s: int) -> float:
    """Root output when exactly the leaves in ``s`` are present."""
    s = int(s)
    fired = [c & s == c for c in g.coalitions]
    out = 0.0
    for p in g.patterns:
        if p.leaves & s == p.leaves and all(fired[k] for k in p.coalitions):
            out += p.weight
    return out


def evaluate_all(g: AndOrGraph) -> np.ndarray:
    """Root output on every mask, same node-level triggering as :func:`evaluate_aog`."""
    s = np.arange(1 << g.n, dtype=np.int64)
    fired = [(s & c) == c for c in g.coalitions]
    out = np.zeros(len(s))
    for p in g.patterns:
        on = (s & p.leaves) == p.leaves
        for k in p.coalitions:
            on &= fired[k]
        out += np.where(on, p.weight, 0.0)
    return out


# --- node naming, parse graphs, export -------------------------------------


def leaf_id(i: int) -> str:
    return f"x{i + 1}"


def coalition_id(k: int) -> str:
    return f"c{k}"


def pattern_id(k: int) -> str:
    return f"p{k}"


ROOT = "root"


def edges(g: AndOrGraph) -> list[tuple[str, str]]:
    out = []
    for k, p in enumerate(g.patterns):
        out.append((ROOT, pattern_id(k)))
        out.extend((pattern_id(k), coalition_id(c)) for c in p.coalitions)
        out.extend((pattern_id(k), leaf_id(i)) for i in members(p.leaves))
    for k, c in enumerate(g.coalitions):
        out.extend((coalition_id(k), leaf_id(i)) for i in members(c))
    return out


def layers(g: AndOrGraph) -> list[list[str]]:
    out = [[leaf_id(i) for i in range(g.n)]]
    if g.coalitions:
        out.append([coalition_id(k) for k in range(len(g.coalitions))])
    out.append([pattern_id(k) for k in range(len(g.patterns))])
    out.append([ROOT])
    return out


@dataclass(frozen=True)
class ParseGraph:
    pattern: int
    nodes: frozenset[str]
    edges: tuple[tuple[str, str], ...]
    frontier: int


def extract_parse_graph(g: AndOrGraph, pattern: int) -> ParseGraph:
    """Subgraph grounding one pattern: root, the pattern node, its coalitions and leaves."""
    k = g.pattern_index(pattern)
    p = g.patterns[k]
    pid = pattern_id(k)
    es = [(ROOT, pid)]
    frontier = p.leaves
    for c in p.coalitions:
        es.append((pid, coalition_id(c)))
        es.extend((coalition_id(c), leaf_id(i)) for i in members(g.coalitions[c]))
        frontier |= g.coalitions[c]
    es.extend((pid, leaf_id(i)) for i in members(p.leaves))
    nodes = frozenset(x for e in es for x in e)
    return ParseGraph(p.mask, nodes, tuple(es), frontier)


def _fmt(w: float) -> str:
    return repr(float(w))


def to_dict(g: AndOrGraph) -> dict:
    nodes = [{"id": leaf_id(i), "kind": "leaf", "label": g.variables[i], "mask": 1 << i} for i in range(g.n)]
    nodes += [
        {"id": coalition_id(k), "kind": "coalition", "mask": c, "members": [g.variables[i] for i in members(c)]}
        for k, c in enumerate(g.coalitions)
    ]
    nodes += [
        {
            "id": pattern_id(k),
            "kind": "pattern",
            "mask": p.mask,
            "weight": p.weight,
            "members": [g.variables[i] for i in members(p.mask)],
            "leaves": p.leaves,
            "coalitions": list(p.coalitions),
        }
        for k, p in enumerate(g.patterns)
    ]
    nodes.append({"id": ROOT, "kind": "root"})
    return {
        "n": g.n,
        "variables": list(g.variables),
        "nodes": nodes,
        "edges": [list(e) for e in edges(g)],
        "layers": layers(g),
        "meta": dict(g.meta),
    }


def to_json(g: AndOrGraph) -> str:
    return json.dumps(to_dict(g), sort_keys=True, indent=2) + "\n"


def from_dict(doc: dict) -> AndOrGraph:
    try:
        n = int(doc["n"])
        coal = [nd for nd in doc["nodes"] if nd["kind"] == "coalition"]
        pats = [nd for nd in doc["nodes"] if nd["kind"] == "pattern"]
        coal.sort(key=lambda nd: int(nd["id"][1:]))
        pats.sort(key=lambda nd: int(nd["id"][1:]))
        g = AndOrGraph(
            n,
            tuple(int(nd["mask"]) for nd in coal),
            tuple(
                PatternNode(int(nd["mask"]), float(nd["weight"]), int(nd["leaves"]), tuple(int(c) for c in nd["coalitions"]))
                for nd in pats
            ),
            tuple(doc.get("variables") or ()),
            dict(doc.get("meta", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed And-Or graph document: {exc}") from exc
    if [list(e) for e in edges(g)] != doc.get("edges", [list(e) for e in edges(g)]):
        raise ConfigError("edge list does not match the node descriptions")
    return g


def from_json(text: str) -> AndOrGraph:
    try:
        return from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"And-Or graph file is not valid JSON: {exc}") from exc


POSITIVE_COLOR = "red"
NEGATIVE_COLOR = "blue"


def to_dot(g: AndOrGraph) -> str:
    lines = ["digraph aog {"]
    if "config_hash" in g.meta:
        lines.append(f"  // config_hash={g.meta['config_hash']}")
    lines.append("  rankdir=TB;")
    lines.append("  node [fontname=Helvetica];")
    for i in range(g.n):
        lines.append(f'  "{leaf_id(i)}" [label="{g.variables[i]}", shape=circle];')
    for k, c in enumerate(g.coalitions):
        label = "{" + ",".join(g.variables[i] for i in members(c)) + "}"
        lines.append(f'  "{coalition_id(k)}" [label="{label}", shape=box, style=rounded];')
    for k, p in enumerate(g.patterns):
        neg = p.weight < 0
        color = NEGATIVE_COLOR if neg else POSITIVE_COLOR
        cls = "negative" if neg else "positive"
        lines.append(
            f'  "{pattern_id(k)}" [label="w={p.weight:.6g}", shape=box, color={color}, '
            f'fontcolor={color}, class="{cls}", weight_value="{_fmt(p.weight)}"];'
        )
    lines.append(f'  "{ROOT}" [label="sum", shape=ellipse];')
    for layer in layers(g):
        lines.append("  { rank=same; " + " ".join(f'"{x}";' for x in layer) + " }")
    for a, b in edges(g):
        lines.append(f'  "{a}" -> "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
