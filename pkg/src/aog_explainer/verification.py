"""Direct-definition oracles and the randomized axiom checker.

Everything here enumerates subsets explicitly (O(4^n) or worse) and exists to
certify the fast spectrum-based formulas in :mod:`aog_explainer.harsanyi`.
The pipeline never calls into this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from math import comb, factorial
from typing import Callable

import numpy as np

from .errors import ConfigError
from .lattice import SubsetTable, full_mask, iter_subsets, mobius, popcount
from .oracle.masking import ValueOracle, evaluate_table

AXIOMS = (
    "efficiency",
    "linearity",
    "dummy",
    "symmetry",
    "anonymity",
    "recursive",
    "interaction_distribution",
)


def _table(v) -> np.ndarray:
    if isinstance(v, ValueOracle):
        return evaluate_table(v).values
    return np.asarray(v, dtype=np.float64)


def _n(v: np.ndarray) -> int:
    return int(len(v)).bit_length() - 1


def brute_mobius(v) -> np.ndarray:
    v = _table(v)
    out = np.zeros_like(v)
    for s in range(len(v)):
        size = popcount(s)
        out[s] = sum((-1) ** (size - popcount(sp)) * v[sp] for sp in iter_subsets(s))
    return out


def brute_zeta(w) -> np.ndarray:
    w = _table(w)
    return np.array([sum(w[sp] for sp in iter_subsets(s)) for s in range(len(w))])


def brute_superset_sum(t) -> np.ndarray:
    t = _table(t)
    return np.array([sum(t[s] for s in range(len(t)) if s & u == u) for u in range(len(t))])


def delta_v(v, t: int, s: int) -> float:
    """``sum_{T' <= T} (-1)^{|T|-|T'|} v(x_{T' u S})`` for disjoint T and S."""
    v = _table(v)
    if t & s:
        raise ConfigError("T and S must be disjoint")
    size = popcount(t)
    return float(sum((-1) ** (size - popcount(tp)) * v[tp | s] for tp in iter_subsets(t)))


def shapley_direct(v) -> np.ndarray:
    """Subset-weighted average of marginal contributions."""
    v = _table(v)
    n = _n(v)
    phi = np.zeros(n)
    for i in range(n):
        bit = 1 << i
        for s in iter_subsets(full_mask(n) & ~bit):
            k = popcount(s)
            phi[i] += factorial(k) * factorial(n - k - 1) / factorial(n) * (v[s | bit] - v[s])
    return phi


def shapley_permutation(v) -> np.ndarray:
    """Average marginal contribution over all n! arrival orders (n <= 8)."""
    v = _table(v)
    n = _n(v)
    phi = np.zeros(n)
    count = 0
    for order in permutations(range(n)):
        s = 0
        for i in order:
            phi[i] += v[s | (1 << i)] - v[s]
            s |= 1 << i
        count += 1
    return phi / count


def si_direct(v, t: int) -> float:
    v = _table(v)
    n = _n(v)
    if t == 0:
        raise ConfigError("the Shapley interaction index needs a nonempty T")
    tt = popcount(t)
    total = 0.0
    for s in iter_subsets(full_mask(n) & ~t):
        k = popcount(s)
        weight = factorial(k) * factorial(n - k - tt) / factorial(n - tt + 1)
        total += weight * delta_v(v, t, s)
    return total


def sti_direct(v, t: int, k: int) -> float:
    v = _table(v)
    n = _n(v)
    tt = popcount(t)
    if tt < k:
        return delta_v(v, t, 0)
    if tt > k:
        return 0.0
    total = sum(delta_v(v, t, s) / comb(n - 1, popcount(s)) for s in iter_subsets(full_mask(n) & ~t))
    return k / n * total


def unfaith_brute(v, omega, w) -> float:
    """Sum over masks of the squared gap between v and the subset sum over ``omega``."""
    v = _table(v)
    w = np.asarray(w)
    omega = [int(m) for m in omega]
    total = 0.0
    for s in range(len(v)):
        y = sum(w[m] for m in omega if m & s == m)
        total += (v[s] - y) ** 2
    return total


# --- randomized axiom checks -------------------------------------------------


def integer_game(rng: np.random.Generator, n: int, low: int = -10, high: int = 10) -> np.ndarray:
    """Game with integer values, so every identity below holds exactly."""
    return rng.integers(low, high + 1, size=1 << n).astype(np.float64)


@dataclass
class AxiomReport:
    trials: int
    violations: dict = field(default_factory=lambda: {name: 0.0 for name in AXIOMS})

    def record(self, name: str, value: float) -> None:
        self.violations[name] = max(self.violations[name], float(value))

    def passed(self, tol: float = 1e-8) -> bool:
        return all(v < tol for v in self.violations.values())

    def lines(self, tol: float = 1e-8) -> list[str]:
        return [
            f"{name:<26s} max_violation={val:.3e} {'PASS' if val < tol else 'FAIL'}"
            for name, val in self.violations.items()
        ]

    def to_dict(self, tol: float = 1e-8) -> dict:
        return {"trials": self.trials, "tolerance": tol, "violations": dict(self.violations), "passed": self.passed(tol)}


def _permute_table(v: np.ndarray, perm) -> np.ndarray:
    """Table of ``pi v`` where ``(pi v)(pi S) = v(S)`` and ``pi`` sends i to ``perm[i]``."""
    n = _n(v)
    out = np.empty_like(v)
    for s in range(len(v)):
        out[sum(1 << perm[i] for i in range(n) if s >> i & 1)] = v[s]
    return out


def _swap(s: int, i: int, j: int) -> int:
    bi, bj = s >> i & 1, s >> j & 1
    if bi == bj:
        return s
    return s ^ (1 << i) ^ (1 << j)


def verify_axioms(
    factory: Callable[[np.random.Generator, int], object] | None = None,
    trials: int = 100,
    seed: int = 0,
    n_range: tuple[int, int] = (2, 8),
) -> AxiomReport:
    """Check the seven dividend axioms on ``trials`` random games.

    ``factory(rng, n)`` returns a value table (array, SubsetTable or
    ValueOracle); the default draws integer-valued games.  Derived games
    (dummy, symmetric, permuted, interaction functions) are built from the
    factory output.  The dummy game satisfies ``v(S u {i}) = v(S) + v({i})``,
    which forces ``v(empty) = 0``; its dividends vanish on every ``S u {i}``
    with S nonempty, and ``w_{i} = v({i})``.
    """
    if trials <= 0:
        raise ConfigError("trials must be positive")
    lo, hi = n_range
    if not 1 <= lo <= hi <= 8:
        raise ConfigError("axiom games use 1 <= n <= 8")
    factory = factory or integer_game
    rng = np.random.default_rng(seed)
    report = AxiomReport(trials)

    def draw(n: int) -> np.ndarray:
        t = factory(rng, n)
        if isinstance(t, SubsetTable):
            t = t.values
        t = _table(t)
        if len(t) != 1 << n:
            raise ConfigError(f"factory returned {len(t)} values for n={n}")
        return t

    for _ in range(trials):
        n = int(rng.integers(max(lo, 2), hi + 1)) if hi >= 2 else 1
        full = full_mask(n)
        v = draw(n)
        w = mobius(v)
        scale = max(1.0, float(np.max(np.abs(v))))

        report.record("efficiency", abs(w.sum() - v[full]) / scale)

        u = draw(n)
        a, b = rng.integers(-3, 4, size=2)
        report.record("linearity", np.max(np.abs(mobius(a * v + b * u) - (a * w + b * mobius(u)))) / scale)

        # dummy variable i on top of a game that ignores i
        i = int(rng.integers(n))
        bit = 1 << i
        base = v.copy()
        base[0] = 0.0
        c = float(rng.integers(-10, 11))
        idx = np.arange(1 << n)
        dummy = base[idx & ~bit] + np.where(idx & bit, c, 0.0)
        wd = mobius(dummy)
        ctx = [s for s in iter_subsets(full & ~bit) if s]
        worst = max((abs(wd[s | bit]) for s in ctx), default=0.0)
        worst = max(worst, abs(wd[bit] - dummy[bit]))
        report.record("dummy", worst / scale)

        if n >= 2:
            i, j = (int(q) for q in rng.choice(n, size=2, replace=False))
            sym = v + v[[_swap(s, i, j) for s in range(1 << n)]]
            ws = mobius(sym)
            rest = full & ~(1 << i) & ~(1 << j)
            worst = max(abs(ws[s | 1 << i] - ws[s | 1 << j]) for s in iter_subsets(rest))
            report.record("symmetry", worst / scale)

        perm = rng.permutation(n)
        wp = mobius(_permute_table(v, perm))
        report.record("anonymity", np.max(np.abs(_permute_table(w, perm) - wp)) / scale)

        i = int(rng.integers(n))
        bit = 1 << i
        present = mobius(v[idx | bit])
        ctx = np.array(list(iter_subsets(full & ~bit)))
        report.record("recursive", np.max(np.abs(w[ctx | bit] - (present[ctx] - w[ctx]))) / scale)

        t = int(rng.integers(1, full + 1))
        c = float(rng.integers(1, 11))
        vt = np.where(idx & t == t, c, 0.0)
        expect = np.zeros(1 << n)
        expect[t] = c
        report.record("interaction_distribution", np.max(np.abs(mobius(vt) - expect)) / scale)

    return report


# --- derived-versus-direct index checks --------------------------------------


def _contexts(n: int, t: int) -> np.ndarray:
    return np.array(list(iter_subsets(full_mask(n) & ~t)), dtype=np.int64)


def delta_v_contexts(v, t: int) -> tuple[np.ndarray, np.ndarray]:
    """Contexts S avoiding T and ``Delta v_T(x_S)`` for each, straight from v."""
    v = _table(v)
    n = _n(v)
    ctx = _contexts(n, t)
    size = popcount(t)
    out = np.zeros(len(ctx))
    for tp in iter_subsets(t):
        out += (-1) ** (size - popcount(tp)) * v[ctx | tp]
    return ctx, out


def si_direct_all(v) -> np.ndarray:
    """Direct-definition Shapley interaction index for every nonempty T."""
    v = _table(v)
    n = _n(v)
    out = np.zeros(len(v))
    for t in range(1, len(v)):
        tt = popcount(t)
        ctx, dv = delta_v_contexts(v, t)
        k = np.array([popcount(int(s)) for s in ctx])
        weight = np.array([factorial(a) * factorial(n - a - tt) / factorial(n - tt + 1) for a in k])
        out[t] = float(weight @ dv)
    return out


def sti_direct_all(v, k: int) -> np.ndarray:
    v = _table(v)
    n = _n(v)
    out = np.zeros(len(v))
    for t in range(len(v)):
        tt = popcount(t)
        if tt > k:
            continue
        if tt < k:
            out[t] = delta_v(v, t, 0)
            continue
        ctx, dv = delta_v_contexts(v, t)
        weight = np.array([1.0 / comb(n - 1, popcount(int(s))) for s in ctx])
        out[t] = k / n * float(weight @ dv)
    return out


@dataclass
class EquivalenceReport:
    trials: int
    errors: dict = field(default_factory=lambda: {"shapley": 0.0, "si": 0.0, "sti": 0.0, "marginal_benefit": 0.0})

    def record(self, name: str, value: float) -> None:
        self.errors[name] = max(self.errors[name], float(value))

    def passed(self, tol: float = 1e-8) -> bool:
        return all(e < tol for e in self.errors.values())

    def lines(self, tol: float = 1e-8) -> list[str]:
        return [f"{name:<26s} max_error={e:.3e} {'PASS' if e < tol else 'FAIL'}" for name, e in self.errors.items()]

    def to_dict(self, tol: float = 1e-8) -> dict:
        return {"trials": self.trials, "tolerance": tol, "errors": dict(self.errors), "passed": self.passed(tol)}


def verify_equivalences(trials: int = 50, seed: int = 0, n_range: tuple[int, int] = (2, 8)) -> EquivalenceReport:
    """Spectrum-derived Shapley, SI, STI and marginal benefit against their direct definitions.

    Games are real-valued standard normal tables.  Every T is checked; the
    marginal benefit is checked on every disjoint (T, S) pair.  Shapley is
    additionally compared with the permutation average when n <= 6.
    """
    from .harsanyi import marginal_benefit, shapley_array, si_array, spectrum_from_table, sti_array

    if trials <= 0:
        raise ConfigError("trials must be positive")
    lo, hi = n_range
    if not 1 <= lo <= hi <= 8:
        raise ConfigError("equivalence games use 1 <= n <= 8")
    rng = np.random.default_rng(seed)
    report = EquivalenceReport(trials)
    for _ in range(trials):
        n = int(rng.integers(lo, hi + 1))
        v = rng.standard_normal(1 << n)
        spec = spectrum_from_table(SubsetTable(n, v))
        w = spec.w.values

        phi = shapley_array(w)
        err = np.max(np.abs(phi - shapley_direct(v)))
        if n <= 6:
            err = max(err, np.max(np.abs(phi - shapley_permutation(v))))
        report.record("shapley", err)

        report.record("si", np.max(np.abs(si_array(w) - si_direct_all(v))))
        k = int(rng.integers(1, n + 1))
        report.record("sti", np.max(np.abs(sti_array(w, k) - sti_direct_all(v, k))))

        worst = 0.0
        for t in range(1, 1 << n):
            ctx, dv = delta_v_contexts(v, t)
            derived = np.array([marginal_benefit(spec, t, int(s)) for s in ctx])
            worst = max(worst, float(np.max(np.abs(derived - dv))))
        report.record("marginal_benefit", worst)
    return report
