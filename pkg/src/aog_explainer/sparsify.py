"""Conciseness machinery: unfaithfulness, greedy pattern removal, explained ratio,
and baseline learning by projected finite-difference descent."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, OracleError
from .harsanyi import EffectSpectrum, compute_spectrum
from .lattice import SubsetTable, popcounts, zeta
from .oracle.masking import BaselineVector, ValueOracle


@dataclass(frozen=True)
class SparseExplanation:
    """Retained patterns ``omega`` with their unchanged dividends.

    ``w`` is zero outside ``omega`` and ``omega`` lists exactly the masks with
    a nonzero retained dividend, so ``|omega| == ||w||_0``.
    """

    n: int
    omega: tuple[int, ...]
    w: SubsetTable
    delta: float
    unfaith: float
    r_omega: float
    v_full: float
    satisfied: bool = True
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        nz = tuple(int(m) for m in np.flatnonzero(self.w.values))
        if tuple(sorted(self.omega)) != nz:
            raise ConfigError("omega must list exactly the nonzero retained effects")
        if not 0.0 <= self.r_omega <= 1.0:
            raise ConfigError(f"explained ratio {self.r_omega} outside [0, 1]")

    @property
    def size(self) -> int:
        return len(self.omega)

    @property
    def l1(self) -> float:
        return float(np.abs(self.w.values).sum())

    def predict(self) -> np.ndarray:
        """``Y(x_S)`` for every mask S."""
        return zeta(self.w.values)


@dataclass(frozen=True)
class PruneConfig:
    max_patterns: int | None = None
    min_ratio: float | None = None

    def __post_init__(self):
        if self.max_patterns is None and self.min_ratio is None:
            raise ConfigError("set max_patterns, min_ratio, or both")
        if self.max_patterns is not None and self.max_patterns < 0:
            raise ConfigError("max_patterns must be non-negative")
        if self.min_ratio is not None and not 0.0 < self.min_ratio <= 1.0:
            raise ConfigError("min_ratio must lie in (0, 1]")


@dataclass(frozen=True)
class PruneStep:
    step: int
    mask: int
    delta: float
    unfaith: float
    r_omega: float
    l1: float
    size: int


def unfaithfulness(v_table, w) -> float:
    """``sum_S (v(x_S) - sum_{T <= S} w_T)^2`` over all masks."""
    v = np.asarray(v_table)
    w = w.w.values if isinstance(w, SparseExplanation) else np.asarray(w)
    return float(np.sum((v - zeta(w)) ** 2))


def ratio(l1: float, delta: float) -> float:
    """``l1 / (l1 + |delta|)``, taken as 1 when both vanish."""
    denom = l1 + abs(delta)
    return 1.0 if denom == 0.0 else l1 / denom


def _l1_delta(kept: np.ndarray, v_full: float) -> tuple[float, float]:
    # sums run over the zero-filled table so every caller rounds identically
    return float(np.abs(kept).sum()), v_full - float(kept.sum())


def explained_ratio(expl: SparseExplanation) -> float:
    return ratio(*_l1_delta(expl.w.values, expl.v_full))


def full_explanation(spec: EffectSpectrum) -> SparseExplanation:
    w = spec.w.values
    return SparseExplanation(
        spec.n, tuple(int(m) for m in np.flatnonzero(w)), spec.w, spec.v_full - float(w.sum()),
        unfaithfulness(spec.v_table.values, w), 1.0, spec.v_full, True, dict(spec.provenance),
    )


def removal_deltas(w: np.ndarray, residual_ss: np.ndarray, n: int) -> np.ndarray:
    """Change in unfaith from dropping each pattern, given superset sums of the residual."""
    return 2.0 * w * residual_ss + w * w * np.exp2(n - popcounts(n))


def greedy_prune(spec: EffectSpectrum, cfg: PruneConfig) -> tuple[SparseExplanation, list[PruneStep]]:
    """Drop patterns one at a time, each time the one that raises unfaith least.

    Starts from the full lattice.  Stops once at most ``max_patterns`` remain,
    or right before a removal would push the explained ratio below
    ``min_ratio``.  Ties in the increment go to the lowest mask.  The
    returned ``satisfied`` flag is False when the ratio bound stopped the
    run before ``max_patterns`` was reached.
    """
    n = spec.n
    v = spec.v_table.values
    w = spec.w.values
    size = len(w)
    alive = np.ones(size, dtype=bool)
    residual_ss = np.zeros(size)  # superset sums of e = v - Y, exactly 0 at the start
    unfaith = 0.0
    l1, delta = _l1_delta(w, spec.v_full)
    count = size
    trace: list[PruneStep] = []
    pc = popcounts(n)
    masks = np.arange(size)
    satisfied = True

    def done() -> bool:
        return cfg.max_patterns is not None and count <= cfg.max_patterns

    while count > 0 and not done():
        inc = removal_deltas(w, residual_ss, n)
        cand = masks[alive]
        order = cand[np.lexsort((cand, inc[cand]))]
        stop = False
        for u in order:
            u = int(u)
            if w[u] != 0.0:
                # recompute from the definitions rather than accumulate
                alive[u] = False
                new_l1, new_delta = _l1_delta(np.where(alive, w, 0.0), spec.v_full)
                alive[u] = True
            else:
                new_l1, new_delta = l1, delta
            r_new = ratio(new_l1, new_delta)
            if cfg.min_ratio is not None and r_new < cfg.min_ratio:
                stop = True
                break
            alive[u] = False
            count -= 1
            unfaith = max(unfaith + float(inc[u]), 0.0)
            l1, delta = new_l1, new_delta
            trace.append(PruneStep(len(trace) + 1, u, float(inc[u]), unfaith, r_new, l1, count))
            if w[u] != 0.0:
                # e_S grows by w_U on every S >= U
                residual_ss += w[u] * np.exp2(n - pc[masks | u])
                break
            if done():
                break
        if stop:
            satisfied = not (cfg.max_patterns is not None and count > cfg.max_patterns)
            break
        if len(order) == 0:
            break

    kept = np.where(alive, w, 0.0)
    omega = tuple(int(m) for m in np.flatnonzero(kept))
    expl = SparseExplanation(
        n, omega, SubsetTable(n, kept), delta, unfaithfulness(v, kept), ratio(l1, delta), spec.v_full,
        satisfied, dict(spec.provenance),
    )
    return expl, trace


# --- baseline learning -------------------------------------------------------


@dataclass(frozen=True)
class BaselineOptConfig:
    lam: float = 0.0
    tau_factor: float = 0.01
    step_size: float = 0.1
    max_iters: int = 100
    fd_epsilon: float = 1e-4
    min_step: float = 1e-10

    def __post_init__(self):
        if self.lam < 0:
            raise ConfigError("lambda must be non-negative")
        if self.tau_factor < 0:
            raise ConfigError("tau_factor must be non-negative")
        if self.step_size <= 0 or self.max_iters <= 0 or self.fd_epsilon <= 0:
            raise ConfigError("step_size, max_iters and fd_epsilon must be positive")

    @property
    def lam_eff(self) -> float:
        # with the full lattice unfaith is 0, so a zero lambda would leave nothing to minimise
        return self.lam if self.lam > 0 else 1.0


@dataclass(frozen=True)
class BaselineStep:
    iteration: int
    unfaith: float
    l1: float
    objective: float
    step_size: float
    r: tuple[float, ...]


def tau_from_data(X, tau_factor: float = 0.01) -> np.ndarray:
    """Per-variable bound ``tau_factor * Var[x_i]`` (population variance)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ConfigError("need a non-empty 2-D data matrix to derive tau")
    return tau_factor * X.var(axis=0)


def project_ball(r: np.ndarray, r_init: np.ndarray, tau: np.ndarray) -> np.ndarray:
    d = np.clip(r - r_init, -np.sqrt(tau), np.sqrt(tau))
    out = r_init + d
    # rounding in sqrt or the addition can overshoot by an ulp
    for _ in range(4):
        bad = (out - r_init) ** 2 > tau
        if not bad.any():
            break
        out = np.where(bad, np.nextafter(out, r_init), out)
    return out


def simplex_projection(y: np.ndarray) -> np.ndarray:
    """Euclidean projection of ``y`` onto the probability simplex."""
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.flatnonzero(u - css / np.arange(1, len(y) + 1) > 0)[-1]
    return np.maximum(y - css[k] / (k + 1), 0.0)


def min_norm_hull(G: np.ndarray, iters: int = 500) -> np.ndarray:
    """Point of smallest norm in the convex hull of the rows of ``G``."""
    m = G.shape[0]
    lam = np.full(m, 1.0 / m)
    gram = G @ G.T
    lip = max(float(np.linalg.eigvalsh(gram)[-1]), 1e-300)
    for _ in range(iters):
        lam = simplex_projection(lam - gram @ lam / lip)
    return lam @ G


def learn_baseline(
    oracle_factory: Callable[[np.ndarray], ValueOracle],
    r_init,
    tau,
    cfg: BaselineOptConfig = BaselineOptConfig(),
    seed: int = 0,
) -> tuple[BaselineVector, list[BaselineStep]]:
    """Projected descent on ``unfaith + lambda * ||w||_1`` over the full lattice.

    ``oracle_factory(r)`` must return a value oracle masking with baseline
    ``r``.  Gradients come from central differences, one pair per
    coordinate.  The objective is piecewise smooth, so when no step along
    the negative gradient helps, the direction is taken from the min-norm
    element of gradients sampled around ``r`` (gradient sampling), with the
    sampling radius shrunk until a descent step appears or it vanishes.
    Only steps that lower the objective are accepted, so the objective
    never increases along the returned trace of accepted iterates.
    """
    r_init = np.array(r_init, dtype=np.float64).reshape(-1)
    tau = np.array(tau, dtype=np.float64).reshape(-1)
    if tau.shape != r_init.shape:
        raise ConfigError("tau and r_init must have the same length")
    if np.any(tau < 0) or not np.all(np.isfinite(tau)):
        raise ConfigError("tau must be finite and non-negative")
    rng = np.random.default_rng(seed)
    radius = np.sqrt(tau)
    lower, upper = r_init - radius, r_init + radius
    free = tau > 0

    def objective(r: np.ndarray) -> tuple[float, float, float]:
        spec = compute_spectrum(oracle_factory(r))
        l1 = float(np.abs(spec.w.values).sum())
        uf = unfaithfulness(spec.v_table.values, spec.w.values)
        obj = uf + cfg.lam_eff * l1
        if not np.isfinite(obj):
            raise OracleError("non-finite baseline objective")
        return uf, l1, obj

    def gradient(r: np.ndarray) -> np.ndarray:
        g = np.zeros_like(r)
        for i in np.flatnonzero(free):
            eps = cfg.fd_epsilon * (1.0 + abs(r[i]))
            e = np.zeros_like(r)
            e[i] = eps
            g[i] = (objective(r + e)[2] - objective(r - e)[2]) / (2.0 * eps)
        return g

    def feasible_part(g: np.ndarray, r: np.ndarray) -> np.ndarray:
        # drop components that would push through an active bound
        g = np.where(free, g, 0.0)
        g = np.where((r >= upper) & (g < 0), 0.0, g)
        return np.where((r <= lower) & (g > 0), 0.0, g)

    def line_search(r, d, obj, step):
        while step * float(np.max(np.abs(d))) >= cfg.min_step:
            cand = project_ball(r + step * d, r_init, tau)
            if not np.array_equal(cand, r):
                c = objective(cand)
                if c[2] < obj:
                    return cand, c, step
            step *= 0.5
        return None

    r = r_init.copy()
    uf, l1, obj = objective(r)
    trace = [BaselineStep(0, uf, l1, obj, cfg.step_size, tuple(r))]
    if not free.any():
        return BaselineVector(r, r_init, tau), trace

    step = cfg.step_size
    scale = float(np.max(radius))
    for it in range(1, cfg.max_iters + 1):
        g = feasible_part(gradient(r), r)
        found = line_search(r, -g, obj, step) if np.any(g) else None
        # a cut-back step hints at a kink nearby; compare with a sampled direction
        kinked = found is None or found[2] < step
        delta = 1e-2 * scale
        while kinked and delta > 1e-9 * scale:
            samples = [g]
            for _ in range(int(free.sum()) + 1):
                u = rng.uniform(-1.0, 1.0, size=r.shape) * free
                samples.append(feasible_part(gradient(project_ball(r + delta * u, r_init, tau)), r))
            d = -min_norm_hull(np.array(samples))
            alt = line_search(r, d, obj, max(step, cfg.step_size)) if np.max(np.abs(d)) > 1e-12 else None
            if alt is not None and (found is None or alt[1][2] < found[1][2]):
                found = alt
            if found is not None:
                break
            delta *= 0.1
        if found is None:
            break
        r, (uf, l1, obj), used = found
        trace.append(BaselineStep(it, uf, l1, obj, used, tuple(r)))
        step = 2.0 * used
    return BaselineVector(r, r_init, tau), trace
