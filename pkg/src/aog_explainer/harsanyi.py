"""Harsanyi spectrum of a masked model and the game-theoretic indices derived from it."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import ConfigError, IntegrityError
from .lattice import (
    SubsetTable,
    check_capacity,
    full_mask,
    iter_subsets,
    members,
    mobius,
    popcount,
    popcounts,
    superset_sums,
    variable_names,
    weighted_superset_sums,
    zeta,
)
from .oracle.masking import DEFAULT_BATCH, ValueOracle, evaluate_table

FAITHFUL_RTOL = 1e-9


def reconstruction_residual(w, v) -> float:
    """``max_S |v_S - sum_{S' <= S} w_{S'}|``."""
    return float(np.max(np.abs(zeta(np.asarray(w)) - np.asarray(v))))


@dataclass(frozen=True)
class EffectSpectrum:
    """Dividends ``w`` of every pattern together with the table they were computed from."""

    n: int
    w: SubsetTable
    v_table: SubsetTable
    provenance: dict = field(default_factory=dict)
    variables: tuple[str, ...] = ()
    certify: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        check_capacity(self.n)
        if self.w.n != self.n or self.v_table.n != self.n:
            raise ConfigError("spectrum tables disagree on n")
        if not self.variables:
            object.__setattr__(self, "variables", tuple(variable_names(self.n)))
        elif len(self.variables) != self.n:
            raise ConfigError(f"{len(self.variables)} variable names for n={self.n}")
        if self.certify:
            self.check_faithful()

    def check_faithful(self) -> None:
        """Raise :class:`IntegrityError` unless the dividends reproduce ``v_table``."""
        tol = self.tolerance()
        residual = reconstruction_residual(self.w.values, self.v_table.values)
        if residual > tol:
            raise IntegrityError("dividends do not reproduce the value table", residual)
        gap = abs(float(np.sum(self.w.values)) - self.v_table.full)
        if gap > max(tol, 1e-12 * len(self.w)):
            raise IntegrityError("dividends do not sum to v(x)", gap)

    @property
    def v_full(self) -> float:
        return self.v_table.full

    @property
    def v_empty(self) -> float:
        return float(self.v_table.values[0])

    def tolerance(self) -> float:
        return FAITHFUL_RTOL * float(np.max(np.abs(self.v_table.values)))

    def nonzero_masks(self) -> np.ndarray:
        return np.flatnonzero(self.w.values)


def spectrum_from_table(v_table: SubsetTable, provenance: dict | None = None, variables=None, check: bool = True) -> EffectSpectrum:
    """Moebius-transform a value table and certify the result.

    Raises :class:`IntegrityError` when the subset sums of the dividends do not
    reproduce every entry of ``v_table`` within ``1e-9 * max|v|``, or the
    dividends do not sum to ``v(x)``.
    """
    w = SubsetTable(v_table.n, mobius(v_table.values))
    return EffectSpectrum(v_table.n, w, v_table, dict(provenance or {}), tuple(variables or ()), certify=check)


def compute_spectrum(oracle: ValueOracle, batch_size: int = DEFAULT_BATCH, variables=None) -> EffectSpectrum:
    v = evaluate_table(oracle, batch_size=batch_size)
    provenance = {
        "sample_id": oracle.sample.sample_id,
        "baseline_hash": oracle.baseline.digest(),
        "oracle_id": oracle.oracle_id,
    }
    return spectrum_from_table(v, provenance, variables)


def spectra_batch(model, X, r, batch_rows: int = 64, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Value tables and dividends for many samples of one model at once.

    ``X`` is ``(B, n)``; returns ``v`` and ``w`` of shape ``(B, 2^n)``.  Each
    row gets the same faithfulness certificate as :func:`spectrum_from_table`.
    """
    X = np.asarray(X, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    if X.ndim != 2:
        raise ConfigError("samples must form a 2-D array")
    n = check_capacity(X.shape[1])
    size = 1 << n
    keep = ((np.arange(size)[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)
    v = np.empty((X.shape[0], size))
    for start in range(0, X.shape[0], batch_rows):
        chunk = X[start : start + batch_rows]
        inputs = np.where(keep[None, :, :], chunk[:, None, :], r[None, None, :])
        v[start : start + len(chunk)] = np.asarray(model.predict(inputs.reshape(-1, n)), dtype=np.float64).reshape(len(chunk), size)
    if not np.all(np.isfinite(v)):
        raise IntegrityError("model produced non-finite values", float("nan"))
    w = mobius(v)
    if check:
        tol = FAITHFUL_RTOL * np.max(np.abs(v), axis=1)
        residual = np.max(np.abs(zeta(w) - v), axis=1)
        bad = np.flatnonzero(residual > tol)
        if len(bad):
            raise IntegrityError(f"dividends do not reproduce the value table of row {bad[0]}", float(residual[bad[0]]))
    return v, w


def _mask(t, n: int) -> int:
    t = int(t)
    if t < 0 or t > full_mask(n):
        raise ConfigError(f"mask {t} out of range for n={n}")
    return t


def shapley_array(w) -> np.ndarray:
    """Shapley values from dividends along the last axis: each ``w_S`` split evenly over S."""
    w = np.asarray(w, dtype=np.float64)
    n = (w.shape[-1]).bit_length() - 1
    pc = popcounts(n)
    share = np.where(pc > 0, w / np.maximum(pc, 1), 0.0)
    member = (np.arange(1 << n)[:, None] >> np.arange(n)[None, :]) & 1
    return share @ member.astype(np.float64)


def shapley_values(spec: EffectSpectrum) -> np.ndarray:
    """Shapley value of each variable: every dividend split evenly among its members."""
    return shapley_array(spec.w.values)


def shapley_interaction_index(spec: EffectSpectrum, t) -> float:
    """``sum_{S <= N minus T} w_{S u T} / (|S| + 1)``."""
    t = _mask(t, spec.n)
    if t == 0:
        raise ConfigError("the Shapley interaction index needs a nonempty T")
    w = spec.w.values
    rest = full_mask(spec.n) & ~t
    return float(sum(w[s | t] / (popcount(s) + 1) for s in iter_subsets(rest)))


def si_array(w) -> np.ndarray:
    """Shapley interaction index of every T (entry 0 set to 0), batched on leading axes."""
    w = np.asarray(w, dtype=np.float64)
    n = (w.shape[-1]).bit_length() - 1
    k = np.arange(n + 1)[:, None]
    t = np.arange(n + 1)[None, :]
    weight = np.where(k >= t, 1.0 / np.maximum(k - t + 1, 1), 0.0)
    out = weighted_superset_sums(w, weight)
    out[..., 0] = 0.0
    return out


def shapley_interaction_table(spec: EffectSpectrum) -> np.ndarray:
    return si_array(spec.w.values)


def _check_order(k: int, n: int) -> int:
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
        raise ConfigError(f"Shapley-Taylor order must be in [1, {n}], got {k!r}")
    return int(k)


def shapley_taylor_index(spec: EffectSpectrum, t, k: int) -> float:
    """k-th order Shapley-Taylor index of T.

    ``w_T`` below order k, ``sum_{S <= N minus T} w_{S u T} / C(|S|+k, k)`` at
    order k, and 0 above.
    """
    k = _check_order(k, spec.n)
    t = _mask(t, spec.n)
    size = popcount(t)
    w = spec.w.values
    if size < k:
        return float(w[t])
    if size > k:
        return 0.0
    rest = full_mask(spec.n) & ~t
    return float(sum(w[s | t] / comb(popcount(s) + k, k) for s in iter_subsets(rest)))


def sti_array(w, k: int) -> np.ndarray:
    """k-th order Shapley-Taylor index of every T, batched on leading axes."""
    w = np.asarray(w, dtype=np.float64)
    n = (w.shape[-1]).bit_length() - 1
    k = _check_order(k, n)
    pc = popcounts(n)
    # at |T| = k the weight 1 / C(|S|, k) depends on |S| only: one superset sum
    scale = np.array([1.0 / comb(s, k) if s >= k else 0.0 for s in range(n + 1)])
    at_order = superset_sums(w * scale[pc])
    return np.where(pc < k, w, np.where(pc == k, at_order, 0.0))


def shapley_taylor_table(spec: EffectSpectrum, k: int) -> np.ndarray:
    return sti_array(spec.w.values, k)


def marginal_benefit(spec: EffectSpectrum, t, s) -> float:
    """Mixed difference of v over T in context S, ``sum_{S' <= S} w_{T u S'}``."""
    t = _mask(t, spec.n)
    s = _mask(s, spec.n)
    if t == 0:
        raise ConfigError("marginal benefit needs a nonempty T")
    if t & s:
        raise ConfigError("T and S must be disjoint")
    w = spec.w.values
    return float(sum(w[t | sp] for sp in iter_subsets(s)))


def effect_order(w: np.ndarray) -> np.ndarray:
    """Masks sorted by |w| descending, ties broken by lower mask."""
    w = np.asarray(w)
    return np.lexsort((np.arange(len(w)), -np.abs(w)))


def spectrum_to_dict(spec: EffectSpectrum, include_zero: bool = False) -> dict:
    w = spec.w.values
    effects = []
    for m in effect_order(w):
        m = int(m)
        if w[m] == 0.0 and not include_zero:
            continue
        effects.append({"mask": m, "members": [spec.variables[i] for i in members(m)], "w": float(w[m])})
    return {
        "n": spec.n,
        "variables": list(spec.variables),
        "v_full": spec.v_full,
        "effects": effects,
        "sorted_by": "abs_w_desc",
        "provenance": dict(spec.provenance),
    }


def spectrum_from_dict(doc: dict) -> EffectSpectrum:
    try:
        n = check_capacity(int(doc["n"]))
        w = np.zeros(1 << n)
        for e in doc["effects"]:
            m = int(e["mask"])
            if not 0 <= m < 1 << n:
                raise ConfigError(f"effect mask {m} out of range for n={n}")
            w[m] = float(e["w"])
        variables = tuple(doc.get("variables") or variable_names(n))
        provenance = dict(doc.get("provenance", {}))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed spectrum document: {exc}") from exc
    v = SubsetTable(n, zeta(w))
    spec = EffectSpectrum(n, SubsetTable(n, w), v, provenance, variables)
    if "v_full" in doc and abs(float(doc["v_full"]) - spec.v_full) > 1e-9 * max(1.0, abs(spec.v_full)) + 1e-12 * len(w):
        raise ConfigError("spectrum effects do not sum to the stated v_full")
    return spec
