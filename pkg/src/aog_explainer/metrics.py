"""Evaluation metrics: IoU against ground truth, unfaithfulness of arbitrary
effect assignments, Jaccard similarity between spectra, strength curves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .harsanyi import EffectSpectrum, effect_order, shapley_array, si_array, sti_array
from .lattice import SubsetTable, full_mask, zeta

METHODS = ("harsanyi", "shapley_as_effects", "occlusion_as_effects", "si", "sti")


@dataclass(frozen=True)
class EffectAssignment:
    """Per-pattern effects claimed by one attribution method, zero off its support."""

    method: str
    w: SubsetTable
    k: int | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}")
        if self.method == "sti" and self.k is None:
            raise ConfigError("sti needs an order k")

    @property
    def tag(self) -> str:
        return f"sti{self.k}" if self.method == "sti" else self.method


def assignment_array(method: str, w, v, k: int | None = None) -> np.ndarray:
    """Assignment tables for dividends ``w`` and value tables ``v`` (batched on leading axes)."""
    w = np.asarray(w, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    size = w.shape[-1]
    n = size.bit_length() - 1
    singles = 1 << np.arange(n)
    if method == "harsanyi":
        return w.copy()
    if method == "sti":
        if k is None:
            raise ConfigError("sti needs an order k")
        return sti_array(w, k)
    if method == "si":
        return si_array(w)
    out = np.zeros_like(w)
    if method == "shapley_as_effects":
        out[..., singles] = shapley_array(w)
    elif method == "occlusion_as_effects":
        full = full_mask(n)
        out[..., singles] = v[..., full : full + 1] - v[..., full ^ singles]
    else:
        raise ConfigError(f"unknown method {method!r}")
    return out


def build_assignment(method: str, spec: EffectSpectrum, k: int | None = None) -> EffectAssignment:
    """Effect table for one method.

    Occlusion is the drop ``v(x) - v(x_{N minus i})`` placed on singleton i.
    SI fills every nonempty T; ``sti`` uses the piecewise order-k values.
    """
    table = assignment_array(method, spec.w.values, spec.v_table.values, k)
    return EffectAssignment(method, SubsetTable(spec.n, table), k if method == "sti" else None)


def rho_unfaith(v_table, assign) -> float:
    """Mean over all masks of ``(v(x_S) - sum_{S' <= S} w_S')^2``."""
    w = assign.w.values if isinstance(assign, EffectAssignment) else np.asarray(assign)
    v = np.asarray(v_table, dtype=np.float64)
    return float(np.mean((v - zeta(w)) ** 2))


def rho_unfaith_batch(v, w) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    return np.mean((v - zeta(np.asarray(w, dtype=np.float64))) ** 2, axis=-1)


def top_m(values, m: int, include_empty: bool = False) -> list[int]:
    """The m masks of largest ``|value|``, ties to the lower mask.

    The empty pattern is never a candidate unless ``include_empty``.
    """
    values = values.w.values if isinstance(values, (EffectSpectrum, EffectAssignment)) else np.asarray(values)
    order = effect_order(values)
    if not include_empty:
        order = order[order != 0]
    return [int(s) for s in order[:m]]


def iou(a, b) -> float:
    a, b = set(a), set(b)
    union = a | b
    return len(a & b) / len(union) if union else 1.0


def iou_top_m(values, truth) -> float:
    """IoU between the top-|truth| patterns by ``|w|`` and the ground-truth set."""
    truth = {int(t) for t in truth}
    if not truth:
        raise ConfigError("ground truth is empty")
    return iou(top_m(values, len(truth)), truth)


def jaccard(w, w2) -> float:
    """``sum min(|w|, |w'|) / sum max(|w|, |w'|)``; 1 when both are all zero."""
    a = np.abs(w.values if isinstance(w, SubsetTable) else np.asarray(w, dtype=np.float64))
    b = np.abs(w2.values if isinstance(w2, SubsetTable) else np.asarray(w2, dtype=np.float64))
    if a.shape != b.shape:
        raise ConfigError("Jaccard needs tables over the same variables")
    top = float(np.maximum(a, b).sum())
    return 1.0 if top == 0.0 else float(np.minimum(a, b).sum()) / top


def sorted_strength_curve(spec) -> list[tuple[int, float, int]]:
    """``(rank, |w_S|, mask)`` rows in descending strength, ranks from 1."""
    w = spec.w.values if isinstance(spec, EffectSpectrum) else np.asarray(spec)
    order = effect_order(w)
    return [(k + 1, float(abs(w[m])), int(m)) for k, m in enumerate(order)]
