"""Masking semantics and the value-oracle abstraction."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import numpy as np

from ..errors import ConfigError, OracleError
from ..lattice import SubsetTable, check_capacity

LOG_ODDS_EPS = 1e-7
DEFAULT_BATCH = 256


def _vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} contains non-finite entries")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Sample:
    x: np.ndarray
    sample_id: str = "0"

    def __post_init__(self):
        object.__setattr__(self, "x", _vector(self.x, "sample"))

    @property
    def n(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class BaselineVector:
    """Baseline values ``r`` plus the ball ``(r_i - r_init_i)^2 <= tau_i`` they live in."""

    r: np.ndarray
    r_init: np.ndarray | None = None
    tau: np.ndarray | None = None

    def __post_init__(self):
        r = _vector(self.r, "baseline")
        r_init = r if self.r_init is None else _vector(self.r_init, "r_init")
        tau = np.full(r.shape, np.inf) if self.tau is None else _vector_inf(self.tau)
        if r_init.shape != r.shape or tau.shape != r.shape:
            raise ConfigError("baseline, r_init and tau must have equal length")
        if np.any(tau < 0):
            raise ConfigError("tau bounds must be non-negative")
        # tiny slack for the projection's own float rounding
        if np.any((r - r_init) ** 2 > tau * (1 + 1e-12) + 1e-300):
            raise ConfigError("baseline violates its tau ball")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "r_init", r_init)
        object.__setattr__(self, "tau", tau)

    @classmethod
    def zeros(cls, n: int) -> "BaselineVector":
        return cls(np.zeros(n))

    @property
    def n(self) -> int:
        return self.r.shape[0]

    def digest(self) -> str:
        return hashlib.sha256(self.r.tobytes()).hexdigest()[:16]


def _vector_inf(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    if np.any(np.isnan(arr)):
        raise ConfigError("tau contains NaN")
    arr.flags.writeable = False
    return arr


def mask_sample(sample: Sample | np.ndarray, baseline: BaselineVector | np.ndarray, s: int) -> np.ndarray:
    """Masked input: ``x_i`` for ``i`` in ``s``, ``r_i`` elsewhere."""
    x = sample.x if isinstance(sample, Sample) else np.asarray(sample, dtype=np.float64)
    r = baseline.r if isinstance(baseline, BaselineVector) else np.asarray(baseline, dtype=np.float64)
    if x.shape != r.shape:
        raise ConfigError(f"sample has {x.shape[0]} variables, baseline has {r.shape[0]}")
    s = int(s)
    if s < 0 or s >= 1 << x.shape[0]:
        raise ConfigError(f"mask {s} out of range for n={x.shape[0]}")
    keep = (s >> np.arange(x.shape[0])) & 1
    return np.where(keep.astype(bool), x, r)


def masked_inputs(x: np.ndarray, r: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """Rows of masked samples, one per mask, shape ``(len(masks), n)``."""
    x = np.asarray(x, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    masks = np.asarray(masks, dtype=np.int64)
    keep = ((masks[:, None] >> np.arange(x.shape[0])[None, :]) & 1).astype(bool)
    return np.where(keep, x[None, :], r[None, :])


def sigmoid(t):
    t = np.asarray(t, dtype=np.float64)
    e = np.exp(-np.abs(t))
    return np.where(t >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def log_odds(p, eps: float = LOG_ODDS_EPS):
    """``log(p / (1 - p))`` with ``p`` clamped to ``[eps, 1 - eps]``."""
    p = np.clip(np.asarray(p, dtype=np.float64), eps, 1.0 - eps)
    out = np.log(p) - np.log1p(-p)
    return float(out) if out.ndim == 0 else out


class Model(Protocol):
    n_inputs: int

    def predict(self, inputs: np.ndarray) -> np.ndarray:
        """Scalar output per row of an ``(batch, n)`` input matrix."""


class ValueOracle:
    """Produces v(x_S) for any mask S of a fixed sample and baseline.

    Subclasses implement :meth:`evaluate`.  ``concurrent`` is False for
    backends that must see one request at a time.
    """

    concurrent = True
    oracle_id = "oracle"

    def __init__(self, sample: Sample, baseline: BaselineVector):
        if sample.n != baseline.n:
            raise ConfigError(f"sample has {sample.n} variables, baseline has {baseline.n}")
        check_capacity(sample.n)
        self.sample = sample
        self.baseline = baseline

    @property
    def n(self) -> int:
        return self.sample.n

    def evaluate(self, masks: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, mask: int) -> float:
        return float(self.evaluate(np.array([int(mask)]))[0])


class ModelOracle(ValueOracle):
    """In-process oracle backed by any object with a vectorised ``predict``."""

    def __init__(self, model: Model, sample: Sample, baseline: BaselineVector, oracle_id: str | None = None):
        super().__init__(sample, baseline)
        if getattr(model, "n_inputs", sample.n) != sample.n:
            raise ConfigError(f"model expects {model.n_inputs} inputs, sample has {sample.n}")
        self.model = model
        self.oracle_id = oracle_id or type(model).__name__

    def evaluate(self, masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.int64)
        out = np.asarray(self.model.predict(masked_inputs(self.sample.x, self.baseline.r, masks)), dtype=np.float64)
        if out.shape != masks.shape:
            raise OracleError(f"model returned shape {out.shape} for {masks.shape[0]} masks")
        bad = ~np.isfinite(out)
        if bad.any():
            raise OracleError("model returned a non-finite value", int(masks[np.argmax(bad)]))
        return out


class FunctionOracle(ValueOracle):
    """Oracle for a plain set function ``f(mask) -> float`` (games, tests)."""

    def __init__(self, fn: Callable[[int], float], n: int, oracle_id: str = "function"):
        super().__init__(Sample(np.zeros(n)), BaselineVector.zeros(n))
        self.fn = fn
        self.oracle_id = oracle_id

    def evaluate(self, masks: np.ndarray) -> np.ndarray:
        return np.array([float(self.fn(int(m))) for m in masks], dtype=np.float64)


class TableOracle(ValueOracle):
    """Oracle that replays a precomputed table of v(x_S)."""

    def __init__(self, values: Sequence[float] | np.ndarray, oracle_id: str = "table"):
        table = SubsetTable.from_array(values)
        super().__init__(Sample(np.zeros(table.n)), BaselineVector.zeros(table.n))
        self.table = table
        self.oracle_id = oracle_id

    def evaluate(self, masks: np.ndarray) -> np.ndarray:
        return self.table.values[np.asarray(masks, dtype=np.int64)].copy()


def evaluate_table(oracle: ValueOracle, batch_size: int = DEFAULT_BATCH) -> SubsetTable:
    """Query the oracle on all ``2**n`` masks, in batches."""
    if batch_size < 1:
        raise ConfigError("batch_size must be positive")
    size = 1 << oracle.n
    out = np.empty(size)
    for start in range(0, size, batch_size):
        masks = np.arange(start, min(size, start + batch_size), dtype=np.int64)
        try:
            vals = np.asarray(oracle.evaluate(masks), dtype=np.float64)
        except (OracleError, ConfigError):
            raise
        except Exception as exc:  # backend bug: report the first mask of the batch
            raise OracleError(f"oracle failed: {exc}", int(masks[0])) from exc
        if vals.shape != masks.shape:
            raise OracleError(f"oracle returned {vals.size} values for {masks.size} masks", int(masks[0]))
        bad = ~np.isfinite(vals)
        if bad.any():
            raise OracleError("oracle returned a non-finite value", int(masks[np.argmax(bad)]))
        out[start : start + masks.size] = vals
    return SubsetTable(oracle.n, out)
