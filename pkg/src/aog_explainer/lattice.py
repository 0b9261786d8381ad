"""Subset-lattice primitives.

Subsets of ``N = {0, ..., n-1}`` are machine-word bitmasks: bit ``i`` set means
variable ``i`` belongs to the subset.  Variable ``i`` is displayed as ``x{i+1}``.

All array transforms operate on the last axis, which must have length ``2**n``;
any leading axes are treated as a batch.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapacityError

MAX_VARS = 24
WARN_VARS = 20


def check_capacity(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or n < 1 or n > MAX_VARS:
        raise CapacityError(f"variable count must be in [1, {MAX_VARS}], got {n!r}")
    if n > WARN_VARS:
        warnings.warn(
            f"n={n} dense tables hold {1 << n} entries; expect heavy memory use",
            RuntimeWarning,
            stacklevel=3,
        )
    return int(n)


def n_from_size(size: int) -> int:
    n = int(size).bit_length() - 1
    if size <= 0 or (1 << n) != size:
        raise CapacityError(f"table length {size} is not a power of two")
    return check_capacity(n)


def popcount(mask: int) -> int:
    return int(mask).bit_count()


def members(mask: int) -> list[int]:
    """Indices of the variables in ``mask``, ascending."""
    mask = int(mask)
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << int(i)
    return m


def full_mask(n: int) -> int:
    return (1 << n) - 1


def iter_subsets(mask: int) -> Iterator[int]:
    """All submasks of ``mask`` (including 0 and ``mask`` itself)."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def variable_names(n: int) -> list[str]:
    return [f"x{i + 1}" for i in range(n)]


@dataclass(frozen=True, order=True)
class VariableSet:
    """A subset S of the n input variables."""

    bits: int
    n: int

    def __post_init__(self):
        check_capacity(self.n)
        if self.bits < 0 or self.bits >= (1 << self.n):
            raise ValueError(f"mask {self.bits} out of range for n={self.n}")

    @classmethod
    def from_members(cls, indices: Iterable[int], n: int) -> "VariableSet":
        return cls(mask_of(indices), n)

    def __index__(self) -> int:
        return self.bits

    def __int__(self) -> int:
        return self.bits

    def __len__(self) -> int:
        return popcount(self.bits)

    def __contains__(self, i: int) -> bool:
        return bool(self.bits >> i & 1)

    def members(self) -> list[int]:
        return members(self.bits)

    def issubset(self, other: "VariableSet | int") -> bool:
        o = int(other)
        return self.bits & ~o == 0

    def __str__(self) -> str:
        return "{" + ",".join(f"x{i + 1}" for i in self.members()) + "}"


_popcount_cache: dict[int, np.ndarray] = {}


def popcounts(n: int) -> np.ndarray:
    """``popcounts(n)[S] == |S|`` for every mask, as a read-only int array."""
    arr = _popcount_cache.get(n)
    if arr is None:
        arr = np.zeros(1 << n, dtype=np.int64)
        for i in range(n):
            arr[1 << i : 1 << (i + 1)] = arr[: 1 << i] + 1
        arr.flags.writeable = False
        _popcount_cache[n] = arr
    return arr


@dataclass(frozen=True)
class SubsetTable:
    """Dense table of ``2**n`` float64 values indexed by mask."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        check_capacity(self.n)
        vals = np.array(self.values, dtype=np.float64, copy=True)
        if vals.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} entries, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("subset table entries must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_array(cls, values: Sequence[float] | np.ndarray) -> "SubsetTable":
        values = np.asarray(values, dtype=np.float64)
        return cls(n_from_size(values.shape[-1]), values)

    @classmethod
    def zeros(cls, n: int) -> "SubsetTable":
        return cls(n, np.zeros(1 << n))

    def __len__(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, mask) -> float:
        return float(self.values[int(mask)])

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    @property
    def full(self) -> float:
        return float(self.values[-1])


def _as_work_array(values) -> tuple[np.ndarray, int]:
    a = np.array(values, dtype=np.float64, copy=True)
    if a.ndim == 0:
        raise ValueError("expected an array with a lattice axis")
    return a, n_from_size(a.shape[-1])


def mobius(values) -> np.ndarray:
    """Harsanyi dividends ``w_S = sum_{S' <= S} (-1)^{|S|-|S'|} v_{S'}``.

    In-place subset Moebius transform, O(n 2^n) per table.
    """
    a, n = _as_work_array(values)
    lead = a.shape[:-1]
    size = a.shape[-1]
    for i in range(n):
        view = a.reshape(lead + (size >> (i + 1), 2, 1 << i))
        view[..., 1, :] -= view[..., 0, :]
    return a


def zeta(values) -> np.ndarray:
    """Subset sums ``v_S = sum_{S' <= S} w_{S'}``; inverse of :func:`mobius`."""
    a, n = _as_work_array(values)
    lead = a.shape[:-1]
    size = a.shape[-1]
    for i in range(n):
        view = a.reshape(lead + (size >> (i + 1), 2, 1 << i))
        view[..., 1, :] += view[..., 0, :]
    return a


def superset_sums(values) -> np.ndarray:
    """``out_U = sum_{S >= U} t_S``."""
    a, n = _as_work_array(values)
    lead = a.shape[:-1]
    size = a.shape[-1]
    for i in range(n):
        view = a.reshape(lead + (size >> (i + 1), 2, 1 << i))
        view[..., 0, :] += view[..., 1, :]
    return a


def ranked_superset_sums(values) -> np.ndarray:
    """Superset sums split by the size of the summed set.

    Returns ``R`` with ``R[k, ..., U] = sum_{S >= U, |S| = k} t_S`` for
    ``k = 0..n``.  Building block for size-weighted superset sums such as the
    Shapley interaction index.
    """
    a = np.asarray(values, dtype=np.float64)
    n = n_from_size(a.shape[-1])
    pc = popcounts(n)
    out = np.zeros((n + 1,) + a.shape)
    for k in range(n + 1):
        out[k] = superset_sums(np.where(pc == k, a, 0.0))
    return out


def weighted_superset_sums(values, weight: np.ndarray) -> np.ndarray:
    """``out_U = sum_{S >= U} weight[|S|, |U|] * t_S``.

    ``weight`` is an ``(n+1, n+1)`` array indexed by (size of S, size of U).
    """
    a = np.asarray(values, dtype=np.float64)
    n = n_from_size(a.shape[-1])
    weight = np.asarray(weight, dtype=np.float64)
    if weight.shape != (n + 1, n + 1):
        raise ValueError(f"weight must have shape {(n + 1, n + 1)}")
    ranked = ranked_superset_sums(a)
    pc = popcounts(n)
    # coef[k, U] = weight[k, |U|]
    coef = weight[:, pc]
    coef = coef.reshape((n + 1,) + (1,) * (a.ndim - 1) + (a.shape[-1],))
    return np.sum(ranked * coef, axis=0)


def mobius_transform(table: SubsetTable) -> SubsetTable:
    return SubsetTable(table.n, mobius(table.values))


def zeta_transform(table: SubsetTable) -> SubsetTable:
    return SubsetTable(table.n, zeta(table.values))


def superset_sum(table: SubsetTable) -> SubsetTable:
    return SubsetTable(table.n, superset_sums(table.values))
