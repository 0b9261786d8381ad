"""Synthetic functions with known ground-truth interaction patterns.

Four families are supported:

``add_mul``
    Sums of products of binary variables, unit coefficients.
``add_mul_coeff``
    Same structure with a random nonzero coefficient per term.
``sigmoid_family``
    Signed products mixed with gated terms
    ``c * sigmoid(g * prod_A x - g * sum_B x - g/2)``, which fire only when every
    variable in ``A`` is 1 and every variable in ``B`` is 0.
``and_or``
    OR of AND clauses over indicators ``x_i > 0`` on real-valued inputs.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..lattice import mask_of, members, popcount
from .masking import sigmoid

KINDS = ("add_mul", "add_mul_coeff", "sigmoid_family", "and_or")
TRUTH_THRESHOLD = 0.5
SIGMOID_GAIN = 5.0


@dataclass(frozen=True)
class Term:
    mask: int
    coef: float = 1.0
    op: str = "prod"
    neg_mask: int = 0
    gain: float = SIGMOID_GAIN

    @property
    def pattern(self) -> int:
        return self.mask | self.neg_mask

    def to_dict(self) -> dict:
        d = {"op": self.op, "mask": self.mask, "coef": self.coef}
        if self.op == "sigmoid":
            d["neg_mask"] = self.neg_mask
            d["gain"] = self.gain
        return d


@dataclass(frozen=True)
class SyntheticFunction:
    kind: str
    n: int
    terms: tuple[Term, ...] = ()
    clauses: tuple[int, ...] = ()
    threshold: float = TRUTH_THRESHOLD

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown synthetic kind {self.kind!r}")
        full = (1 << self.n) - 1
        for t in self.terms:
            if t.op not in ("prod", "sigmoid"):
                raise ConfigError(f"unknown term op {t.op!r}")
            if t.pattern == 0 or t.pattern & ~full:
                raise ConfigError(f"term variables {t.pattern:#x} empty or outside n={self.n}")
            if t.mask & t.neg_mask:
                raise ConfigError("sigmoid term uses a variable on both sides")
        for c in self.clauses:
            if c == 0 or c & ~full:
                raise ConfigError(f"clause {c:#x} empty or outside n={self.n}")
        if self.kind == "and_or" and not self.clauses:
            raise ConfigError("and_or function needs at least one clause")

    @property
    def n_inputs(self) -> int:
        return self.n

    def predict(self, inputs: np.ndarray) -> np.ndarray:
        X = np.asarray(inputs, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n:
            raise ConfigError(f"expected inputs of shape (batch, {self.n}), got {X.shape}")
        if self.kind == "and_or":
            fired = np.zeros(X.shape[0], dtype=bool)
            for c in self.clauses:
                fired |= np.all(X[:, members(c)] > 0, axis=1)
            return fired.astype(np.float64)
        cols = np.ascontiguousarray(X.T)
        out = np.zeros(X.shape[0])
        for t in self.terms:
            idx = members(t.mask)
            prod = np.prod(cols[idx], axis=0) if idx else np.ones(X.shape[0])
            if t.op == "prod":
                out += t.coef * prod
            else:
                neg = cols[members(t.neg_mask)].sum(axis=0) if t.neg_mask else 0.0
                out += t.coef * sigmoid(t.gain * prod - t.gain * neg - t.gain / 2)
        return out

    def truth_spectrum(self, x: np.ndarray) -> dict[int, float]:
        """Coefficient of each active product term (add_mul kinds only)."""
        if self.kind not in ("add_mul", "add_mul_coeff"):
            raise ConfigError("coefficient ground truth exists only for add_mul kinds")
        out: dict[int, float] = {}
        ones = _mask_where(np.asarray(x) == 1.0)
        for t in self.terms:
            if t.mask & ones == t.mask:
                out[t.mask] = out.get(t.mask, 0.0) + t.coef
        return out

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "terms": [t.to_dict() for t in self.terms],
            "clauses": list(self.clauses),
            "threshold": self.threshold,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticFunction":
        try:
            terms = tuple(
                Term(
                    mask=int(t["mask"]),
                    coef=float(t.get("coef", 1.0)),
                    op=t.get("op", "prod"),
                    neg_mask=int(t.get("neg_mask", 0)),
                    gain=float(t.get("gain", SIGMOID_GAIN)),
                )
                for t in d.get("terms", [])
            )
            return cls(
                kind=d["kind"],
                n=int(d["n"]),
                terms=terms,
                clauses=tuple(int(c) for c in d.get("clauses", [])),
                threshold=float(d.get("threshold", TRUTH_THRESHOLD)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed synthetic function: {exc}") from exc

    def describe(self) -> str:
        if self.kind == "and_or":
            return " | ".join(" & ".join(f"(x{i + 1}>0)" for i in members(c)) for c in self.clauses)
        parts = []
        for t in self.terms:
            prod = "*".join(f"x{i + 1}" for i in members(t.mask)) or "1"
            if t.op == "sigmoid":
                neg = "".join(f"-{t.gain:g}*x{i + 1}" for i in members(t.neg_mask))
                prod = f"sigmoid({t.gain:g}*{prod}{neg}-{t.gain / 2:g})"
            parts.append(f"{t.coef:+g}*{prod}")
        return " ".join(parts)


def _all_equal(x: np.ndarray, mask: int, value: float) -> bool:
    return mask & ~_mask_where(x == value) == 0


def _mask_where(flags: np.ndarray) -> int:
    return mask_of(np.flatnonzero(flags).tolist())


_TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+)")
_VAR_RE = re.compile(r"^x(\d+)$")


def parse_polynomial(expr: str, n: int | None = None) -> SyntheticFunction:
    """Parse ``"3*x1 - 2*x2*x3 + x4*x6"`` into an add_mul style function.

    Variables are written ``x1..xn`` (1-based).  The kind is ``add_mul`` when
    every coefficient is 1, ``add_mul_coeff`` otherwise.
    """
    expr = expr.replace(" ", "")
    if not expr:
        raise ConfigError("empty expression")
    terms = []
    pos = 0
    top = 0
    while pos < len(expr):
        m = _TERM_RE.match(expr, pos)
        if not m or m.end() == pos:
            raise ConfigError(f"cannot parse expression near {expr[pos:]!r}")
        sign = -1.0 if m.group(1) == "-" else 1.0
        coef = sign
        idx = []
        for factor in m.group(2).split("*"):
            vm = _VAR_RE.match(factor)
            if vm:
                i = int(vm.group(1))
                if i < 1:
                    raise ConfigError(f"variables are numbered from x1, got {factor}")
                idx.append(i - 1)
            else:
                try:
                    coef *= float(factor)
                except ValueError:
                    raise ConfigError(f"bad factor {factor!r} in expression") from None
        if not idx:
            raise ConfigError("constant terms are not supported")
        if len(set(idx)) != len(idx):
            raise ConfigError(f"repeated variable in term {m.group(2)!r}")
        top = max(top, max(idx) + 1)
        terms.append(Term(mask=mask_of(idx), coef=coef))
        pos = m.end()
    n = top if n is None else n
    if top > n:
        raise ConfigError(f"expression uses x{top} but n={n}")
    kind = "add_mul" if all(t.coef == 1.0 for t in terms) else "add_mul_coeff"
    return SyntheticFunction(kind=kind, n=n, terms=tuple(terms))


def ground_truth_patterns(f: SyntheticFunction, sample) -> set[int]:
    """Masks of the interaction patterns the function activates on ``sample``."""
    x = np.asarray(getattr(sample, "x", sample), dtype=np.float64)
    if x.shape != (f.n,):
        raise ConfigError(f"sample has {x.shape} entries, function expects {f.n}")
    if f.kind == "and_or":
        above = _mask_where(x > f.threshold)
        return {c for c in f.clauses if c & above == c}
    ones = _mask_where(x == 1.0)
    if f.kind in ("add_mul", "add_mul_coeff"):
        return {t.mask for t in f.terms if t.mask & ones == t.mask}
    if f.kind == "sigmoid_family":
        zeros = _mask_where(x == 0.0)
        return {
            t.pattern
            for t in f.terms
            if t.mask & ones == t.mask and (t.op == "prod" or t.neg_mask & zeros == t.neg_mask)
        }
    raise ConfigError(f"unsupported kind {f.kind!r}")


def _random_mask(rng: np.random.Generator, n: int, size: int, exclude: int = 0) -> int:
    pool = [i for i in range(n) if not exclude >> i & 1]
    return mask_of(int(i) for i in rng.choice(pool, size=size, replace=False))


def _distinct_masks(rng, n: int, count: int, max_order: int) -> list[int]:
    seen: list[int] = []
    used = set()
    while len(seen) < count:
        m = _random_mask(rng, n, int(rng.integers(1, max_order + 1)))
        if m not in used:
            used.add(m)
            seen.append(m)
    return seen


def _nonzero_coef(rng, low: float = 0.5, high: float = 5.0) -> float:
    return float(rng.choice([-1.0, 1.0]) * rng.uniform(low, high))


def generate_synthetic_suite(
    kind: str,
    count: int,
    n: int,
    seed: int,
    samples_per_function: int = 200,
    max_order: int = 5,
) -> list[tuple[SyntheticFunction, np.ndarray]]:
    """Deterministic suite of ``count`` functions, each with its own samples.

    add_mul kinds draw 10 to 100 distinct terms of order 1..``max_order`` and
    binary samples; sigmoid_family draws 2 to 6 terms; and_or draws 2 to 4
    clauses of 2 or 3 variables and standard Gaussian samples.
    """
    if kind not in KINDS:
        raise ConfigError(f"unknown synthetic kind {kind!r}")
    if count < 0:
        raise ConfigError("count must be non-negative")
    if not 6 <= n <= 12:
        raise ConfigError(f"synthetic suites use 6 <= n <= 12, got {n}")
    if samples_per_function < 1:
        raise ConfigError("samples_per_function must be positive")
    rng = np.random.default_rng(seed)
    max_order = max(1, min(max_order, n))
    suite = []
    for _ in range(count):
        if kind in ("add_mul", "add_mul_coeff"):
            n_terms = int(rng.integers(10, 101))
            masks = _distinct_masks(rng, n, n_terms, max_order)
            coefs = [1.0 if kind == "add_mul" else _nonzero_coef(rng) for _ in masks]
            f = SyntheticFunction(kind, n, tuple(Term(m, c) for m, c in zip(masks, coefs)))
            X = rng.integers(0, 2, size=(samples_per_function, n)).astype(np.float64)
        elif kind == "sigmoid_family":
            terms = []
            used = set()
            n_terms = int(rng.integers(2, 7))
            while len(terms) < n_terms:
                pos = _random_mask(rng, n, int(rng.integers(1, 4)))
                if rng.random() < 0.5:
                    t = Term(pos, _nonzero_coef(rng, 0.5, 2.0))
                else:
                    neg_size = int(rng.integers(1, 3))
                    neg = _random_mask(rng, n, min(neg_size, n - popcount(pos)), exclude=pos)
                    t = Term(pos, _nonzero_coef(rng, 0.5, 2.0), op="sigmoid", neg_mask=neg)
                if t.pattern not in used:
                    used.add(t.pattern)
                    terms.append(t)
            f = SyntheticFunction(kind, n, tuple(terms))
            X = rng.integers(0, 2, size=(samples_per_function, n)).astype(np.float64)
        else:
            clauses = []
            for _ in range(int(rng.integers(2, 5))):
                c = _random_mask(rng, n, int(rng.integers(2, 4)))
                if c not in clauses:
                    clauses.append(c)
            f = SyntheticFunction(kind, n, clauses=tuple(clauses))
            X = rng.standard_normal(size=(samples_per_function, n))
        suite.append((f, X))
    return suite


def load_function(path) -> SyntheticFunction:
    try:
        with open(path) as fh:
            return SyntheticFunction.from_dict(json.load(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read function file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"function file {path} is not valid JSON: {exc}") from exc
