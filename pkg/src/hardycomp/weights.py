"""Weight sequences for weighted Hardy spaces H^2_beta.

A space is fixed by positive weights ``w_k`` (k >= 1).  The norm weights are
the partial products ``beta_0 = 1``, ``beta_k = w_1 * ... * w_k``, and
``e_n = z**n / beta_n`` is the orthonormal basis every section is written in.

Presets cover the Hardy space, weighted Dirichlet spaces, and the two
integer-order families ``dn1`` (``beta_k = C(N+k, k)``) and ``dn2``
(``beta_k = (k+1)**N``).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .matrix import OperatorMatrix

Rule = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Immutable weight rule with a lazily grown, lock-protected beta cache.

    ``rule`` maps an integer array of indices k >= 1 to the weights w_k.
    ``exact_beta`` optionally returns beta_k as a ``Fraction``.
    """

    label: str
    rule: Rule
    exact_beta: Callable[[int], Fraction] | None = None
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def weights(self, k_max: int) -> np.ndarray:
        """w_1 .. w_{k_max} as floats."""
        if k_max <= 0:
            return np.empty(0)
        w = np.asarray(self.rule(np.arange(1, k_max + 1)), dtype=float)
        return np.broadcast_to(w, (k_max,)).copy()

    def w(self, k: int) -> float:
        if k < 1:
            raise ValueError("weights are indexed from k = 1")
        return float(self.weights(k)[-1])

    def betas(self, n: int) -> np.ndarray:
        """beta_0 .. beta_{n-1}; beta_k is built as beta_{k-1} * w_k."""
        with self._lock:
            cached = self._cache.get("beta")
            if cached is None or len(cached) < n:
                size = max(n, 2 * len(cached) if cached is not None else 0, 16)
                b = np.cumprod(np.concatenate(([1.0], self.weights(size - 1))))
                b.setflags(write=False)
                self._cache["beta"] = cached = b
        return cached[:n].copy()

    def beta(self, k: int) -> float:
        return float(self.betas(k + 1)[k])

    @property
    def has_exact(self) -> bool:
        return self.exact_beta is not None

    def inverse(self) -> "WeightSequence":
        """The sequence with weights 1/w_k, so beta_k(inverse) = 1/beta_k."""
        exact = None
        if self.exact_beta is not None:
            eb = self.exact_beta
            exact = lambda k: 1 / eb(k)  # noqa: E731
        rule = self.rule
        return WeightSequence(f"inverse({self.label})", lambda k: 1.0 / np.asarray(rule(k), dtype=float), exact)

    def __repr__(self) -> str:
        return f"WeightSequence({self.label!r})"


def hardy() -> WeightSequence:
    return WeightSequence("hardy", lambda k: np.ones(np.shape(k)), lambda k: Fraction(1))


def dirichlet(lam: float) -> WeightSequence:
    if not lam > 0:
        raise ValueError(f"dirichlet needs lambda > 0, got {lam}")
    lam = float(lam)
    return WeightSequence(
        f"dirichlet:lambda={lam:g}",
        lambda k: np.sqrt((k + 2 * lam + 1) / (k + 1.0)),
    )


def dn1(order: int) -> WeightSequence:
    order = _nonneg_int(order, "dn1")
    return WeightSequence(
        f"dn1:n={order}",
        lambda k: (k + float(order)) / k,
        lambda k: Fraction(math.comb(order + k, k)),
    )


def dn2(order: int) -> WeightSequence:
    order = _nonneg_int(order, "dn2")
    return WeightSequence(
        f"dn2:n={order}",
        lambda k: ((k + 1.0) / k) ** order,
        lambda k: Fraction((k + 1) ** order),
    )


def custom(values: Sequence[float], tail: Rule | None = None, label: str = "custom") -> WeightSequence:
    """Explicit w_1..w_L, then ``tail(k)`` for k > L (default: weight 1)."""
    vals = np.asarray(list(values), dtype=float)
    if vals.ndim != 1 or vals.size == 0:
        raise ValueError("custom weights need a non-empty list")
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
        raise ValueError("custom weights must be finite and positive")
    n = vals.size

    def rule(k):
        k = np.asarray(k)
        out = np.ones(k.shape) if tail is None else np.asarray(tail(np.maximum(k, n + 1)), dtype=float) * np.ones(k.shape)
        inside = k <= n
        out = np.where(inside, vals[np.clip(k - 1, 0, n - 1)], out)
        return out

    return WeightSequence(label, rule)


def _nonneg_int(value, name: str) -> int:
    v = int(value)
    if v != value or v < 0:
        raise ValueError(f"{name} needs a nonnegative integer order, got {value}")
    return v


PRESETS = ("hardy", "dirichlet", "dn1", "dn2", "custom")


def make_preset(name: str, params: Sequence = ()) -> WeightSequence:
    """Build a preset by name; ``params`` holds lambda, N, or the custom list."""
    key = name.lower()
    params = list(params)
    if key == "hardy":
        return hardy()
    if key == "dirichlet":
        return dirichlet(params[0] if params else 1.0)
    if key == "dn1":
        return dn1(params[0] if params else 1)
    if key == "dn2":
        return dn2(params[0] if params else 1)
    if key == "custom":
        return custom(params)
    raise ValueError(f"unknown preset {name!r}; expected one of {', '.join(PRESETS)}")


def parse_weights(text: str) -> WeightSequence:
    """Parse ``hardy``, ``dirichlet:lambda=1``, ``dn1:n=2``, ``dn2:n=3`` or ``custom:file=path``."""
    name, _, rest = text.strip().partition(":")
    kv = {}
    if rest:
        for pos, item in enumerate(rest.split(",")):
            k, eq, v = item.partition("=")
            if not eq:
                raise ValueError(f"weights {text!r}: item {pos} {item!r} is not key=value")
            kv[k.strip().lower()] = v.strip()
    name = name.lower()
    expected = {"hardy": set(), "dirichlet": {"lambda"}, "dn1": {"n"}, "dn2": {"n"}, "custom": {"file"}}
    if name not in expected:
        raise ValueError(f"unknown preset {name!r}; expected one of {', '.join(PRESETS)}")
    extra = set(kv) - expected[name]
    if extra:
        raise ValueError(f"weights {text!r}: unexpected key(s) {sorted(extra)}; expected {sorted(expected[name])}")
    if name == "hardy":
        return hardy()
    if name == "dirichlet":
        return dirichlet(float(kv.get("lambda", 1.0)))
    if name in ("dn1", "dn2"):
        return make_preset(name, [int(kv.get("n", 1))])
    if "file" not in kv:
        raise ValueError("custom weights need file=<path>")
    path = Path(kv["file"])
    values = [float(s) for s in path.read_text(encoding="utf-8").split() if s]
    return custom(values, label=f"custom:file={path}")


# -- growth ---------------------------------------------------------------


class Growth(str, Enum):
    POLYNOMIAL = "PolynomialGrowth"
    INTERMEDIATE = "IntermediateGrowthSuspected"


@dataclass(frozen=True)
class GrowthReport:
    sup_probe: float
    probe_limit: int
    classification: Growth
    m_estimate: float | None

    @property
    def order(self) -> int | None:
        """Integer growth order ceil(M) used in bound exponents."""
        if self.m_estimate is None:
            return None
        return int(math.ceil(self.m_estimate - 1e-9))

    def to_json(self) -> dict:
        return {
            "sup_probe": self.sup_probe,
            "probe_limit": self.probe_limit,
            "classification": self.classification.value,
            "M_estimate": self.m_estimate if self.m_estimate is not None else "none",
        }


# a later half whose sup exceeds the earlier one by more than this is "still growing"
STABILITY_RTOL = 0.05


def classify_growth(w: WeightSequence, probe_limit: int = 100_000) -> GrowthReport:
    """Probe sup_k (k+1)|w_k - 1| over k <= probe_limit."""
    if probe_limit < 16:
        raise ValueError("probe_limit must be at least 16")
    k = np.arange(1, probe_limit + 1)
    wk = w.weights(probe_limit)
    dev = (k + 1) * np.abs(wk - 1.0)
    half = probe_limit // 2
    early, late = dev[:half].max(), dev[half:].max()
    stable = late <= early * (1 + STABILITY_RTOL) or late <= 1e-12
    if not stable:
        return GrowthReport(float(dev.max()), probe_limit, Growth.INTERMEDIATE, None)
    # the two-sided band (k+1)/(k+M+1) <= w_k <= (k+M+1)/(k+1) solved for M
    m_upper = (k + 1) * (wk - 1.0)
    m_lower = (k + 1) * (1.0 / wk - 1.0)
    m_est = float(max(0.0, m_upper.max(), m_lower.max()))
    return GrowthReport(float(dev.max()), probe_limit, Growth.POLYNOMIAL, m_est)


def growth_order(w: WeightSequence, probe_limit: int = 100_000) -> int:
    """Smallest integer N with max(w_k, 1/w_k) <= (k+N)/k for every probed k."""
    k = np.arange(1, probe_limit + 1)
    wk = w.weights(probe_limit)
    need = k * (np.maximum(wk, 1.0 / wk) - 1.0)
    return max(0, int(math.ceil(float(need.max()) - 1e-9)))


# -- lifts and diagonals --------------------------------------------------


def tilde_lift(w: WeightSequence) -> WeightSequence:
    """Weights with beta~_n = (n+1) beta_n, i.e. w~_k = w_k (k+1)/k."""
    rule = w.rule
    exact = None
    if w.exact_beta is not None:
        eb = w.exact_beta
        exact = lambda k: (k + 1) * eb(k)  # noqa: E731
    return WeightSequence(
        f"tilde({w.label})",
        lambda k: np.asarray(rule(k), dtype=float) * ((k + 1.0) / k),
        exact,
    )


DIAGONAL_KINDS = ("D_beta", "D_beta_inv", "D_w", "D_shift", "D_wtilde")


def diagonal_entries(kind: str, w: WeightSequence, n: int) -> np.ndarray:
    k = np.arange(n)
    if kind == "D_beta":
        return w.betas(n)
    if kind == "D_beta_inv":
        return 1.0 / w.betas(n)
    if kind == "D_w":
        return w.weights(n)
    if kind == "D_shift":
        return (k + 2.0) / (k + 1.0)
    if kind == "D_wtilde":
        return diagonal_entries("D_shift", w, n) * diagonal_entries("D_w", w, n)
    raise ValueError(f"unknown diagonal kind {kind!r}; expected one of {DIAGONAL_KINDS}")


def diagonal_section(kind: str, w: WeightSequence, n: int) -> OperatorMatrix:
    """N x N diagonal of D_beta, D_beta_inv, D_w, D_shift or D_wtilde."""
    if n < 1:
        raise ValueError("section size must be at least 1")
    d = diagonal_entries(kind, w, n)
    return OperatorMatrix(np.diag(d.astype(complex)), "e_n", {"kind": kind, "weights": w.label, "N": n})
