"""Deterministic infinite-width recursion for a fixed input.

O(0) is the mean squared input; O(l) = E[s(Z sqrt(Cb + Cw O(l-1)))^2] and
c_l = sqrt(2 E[s(Z sqrt(Cb + Cw O(l-1)))^4]). The limiting output law is
N(0, nu^2 I) with nu^2 = Cb + Cw O(L).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import activations as acts
from .errors import DeepBoundUnavailable, DomainError
from .gaussmath import expect_sigma_power

_DEEP_WARN_DEPTH = 16


@dataclass(frozen=True)
class Architecture:
    n0: int
    hidden: tuple[int, ...]
    n_out: int
    C_b: float
    C_W: float

    def __post_init__(self):
        hidden = tuple(int(n) for n in self.hidden)
        object.__setattr__(self, "hidden", hidden)
        if not hidden:
            raise DomainError("at least one hidden layer is required")
        if self.n0 < 1 or self.n_out < 1 or min(hidden) < 1:
            raise DomainError("all widths must be >= 1")
        if not (self.C_b > 0 and self.C_W > 0):
            raise DomainError("C_b and C_W must be positive")

    @property
    def L(self) -> int:
        return len(self.hidden)

    @property
    def widths(self) -> tuple[int, ...]:
        """n_0, n_1, ..., n_{L+1}."""
        return (self.n0,) + self.hidden + (self.n_out,)

    @property
    def is_shallow(self) -> bool:
        return self.L == 1

    def with_hidden(self, hidden: Sequence[int]) -> "Architecture":
        return Architecture(self.n0, tuple(hidden), self.n_out, self.C_b, self.C_W)

    def to_dict(self) -> dict:
        return {
            "n0": self.n0,
            "hidden": list(self.hidden),
            "n_out": self.n_out,
            "C_b": self.C_b,
            "C_W": self.C_W,
        }


@dataclass(frozen=True)
class LayerStats:
    o0: float
    o_seq: tuple[float, ...]
    c_seq: tuple[float, ...]
    p_l2: Optional[float]
    nu_sq: float
    p_route: Optional[str] = None

    @property
    def o_last(self) -> float:
        return self.o_seq[-1]


def _as_input(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise DomainError("input vector must be finite")
    return x


def o_zero(x, n0: Optional[int] = None) -> float:
    x = _as_input(x)
    if n0 is not None and x.size != n0:
        raise DomainError(f"input has length {x.size}, expected n0={n0}")
    if x.size == 0:
        raise DomainError("empty input vector")
    return math.fsum(x * x) / x.size


def _kappas(act, arch: Architecture, x):
    """Yield (kappa_l, O(l-1)) for l = 1..L, updating O on the way."""
    prev = o_zero(x, arch.n0)
    if arch.L > _DEEP_WARN_DEPTH:
        warnings.warn(
            f"depth {arch.L} > {_DEEP_WARN_DEPTH}: quadrature error compounds through the recursion",
            stacklevel=3,
        )
    for _ in range(arch.L):
        kappa = math.sqrt(arch.C_b + arch.C_W * prev)
        yield kappa, prev
        prev = expect_sigma_power(act, kappa, 2)


def o_sequence(act, arch: Architecture, x) -> tuple[float, ...]:
    return tuple(expect_sigma_power(act, kappa, 2) for kappa, _ in _kappas(act, arch, x))


def c_sequence(act, arch: Architecture, x) -> tuple[float, ...]:
    return tuple(math.sqrt(2.0 * expect_sigma_power(act, kappa, 4)) for kappa, _ in _kappas(act, arch, x))


def layer_stats(act, arch: Architecture, x) -> LayerStats:
    o0 = o_zero(x, arch.n0)
    o_seq, c_seq = [], []
    prev = o0
    for kappa, _ in _kappas(act, arch, x):
        prev = expect_sigma_power(act, kappa, 2)
        o_seq.append(prev)
        c_seq.append(math.sqrt(2.0 * expect_sigma_power(act, kappa, 4)))
    nu_sq = arch.C_b + arch.C_W * o_seq[-1]
    if not nu_sq > 0:
        raise DomainError("limiting output variance is not positive")
    try:
        route, _, p_l2 = acts.select_route(act, arch.C_b, arch.C_W)
    except DeepBoundUnavailable:
        route, p_l2 = None, None
    return LayerStats(o0, tuple(o_seq), tuple(c_seq), p_l2, nu_sq, route)


def collective_sum(stats: LayerStats, hidden: Sequence[int], ell: Optional[int] = None) -> float:
    """sum_{k=1}^{ell} (4 sqrt(2) ||P(|Z|)||_2)^(ell-k) c_k / sqrt(n_k), with 0^0 = 1."""
    if stats.p_l2 is None:
        raise DeepBoundUnavailable("deep bounds unavailable for this activation (no P polynomial)")
    ell = len(hidden) if ell is None else ell
    if not 1 <= ell <= len(hidden):
        raise DomainError(f"layer index {ell} outside 1..{len(hidden)}")
    mult = 4.0 * math.sqrt(2.0) * stats.p_l2
    terms = [mult ** (ell - k) * stats.c_seq[k - 1] / math.sqrt(hidden[k - 1]) for k in range(1, ell + 1)]
    return math.fsum(terms)


def collective_bound(act, arch: Architecture, x, ell: Optional[int] = None) -> float:
    """L2 bound on O_n(ell) - O(ell) for the width-averaged squared activation."""
    return collective_sum(layer_stats(act, arch, x), arch.hidden, ell)
