"""Output localization: certified probability intervals for rectangles."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import bounds, recursion
from .errors import DomainError
from .gaussmath import normal_cdf
from .recursion import Architecture

MODES = ("tv_shallow", "convex_deep")


@dataclass(frozen=True)
class Rect:
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise DomainError("rectangle bounds must be non-empty and of equal length")
        if any(math.isnan(v) for v in lo + hi):
            raise DomainError("rectangle bounds must not be NaN")
        if any(r > s for r, s in zip(lo, hi)):
            raise DomainError("rectangle needs lo <= hi on every axis")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @classmethod
    def parse(cls, text: str) -> "Rect":
        """``"lo:hi,lo:hi"`` with ``inf`` / ``-inf`` tokens allowed."""
        lo, hi = [], []
        for part in text.split(","):
            a, sep, b = part.strip().partition(":")
            if not sep:
                raise DomainError(f"bad rectangle axis {part!r}; expected lo:hi")
            try:
                lo.append(float(a))
                hi.append(float(b))
            except ValueError:
                raise DomainError(f"bad rectangle axis {part!r}") from None
        return cls(tuple(lo), tuple(hi))

    def format(self) -> str:
        return ",".join(f"{_fmt(a)}:{_fmt(b)}" for a, b in zip(self.lo, self.hi))


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


@dataclass(frozen=True)
class LocalizationReport:
    p_limit: float
    c_bound: float
    mode: str

    @property
    def interval(self) -> tuple[float, float]:
        return max(0.0, self.p_limit - self.c_bound), min(1.0, self.p_limit + self.c_bound)

    def contains(self, p: float, slack: float = 0.0) -> bool:
        lo, hi = self.interval
        return lo - slack <= p <= hi + slack

    def to_dict(self) -> dict:
        lo, hi = self.interval
        return {"p_limit": self.p_limit, "c_bound": self.c_bound, "interval": [lo, hi], "mode": self.mode}

    @classmethod
    def from_dict(cls, data: dict) -> "LocalizationReport":
        return cls(float(data["p_limit"]), float(data["c_bound"]), data["mode"])


def _axis_prob(r: float, s: float, nu: float) -> float:
    upper = 1.0 if s == math.inf else (0.0 if s == -math.inf else normal_cdf(s / nu))
    lower = 0.0 if r == -math.inf else (1.0 if r == math.inf else normal_cdf(r / nu))
    return max(0.0, upper - lower)


def limit_rect_prob(nu_sq: float, n_out: int, rect: Rect) -> float:
    """P(z in rect) for z ~ N(0, nu_sq * I_{n_out})."""
    if rect.dim != n_out:
        raise DomainError(f"rectangle dimension {rect.dim} != output dimension {n_out}")
    if not nu_sq > 0:
        raise DomainError("limiting variance must be positive")
    nu = math.sqrt(nu_sq)
    p = 1.0
    for r, s in zip(rect.lo, rect.hi):
        p *= _axis_prob(r, s, nu)
    return p


def certified_interval(act, arch: Architecture, x, rect: Rect, mode: str | None = None) -> LocalizationReport:
    """Limiting probability +- a certified distance bound, clipped to [0, 1].

    Default mode: the total-variation bound for shallow univariate networks,
    the convex-distance bound otherwise.
    """
    if mode is None:
        mode = "tv_shallow" if arch.L == 1 and arch.n_out == 1 else "convex_deep"
    if mode not in MODES:
        raise DomainError(f"unknown localization mode {mode!r}")
    stats = recursion.layer_stats(act, arch, x)
    p = limit_rect_prob(stats.nu_sq, arch.n_out, rect)
    if mode == "tv_shallow":
        c = bounds.shallow_bounds(act, arch, x)["total_variation"].value
    else:
        c = bounds.deep_convex_bound(act, arch, x).value
    return LocalizationReport(p, c, mode)
