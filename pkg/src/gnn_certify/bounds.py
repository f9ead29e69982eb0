"""Certified distance bounds between network outputs and their Gaussian limit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from . import recursion
from .errors import DomainError
from .gaussmath import abs_moment, expect_sigma_power, variance_sigma_sq
from .recursion import Architecture

METRICS = ("kolmogorov", "total_variation", "wasserstein1", "convex")
PROVENANCES = ("shallow", "bff_comparison", "deep_convex", "deep_wasserstein1", "w1_conversion")

# metrics whose values never exceed 1
_BOUNDED = {"kolmogorov", "total_variation", "convex"}

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class BoundReport:
    metric: str
    value: float
    provenance: str
    constants: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.metric not in METRICS:
            raise DomainError(f"unknown metric {self.metric!r}")
        if self.provenance not in PROVENANCES:
            raise DomainError(f"unknown provenance {self.provenance!r}")
        if not self.value >= 0:
            raise DomainError("bound value must be nonnegative")

    @property
    def effective(self) -> float:
        """Value clipped at 1 for metrics that are themselves at most 1."""
        return min(1.0, self.value) if self.metric in _BOUNDED else self.value

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "value": self.value,
            "effective": self.effective,
            "provenance": self.provenance,
            "constants": dict(self.constants),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BoundReport":
        return cls(data["metric"], float(data["value"]), data["provenance"], dict(data.get("constants", {})))


def _require_shallow(arch: Architecture) -> None:
    if arch.L != 1 or arch.n_out != 1:
        raise DomainError("shallow bounds need L = 1 and a univariate output")


def shallow_bounds(act, arch: Architecture, x) -> dict[str, BoundReport]:
    """Kolmogorov, total-variation and 1-Wasserstein bounds for L = 1, n_out = 1.

    Only requires 0 < Var(s(kappa Z)^2) < inf with kappa^2 = Cb + Cw O(0); no
    regularity of the activation is needed.
    """
    _require_shallow(arch)
    o0 = recursion.o_zero(x, arch.n0)
    kappa_sq = arch.C_b + arch.C_W * o0
    kappa = math.sqrt(kappa_sq)
    var = variance_sigma_sq(act, kappa)
    o1 = expect_sigma_power(act, kappa, 2)
    denom = arch.C_b + arch.C_W * o1
    n1 = arch.hidden[0]
    base = arch.C_W * math.sqrt(var) / denom / math.sqrt(n1)
    w1 = math.sqrt(2.0 / math.pi) * arch.C_W * math.sqrt(var) / math.sqrt(denom) / math.sqrt(n1)
    constants = {
        "O0": o0,
        "kappa_sq": kappa_sq,
        "O1": o1,
        "var_sigma_sq": var,
        "sqrt_var": math.sqrt(var),
        "nu_sq": denom,
        "n1": n1,
    }
    return {
        "kolmogorov": BoundReport("kolmogorov", base, "shallow", constants),
        "total_variation": BoundReport("total_variation", 2.0 * base, "shallow", constants),
        "wasserstein1": BoundReport("wasserstein1", w1, "shallow", constants),
    }


def envelope_l4_sq(growth, a: float) -> float:
    """||r1 + r2 |Z sqrt(a)|^gamma||_4^2 by binomial expansion."""
    r1, r2, gamma = growth
    s = r2 * a ** (gamma / 2.0) if gamma else r2
    fourth = math.fsum(
        math.comb(4, j) * r1 ** (4 - j) * s**j * abs_moment(j * gamma) for j in range(5)
    )
    return math.sqrt(fourth)


def bff_bounds(act, arch: Architecture, x) -> dict[str, BoundReport]:
    """Comparison bounds for C^2 activations with a polynomial growth envelope."""
    _require_shallow(arch)
    if act.growth is None:
        raise DomainError(f"activation {act.name} has no growth envelope (needs s in C^2)")
    o0 = recursion.o_zero(x, arch.n0)
    a = arch.C_b + arch.C_W * o0
    o1 = expect_sigma_power(act, math.sqrt(a), 2)
    nu_sq = arch.C_b + arch.C_W * o1
    shape = math.sqrt(a + a * a * (2.0 + math.sqrt(3.0 * (1.0 + 2.0 * a + 3.0 * a * a))))
    l4 = envelope_l4_sq(act.growth, a)
    n1 = arch.hidden[0]
    core = shape * l4 / math.sqrt(n1)
    c = {
        "total_variation": 4.0 / nu_sq,
        "kolmogorov": 2.0 / nu_sq,
        "wasserstein1": math.sqrt(8.0 / math.pi) / math.sqrt(nu_sq),
    }
    constants = {
        "O0": o0,
        "a": a,
        "O1": o1,
        "nu_sq": nu_sq,
        "shape_factor": shape,
        "envelope_l4_sq": l4,
        "r1": act.growth[0],
        "r2": act.growth[1],
        "gamma": act.growth[2],
        "n1": n1,
    }
    return {
        m: BoundReport(m, cs * core, "bff_comparison", dict(constants, c_s=cs)) for m, cs in c.items()
    }


def _c_shape(C_W: float, inv: float, n_out: int) -> float:
    return C_W * (80.0 * inv**1.5 + 48.0 * inv + 20.0 * _SQRT2) * n_out ** (59.0 / 24.0)


def _deep_common(act, arch: Architecture, x):
    stats = recursion.layer_stats(act, arch, x)
    total = recursion.collective_sum(stats, arch.hidden)
    mult = 4.0 * _SQRT2 * stats.p_l2
    terms = [
        mult ** (arch.L - k) * stats.c_seq[k - 1] / math.sqrt(arch.hidden[k - 1]) for k in range(1, arch.L + 1)
    ]
    constants = {
        "O_seq": list(stats.o_seq),
        "c_seq": list(stats.c_seq),
        "p_l2": stats.p_l2,
        "p_route": stats.p_route,
        "multiplier": mult,
        "layer_terms": terms,
        "collective_sum": total,
        "nu_sq": stats.nu_sq,
        "O_L": stats.o_last,
        "n_out": arch.n_out,
    }
    return stats, total, constants


def deep_convex_bound(act, arch: Architecture, x) -> BoundReport:
    """Convex-distance bound C1 * (collective sum); C2/C3 variants in constants."""
    stats, total, constants = _deep_common(act, arch, x)
    C1 = _c_shape(arch.C_W, 1.0 / stats.nu_sq, arch.n_out)
    C2 = _c_shape(arch.C_W, 1.0 / arch.C_b, arch.n_out)
    cwo = arch.C_W * stats.o_last
    C3: Optional[float] = _c_shape(arch.C_W, 1.0 / cwo, arch.n_out) if cwo > 0 else None
    constants.update(
        C1=C1,
        C2=C2,
        C3=C3,
        bound_C2=C2 * total,
        bound_C3=None if C3 is None else C3 * total,
    )
    return BoundReport("convex", C1 * total, "deep_convex", constants)


def deep_w1_bound(act, arch: Architecture, x) -> BoundReport:
    """1-Wasserstein bound K1 * (collective sum); K2/K3 variants in constants."""
    stats, total, constants = _deep_common(act, arch, x)
    K1 = arch.n_out * arch.C_W / math.sqrt(stats.nu_sq)
    K2 = arch.n_out * arch.C_W / math.sqrt(arch.C_b)
    K3 = arch.n_out * math.sqrt(arch.C_W) / math.sqrt(stats.o_last) if stats.o_last > 0 else None
    constants.update(
        K1=K1,
        K2=K2,
        K3=K3,
        bound_K2=K2 * total,
        bound_K3=None if K3 is None else K3 * total,
    )
    return BoundReport("wasserstein1", K1 * total, "deep_wasserstein1", constants)


def gamma_bounds(d: int) -> tuple[float, float]:
    """Bracket on the Gaussian isoperimetric constant of convex sets in R^d."""
    if d < 1:
        raise DomainError("dimension must be >= 1")
    q = d**0.25
    return math.exp(-1.25) * q, (2.0 * math.pi) ** -0.25 * q


def convex_from_w1(w1_bound: float, d: int) -> float:
    """d_c <= 2 sqrt(2) Gamma^(1/2) sqrt(d_W1), Gamma at its upper bracket."""
    if w1_bound < 0:
        raise DomainError("w1_bound must be nonnegative")
    upper = gamma_bounds(d)[1]
    return 2.0 * _SQRT2 * math.sqrt(upper) * math.sqrt(w1_bound)


def convex_from_w1_report(w1: BoundReport, d: int) -> BoundReport:
    value = convex_from_w1(w1.value, d)
    return BoundReport(
        "convex",
        value,
        "w1_conversion",
        {"w1_bound": w1.value, "dimension": d, "gamma_upper": gamma_bounds(d)[1]},
    )
