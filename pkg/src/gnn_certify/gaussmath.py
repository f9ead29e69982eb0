"""Gaussian special functions and one-dimensional Gaussian expectations.

Every expectation the bounds need has the form E[f(kappa * Z)] with Z standard
normal. Activations carrying a closed-form moment oracle are evaluated
exactly; everything else goes through a split Gauss-Legendre rule on the
truncated standardized line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import DegenerateVarianceError, DomainError, QuadratureError

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class QuadratureScheme:
    node_count: int = 200
    split_at_zero: bool = True
    truncation_radius: float = 12.0
    max_nodes: int = 3200
    rtol: float = 1e-12

    def __post_init__(self):
        if self.node_count < 8:
            raise DomainError("node_count must be >= 8")
        if self.truncation_radius < 10:
            raise DomainError("truncation_radius must be >= 10")
        if self.max_nodes < self.node_count:
            raise DomainError("max_nodes must be >= node_count")


DEFAULT_SCHEME = QuadratureScheme()
_default_scheme = DEFAULT_SCHEME


def configure(node_count: int | None = None) -> QuadratureScheme:
    """Replace the process-wide default scheme (used by the CLI ``--quad-nodes``)."""
    global _default_scheme
    if node_count is None:
        _default_scheme = DEFAULT_SCHEME
    else:
        _default_scheme = QuadratureScheme(
            node_count=node_count, max_nodes=max(node_count, DEFAULT_SCHEME.max_nodes)
        )
    return _default_scheme


def default_scheme() -> QuadratureScheme:
    return _default_scheme


def abs_moment(p: float) -> float:
    """E|Z|^p = 2^(p/2) Gamma((p+1)/2) / sqrt(pi) for real p >= 0."""
    if p < 0:
        raise DomainError(f"abs_moment needs p >= 0, got {p}")
    if p == 0:
        return 1.0
    log_val = 0.5 * p * math.log(2.0) + math.lgamma(0.5 * (p + 1.0)) - 0.5 * math.log(math.pi)
    return math.exp(log_val)


def normal_cdf(x):
    """Standard normal CDF; scalar in, scalar out, arrays broadcast."""
    out = special.ndtr(x)
    if np.ndim(out) == 0:
        return float(out)
    return out


def normal_pdf(x):
    out = np.exp(-0.5 * np.square(x)) / _SQRT_2PI
    if np.ndim(out) == 0:
        return float(out)
    return out


def normal_ppf(q):
    out = special.ndtri(q)
    if np.ndim(out) == 0:
        return float(out)
    return out


@lru_cache(maxsize=32)
def _legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _rule(n: int, scheme: QuadratureScheme) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights in z with the Gaussian density folded into the weights."""
    t, w = _legendre(n)
    R = scheme.truncation_radius
    if scheme.split_at_zero:
        half = 0.5 * R
        z = np.concatenate([half * (t - 1.0), half * (t + 1.0)])
        wz = np.concatenate([w, w]) * half
    else:
        z = R * t
        wz = w * R
    return z, wz * normal_pdf(z)


def gaussian_expectation(fn, scheme: QuadratureScheme | None = None) -> float:
    """E[fn(Z)] by node doubling until the change drops below rtol * E|fn(Z)|."""
    scheme = scheme or _default_scheme
    n = scheme.node_count
    z, w = _rule(n, scheme)
    prev = float(np.dot(w, fn(z)))
    if n * 2 > scheme.max_nodes:
        # no refinement budget: the caller asked for a fixed rule
        return prev
    while n * 2 <= scheme.max_nodes:
        n *= 2
        z, w = _rule(n, scheme)
        f = fn(z)
        cur = float(np.dot(w, f))
        if not math.isfinite(cur):
            break
        # scale by E|fn| so integrands with a vanishing mean still converge
        scale = max(abs(cur), float(np.dot(w, np.abs(f))))
        if abs(cur - prev) <= scheme.rtol * scale or cur == prev:
            return cur
        prev = cur
    raise QuadratureError(
        f"quadrature did not converge within {scheme.max_nodes} nodes "
        "(activation growth unsupported)"
    )


def quadrature_sigma_power(act, kappa: float, r: int, scheme: QuadratureScheme | None = None) -> float:
    """E[sigma(kappa Z)^r] by quadrature only, bypassing any oracle."""
    if kappa < 0:
        raise DomainError("kappa must be nonnegative")
    if kappa == 0:
        return float(act(0.0)) ** r
    return gaussian_expectation(lambda z: np.power(act(kappa * z), r), scheme)


def expect_sigma_power(act, kappa: float, r: int, scheme: QuadratureScheme | None = None) -> float:
    if r not in (1, 2, 4):
        raise DomainError(f"r must be one of 1, 2, 4; got {r}")
    if kappa < 0:
        raise DomainError("kappa must be nonnegative")
    if kappa == 0:
        return float(act(0.0)) ** r
    oracle = getattr(act, "moment_oracle", None)
    if oracle is not None:
        val = oracle(kappa, r)
        if val is not None:
            return float(val)
    return quadrature_sigma_power(act, kappa, r, scheme)


def variance_sigma_sq(act, kappa: float, scheme: QuadratureScheme | None = None) -> float:
    """Var(sigma(kappa Z)^2); raises if it vanishes (shallow bound needs it > 0)."""
    m4 = expect_sigma_power(act, kappa, 4, scheme)
    m2 = expect_sigma_power(act, kappa, 2, scheme)
    var = m4 - m2 * m2
    if not math.isfinite(m4):
        raise DomainError("fourth moment of the activation is infinite")
    if var <= 1e-14 * m4 or m4 == 0.0:
        raise DegenerateVarianceError("shallow bound inapplicable: Var(sigma(kappa Z)^2) = 0")
    return var
