"""Activation catalog with the metadata the certified bounds consume.

Each activation carries whatever regularity data is known about it: a
Lipschitz constant for sigma, one for sigma**2, and a growth envelope
``max(|s|, |s'|, |s''|) <= r1 + r2 |x|**gamma``. From these the module builds
the nonnegative polynomial ``P`` with

    |s(x sqrt(Cb + Cw a2))**2 - s(x sqrt(Cb + Cw a1))**2| <= P(|x|) |a2 - a1|

for all real x and a1, a2 >= 0, which drives the deep-network bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import special

from .errors import DeepBoundUnavailable, DomainError
from .gaussmath import abs_moment

KINDS = (
    "relu",
    "perceptron",
    "sigmoid",
    "tanh",
    "sine",
    "softplus",
    "swish",
    "sqrt_relu",
    "monomial",
    "constant",
    "custom",
)

# sup |swish'| = 1.0998..., rounded up so the constant stays an upper bound
SWISH_LIP = 1.1


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with nonnegative coefficients ``coeffs[j]`` of ``x**j``."""

    coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if any(c < 0 or not math.isfinite(c) for c in coeffs):
            raise DomainError(f"polynomial coefficients must be finite and >= 0: {coeffs}")
        while coeffs and coeffs[-1] == 0.0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else 0

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c in reversed(self.coeffs):
            out = out * x + c
        return out if out.ndim else float(out)

    def l2_norm_abs_gaussian(self) -> float:
        """||P(|Z|)||_2 from the absolute moments of Z."""
        total = math.fsum(
            dj * dk * abs_moment(j + k)
            for j, dj in enumerate(self.coeffs)
            for k, dk in enumerate(self.coeffs)
        )
        return math.sqrt(total)


@dataclass(frozen=True)
class ActivationSpec:
    kind: str
    fn: Callable = field(compare=False, repr=False)
    lip: Optional[float] = None
    lip_sq: Optional[float] = None
    growth: Optional[tuple[float, float, float]] = None
    sigma_at_zero: float = 0.0
    moment_oracle: Optional[Callable] = field(default=None, compare=False, repr=False)
    params: tuple = ()

    def __post_init__(self):
        for name in ("lip", "lip_sq"):
            val = getattr(self, name)
            if val is not None and (val < 0 or not math.isfinite(val)):
                raise DomainError(f"{name} must be finite and >= 0")
        if self.growth is not None:
            if len(self.growth) != 3 or any(g < 0 for g in self.growth):
                raise DomainError("growth must be a triple (r1, r2, gamma) of values >= 0")
            object.__setattr__(self, "growth", tuple(float(g) for g in self.growth))

    def __call__(self, x):
        return self.fn(x)

    @property
    def name(self) -> str:
        if not self.params:
            return self.kind
        return self.kind + ":" + ",".join(f"{k}={v}" for k, v in self.params)

    @property
    def supports_deep(self) -> bool:
        return bool(_routes(self, 1.0, 1.0))

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "params": dict(self.params),
            "lip": self.lip,
            "lip_sq": self.lip_sq,
            "growth": list(self.growth) if self.growth else None,
            "sigma_at_zero": self.sigma_at_zero,
        }


# --- elementary functions ---------------------------------------------------

def _relu(x):
    return np.maximum(np.asarray(x, dtype=float), 0.0)


def _perceptron(x):
    return (np.asarray(x, dtype=float) >= 0).astype(float)


def _sigmoid(x):
    return special.expit(np.asarray(x, dtype=float))


def _tanh(x):
    return np.tanh(np.asarray(x, dtype=float))


def _sine(x):
    return np.sin(np.asarray(x, dtype=float))


def _softplus(x):
    return np.logaddexp(0.0, np.asarray(x, dtype=float))


def _swish(x):
    x = np.asarray(x, dtype=float)
    return x * special.expit(x)


def _sqrt_relu(x):
    return np.sqrt(np.maximum(np.asarray(x, dtype=float), 0.0))


_BASE_FUNCTIONS = {
    "relu": _relu,
    "perceptron": _perceptron,
    "sigmoid": _sigmoid,
    "tanh": _tanh,
    "sine": _sine,
    "softplus": _softplus,
    "swish": _swish,
    "sqrt_relu": _sqrt_relu,
}


# --- closed-form moments E[s(kappa Z)**r] ----------------------------------

def _relu_moment(kappa, r):
    return kappa**r * abs_moment(r) / 2.0


def _perceptron_moment(kappa, r):
    return 0.5


def _sqrt_relu_moment(kappa, r):
    return kappa ** (r / 2) * abs_moment(r / 2) / 2.0


def _sine_moment(kappa, r):
    k2 = kappa * kappa
    if r == 1:
        return 0.0
    if r == 2:
        return -0.5 * math.expm1(-2.0 * k2)
    if r == 4:
        return 0.375 - 0.5 * math.exp(-2.0 * k2) + 0.125 * math.exp(-8.0 * k2)
    return None


def _monomial_oracle(k):
    def oracle(kappa, r):
        p = k * r
        if p % 2:
            return 0.0
        return kappa**p * abs_moment(p)

    return oracle


def _constant_oracle(c):
    return lambda kappa, r: c**r


def _monomial_r1(k: int) -> float:
    """Smallest-ish r1 with |d^j x^k / dx^j| <= r1 + |x|^k for j = 0, 1, 2.

    sup_t>=0 (a t^p - t^k) is attained at t = (a p / k)^(1/(k-p)). The result is
    never below k!, which reproduces the published (6, 1, 3) envelope for x^3.
    """
    r1 = float(math.factorial(k))
    for j in (1, 2):
        if j > k:
            continue
        a = math.factorial(k) / math.factorial(k - j)
        p = k - j
        if p == 0:
            sup = a
        else:
            t = (a * p / k) ** (1.0 / (k - p))
            sup = a * t**p - t**k
        r1 = max(r1, sup * (1.0 + 1e-12))
    return r1


_CATALOG = {
    # kind: (lip, lip_sq, growth, oracle)
    "relu": (1.0, None, None, _relu_moment),
    "perceptron": (None, None, None, _perceptron_moment),
    "sigmoid": (0.25, 8.0 / 27.0, (1.0, 0.0, 0.0), None),
    "tanh": (1.0, 4.0 / (3.0 * math.sqrt(3.0)), (1.0, 0.0, 0.0), None),
    "sine": (1.0, 1.0, (1.0, 0.0, 0.0), _sine_moment),
    "softplus": (1.0, None, (math.log(2.0), 1.0, 1.0), None),
    "swish": (SWISH_LIP, None, (SWISH_LIP, 1.0, 1.0), None),
    "sqrt_relu": (None, 1.0, None, _sqrt_relu_moment),
}


def make_activation(kind: str, **params) -> ActivationSpec:
    """Build a catalog activation.

    ``monomial`` needs ``k``; ``constant`` needs ``value``; ``custom`` needs
    ``base`` (a catalog name) plus any of ``lip``, ``lip_sq``, ``growth``.
    """
    kind = kind.lower()
    if kind in _CATALOG:
        if params:
            raise DomainError(f"activation {kind!r} takes no parameters")
        lip, lip_sq, growth, oracle = _CATALOG[kind]
        fn = _BASE_FUNCTIONS[kind]
        return ActivationSpec(
            kind=kind,
            fn=fn,
            lip=lip,
            lip_sq=lip_sq,
            growth=growth,
            sigma_at_zero=abs(float(fn(0.0))),
            moment_oracle=oracle,
        )
    if kind == "monomial":
        k = params.pop("k", None)
        if params:
            raise DomainError(f"unexpected monomial parameters: {sorted(params)}")
        if k is None or int(k) != k or k < 1:
            raise DomainError("monomial needs an integer k >= 1")
        k = int(k)
        return ActivationSpec(
            kind="monomial",
            fn=lambda x, _k=k: np.power(np.asarray(x, dtype=float), _k),
            lip=1.0 if k == 1 else None,
            growth=(_monomial_r1(k), 1.0, float(k)),
            sigma_at_zero=0.0,
            moment_oracle=_monomial_oracle(k),
            params=(("k", k),),
        )
    if kind == "constant":
        value = float(params.pop("value", 0.0))
        if params:
            raise DomainError(f"unexpected constant parameters: {sorted(params)}")
        return ActivationSpec(
            kind="constant",
            fn=lambda x, _c=value: np.full_like(np.asarray(x, dtype=float), _c),
            lip=0.0,
            lip_sq=0.0,
            growth=(abs(value), 0.0, 0.0),
            sigma_at_zero=abs(value),
            moment_oracle=_constant_oracle(value),
            params=(("value", value),),
        )
    if kind == "custom":
        base = params.pop("base", None)
        if base not in _BASE_FUNCTIONS:
            raise DomainError(f"custom activation needs base in {sorted(_BASE_FUNCTIONS)}")
        lip = params.pop("lip", None)
        lip_sq = params.pop("lip_sq", None)
        growth = params.pop("growth", None)
        if params:
            raise DomainError(f"unexpected custom parameters: {sorted(params)}")
        for v in (lip, lip_sq):
            if v is not None and v < 0:
                raise DomainError("negative regularity constant")
        if growth is not None:
            growth = tuple(float(g) for g in growth)
        fn = _BASE_FUNCTIONS[base]
        extra = tuple(
            (k, v) for k, v in (("lip", lip), ("lip_sq", lip_sq), ("growth", growth)) if v is not None
        )
        return ActivationSpec(
            kind="custom",
            fn=fn,
            lip=None if lip is None else float(lip),
            lip_sq=None if lip_sq is None else float(lip_sq),
            growth=growth,
            sigma_at_zero=abs(float(fn(0.0))),
            moment_oracle=_CATALOG[base][3],
            params=(("base", base),) + extra,
        )
    raise DomainError(f"unknown activation kind {kind!r}; expected one of {KINDS}")


def parse_activation(text: str) -> ActivationSpec:
    """Parse CLI names: ``relu``, ``monomial:3``, ``constant:0.5``."""
    name, _, arg = text.partition(":")
    name = name.strip().lower()
    if name == "monomial":
        try:
            return make_activation("monomial", k=int(arg))
        except ValueError:
            raise DomainError(f"bad monomial degree in {text!r}") from None
    if name == "constant":
        try:
            return make_activation("constant", value=float(arg or 0.0))
        except ValueError:
            raise DomainError(f"bad constant value in {text!r}") from None
    if arg:
        raise DomainError(f"activation {name!r} takes no argument")
    return make_activation(name)


def evaluate(act: ActivationSpec, x):
    out = act(x)
    return float(out) if np.ndim(out) == 0 else out


# --- the P polynomial -------------------------------------------------------

def _routes(act: ActivationSpec, C_b: float, C_W: float) -> list[tuple[str, Polynomial]]:
    routes = []
    if act.kind == "perceptron" or (act.kind == "custom" and dict(act.params).get("base") == "perceptron"):
        routes.append(("perceptron", Polynomial(())))
    if act.lip is not None:
        lin = act.sigma_at_zero * C_W * act.lip / math.sqrt(C_b)
        routes.append(("lipschitz", Polynomial((0.0, lin, C_W * act.lip**2))))
    if act.lip_sq is not None:
        routes.append(("lipschitz_square", Polynomial((0.0, act.lip_sq * C_W / (2.0 * math.sqrt(C_b))))))
    if act.growth is not None and act.growth[2] == 0.0:
        # bounded sigma and sigma': |(s^2)'(y)| <= 2 r1^2
        r1 = act.growth[0]
        routes.append(("growth", Polynomial((0.0, C_W * r1 * r1 / math.sqrt(C_b)))))
    return routes


def _route_norm(act: ActivationSpec, route: str, poly: Polynomial, C_W: float) -> float:
    if route == "lipschitz" and act.kind == "relu":
        # P may be taken as C_W x^2 1{x>=0}, whose norm is C_W sqrt(E Z^4 1{Z>=0})
        return C_W * math.sqrt(1.5)
    return poly.l2_norm_abs_gaussian()


def _check_constants(C_b: float, C_W: float) -> None:
    if not (C_b > 0 and C_W > 0):
        raise DomainError("C_b and C_W must be positive")


def select_route(act: ActivationSpec, C_b: float, C_W: float) -> tuple[str, Polynomial, float]:
    """The admissible route with the smallest ||P(|Z|)||_2."""
    _check_constants(C_b, C_W)
    routes = _routes(act, C_b, C_W)
    if not routes:
        raise DeepBoundUnavailable(f"deep bounds unavailable for this activation ({act.name})")
    scored = [(_route_norm(act, name, poly, C_W), i, name, poly) for i, (name, poly) in enumerate(routes)]
    norm, _, name, poly = min(scored)
    return name, poly, norm


def p_polynomial(act: ActivationSpec, C_b: float, C_W: float) -> Polynomial:
    return select_route(act, C_b, C_W)[1]


def p_l2_norm(act: ActivationSpec, C_b: float, C_W: float) -> float:
    return select_route(act, C_b, C_W)[2]
