"""Bound-dominance checks: every empirical probe must sit below its certified bound.

Each probe is a valid lower bound of the metric it is compared against (the
per-coordinate Kolmogorov statistic lower-bounds d_K <= d_c <= d_TV of the
vector; 1-D W1 of a coordinate lower-bounds the vector W1), so a violation
beyond Monte-Carlo error would falsify the bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import bounds, localize, recursion, simulate
from .activations import ActivationSpec, make_activation
from .errors import DeepBoundUnavailable, DomainError
from .recursion import Architecture

MC_SIGMAS = 3.0


@dataclass(frozen=True)
class Preset:
    act: ActivationSpec
    arch: Architecture
    x: tuple[float, ...]


def _relu_preset(hidden, n_out):
    return Preset(make_activation("relu"), Architecture(4, hidden, n_out, 1.0, 1.0), (0.0,) * 4)


PRESETS = {
    "shallow-relu": lambda: _relu_preset((100,), 1),
    "collective-relu": lambda: _relu_preset((50, 50), 1),
    "deep-relu": lambda: _relu_preset((50, 50, 50), 3),
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]()
    except KeyError:
        raise DomainError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def _check(name, empirical, bound, halfwidth):
    limit = bound + MC_SIGMAS * halfwidth
    return {
        "check": name,
        "empirical": empirical,
        "bound": bound,
        "mc_halfwidth": halfwidth,
        "limit": limit,
        "passed": bool(empirical <= limit),
    }


def run_validation(act, arch: Architecture, x, samples: int, seed: int,
                   workers: Optional[int] = None) -> dict:
    """Sample the network and compare every applicable empirical probe to its bound."""
    x = tuple(float(v) for v in np.ravel(x))
    stats = recursion.layer_stats(act, arch, x)
    nu_sq = stats.nu_sq
    batch, collectives = simulate.sample_network(act, arch, x, samples, seed, workers)

    report_bounds = {}
    checks = []
    shallow = arch.L == 1 and arch.n_out == 1
    if shallow:
        sb = bounds.shallow_bounds(act, arch, x)
        report_bounds.update({k: v.to_dict() for k, v in sb.items()})
        ks_bound = sb["kolmogorov"].effective
        w1_bound = sb["wasserstein1"].value
    else:
        ks_bound = w1_bound = None
    try:
        conv = bounds.deep_convex_bound(act, arch, x)
        w1 = bounds.deep_w1_bound(act, arch, x)
        report_bounds["deep_convex"] = conv.to_dict()
        report_bounds["deep_wasserstein1"] = w1.to_dict()
        if ks_bound is None:
            ks_bound = conv.effective
            w1_bound = w1.value
    except DeepBoundUnavailable:
        conv = None
        if ks_bound is None:
            raise

    estimates = {}
    variances = []
    for i in range(arch.n_out):
        col = batch.values[:, i]
        ks = simulate.empirical_ks(col, nu_sq)
        w = simulate.empirical_w1(col, nu_sq)
        estimates[f"ks_z{i + 1}"] = ks.to_dict()
        estimates[f"w1_z{i + 1}"] = w.to_dict()
        checks.append(_check(f"ks_z{i + 1}", ks.value, ks_bound, ks.mc_halfwidth))
        checks.append(_check(f"w1_z{i + 1}", w.value, w1_bound, w.mc_halfwidth))
        variances.append(float(np.var(col)))
    estimates["output_variance"] = variances

    if stats.p_l2 is not None:
        for ell in range(1, arch.L + 1):
            rms = simulate.collective_rms_error(collectives[ell - 1], stats.o_seq[ell - 1])
            cb = recursion.collective_sum(stats, arch.hidden, ell)
            estimates[f"collective_rms_l{ell}"] = rms.to_dict()
            checks.append(_check(f"collective_l{ell}", rms.value, cb, rms.mc_halfwidth))

    nu = math.sqrt(nu_sq)
    rect = localize.Rect((-nu,) * arch.n_out, (nu,) * arch.n_out)
    loc = localize.certified_interval(act, arch, x, rect)
    freq = simulate.empirical_rect_freq(batch, rect)
    lo, hi = loc.interval
    estimates["rect_freq"] = freq.to_dict()
    checks.append({
        "check": "localization",
        "empirical": freq.value,
        "interval": [lo, hi],
        "mc_halfwidth": freq.mc_halfwidth,
        "passed": bool(lo - freq.mc_halfwidth <= freq.value <= hi + freq.mc_halfwidth),
    })

    return {
        "activation": act.name,
        "architecture": arch.to_dict(),
        "input": list(x),
        "samples": samples,
        "seed": seed,
        "batch_fingerprint": batch.fingerprint,
        "nu_sq": nu_sq,
        "O_seq": list(stats.o_seq),
        "bounds": report_bounds,
        "localization": dict(loc.to_dict(), rect=rect.format()),
        "estimates": estimates,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
