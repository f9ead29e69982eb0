"""Monte-Carlo ground truth for random Gaussian networks.

Replicates are grouped in fixed-size blocks; block ``b`` draws from its own
Philox stream keyed by ``(seed, b)``. Block size depends only on the
architecture, so every replicate is reproducible under any worker count and
a run with more replicates extends (never reshuffles) a shorter one.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, ResourceLimitError
from .gaussmath import normal_cdf, normal_pdf, normal_ppf
from .recursion import Architecture, o_zero

DEFAULT_WORK_BUDGET = 5e10  # weight draws per call
DEFAULT_STORAGE_BUDGET = 1e8  # stored output scalars
_BLOCK_CAP = 4096
_BLOCK_SCALARS = 2_000_000

KS_QUANTILE_95 = 1.36
BATCH_MAGIC = b"GNNS"
BATCH_VERSION = 1


@dataclass(frozen=True)
class SampleBatch:
    values: np.ndarray  # (m, n_out)
    seed: int
    fingerprint: str

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def n_out(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class EmpiricalEstimate:
    statistic: str
    value: float
    mc_halfwidth: float
    m: int

    def to_dict(self) -> dict:
        return {"statistic": self.statistic, "value": self.value, "mc_halfwidth": self.mc_halfwidth, "m": self.m}


def fingerprint(act, arch: Architecture, x) -> str:
    payload = json.dumps(
        {"act": act.name, "arch": arch.to_dict(), "x": [float(v) for v in np.ravel(x)]},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def block_size(arch: Architecture) -> int:
    widths = arch.widths
    per_rep = sum(a * b for a, b in zip(widths[:-1], widths[1:])) + sum(widths[1:])
    return max(1, min(_BLOCK_CAP, _BLOCK_SCALARS // per_rep))


def resolve_workers(workers: Optional[int]) -> int:
    cap = os.environ.get("GNN_CERTIFY_THREADS")
    n = 1 if workers is None else int(workers)
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(block,))
    return np.random.Generator(np.random.Philox(ss))


def _forward_block(act, arch: Architecture, x: np.ndarray, rng, B: int, stop: int, method: str):
    """Propagate B replicates; returns (z at layer `stop`, collectives for 1..min(stop, L))."""
    widths = arch.widths
    h = np.broadcast_to(x, (B, x.size))
    collectives = []
    z = None
    for ell in range(1, stop + 1):
        n_in, n_here = widths[ell - 1], widths[ell]
        if method == "weights":
            W = rng.standard_normal((B, n_here, n_in))
            W *= math.sqrt(arch.C_W / n_in)
            b = rng.standard_normal((B, n_here)) * math.sqrt(arch.C_b)
            z = b + np.matmul(W, h[:, :, None])[:, :, 0]
        else:
            # given the previous layer, units are iid N(0, Cb + Cw/n_in * |h|^2)
            scale = np.sqrt(arch.C_b + arch.C_W * np.mean(h * h, axis=1))
            z = rng.standard_normal((B, n_here)) * scale[:, None]
        if ell <= arch.L:
            h = np.asarray(act(z), dtype=float)
            collectives.append(np.mean(h * h, axis=1))
    return z, collectives


def _run_blocks(act, arch, x, m, seed, workers, stop, method):
    if m < 1:
        raise DomainError("need at least one replicate")
    if method not in ("weights", "conditional"):
        raise DomainError(f"unknown sampling method {method!r}")
    x = np.asarray(x, dtype=float).ravel()
    o_zero(x, arch.n0)
    widths = arch.widths
    work = m * sum(a * b for a, b in zip(widths[:stop], widths[1 : stop + 1]))
    if work > DEFAULT_WORK_BUDGET:
        raise ResourceLimitError(f"requested {work:.3g} weight draws exceeds budget {DEFAULT_WORK_BUDGET:.3g}")
    B = block_size(arch)
    nblocks = -(-m // B)

    def job(b):
        return _forward_block(act, arch, x, _block_rng(seed, b), B, stop, method)

    nw = resolve_workers(workers)
    if nw == 1 or nblocks == 1:
        results = [job(b) for b in range(nblocks)]
    else:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            results = list(pool.map(job, range(nblocks)))
    return results


def sample_network(act, arch: Architecture, x, m: int, seed: int, workers: Optional[int] = None,
                   method: str = "weights") -> tuple[SampleBatch, list[np.ndarray]]:
    """One forward pass: output batch plus the collective draws of every hidden layer."""
    if m * arch.n_out > DEFAULT_STORAGE_BUDGET:
        raise ResourceLimitError("output storage exceeds budget")
    results = _run_blocks(act, arch, x, m, seed, workers, arch.L + 1, method)
    values = np.concatenate([z for z, _ in results], axis=0)[:m]
    collectives = [np.concatenate([c[ell] for _, c in results])[:m] for ell in range(arch.L)]
    return SampleBatch(np.ascontiguousarray(values), seed, fingerprint(act, arch, x)), collectives


def sample_outputs(act, arch: Architecture, x, m: int, seed: int, workers: Optional[int] = None,
                   method: str = "weights") -> SampleBatch:
    """m independent draws of the network output z^(L+1)(x), all parameters resampled each time."""
    return sample_network(act, arch, x, m, seed, workers, method)[0]


def sample_collective(act, arch: Architecture, x, ell: int, m: int, seed: int,
                      workers: Optional[int] = None, method: str = "weights") -> np.ndarray:
    """m draws of the width-averaged squared activation at hidden layer ``ell``.

    Shares streams with :func:`sample_outputs`: draw r is the collective of the
    same network that produced output row r.
    """
    if not 1 <= ell <= arch.L:
        raise DomainError(f"layer {ell} outside 1..{arch.L}")
    results = _run_blocks(act, arch, x, m, seed, workers, ell, method)
    return np.concatenate([c[ell - 1] for _, c in results])[:m]


# --- empirical statistics ---------------------------------------------------

def _check_samples(samples, nu_sq):
    s = np.sort(np.asarray(samples, dtype=float).ravel())
    if s.size < 1:
        raise DomainError("no samples")
    if not nu_sq > 0:
        raise DomainError("variance must be positive")
    return s, math.sqrt(nu_sq)


def ks_statistic(samples, nu_sq: float) -> float:
    s, nu = _check_samples(samples, nu_sq)
    m = s.size
    cdf = normal_cdf(s / nu)
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - cdf), np.max(cdf - (i - 1) / m)))


def empirical_ks(samples, nu_sq: float) -> EmpiricalEstimate:
    """sup_t |F_m(t) - Phi(t / nu)|."""
    m = np.size(samples)
    if m < 2:
        raise DomainError("need at least two samples")
    return EmpiricalEstimate("ks", ks_statistic(samples, nu_sq), KS_QUANTILE_95 / math.sqrt(m), m)


def _gauss_cdf_integral(t, nu):
    # d/dt [t Phi(t/nu) + nu phi(t/nu)] = Phi(t/nu)
    u = t / nu
    return t * normal_cdf(u) + nu * normal_pdf(u)


def w1_statistic(samples, nu_sq: float) -> float:
    """Exact integral of |F_m - Phi(./nu)| using closed-form Gaussian-CDF antiderivatives."""
    s, nu = _check_samples(samples, nu_sq)
    m = s.size
    G = lambda t: _gauss_cdf_integral(t, nu)  # noqa: E731
    # left tail: integral of Phi up to the first order statistic
    left = G(s[0])
    # right tail: integral of 1 - Phi beyond the last one
    right = nu * normal_pdf(s[-1] / nu) - s[-1] * normal_cdf(-s[-1] / nu)
    if m == 1:
        return float(left + right)
    a, b = s[:-1], s[1:]
    level = np.arange(1, m) / m
    cross = np.clip(nu * normal_ppf(level), a, b)
    Ga, Gb, Gc = G(a), G(b), G(cross)
    # Phi < level on [a, cross), Phi > level on (cross, b]
    inner = level * (cross - a) - (Gc - Ga) + (Gb - Gc) - level * (b - cross)
    inner = np.maximum(inner, 0.0)
    return float(left + right + math.fsum(inner))


def empirical_w1(samples, nu_sq: float, splits: int = 10) -> EmpiricalEstimate:
    samples = np.asarray(samples, dtype=float).ravel()
    m = samples.size
    if m < 2:
        raise DomainError("need at least two samples")
    value = w1_statistic(samples, nu_sq)
    if m >= 2 * splits:
        parts = np.array_split(samples, splits)
        sub = np.array([w1_statistic(p, nu_sq) for p in parts])
        # sub-sample spread scaled to the full sample size
        halfwidth = 1.96 * float(np.std(sub, ddof=1)) / math.sqrt(splits)
    else:
        halfwidth = float("inf")
    return EmpiricalEstimate("w1_1d", value, halfwidth, m)


def empirical_rect_freq(batch: SampleBatch, rect) -> EmpiricalEstimate:
    lo = np.asarray(rect.lo, dtype=float)
    hi = np.asarray(rect.hi, dtype=float)
    if lo.size != batch.n_out:
        raise DomainError(f"rectangle has dimension {lo.size}, outputs have {batch.n_out}")
    inside = np.all((batch.values >= lo) & (batch.values <= hi), axis=1)
    p = float(np.mean(inside))
    return EmpiricalEstimate("rect_freq", p, 1.96 * math.sqrt(p * (1.0 - p) / batch.m), batch.m)


def collective_rms_error(draws, target: float) -> EmpiricalEstimate:
    """sqrt(mean((draw - target)^2)) with a delta-method 95% half-width."""
    d = np.asarray(draws, dtype=float).ravel()
    m = d.size
    if m < 2:
        raise DomainError("need at least two draws")
    sq = (d - target) ** 2
    ms = float(np.mean(sq))
    rms = math.sqrt(ms)
    if rms == 0.0:
        hw = 0.0
    else:
        hw = 1.96 * float(np.std(sq, ddof=1)) / math.sqrt(m) / (2.0 * rms)
    return EmpiricalEstimate("collective_rms", rms, hw, m)


# --- batch export -------------------------------------------------------------

def write_batch_binary(batch: SampleBatch, path) -> None:
    """16-byte header (magic, version, m, n_out; u32 little-endian) then row-major f64 LE."""
    header = BATCH_MAGIC + struct.pack("<III", BATCH_VERSION, batch.m, batch.n_out)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(batch.values, dtype="<f8").tobytes())


def read_batch_binary(path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(16)
        if len(head) != 16 or head[:4] != BATCH_MAGIC:
            raise DomainError("not a sample batch file")
        version, m, n_out = struct.unpack("<III", head[4:])
        if version != BATCH_VERSION:
            raise DomainError(f"unsupported batch version {version}")
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != m * n_out:
        raise DomainError("truncated batch file")
    return data.reshape(m, n_out).astype(float)


def write_batch_csv(batch: SampleBatch, path) -> None:
    header = ",".join(f"z{i + 1}" for i in range(batch.n_out))
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in batch.values:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
