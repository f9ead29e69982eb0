"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the summary lines.
"""

import json
import math
import time

import numpy as np
import pytest
from scipy import stats as sps
from scipy.special import factorial2

import golden_tables as golden
from gnn_certify import bounds, cli, gaussmath, tables, validate
from gnn_certify.activations import make_activation
from gnn_certify.recursion import Architecture


def report(n, ok, detail):
    print(f"\n{'PASS' if ok else 'FAIL'}  criterion {n:>2}: {detail}")
    assert ok, f"criterion {n}: {detail}"


def _index(rows):
    return {(r["input"], r["C_b"], r["C_W"], r["n"]): r["value"] for r in rows}


def _mismatches(computed, cells, tol):
    bad = []
    for key, cb, cw, n, printed in cells:
        value = round(computed[(key, cb, cw, n)], 2)
        if abs(value - printed) > tol(printed) + 1e-9:
            bad.append((key, cb, cw, n, printed, value))
    return bad


@pytest.fixture(scope="module")
def shallow_run():
    preset = validate.get_preset("shallow-relu")
    t0 = time.perf_counter()
    doc = validate.run_validation(preset.act, preset.arch, preset.x, 100_000, 42, workers=1)
    return doc, time.perf_counter() - t0


def _check(doc, name):
    return next(c for c in doc["checks"] if c["check"] == name)


class TestAcceptance:
    def test_c01_c1_table(self):
        t0 = time.perf_counter()
        rows = tables.c1_table()
        elapsed = time.perf_counter() - t0
        computed = {(r["input"], r["C_b"], r["C_W"]): r["value"] for r in rows}
        bad = [(k, cb, cw, p, round(computed[(k, cb, cw)], 2))
               for k, cb, cw, p in golden.c1_cells()
               if abs(round(computed[(k, cb, cw)], 2) - p) > 0.01 + 1e-9]
        ncells = len(list(golden.c1_cells()))
        report(1, not bad and ncells == 24 and elapsed < 1.0,
               f"C1 grid {ncells - len(bad)}/{ncells} cells within 0.01, {elapsed:.3f} s")

    def test_c02_deep_convex_table(self):
        t0 = time.perf_counter()
        computed = _index(tables.deep_convex_table())
        elapsed = time.perf_counter() - t0
        cells = list(golden.cells(golden.DEEP_CONVEX, golden.DEEP_N))
        bad = _mismatches(computed, cells, lambda p: max(0.02, 1e-3 * abs(p)))
        report(2, not bad and len(cells) == 144 and elapsed < 1.0,
               f"deep convex grid {len(cells) - len(bad)}/{len(cells)} cells, {elapsed:.3f} s")

    def test_c03_shallow_tv_table(self):
        cells = list(golden.cells(golden.SHALLOW_TV, golden.SHALLOW_N))
        row = [c for c in cells if c[0] == "0,0,0,0" and c[1] == 1.0]
        bad_row = _mismatches(_index(tables.shallow_tv_table(normalized=False)), row, lambda p: 0.01)
        bad_all = _mismatches(_index(tables.shallow_tv_table(normalized=True)), cells, lambda p: 0.01)
        report(3, not bad_row and not bad_all and len(row) == 18 and len(cells) == 144,
               f"as-stated row {len(row) - len(bad_row)}/18, "
               f"normalized grid {len(cells) - len(bad_all)}/{len(cells)}")

    def test_c04_oracle_equivalence(self):
        worst = 0.0
        for kind in ("relu", "perceptron"):
            act = make_activation(kind)
            for kappa in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
                for r in (2, 4):
                    quad = gaussmath.quadrature_sigma_power(act, kappa, r)
                    exact = act.moment_oracle(kappa, r)
                    worst = max(worst, abs(quad - exact) / abs(exact))
        worst_df = max(
            abs(gaussmath.abs_moment(p) - (factorial2(p - 1, exact=True) if p else 1)) /
            (factorial2(p - 1, exact=True) if p else 1)
            for p in range(0, 17, 2)
        )
        report(4, worst <= 1e-10 and worst_df <= 1e-12,
               f"quadrature vs oracle rel err {worst:.2e}, abs moments vs (p-1)!! {worst_df:.2e}")

    def test_c05_shallow_dominance(self, shallow_run):
        doc, elapsed = shallow_run
        ks, w1 = _check(doc, "ks_z1"), _check(doc, "w1_z1")
        # relu at x = 0: V = Var(relu(Z)^2) = 5/4, D = C_b + C_W / 2 = 3/2, n1 = 100
        dk = math.sqrt(1.25) / 1.5 / 10
        dw = math.sqrt(2 / math.pi) * math.sqrt(1.25) / math.sqrt(1.5) / 10
        ok = (
            ks["passed"] and w1["passed"] and elapsed < 15.0
            and abs(ks["bound"] - dk) < 1e-12 and abs(w1["bound"] - dw) < 1e-12
            and abs(ks["bound"] - 0.074536) < 1e-6 and abs(w1["bound"] - 0.072838) < 5e-6
        )
        report(5, ok, f"KS {ks['empirical']:.4f} <= {ks['limit']:.4f}, "
                      f"W1 {w1['empirical']:.4f} <= {w1['limit']:.4f}, {elapsed:.1f} s")

    def test_c06_collective_dominance(self):
        preset = validate.get_preset("collective-relu")
        t0 = time.perf_counter()
        doc = validate.run_validation(preset.act, preset.arch, preset.x, 10_000, 42, workers=1)
        elapsed = time.perf_counter() - t0
        l2 = _check(doc, "collective_l2")
        rms1 = doc["estimates"]["collective_rms_l1"]["value"]
        # layer-1 draws average 50 iid relu(Z)^2 with Z ~ N(0, 1):
        # Var = (E relu^4 - (E relu^2)^2) / 50 = (3/2 - 1/4) / 50
        exact = math.sqrt((1.5 - 0.25) / 50)
        ok = l2["passed"] and abs(rms1 / exact - 1) < 0.05 and elapsed < 30.0
        report(6, ok, f"l2 RMS {l2['empirical']:.4f} <= {l2['limit']:.4f}, "
                      f"l1 RMS {rms1:.4f} vs {exact:.4f}, {elapsed:.1f} s")

    def test_c07_deep_sanity(self):
        preset = validate.get_preset("deep-relu")
        doc = validate.run_validation(preset.act, preset.arch, preset.x, 50_000, 42, workers=4)
        # ReLU second moment is half the pre-activation variance: O_l = (1 + O_{l-1}) / 2
        o = 0.0
        for _ in range(3):
            o = (1.0 + o) / 2
        nu_sq = 1.0 + o
        ks = [doc["estimates"][f"ks_z{i}"]["value"] for i in (1, 2, 3)]
        conv = doc["bounds"]["deep_convex"]["effective"]
        var = doc["estimates"]["output_variance"]
        ok = (
            abs(doc["nu_sq"] - nu_sq) < 1e-12
            and all(k <= min(0.05, conv) for k in ks)
            and all(abs(v / nu_sq - 1) < 0.03 for v in var)
        )
        report(7, ok, f"KS {max(ks):.4f} <= 0.05, variances "
                      + ", ".join(f"{v:.3f}" for v in var) + f" vs {nu_sq}")

    def test_c08_structural_invariants(self):
        rng = np.random.default_rng(2024)
        acts = [make_activation(k) for k in ("relu", "sigmoid", "tanh", "sine", "softplus", "swish")]
        x = (0.3, -0.2)
        ratio_ok = order_ok = mono_ok = True
        for _ in range(200):
            act = acts[rng.integers(len(acts))]
            L = int(rng.integers(1, 5))
            hidden = tuple(int(v) for v in rng.integers(10, 10**6, size=L))
            arch = Architecture(2, hidden, int(rng.integers(1, 4)),
                                float(rng.uniform(0.1, 10)), float(rng.uniform(0.01, 3)))
            conv = bounds.deep_convex_bound(act, arch, x)
            w1 = bounds.deep_w1_bound(act, arch, x)
            c = conv.constants
            k = w1.constants
            order_ok &= c["C1"] <= c["C2"] * (1 + 1e-12)
            order_ok &= c["C3"] is None or c["C1"] <= c["C3"] * (1 + 1e-12)
            order_ok &= k["K1"] <= k["K2"] * (1 + 1e-12)
            order_ok &= k["K3"] is None or k["K1"] <= k["K3"] * (1 + 1e-12)
            j = int(rng.integers(L))
            wider = arch.with_hidden(hidden[:j] + (hidden[j] * 2,) + hidden[j + 1:])
            mono_ok &= bounds.deep_convex_bound(act, wider, x).value < conv.value
            mono_ok &= bounds.deep_w1_bound(act, wider, x).value < w1.value
            if L == 1:
                sb = bounds.shallow_bounds(act, Architecture(2, hidden, 1, arch.C_b, arch.C_W), x)
                ratio_ok &= sb["total_variation"].value == 2 * sb["kolmogorov"].value
        gamma_ok = all(lo < hi for lo, hi in (bounds.gamma_bounds(d) for d in range(1, 101)))
        gamma_ok &= all(
            bounds.gamma_bounds(d)[1] < bounds.gamma_bounds(d + 1)[1] for d in range(1, 100)
        )
        report(8, ratio_ok and order_ok and mono_ok and gamma_ok,
               f"TV=2K {ratio_ok}, C1/K1 minimal {order_ok}, width-monotone {mono_ok}, "
               f"Gamma bracket {gamma_ok}")

    def test_c09_localization(self, shallow_run):
        doc, _ = shallow_run
        loc = _check(doc, "localization")
        p_limit = doc["localization"]["p_limit"]
        exact = sps.norm.cdf(1) - sps.norm.cdf(-1)
        lo, hi = loc["interval"]
        ok = lo <= loc["empirical"] <= hi and abs(p_limit - 0.682689) < 1e-6 and abs(p_limit - exact) < 1e-12
        report(9, ok, f"freq {loc['empirical']:.4f} in [{lo:.4f}, {hi:.4f}], p_limit {p_limit:.6f}")

    def test_c10_determinism(self, tmp_path):
        outs = []
        for run, workers in enumerate((1, 8, 1, 8)):
            path = tmp_path / f"v{run}.json"
            code = cli.main(["validate", "--preset", "deep-relu", "--samples", "20000",
                             "--seed", "7", "--workers", str(workers), "--output", str(path)])
            assert code == 0
            outs.append(path.read_bytes())
        identical = all(o == outs[0] for o in outs)
        json.loads(outs[0])
        report(10, identical, f"{len(outs)} validate reports (workers 1, 8, 1, 8) byte-identical: {identical}")
