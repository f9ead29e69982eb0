"""Parameter sweeps for the shallow and deep ReLU tables and the BFF comparison."""

from __future__ import annotations

import math

from . import bounds
from .activations import make_activation
from .errors import DomainError
from .recursion import Architecture

INPUTS = {
    "0,0,0,0": (0.0, 0.0, 0.0, 0.0),
    "0.1,0.1,0.1,0.1": (0.1, 0.1, 0.1, 0.1),
    "0.5,-0.5,0.5,-0.5": (0.5, -0.5, 0.5, -0.5),
    "10,10,10,10": (10.0, 10.0, 10.0, 10.0),
}
C_B_GRID = (1.0, 10.0)
C_W_GRID = (0.01, 0.1, 1.0)
SHALLOW_N = (1, 10, 100, 1000, 10**4, 10**5)
DEEP_N = (10**4, 10**5, 10**6, 10**7, 10**8, 10**9)
DEEP_L = 3

COLUMNS = ("table", "input", "C_b", "C_W", "n", "quantity", "value")

_NORMALIZATION_NOTE = (
    "shallow TV bound divided by sqrt(C_b + C_W * O0); empirical normalization "
    "observed to reproduce the printed grid, not a stated formula"
)


def _row(table, key, cb, cw, n, quantity, value):
    return {"table": table, "input": key, "C_b": cb, "C_W": cw, "n": n, "quantity": quantity, "value": value}


def shallow_tv_table(normalized: bool = False) -> list[dict]:
    relu = make_activation("relu")
    rows = []
    for key, x in INPUTS.items():
        for cb in C_B_GRID:
            for cw in C_W_GRID:
                for n in SHALLOW_N:
                    arch = Architecture(4, (n,), 1, cb, cw)
                    rep = bounds.shallow_bounds(relu, arch, x)["total_variation"]
                    val = rep.value
                    if normalized:
                        val /= math.sqrt(rep.constants["kappa_sq"])
                    rows.append(_row(2, key, cb, cw, n, "C_bound_tv", val))
    return rows


def deep_convex_table() -> list[dict]:
    relu = make_activation("relu")
    rows = []
    for key, x in INPUTS.items():
        for cb in C_B_GRID:
            for cw in C_W_GRID:
                for n in DEEP_N:
                    arch = Architecture(4, (n,) * DEEP_L, 1, cb, cw)
                    rows.append(_row(3, key, cb, cw, n, "C_bound_convex", bounds.deep_convex_bound(relu, arch, x).value))
    return rows


def c1_table() -> list[dict]:
    relu = make_activation("relu")
    rows = []
    for key, x in INPUTS.items():
        for cb in C_B_GRID:
            for cw in C_W_GRID:
                # C1 does not depend on the hidden widths
                arch = Architecture(4, (DEEP_N[0],) * DEEP_L, 1, cb, cw)
                rows.append(_row(4, key, cb, cw, "", "C1", bounds.deep_convex_bound(relu, arch, x).constants["C1"]))
    return rows


def comparison_table(act=None, C_b: float = 1.0, C_W: float = 1.0, x=(1.0,)) -> list[dict]:
    """Width-free constants (bound * sqrt(n1)) of the BFF and the shallow Stein bounds."""
    act = act or make_activation("monomial", k=3)
    arch = Architecture(len(x), (1,), 1, C_b, C_W)
    key = ",".join(repr(float(v)) for v in x)
    rows = []
    for label, reps in (("bff_comparison", bounds.bff_bounds(act, arch, x)), ("shallow", bounds.shallow_bounds(act, arch, x))):
        for metric in ("total_variation", "kolmogorov", "wasserstein1"):
            rows.append(_row(1, key, C_b, C_W, 1, f"{label}:{metric}", reps[metric].value))
    return rows


def reproduce_table(table_id: int, table2_normalized: bool = False) -> tuple[list[dict], dict]:
    """Rows plus a small metadata dict (notes on provenance / normalization)."""
    if table_id == 1:
        return comparison_table(), {
            "note": "computed from the stated formulas for sigma(x)=x^3, C_b=C_W=1, x=1; "
            "printed reference values are not reproduced by these formulas"
        }
    if table_id == 2:
        meta = {"normalized": table2_normalized}
        if table2_normalized:
            meta["note"] = _NORMALIZATION_NOTE
        return shallow_tv_table(table2_normalized), meta
    if table_id == 3:
        return deep_convex_table(), {}
    if table_id == 4:
        return c1_table(), {}
    raise DomainError(f"unknown table id {table_id}; expected 1..4")


def format_csv(rows: list[dict], decimals: int = 2) -> str:
    lines = [",".join(COLUMNS)]
    for r in rows:
        cells = []
        for col in COLUMNS:
            v = r[col]
            if col == "value":
                cells.append(f"{v:.{decimals}f}")
            elif col == "input":
                cells.append(f'"{v}"')
            elif isinstance(v, float):
                cells.append(f"{v:g}")
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def format_text(rows: list[dict], decimals: int = 2) -> str:
    """Grid layout: one block per input, C_b rows, (n, C_W) columns."""
    out = []
    for key in dict.fromkeys(r["input"] for r in rows):
        block = [r for r in rows if r["input"] == key]
        cols = list(dict.fromkeys((r["n"], r["C_W"], r["quantity"]) for r in block))
        out.append(f"x = ({key})")
        out.append("C_b \\ " + " ".join(f"{n}/{cw:g}" if n != "" else f"{cw:g}" for n, cw, _ in cols))
        for cb in dict.fromkeys(r["C_b"] for r in block):
            vals = {(r["n"], r["C_W"], r["quantity"]): r["value"] for r in block if r["C_b"] == cb}
            out.append(f"{cb:g} " + " ".join(f"{vals[c]:.{decimals}f}" for c in cols))
        out.append("")
    return "\n".join(out)
