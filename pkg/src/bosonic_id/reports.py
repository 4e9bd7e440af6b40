"""Artifact emission: run manifests, delimited tables, JSON reports and the
figures rendered next to them.

Every writer is deterministic for identical inputs (floats via repr, dicts in
insertion order, figures with pinned metadata) and atomic (temp file in the
target directory, then rename).
"""

import json
import math
import os
import tempfile
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

TOOL_NAME = "bosonic-id"
TOOL_VERSION = "0.1.0"


def run_manifest(subcommand: str, parameters: dict, seed=None, outputs=()) -> dict:
    return {
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "subcommand": subcommand,
        "seed": seed,
        "parameters": parameters,
        "outputs": list(outputs),
    }


def _sanitize(obj):
    """Make a payload strict-JSON safe: NaN -> None, infinities -> strings."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if hasattr(obj, "item") and callable(obj.item) and getattr(obj, "ndim", None) == 0:
        return _sanitize(obj.item())
    return obj


def atomic_write_text(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_bytes(path, blob: bytes):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, payload: dict):
    text = json.dumps(_sanitize(payload), indent=2, allow_nan=False)
    atomic_write_text(path, text + "\n")


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_rate_region_csv(path, manifest: dict, blocks):
    """``blocks`` is a list of (energy, [RateRegionPoint, ...]) curves."""
    lines = ["# manifest: " + json.dumps(_sanitize(manifest)),
             "# units: bits per channel use"]
    for energy, points in blocks:
        lines.append(f"# block E={_fmt(float(energy))}")
        lines.append("tau1,R1,R2")
        for p in points:
            lines.append(",".join(_fmt(v) for v in (p.tau1, p.R1, p.R2)))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_convergence_csv(path, manifest: dict, rows, summary: dict):
    lines = ["# manifest: " + json.dumps(_sanitize(manifest)),
             "# units: bits per channel use",
             "# target_bits=" + _fmt(float(summary["target_bits"]))]
    lines.append("x,chi_bits,epsilon_bits")
    for row in rows:
        lines.append(",".join(_fmt(v) for v in
                              (row["size"], row["chi_bits"], row["epsilon_bits"])))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _save_figure(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp.png")
    os.close(fd)
    try:
        # pinned metadata keeps identical runs byte-identical
        fig.savefig(tmp, format="png", dpi=150, metadata={"Software": None})
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    finally:
        plt.close(fig)


def render_rate_region_png(path, blocks):
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    for energy, points in blocks:
        r1 = [p.R1 for p in points]
        r2 = [p.R2 for p in points]
        ax.plot(r1, r2, label=f"E = {energy:g}")
        ax.fill(r1 + [0.0], r2 + [0.0], alpha=0.2)
    ax.set_xlabel("R1 [bits per channel use]")
    ax.set_ylabel("R2 [bits per channel use]")
    ax.set_title("Identification rate region")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save_figure(fig, path)


def render_convergence_png(path, rows, target_bits: float):
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    sizes = [r["size"] for r in rows]
    eps = [r["epsilon_bits"] for r in rows]
    ax.loglog(sizes, eps, marker="o")
    ax.set_xlabel("constellation size")
    ax.set_ylabel("|chi - target| [bits]")
    ax.set_title(f"Holevo convergence (target {target_bits:.4f} bits)")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    _save_figure(fig, path)
