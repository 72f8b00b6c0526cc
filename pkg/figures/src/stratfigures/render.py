"""Render publication-style figures from stratmodes CSV outputs.

The renderer is a strict consumer: it never recomputes any physics and
reads only the comma-separated files written by the stratmodes CLI.
Four figure kinds are supported:

    mode-scatter   complex-plane scatter of mode frequencies, one marker
                   style per input file, optional pole markers
    spectrum       reflectance/transmittance versus frequency
    census         mode count versus disk radius around a reference point
    constancy      |L(z)| versus |z| on log-log axes

Images are deterministic for fixed inputs: a fixed style is applied, no
timestamps are embedded, and inputs are drawn in the order given.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

EXPECTED_COLUMNS = {
    "mode-scatter": ["re_omega", "im_omega", "multiplicity", "method",
                     "residual"],
    "spectrum": ["omega", "R", "T", "is_peak", "fwhm"],
    "census": ["radius", "count"],
    "constancy": ["abs_z", "abs_L"],
}

MARKERS = ["o", "*", "s", "^", "D", "v"]

STYLE = {
    "figure.figsize": (6.0, 4.5),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


class SchemaMismatch(Exception):
    """Input CSV header does not match the figure kind's schema."""


@dataclass
class FigureSpec:
    """Declarative description of one figure."""

    kind: str
    inputs: Sequence[str]
    output: str
    labels: Sequence[str] = ()
    poles: Sequence[Sequence[float]] = ()
    xlim: Optional[Sequence[float]] = None
    ylim: Optional[Sequence[float]] = None
    title: str = ""

    def __post_init__(self):
        if self.kind not in EXPECTED_COLUMNS:
            raise ValueError(
                f"unknown figure kind {self.kind!r}; expected one of "
                f"{sorted(EXPECTED_COLUMNS)}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")
        if self.labels and len(self.labels) != len(self.inputs):
            raise ValueError("labels must match inputs one to one")

    @classmethod
    def from_json(cls, path: str) -> "FigureSpec":
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
        return cls(
            kind=cfg["kind"],
            inputs=cfg["inputs"],
            output=cfg["output"],
            labels=cfg.get("labels", ()),
            poles=cfg.get("poles", ()),
            xlim=cfg.get("xlim"),
            ylim=cfg.get("ylim"),
            title=cfg.get("title", ""),
        )


def read_table(path: str, kind: str) -> dict:
    """Parse one CLI CSV, enforcing the expected header row.

    Comment lines (leading '#') carry provenance and are skipped.  The
    columns are returned as float arrays keyed by name; non-numeric
    cells (the method column, empty FWHM entries) become NaN.
    """
    expected = EXPECTED_COLUMNS[kind]
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if not ln.startswith("#")]
    if not lines:
        raise SchemaMismatch(f"{path}: no header row found")
    header = lines[0].split(",")
    if header != expected:
        missing = [c for c in expected if c not in header]
        extra = [c for c in header if c not in expected]
        raise SchemaMismatch(
            f"{path}: header mismatch for kind {kind!r}: "
            f"missing columns {missing}, unexpected columns {extra}")

    def to_float(cell: str) -> float:
        try:
            return float(cell)
        except ValueError:
            return np.nan

    rows = [ln.split(",") for ln in lines[1:] if ln]
    cols = {}
    for j, name in enumerate(expected):
        cols[name] = np.array([to_float(r[j]) for r in rows], dtype=float)
    cols["_num_rows"] = len(rows)
    return cols


def _annotate_empty(ax, path: str):
    warnings.warn(f"{path} holds no data rows; rendering empty axes")
    ax.annotate("no data", xy=(0.5, 0.5), xycoords="axes fraction",
                ha="center", va="center", fontsize=14, color="0.4")


def _label(spec: FigureSpec, i: int) -> str:
    if spec.labels:
        return spec.labels[i]
    return spec.inputs[i] if len(spec.inputs) > 1 else ""


def _draw_mode_scatter(ax, spec: FigureSpec):
    for i, path in enumerate(spec.inputs):
        t = read_table(path, "mode-scatter")
        if t["_num_rows"] == 0:
            _annotate_empty(ax, path)
            continue
        ax.scatter(t["re_omega"], t["im_omega"],
                   marker=MARKERS[i % len(MARKERS)], s=28,
                   facecolors="none" if i else None,
                   label=_label(spec, i) or None)
    for pole in spec.poles:
        ax.plot(pole[0], pole[1], "rx", markersize=10, markeredgewidth=2)
    ax.axhline(0.0, color="0.6", linewidth=0.8)
    ax.axvline(0.0, color="0.6", linewidth=0.8)
    ax.set_xlabel("Re $\\omega$")
    ax.set_ylabel("Im $\\omega$")


def _draw_spectrum(ax, spec: FigureSpec):
    for i, path in enumerate(spec.inputs):
        t = read_table(path, "spectrum")
        if t["_num_rows"] == 0:
            _annotate_empty(ax, path)
            continue
        suffix = f" ({_label(spec, i)})" if _label(spec, i) else ""
        ax.plot(t["omega"], t["T"], label="T" + suffix)
        ax.plot(t["omega"], t["R"], "--", label="R" + suffix)
        peaks = t["is_peak"] == 1
        ax.plot(t["omega"][peaks], t["T"][peaks], "k.", markersize=6)
    ax.set_xlabel("$\\omega$")
    ax.set_ylabel("R, T")
    ax.set_ylim(-0.02, 1.05)


def _draw_census(ax, spec: FigureSpec):
    for i, path in enumerate(spec.inputs):
        t = read_table(path, "census")
        if t["_num_rows"] == 0:
            _annotate_empty(ax, path)
            continue
        order = np.argsort(t["radius"])
        ax.plot(t["radius"][order], t["count"][order],
                marker=MARKERS[i % len(MARKERS)],
                label=_label(spec, i) or None)
    ax.set_xscale("log")
    ax.set_xlabel("disk radius around the reference point")
    ax.set_ylabel("mode count")


def _draw_constancy(ax, spec: FigureSpec):
    for i, path in enumerate(spec.inputs):
        t = read_table(path, "constancy")
        if t["_num_rows"] == 0:
            _annotate_empty(ax, path)
            continue
        order = np.argsort(t["abs_z"])
        ax.loglog(t["abs_z"][order], t["abs_L"][order],
                  marker=MARKERS[i % len(MARKERS)],
                  label=_label(spec, i) or None)
    ax.set_xlabel("$|z|$")
    ax.set_ylabel("$|L(z)|$")


_DRAWERS = {
    "mode-scatter": _draw_mode_scatter,
    "spectrum": _draw_spectrum,
    "census": _draw_census,
    "constancy": _draw_constancy,
}


def render(spec: FigureSpec) -> str:
    """Render the figure described by spec and return the output path."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        _DRAWERS[spec.kind](ax, spec)
        if spec.xlim:
            ax.set_xlim(*spec.xlim)
        if spec.ylim:
            ax.set_ylim(*spec.ylim)
        if spec.title:
            ax.set_title(spec.title)
        if ax.get_legend_handles_labels()[0]:
            ax.legend(loc="best")
        fig.tight_layout()
        # pin the PNG metadata so repeated renders are byte identical
        fig.savefig(spec.output, metadata={"Software": "stratmodes-figures"})
        plt.close(fig)
    return spec.output


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="stratmodes-render",
        description="Render figures from stratmodes CSV outputs")
    parser.add_argument("--spec", required=True, help="figure spec JSON")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec.from_json(args.spec)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 1
    try:
        render(spec)
    except (OSError, SchemaMismatch) as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
