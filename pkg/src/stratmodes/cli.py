"""Command-line driver: config ingestion, dispatch, deterministic output.

Subcommands: modes | spectrum | completeness | census | asymptotics.
Configuration is a single JSON file validated against a strict schema
(unknown keys rejected); outputs are CSV/JSON files written atomically,
each carrying the tool version and a fingerprint of the config in a
comment header.  Exit codes: 0 success, 1 config error, 2 unresolved
search cells.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile

import numpy as np
import jsonschema

from . import __version__
from .analysis import asymptotic_modes, cluster_census
from .completeness import asymptotic_lambdas, classify, verify_L_constancy
from .errors import MaxDepthExceeded, StratModesError
from .modefinder import ModeSet, SearchRegion, find_modes, quarterwave_modes
from .transfer import Stack, spectrum

_MATERIAL_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "type": {"const": "constant"},
                "n": {"oneOf": [{"type": "number"},
                                {"type": "array", "items": {"type": "number"},
                                 "minItems": 2, "maxItems": 2}]},
            },
            "required": ["type", "n"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "type": {"const": "lorentz"},
                "f": {"type": "number", "exclusiveMinimum": 0},
                "omega0": {"type": "number", "exclusiveMinimum": 0},
                "gamma": {"type": "number", "minimum": 0},
            },
            "required": ["type", "f", "omega0"],
            "additionalProperties": False,
        },
    ]
}

_STACK_SCHEMA = {
    "type": "object",
    "properties": {
        "ambient_in": _MATERIAL_SCHEMA,
        "layers": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "material": _MATERIAL_SCHEMA,
                    "thickness": {"type": "number", "exclusiveMinimum": 0},
                },
                "required": ["material", "thickness"],
                "additionalProperties": False,
            },
        },
        "ambient_out": _MATERIAL_SCHEMA,
        "polarization": {"enum": ["TE", "TM"]},
        "theta0": {"type": "number"},
        "c": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["ambient_in", "layers", "ambient_out"],
    "additionalProperties": False,
}

_REGION_SCHEMA = {
    "type": "object",
    "properties": {
        "re_min": {"type": "number"},
        "re_max": {"type": "number"},
        "im_min": {"type": "number"},
        "im_max": {"type": "number"},
        "max_depth": {"type": "integer", "minimum": 1},
        "newton_tol": {"type": "number", "exclusiveMinimum": 0},
        "exclusion_radius": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["re_min", "re_max", "im_min", "im_max"],
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "stack": _STACK_SCHEMA,
        "region": _REGION_SCHEMA,
        "quarterwave": {
            "type": "object",
            "properties": {
                "n_ratio": {"type": "number", "exclusiveMinimum": 0},
                "num_layers": {"type": "integer", "minimum": 2},
                "period_indices": {"type": "array",
                                   "items": {"type": "integer"}},
            },
            "required": ["n_ratio", "num_layers"],
            "additionalProperties": False,
        },
        "grid": {
            "type": "object",
            "properties": {
                "start": {"type": "number"},
                "stop": {"type": "number"},
                "num": {"type": "integer", "minimum": 2},
            },
            "required": ["start", "stop", "num"],
            "additionalProperties": False,
        },
        "census": {
            "type": "object",
            "properties": {
                "pole": {"type": "array", "items": {"type": "number"},
                         "minItems": 2, "maxItems": 2},
                "radii": {"type": "array", "minItems": 1,
                          "items": {"type": "number", "exclusiveMinimum": 0}},
            },
            "required": ["pole", "radii"],
            "additionalProperties": False,
        },
        "asymptotics": {
            "type": "object",
            "properties": {
                "A": {"type": "number", "exclusiveMinimum": 0},
                "d": {"type": "number", "exclusiveMinimum": 0},
                "m_values": {"type": "array", "minItems": 1,
                             "items": {"type": "integer"}},
                "c": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["A", "d", "m_values"],
            "additionalProperties": False,
        },
        "completeness": {
            "type": "object",
            "properties": {
                "set": {"enum": ["sine", "cosine", "cosine-dropped",
                                 "asymptotic", "explicit"]},
                "size": {"type": "integer", "minimum": 100},
                "A": {"type": "number", "exclusiveMinimum": 0},
                "d": {"type": "number", "exclusiveMinimum": 0},
                "lambdas": {"type": "array",
                            "items": {"type": "array",
                                      "items": {"type": "number"},
                                      "minItems": 2, "maxItems": 2}},
                "truncation": {"type": "integer", "minimum": 100},
                "tail_model": {"enum": ["none", "asymptotic-pairing"]},
            },
            "required": ["set"],
            "additionalProperties": False,
        },
        "constancy": {
            "type": "object",
            "properties": {
                "A": {"type": "number", "exclusiveMinimum": 0},
                "d": {"type": "number", "exclusiveMinimum": 0},
                "truncation": {"type": "integer", "minimum": 100},
                "z_min": {"type": "number", "exclusiveMinimum": 0},
                "z_max": {"type": "number", "exclusiveMinimum": 0},
                "num": {"type": "integer", "minimum": 2},
            },
            "required": ["A", "d", "truncation", "z_min", "z_max", "num"],
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


def load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    jsonschema.validate(cfg, CONFIG_SCHEMA)
    return cfg


def config_fingerprint(cfg: dict) -> str:
    return hashlib.sha1(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _header(fingerprint: str) -> str:
    return (f"# stratmodes {__version__}\n"
            f"# config {fingerprint}\n")


def _fmt(x) -> str:
    return "%.17g" % x


def write_csv(path: str, fingerprint: str, header_row, rows):
    lines = [_header(fingerprint).rstrip("\n"), ",".join(header_row)]
    for row in rows:
        lines.append(",".join("" if v is None else
                              (_fmt(v) if isinstance(v, float) else str(v))
                              for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_json(path: str, fingerprint: str, payload: dict):
    payload = dict(payload)
    payload["_meta"] = {"tool": "stratmodes", "version": __version__,
                        "config": fingerprint}
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _modeset_rows(ms: ModeSet):
    for m in ms:
        yield (float(m.omega.real), float(m.omega.imag), m.multiplicity,
               m.method, float(m.residual))


MODE_COLUMNS = ("re_omega", "im_omega", "multiplicity", "method", "residual")


def cmd_modes(cfg: dict, out_dir: str, seed: int) -> int:
    fp = config_fingerprint(cfg)
    exit_code = 0
    if "quarterwave" in cfg:
        q = cfg["quarterwave"]
        ms = quarterwave_modes(q["n_ratio"], q["num_layers"],
                               tuple(q.get("period_indices", (0,))))
        note = "delta-plane roots; omega = delta*c/(n1*d1)"
    else:
        if "stack" not in cfg or "region" not in cfg:
            raise ValueError("modes needs either 'quarterwave' or 'stack'+'region'")
        stack = Stack.from_config(cfg["stack"])
        region = SearchRegion(**cfg["region"])
        try:
            ms = find_modes(stack, region, seed=seed)
            note = ""
        except MaxDepthExceeded as e:
            ms = e.partial
            note = f"unresolved cells: {len(e.unresolved_cells)}"
            exit_code = 2
    write_csv(os.path.join(out_dir, "modes.csv"), fp, MODE_COLUMNS,
              _modeset_rows(ms))
    write_json(os.path.join(out_dir, "modes_summary.json"), fp, {
        "count": len(ms), "note": note, "seed": seed,
        "stack_fingerprint": ms.stack_fingerprint,
    })
    return exit_code


def cmd_spectrum(cfg: dict, out_dir: str, seed: int) -> int:
    fp = config_fingerprint(cfg)
    stack = Stack.from_config(cfg["stack"])
    g = cfg["grid"]
    w = np.linspace(g["start"], g["stop"], g["num"])
    sp = spectrum(stack, w)
    rows = []
    for i in range(w.size):
        rows.append((float(sp.omega[i]), float(sp.R[i]), float(sp.T[i]),
                     int(sp.is_peak[i]),
                     None if np.isnan(sp.fwhm[i]) else float(sp.fwhm[i])))
    write_csv(os.path.join(out_dir, "spectrum.csv"), fp,
              ("omega", "R", "T", "is_peak", "fwhm"), rows)
    lossless = all(not m.is_dispersive and m.n.imag == 0 for m in stack.media)
    summary = {"num_points": int(w.size), "num_peaks": len(sp.peaks),
               "lossless": lossless}
    if lossless and w.size:
        summary["max_abs_R_plus_T_minus_1"] = float(np.max(np.abs(sp.R + sp.T - 1)))
    write_json(os.path.join(out_dir, "spectrum_summary.json"), fp, summary)
    return 0


def cmd_completeness(cfg: dict, out_dir: str, seed: int) -> int:
    fp = config_fingerprint(cfg)
    wrote = False
    if "completeness" in cfg:
        c = cfg["completeness"]
        size = c.get("size", 100_000)
        m = np.arange(1, size + 1)
        if c["set"] == "sine":
            lam = np.concatenate([m * np.pi, -m * np.pi])
        elif c["set"] == "cosine":
            lam = np.concatenate([(m - 0.5) * np.pi, -(m - 0.5) * np.pi])
        elif c["set"] == "cosine-dropped":
            lam = np.concatenate([(m - 0.5) * np.pi, -(m - 0.5) * np.pi])
            lam = lam[np.abs(lam - 0.5 * np.pi) > 1e-9]
        elif c["set"] == "asymptotic":
            lam = asymptotic_lambdas(c["A"], c["d"], size)
        else:
            lam = np.array([complex(a, b) for a, b in c["lambdas"]])
        report = classify(lam,
                          truncation=c.get("truncation", 100_000),
                          tail_model=c.get("tail_model", "asymptotic-pairing"))
        write_json(os.path.join(out_dir, "completeness.json"), fp,
                   report.to_dict())
        wrote = True
    if "constancy" in cfg:
        c = cfg["constancy"]
        zs = np.logspace(np.log10(c["z_min"]), np.log10(c["z_max"]), c["num"])
        res = verify_L_constancy(c["A"], c["d"], c["truncation"], zs)
        write_csv(os.path.join(out_dir, "constancy.csv"), fp,
                  ("abs_z", "abs_L"), res.rows)
        write_json(os.path.join(out_dir, "constancy_summary.json"), fp, {
            "relative_variation": res.relative_variation,
            "residue_bound": res.residue_bound,
            "truncation": res.truncation, "tail_terms": res.tail_terms,
        })
        wrote = True
    if not wrote:
        raise ValueError("completeness needs 'completeness' and/or 'constancy'")
    return 0


def cmd_census(cfg: dict, out_dir: str, seed: int) -> int:
    fp = config_fingerprint(cfg)
    if "census" not in cfg or "stack" not in cfg or "region" not in cfg:
        raise ValueError("census needs 'stack', 'region' and 'census'")
    stack = Stack.from_config(cfg["stack"])
    region = SearchRegion(**cfg["region"])
    exit_code = 0
    try:
        ms = find_modes(stack, region, seed=seed)
    except MaxDepthExceeded as e:
        ms = e.partial
        exit_code = 2
    cz = cfg["census"]
    table = cluster_census(ms, complex(*cz["pole"]), cz["radii"])
    write_csv(os.path.join(out_dir, "census.csv"), fp, ("radius", "count"),
              [(float(r), int(n)) for r, n in table.rows])
    write_json(os.path.join(out_dir, "census_summary.json"), fp, {
        "pole": [table.pole.real, table.pole.imag],
        "non_decreasing": table.non_decreasing,
        "strictly_increasing_top2": table.strictly_increasing_top2,
        "num_modes": len(ms),
    })
    return exit_code


def cmd_asymptotics(cfg: dict, out_dir: str, seed: int) -> int:
    fp = config_fingerprint(cfg)
    if "asymptotics" not in cfg:
        raise ValueError("asymptotics needs an 'asymptotics' section")
    a = cfg["asymptotics"]
    fams = asymptotic_modes(a["A"], a["d"], a["m_values"], c=a.get("c", 1.0))
    rows = [(float(f.omega_m.real), float(f.omega_m.imag), 1, "asymptotic",
             float(f.rarified_residual)) for f in fams]
    write_csv(os.path.join(out_dir, "asymptotics.csv"), fp, MODE_COLUMNS, rows)
    return 0


_COMMANDS = {
    "modes": cmd_modes,
    "spectrum": cmd_spectrum,
    "completeness": cmd_completeness,
    "census": cmd_census,
    "asymptotics": cmd_asymptotics,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="stratmodes",
        description="Natural modes of stratified optical media")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for contour split jitter")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
    except (OSError, json.JSONDecodeError,
            jsonschema.ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](cfg, args.out, args.seed)
    except (ValueError, StratModesError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
