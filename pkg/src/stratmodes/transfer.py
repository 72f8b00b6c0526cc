"""Wolter's recursion for stratified N-layer reflection/transmission.

The numerator Z_m and denominator N_m of the reflection coefficient are
built interface by interface:

    Z_m = (g_m - g_{m-1}) e^{-i d_{m-1}} N_{m-1} + (g_m + g_{m-1}) e^{+i d_{m-1}} Z_{m-1}
    N_m = (g_m + g_{m-1}) e^{-i d_{m-1}} N_{m-1} + (g_m - g_{m-1}) e^{+i d_{m-1}} Z_{m-1}
    Z_1 = g_1 - g_0,  N_1 = g_1 + g_0

with g = n cos(theta) (TE) or cos(theta)/n (TM) and the layer phase
delta = n d w cos(theta) / c, time convention e^{-i w t}.  To avoid
overflow for large |Im delta| the running pair (Z, N) is rescaled by
max(|Z|, |N|) after every step; the transmission numerator is rescaled
by the same cumulative factor so r = Z/N and t = t_num/N are unchanged.

The transmission numerator uses the energy-consistent convention
2^m * prod_{i=0}^{m-1} g_i (product over incidence-side media), which
reproduces the single-interface Fresnel coefficient t = 2 g0/(g0+g1).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from .dispersion import Material, eval_n
from .errors import DenominatorZero

TE = "TE"
TM = "TM"


@dataclass(frozen=True)
class Stack:
    """Semi-infinite ambient media around an ordered list of slabs."""

    ambient_in: Material
    layers: Tuple[Tuple[Material, float], ...]
    ambient_out: Material
    polarization: str = TE
    theta0: float = 0.0
    c: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple((m, float(d)) for m, d in self.layers))
        if not self.layers:
            raise ValueError("a stack needs at least one layer")
        if any(d <= 0 for _, d in self.layers):
            raise ValueError("all layer thicknesses must be > 0")
        if self.polarization not in (TE, TM):
            raise ValueError("polarization must be 'TE' or 'TM'")
        if self.c <= 0:
            raise ValueError("wave speed c must be > 0")
        if self.theta0 != 0.0 and any(m.is_dispersive for m in self.media):
            raise ValueError("dispersive stacks are only supported at normal incidence")

    @property
    def media(self) -> tuple:
        return (self.ambient_in, *(m for m, _ in self.layers), self.ambient_out)

    @property
    def num_interfaces(self) -> int:
        return len(self.layers) + 1

    def to_config(self) -> dict:
        return {
            "ambient_in": self.ambient_in.to_config(),
            "layers": [
                {"material": m.to_config(), "thickness": d} for m, d in self.layers
            ],
            "ambient_out": self.ambient_out.to_config(),
            "polarization": self.polarization,
            "theta0": self.theta0,
            "c": self.c,
        }

    @classmethod
    def from_config(cls, cfg: dict) -> "Stack":
        return cls(
            ambient_in=Material.from_config(cfg["ambient_in"]),
            layers=tuple(
                (Material.from_config(l["material"]), l["thickness"])
                for l in cfg["layers"]
            ),
            ambient_out=Material.from_config(cfg["ambient_out"]),
            polarization=cfg.get("polarization", TE),
            theta0=cfg.get("theta0", 0.0),
            c=cfg.get("c", 1.0),
        )

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_config(), sort_keys=True).encode()
        return hashlib.sha1(blob).hexdigest()[:16]


@dataclass
class LayerParams:
    """Interface admittances g_m and layer phases delta_m at one frequency."""

    g: list
    delta: list
    omega: object

    def __post_init__(self):
        if len(self.g) != len(self.delta) + 2:
            raise ValueError("need one g per medium and one delta per layer")


@dataclass
class TransferResult:
    """Rescaled (Z, N, t_numerator); only the ratios Z/N and t_num/N matter."""

    Z: object
    N: object
    t_numerator: object


def layer_params(stack: Stack, omega) -> LayerParams:
    """Evaluate g_m and delta_m for every medium/layer of the stack."""
    w = np.asarray(omega, dtype=complex)
    n0 = eval_n(stack.ambient_in, w)
    sin0 = np.sin(stack.theta0)
    g, cosines = [], []
    for mat in stack.media:
        n = eval_n(mat, w)
        if stack.theta0 == 0.0:
            cos = np.ones_like(w) if w.ndim else 1.0
        else:
            s = n0 * sin0 / n
            cos = np.sqrt(1.0 - s * s)
        cosines.append(cos)
        g.append(n * cos if stack.polarization == TE else cos / n)
    delta = []
    for k, (mat, d) in enumerate(stack.layers):
        n = eval_n(mat, w)
        delta.append(n * d * w * cosines[k + 1] / stack.c)
    return LayerParams(g=g, delta=delta, omega=omega)


def wolter_recursion(stack: Stack, omega, rescale: bool = True) -> TransferResult:
    """Run the recursion at complex frequency (scalar or ndarray).

    With rescale=False the raw (analytic in omega) Z, N are returned;
    the rescaled variant divides by a positive real factor per step and
    is preferred for residual measures and overflow safety.
    """
    p = layer_params(stack, omega)
    g = [np.asarray(v, dtype=complex) for v in p.g]
    Z = g[1] - g[0]
    N = g[1] + g[0]
    t_num = 2.0 * g[0]
    for m in range(2, len(g)):
        d = np.asarray(p.delta[m - 2], dtype=complex)
        e_minus, e_plus = np.exp(-1j * d), np.exp(1j * d)
        Z, N = (
            (g[m] - g[m - 1]) * e_minus * N + (g[m] + g[m - 1]) * e_plus * Z,
            (g[m] + g[m - 1]) * e_minus * N + (g[m] - g[m - 1]) * e_plus * Z,
        )
        t_num = t_num * 2.0 * g[m - 1]
        if rescale:
            scale = np.maximum(np.abs(Z), np.abs(N))
            scale = np.where(scale == 0, 1.0, scale)
            Z, N, t_num = Z / scale, N / scale, t_num / scale
    return TransferResult(Z=Z, N=N, t_numerator=t_num)


def _check_denominator(res: TransferResult, tol: float):
    if np.any(np.abs(res.N) < tol * (np.abs(res.Z) + 1.0)):
        raise DenominatorZero(
            "|N| below tolerance: omega is (numerically) a natural frequency"
        )


def reflection(stack: Stack, omega, denominator_tol: float = 1e-12):
    """Amplitude reflection coefficient r = Z/N."""
    res = wolter_recursion(stack, omega)
    _check_denominator(res, denominator_tol)
    return res.Z / res.N


def transmission(stack: Stack, omega, denominator_tol: float = 1e-12):
    """Amplitude transmission coefficient t = t_numerator/N."""
    res = wolter_recursion(stack, omega)
    _check_denominator(res, denominator_tol)
    return res.t_numerator / res.N


@dataclass
class Spectrum:
    """Reflectance/transmittance on a real-frequency grid with T-peaks."""

    omega: np.ndarray
    R: np.ndarray
    T: np.ndarray
    is_peak: np.ndarray
    fwhm: np.ndarray  # NaN where not a peak
    peaks: list = field(default_factory=list)  # (omega_peak, T_peak, fwhm)


def spectrum(stack: Stack, omega_grid) -> Spectrum:
    """Evaluate R, T over a strictly increasing real grid and flag T-peaks.

    Peak FWHM is estimated from a quadratic fit through the three samples
    around each local maximum of T.
    """
    w = np.asarray(omega_grid, dtype=float)
    if w.size == 0:
        empty = np.array([])
        return Spectrum(w, empty, empty, np.array([], dtype=bool), empty)
    if w.size > 1 and np.any(np.diff(w) <= 0):
        raise ValueError("omega grid must be strictly increasing")
    res = wolter_recursion(stack, w)
    r = res.Z / res.N
    t = res.t_numerator / res.N
    g_in = eval_n(stack.ambient_in, w) * (np.cos(stack.theta0))
    g_out = eval_n(stack.ambient_out, w)
    if stack.theta0 != 0.0:
        n0 = eval_n(stack.ambient_in, w)
        s = n0 * np.sin(stack.theta0) / g_out
        g_out = g_out * np.sqrt(1.0 - s * s)
    if stack.polarization == TM:
        n_in = eval_n(stack.ambient_in, w)
        n_out = eval_n(stack.ambient_out, w)
        g_in, g_out = g_in / (n_in * n_in), g_out / (n_out * n_out)
    R = np.abs(r) ** 2
    T = (np.real(g_out) / np.real(g_in)) * np.abs(t) ** 2
    is_peak = np.zeros(w.size, dtype=bool)
    fwhm = np.full(w.size, np.nan)
    peaks = []
    for i in range(1, w.size - 1):
        if T[i] > T[i - 1] and T[i] >= T[i + 1]:
            is_peak[i] = True
            fwhm[i] = _quadratic_fwhm(w[i - 1 : i + 2], T[i - 1 : i + 2])
            peaks.append((w[i], T[i], fwhm[i]))
    return Spectrum(w, R, T, is_peak, fwhm, peaks)


def _quadratic_fwhm(x3, y3) -> float:
    """FWHM of the parabola through three points (NaN if not concave)."""
    coeffs = np.polyfit(x3 - x3[1], y3, 2)
    a, b, c0 = coeffs
    if a >= 0:
        return np.nan
    x_top = -b / (2 * a)
    y_top = c0 + b * x_top + a * x_top * x_top
    if y_top <= 0:
        return np.nan
    return 2.0 * np.sqrt(y_top / (2.0 * abs(a)))
