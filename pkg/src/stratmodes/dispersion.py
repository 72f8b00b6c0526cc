"""Refractive-index models evaluated at complex frequency.

A material is either frequency independent (constant complex index) or a
single-resonance Lorentz oscillator

    n^2(w) = 1 + f / (w0^2 - w^2 - i*G*w),

evaluated with the principal square root (branch cut on the negative real
axis of n^2).  Frequencies are expressed in units of the characteristic
resonance frequency; the wave speed enters only through the stack.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotDispersive, PoleEvaluation

CONSTANT = "constant"
LORENTZ = "lorentz"


@dataclass(frozen=True)
class Material:
    """Constant-index or Lorentz-oscillator medium (non-magnetic)."""

    kind: str
    n: complex = 1.0 + 0.0j
    f: float = 0.0
    omega0: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.kind == CONSTANT:
            if self.n == 0:
                raise ValueError("constant refractive index must be nonzero")
            if self.n.imag < 0:
                raise ValueError("constant index must have Im n >= 0 (passive medium)")
        elif self.kind == LORENTZ:
            if self.f <= 0:
                raise ValueError("oscillator strength f must be > 0")
            if self.omega0 <= 0:
                raise ValueError("resonance frequency omega0 must be > 0")
            if self.gamma < 0:
                raise ValueError("damping gamma must be >= 0")
        else:
            raise ValueError(f"unknown material kind {self.kind!r}")

    @classmethod
    def constant(cls, n) -> "Material":
        return cls(kind=CONSTANT, n=complex(n))

    @classmethod
    def lorentz(cls, f, omega0, gamma=0.0) -> "Material":
        return cls(kind=LORENTZ, f=float(f), omega0=float(omega0), gamma=float(gamma))

    @property
    def is_dispersive(self) -> bool:
        return self.kind == LORENTZ

    def to_config(self) -> dict:
        if self.kind == CONSTANT:
            if self.n.imag == 0:
                return {"type": "constant", "n": self.n.real}
            return {"type": "constant", "n": [self.n.real, self.n.imag]}
        return {"type": "lorentz", "f": self.f, "omega0": self.omega0, "gamma": self.gamma}

    @classmethod
    def from_config(cls, cfg: dict) -> "Material":
        if cfg["type"] == "constant":
            n = cfg["n"]
            if isinstance(n, (list, tuple)):
                n = complex(n[0], n[1])
            return cls.constant(n)
        return cls.lorentz(cfg["f"], cfg["omega0"], cfg.get("gamma", 0.0))


def eval_n(material: Material, omega):
    """Refractive index at complex frequency (scalar or ndarray).

    Uses the principal branch of sqrt(n^2); constant materials return
    their index unchanged.
    """
    if material.kind == CONSTANT:
        if np.isscalar(omega) or np.ndim(omega) == 0:
            return material.n
        return np.full(np.shape(omega), material.n, dtype=complex)
    w = np.asarray(omega, dtype=complex)
    den = material.omega0**2 - w * w - 1j * material.gamma * w
    if np.any(den == 0):
        raise PoleEvaluation(
            f"refractive index evaluated at a pole of n^2 (omega0={material.omega0})"
        )
    n = np.sqrt(1.0 + material.f / den)
    if np.isscalar(omega) or np.ndim(omega) == 0:
        return complex(n)
    return n


def pole_frequencies(material: Material):
    """The two poles of n^2: roots of w0^2 - w^2 - i*G*w = 0.

    Both lie in the closed lower half-plane; for G = 2*w0 they coincide
    at -i*w0.
    """
    if not material.is_dispersive:
        raise NotDispersive("constant materials have no dispersion poles")
    g, w0 = material.gamma, material.omega0
    root = np.sqrt(complex(w0 * w0 - g * g / 4.0))
    return (-0.5j * g + root, -0.5j * g - root)


def branch_points(material: Material):
    """Zeros of n^2 (square-root branch points of n in the omega plane)."""
    if not material.is_dispersive:
        raise NotDispersive("constant materials have no branch points")
    g, w0, f = material.gamma, material.omega0, material.f
    root = np.sqrt(complex(w0 * w0 + f - g * g / 4.0))
    return (-0.5j * g + root, -0.5j * g - root)


def high_freq_coefficient(material: Material) -> float:
    """Coefficient A in the large-frequency expansion n = 1 - A/(2 w^2) + O(w^-3)."""
    if not material.is_dispersive:
        raise NotDispersive("constant materials have no high-frequency expansion")
    return material.f
