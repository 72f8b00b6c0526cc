"""Closed-form and asymptotic mode approximations.

Near a Lorentz resonance the mode condition of a dispersive slab reduces
to sin((omega/c) d sqrt(f/(w0^2 - w^2 - i G w))) = 0, a quadratic in
omega per branch index m whose roots march into the pole of n^2 as
m grows.  Far from all resonances the modes of the slab follow

    omega_m = (c/d) (m pi - (1/i) log(4 m^2 pi^2 / (A d^2)))

with A the high-frequency coefficient of n (the formula is implemented
exactly as printed; its imaginary part carries a growth sign while the
computed modes decay, so comparisons are made on moduli).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dispersion import Material, eval_n, high_freq_coefficient, pole_frequencies
from .errors import NoConvergence


@dataclass(frozen=True)
class NearResonanceFamily:
    """One member of the infinite root family attached to a resonance."""

    layer_index: int
    pole: complex
    m: int
    omega_approx: complex


@dataclass(frozen=True)
class AsymptoticFamily:
    """Large-|omega| eigenfrequency and its pre-iteration residual."""

    A: float
    d: float
    m: int
    omega_m: complex
    rarified_residual: float


def _near_resonance_root(material: Material, d: float, m: int, c: float) -> complex:
    """Fourth-quadrant root of the per-m quadratic reduction.

    (omega d / c)^2 f = m^2 pi^2 (w0^2 - omega^2 - i G omega); the root
    continuous in G from the G=0 positive root is the + branch of the
    discriminant.
    """
    mp2 = (m * np.pi) ** 2
    a = material.f * d * d / (c * c) + mp2
    b = 1j * mp2 * material.gamma
    c0 = -mp2 * material.omega0**2
    disc = np.sqrt(b * b - 4.0 * a * c0)
    return complex((-b + disc) / (2.0 * a))


def near_resonance_modes_slab(material: Material, d: float,
                              m_range: Sequence[int], c: float = 1.0) -> list:
    """Approximate slab modes clustering at the positive-frequency pole.

    The mirror family is obtained by omega -> -conj(omega).
    """
    if not material.is_dispersive:
        raise ValueError("near-resonance families require a Lorentz material")
    pole = pole_frequencies(material)[0]
    out = []
    for m in m_range:
        if m < 1:
            raise ValueError("branch index m must be >= 1")
        out.append(NearResonanceFamily(0, pole, int(m),
                                       _near_resonance_root(material, d, m, c)))
    return out


def two_layer_near_resonance(stack, which: str, m_range: Sequence[int]) -> list:
    """Root families of a two-Lorentz-layer stack near either resonance.

    which="second": the condition sin(n2 d2 omega / c) = 0 is the same
    quadratic reduction as the single slab.  which="first": solve
    sin(n1 d1 w/c) cos(n2 d2 w/c) + n2 cos(n1 d1 w/c) sin(n2 d2 w/c) = 0
    by Newton from the slab-family seed, with n2(omega) evaluated
    exactly rather than frozen.
    """
    layers = [(i, mat, d) for i, (mat, d) in enumerate(stack.layers)
              if mat.is_dispersive]
    if len(layers) != 2:
        raise ValueError("stack must contain exactly two Lorentz layers")
    (i1, mat1, d1), (i2, mat2, d2) = layers
    if mat1.omega0 == mat2.omega0:
        raise ValueError("the two resonances must be distinct")
    c = stack.c
    if which == "second":
        fams = near_resonance_modes_slab(mat2, d2, m_range, c)
        return [NearResonanceFamily(i2, f.pole, f.m, f.omega_approx)
                for f in fams]
    if which != "first":
        raise ValueError("which must be 'first' or 'second'")

    def F(w):
        n1, n2 = eval_n(mat1, w), eval_n(mat2, w)
        a1, a2 = n1 * d1 * w / c, n2 * d2 * w / c
        return np.sin(a1) * np.cos(a2) + n2 * np.cos(a1) * np.sin(a2)

    pole = pole_frequencies(mat1)[0]
    out = []
    for m in m_range:
        w = _near_resonance_root(mat1, d1, m, c)
        ok = False
        for _ in range(60):
            h = 1e-7 * max(1.0, abs(w))
            deriv = (F(w + h) - F(w - h)) / (2.0 * h)
            if deriv == 0:
                break
            step = F(w) / deriv
            w = w - step
            if abs(step) < 1e-12 * max(1.0, abs(w)):
                ok = True
                break
        if not ok:
            raise NoConvergence(f"first-layer family did not converge at m={m}")
        out.append(NearResonanceFamily(i1, pole, int(m), complex(w)))
    return out


def rarified_residual(A: float, d: float, omega: complex, c: float = 1.0) -> float:
    """|sin((1/i) log(4 omega^2/A) + (omega - A/(2 omega)) d/c)|.

    The implicit large-frequency mode condition before the single
    fixed-point iteration that yields the printed omega_m.
    """
    w = complex(omega)
    return abs(np.sin(-1j * np.log(4.0 * w * w / A) + (w - A / (2.0 * w)) * d / c))


def asymptotic_modes(A: float, d: float, m_range: Sequence[int],
                     c: float = 1.0, m_min: int = 10) -> list:
    """Large-|omega| eigenfrequencies, verbatim from the printed formula."""
    if A <= 0:
        raise ValueError("high-frequency coefficient A must be > 0")
    out = []
    for m in m_range:
        if m == 0:
            raise ValueError("m = 0 is not a member of the asymptotic family")
        if abs(m) < m_min:
            raise ValueError(f"|m| >= {m_min} required (neglected terms too large)")
        log_term = np.log(4.0 * (m * np.pi) ** 2 / (A * d * d))
        w = (c / d) * (m * np.pi - (1.0 / 1j) * log_term)
        out.append(AsymptoticFamily(A, d, int(m), complex(w),
                                    rarified_residual(A, d, w, c)))
    return out


@dataclass
class CensusTable:
    """Mode counts within shrinking disks around a reference point."""

    pole: complex
    rows: list  # (radius, count), in the order the radii were given
    non_decreasing: bool
    strictly_increasing_top2: bool


def cluster_census(mode_set, pole: complex, radii: Sequence[float]) -> CensusTable:
    """Count modes within each radius of the pole and check clustering.

    non_decreasing: counts never drop as the radius grows;
    strictly_increasing_top2: the two largest radii hold strictly more
    modes than the next smaller one (finite-resolution surrogate for
    Picard clustering at the essential singularity).
    """
    omegas = np.asarray([m.omega for m in mode_set], dtype=complex)
    rows = []
    for r in radii:
        if omegas.size == 0:
            rows.append((float(r), 0))
        else:
            rows.append((float(r), int(np.sum(np.abs(omegas - pole) < r))))
    by_radius = sorted(rows)
    counts = [c for _, c in by_radius]
    non_dec = all(counts[i] <= counts[i + 1] for i in range(len(counts) - 1))
    strict_top = len(counts) >= 2 and counts[-1] > counts[-2]
    return CensusTable(complex(pole), rows, non_dec, strict_top)


def no_modes_beyond(stack, margin: float = 1e-2) -> tuple:
    """Search window beyond the outermost resonance: [w1+margin, 3 w1] x [-0.5, 0].

    Returns the region bounds used by the emptiness test.
    """
    w1 = max(m.omega0 for m in stack.media if m.is_dispersive)
    return (w1 + margin, 3.0 * w1, -0.5, 0.0)
