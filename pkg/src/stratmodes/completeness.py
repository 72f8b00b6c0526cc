"""Canonical products over mode sets and Paley-Wiener classification.

The genus-0 canonical product F(z) = prod_{m != 0} (1 - z/lambda_m) is
evaluated in log space with +m/-m factors paired (the paired factor
1 - z(1/a + 1/b) + z^2/(ab) is O(1/m^2), so pairing turns a conditionally
convergent product into an absolutely convergent one).  Completeness of
the exponential system follows the Paley-Wiener dichotomy: the system is
incomplete exactly when F is square integrable on the real axis, which a
power-law fit of |F(x)| ~ C x^p detects as p < -1/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import polygamma

from .errors import (
    EigenvalueHit,
    FitUnstable,
    NoConvergence,
    RatioConditionViolated,
    TruncationTooSmall,
)


@dataclass
class CanonicalProduct:
    """Eigenvalue set with truncation and tail handling for F(z)."""

    lambdas: np.ndarray
    z_map: str = "large-frequency"  # or "near-resonance"
    truncation: int = 100_000
    tail_model: str = "none"  # or "asymptotic-pairing"

    def __post_init__(self):
        self.lambdas = np.asarray(self.lambdas, dtype=complex)
        if np.any(self.lambdas == 0):
            raise ValueError("lambda = 0 cannot appear in a genus-0 product")
        if self.truncation < 100:
            raise ValueError("truncation must be at least 100")
        if self.z_map not in ("large-frequency", "near-resonance"):
            raise ValueError(f"unknown z_map {self.z_map!r}")
        if self.tail_model not in ("none", "asymptotic-pairing"):
            raise ValueError(f"unknown tail_model {self.tail_model!r}")


def check_ratio_condition(lambdas: np.ndarray, window=(0.5, 2.0)) -> bool:
    """Tail sanity |lambda_m| ~ m pi: ratio within the window on the tail.

    The eigenvalues are ranked by modulus within each half (positive and
    negative real part) so that +m/-m pairs rank equally.
    """
    lam = np.asarray(lambdas, dtype=complex)
    ok = True
    for half in (lam[lam.real >= 0], lam[lam.real < 0]):
        if half.size == 0:
            continue
        mods = np.sort(np.abs(half))
        ranks = np.arange(1, mods.size + 1)
        tail = mods.size // 2
        ratio = mods[tail:] / (ranks[tail:] * np.pi)
        if np.any((ratio < window[0]) | (ratio > window[1])):
            ok = False
    return ok


def _pair_lambdas(lam: np.ndarray):
    """Split into (+Re, -Re) halves sorted by modulus and pair them up."""
    pos = lam[lam.real >= 0]
    neg = lam[lam.real < 0]
    pos = pos[np.argsort(np.abs(pos))]
    neg = neg[np.argsort(np.abs(neg))]
    n = min(pos.size, neg.size)
    return pos[:n], neg[:n], np.concatenate([pos[n:], neg[n:]])


def eval_canonical_product(cp: CanonicalProduct, z) -> complex:
    """F(z) = prod (1 - z/lambda_m), accumulated in log space.

    With tail_model="asymptotic-pairing" the +m/-m factors are paired
    before truncation and the truncated log-tail is corrected by the
    second-order Euler-Maclaurin estimate -(z/s)^2 psi'(M+1), where s is
    the asymptotic eigenvalue spacing |lambda_M|/M.
    """
    z = complex(z)
    lam = cp.lambdas
    if lam.size == 0:
        return 1.0 + 0.0j
    dist = np.abs(z - lam)
    if np.any(dist == 0):
        return 0.0 + 0.0j
    if np.min(dist) < 1e-12 * (1.0 + np.abs(z)):
        raise EigenvalueHit("z is within 1e-12 of an eigenvalue (but not on it)")
    if not check_ratio_condition(lam):
        raise RatioConditionViolated(
            "|lambda_m|/(m pi) leaves [0.5, 2] on the retained tail")
    M = cp.truncation
    if cp.tail_model == "asymptotic-pairing":
        pos, neg, rest = _pair_lambdas(lam)
        pos, neg = pos[:M], neg[:M]
        paired = (1.0 - z / pos) * (1.0 - z / neg)
        log_sum = np.sum(np.log(paired.astype(complex)))
        for l in rest[: max(0, M - pos.size)]:
            log_sum += np.log(1.0 - z / l)
        if pos.size >= 100:
            s = np.abs(pos[-1]) / pos.size
            log_sum += -(z / s) ** 2 * polygamma(1, pos.size + 1)
        return complex(np.exp(log_sum))
    keep = lam[np.argsort(np.abs(lam))][:M]
    log_sum = np.sum(np.log((1.0 - z / keep).astype(complex)))
    return complex(np.exp(log_sum))


@dataclass
class CompletenessReport:
    decay_exponent: float
    classification: str  # complete | incomplete | undetermined
    fit_range: tuple
    fit_residual: float
    paley_wiener_ratio_check: bool
    truncation: int
    tail_model: str
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "classification": self.classification,
            "decay_exponent": self.decay_exponent,
            "fit_range": list(self.fit_range),
            "fit_residual": self.fit_residual,
            "paley_wiener_ratio_check": self.paley_wiener_ratio_check,
            "truncation": self.truncation,
            "tail_model": self.tail_model,
            "note": self.note,
        }


def _dezeroed_grid(x_min: float, x_max: float, lambdas: np.ndarray,
                   points_per_decade: int = 50) -> np.ndarray:
    """Log grid avoiding real zeros of F by shifting to gap midpoints."""
    decades = np.log10(x_max / x_min)
    n = max(int(round(decades * points_per_decade)), 2)
    x = np.logspace(np.log10(x_min), np.log10(x_max), n)
    real_zeros = np.sort(lambdas[np.abs(lambdas.imag) < 1e-9].real)
    real_zeros = real_zeros[real_zeros > 0]
    if real_zeros.size < 2:
        return x
    gaps = np.diff(real_zeros)
    for i, xi in enumerate(x):
        j = np.searchsorted(real_zeros, xi)
        lo = real_zeros[j - 1] if j > 0 else None
        hi = real_zeros[j] if j < real_zeros.size else None
        gap = gaps[min(max(j - 1, 0), gaps.size - 1)]
        near_lo = lo is not None and xi - lo < 0.25 * gap
        near_hi = hi is not None and hi - xi < 0.25 * gap
        if near_lo or near_hi:
            if lo is not None and hi is not None:
                x[i] = 0.5 * (lo + hi)
            elif lo is not None:
                x[i] = lo + 0.5 * gap
            else:
                x[i] = hi - 0.5 * gap
    return x


def classify(lambdas, z_map: str = "large-frequency", real_grid=None,
             truncation: int = 100_000, tail_model: str = "asymptotic-pairing",
             margin: float = 0.1, fit_residual_max: float = 0.5
             ) -> CompletenessReport:
    """Fit |F(x)| ~ C x^p on real x and apply the Paley-Wiener dichotomy.

    complete when p >= -1/2 + margin (F stays out of L^2), incomplete
    when p <= -1/2 - margin, undetermined between.  The fit uses the
    upper decade of the grid.
    """
    lam = np.asarray(lambdas, dtype=complex)
    if lam.size == 0:
        raise ValueError("mode set is empty")
    cp = CanonicalProduct(lam, z_map=z_map, truncation=truncation,
                          tail_model=tail_model)
    if real_grid is None:
        scale = np.median(np.abs(lam)) / max(lam.size // 2, 1)
        x_min = max(10.0 * scale, 1.0)
        x = _dezeroed_grid(x_min, 100.0 * x_min, lam)
    else:
        x = np.asarray(real_grid, dtype=float)
        if x.max() / x.min() < 99.0:
            raise ValueError("grid must span at least two decades")
    absF = np.array([abs(eval_canonical_product(cp, xi)) for xi in x])
    good = absF > 0
    x, absF = x[good], absF[good]
    upper = x >= x.max() / 10.0
    lx, ly = np.log10(x[upper]), np.log10(absF[upper])
    p, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.sqrt(np.mean((ly - (p * lx + intercept)) ** 2)))
    if resid > fit_residual_max:
        raise FitUnstable(
            f"decay-exponent fit residual {resid:.3f} exceeds {fit_residual_max}")
    if p >= -0.5 + margin:
        cls, note = "complete", ""
    elif p <= -0.5 - margin:
        cls = "incomplete"
        note = ("the system can be made complete by adjoining finitely "
                "many modes")
    else:
        cls, note = "undetermined", "decay exponent within the margin band"
    return CompletenessReport(
        decay_exponent=float(p), classification=cls,
        fit_range=(float(x[upper].min()), float(x.max())),
        fit_residual=resid,
        paley_wiener_ratio_check=check_ratio_condition(lam),
        truncation=truncation, tail_model=tail_model, note=note)


@dataclass
class LConstancyResult:
    rows: list  # (abs_z, abs_L)
    relative_variation: float
    residue_bound: float
    truncation: int
    tail_terms: int


def lambert_w(z, branch: int = 0, tol: float = 1e-15, max_iter: int = 100):
    """Principal-branch Lambert W by Halley iteration.

    The initial guess is branch aware: a series near 0, the square-root
    expansion near the branch point -1/e, and log(z) - log(log(z)) for
    large |z|.  Iteration stops when the Halley step falls below tol
    relative to |W|, which drives the residual |W e^W - z| to rounding
    level (cubic convergence makes the final step essentially free).
    """
    if branch != 0:
        raise ValueError("only the principal branch (0) is implemented")
    z = complex(z)
    if z == 0:
        return 0.0 + 0.0j
    if abs(z + np.exp(-1.0)) < 0.25:
        p = np.sqrt(2.0 * (np.e * z + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 * p**3 / 72.0
    elif abs(z) < 1.0:
        w = z * (1.0 - z + 1.5 * z * z)
    else:
        w = np.log(z)
        if abs(w) > 1.0:
            w = w - np.log(w)
    for _ in range(max_iter):
        ew = np.exp(w)
        f = w * ew - z
        fp = ew * (w + 1.0)
        fpp = ew * (w + 2.0)
        denom = fp - f * fpp / (2.0 * fp)
        if denom == 0:
            break
        step = f / denom
        w_new = w - step
        if w_new == w or abs(step) <= tol * (1.0 + abs(w_new)):
            return complex(w_new)
        w = w_new
    raise NoConvergence(f"Lambert W did not converge for z = {z}")


def asymptotic_lambdas(A: float, d: float, M: int, c: float = 1.0) -> np.ndarray:
    """Paired eigenvalues (m pi + i log(4 m^2 pi^2/(A d^2))) for |m| <= M."""
    m = np.arange(1, M + 1)
    beta = np.log(4.0 * (m * np.pi) ** 2 / (A * d * d))
    pos = m * np.pi + 1j * beta
    return np.concatenate([pos, -np.conj(pos)]) * (c / d)


def verify_L_constancy(A: float, d: float, M: int, z_samples,
                       tail_factor: int = 10) -> LConstancyResult:
    """|L(z)| of the large-frequency canonical product on real samples.

    Pairs of +m/-m factors are summed explicitly to tail_factor*M and the
    rest of the tail is integrated in closed form; the Appendix-style
    Lambert-W residue bound (16/pi) W(sqrt(A) d / 2) + 8 pi^3/(A d^2) is
    reported as a z-independent cross-check.
    """
    if M < 100:
        raise ValueError("truncation must be at least 100")
    T = tail_factor * M
    m = np.arange(1, T + 1)
    b0 = np.log(4.0 * np.pi**2 / (A * d * d))
    beta = b0 + 2.0 * np.log(m)
    denom = (m * np.pi) ** 2 + beta * beta
    rows = []
    zs = np.atleast_1d(np.asarray(z_samples, dtype=float))
    for z in zs:
        paired = 1.0 + (2j * beta * z - z * z) / denom
        log_sum = np.sum(np.log(paired.astype(complex)))
        # integral of log(1 + (2 i z beta(t) - z^2)/(t pi)^2) ~ first order
        tail = (2j * z * (b0 + 2.0 * np.log(T) + 2.0) - z * z) / (np.pi**2 * T)
        remainder = 0.5 * (2.0 * abs(z) * beta[-1] + z * z) / denom[-1]
        log_abs_L = np.real(log_sum + tail)
        # the closed-form tail linearizes log(1 + u) in the first neglected
        # factor; remainder ~ |u| at m = T must be small in absolute terms
        # as well as against log|L|
        if remainder > 0.5 or remainder > 0.01 * max(abs(log_abs_L), 0.1):
            raise TruncationTooSmall(
                f"tail remainder {remainder:.2e} too large at z={z}; "
                "increase the truncation")
        rows.append((float(abs(z)), float(np.exp(log_abs_L))))
    vals = np.array([v for _, v in rows])
    rel_var = float((vals.max() - vals.min()) / vals.mean()) if vals.size else 0.0
    bound = float((16.0 / np.pi) * lambert_w(0.5 * np.sqrt(A) * d).real
                  + 8.0 * np.pi**3 / (A * d * d))
    return LConstancyResult(rows=rows, relative_variation=rel_var,
                            residue_bound=bound, truncation=M, tail_terms=T)
