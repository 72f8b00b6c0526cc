"""Natural-mode search: argument-principle subdivision plus the exact
quarter-wave polynomial reduction.

Modes are zeros of the shared denominator N(omega).  For stacks with
Lorentz layers N inherits square-root branch cuts from n_j(omega), but N
is odd under every branch flip n_j -> -n_j (the flip swaps Z and N up to
sign through the recursion).  The search therefore tracks the mode
function

    H(omega) = N(omega) * prod_j n_j(omega)^sigma,   sigma = -1 (TE), +1 (TM)

over the dispersive media j, which is single valued and analytic across
the cuts and nonzero at the branch points.  Only the Lorentz poles
(essential singularities of H) need exclusion disks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Tuple

import numpy as np

from .dispersion import Material, branch_points, eval_n, pole_frequencies
from .errors import (
    ContourThroughZero,
    DegenerateRatio,
    MaxDepthExceeded,
    NoConvergence,
)
from .transfer import TE, Stack, wolter_recursion

DEFAULT_RESIDUAL_TOL = 1e-9


@dataclass
class SearchRegion:
    """Rectangle in the complex frequency plane with search tolerances."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    max_depth: int = 60
    newton_tol: float = 1e-10
    exclusion_radius: float | None = None  # None: max(1e-3*Gamma, 1e-8)

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("region bounds must satisfy re_min < re_max, im_min < im_max")
        if self.exclusion_radius is not None and self.exclusion_radius <= 0:
            raise ValueError("exclusion_radius must be > 0")

    @property
    def corners(self) -> tuple:
        return (self.re_min, self.re_max, self.im_min, self.im_max)


@dataclass(frozen=True)
class Mode:
    omega: complex
    multiplicity: int = 1
    method: str = "contour-newton"
    residual: float = 0.0


@dataclass
class ModeSet:
    """Deduplicated, sorted natural frequencies with provenance tags."""

    modes: list
    stack_fingerprint: str = ""

    def __len__(self):
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([m.omega for m in self.modes], dtype=complex)

    @property
    def total_multiplicity(self) -> int:
        return sum(m.multiplicity for m in self.modes)


def _dispersive_factor(stack: Stack, omega):
    """prod n_j^sigma over dispersive media; 1 for non-dispersive stacks."""
    sigma = -1 if stack.polarization == TE else 1
    out = 1.0
    for mat in stack.media:
        if mat.is_dispersive:
            out = out * eval_n(mat, omega) ** sigma
    return out


def mode_function(stack: Stack, omega, rescale: bool = False):
    """H(omega): analytic continuation of N across the dispersive cuts.

    rescale=True divides by positive reals (safe magnitudes, same phase
    and zero set, no longer analytic); rescale=False is the raw analytic
    value used for Newton iteration.
    """
    res = wolter_recursion(stack, omega, rescale=rescale)
    return res.N * _dispersive_factor(stack, omega)


def mode_residual(stack: Stack, omega):
    """Scale-free closeness to a mode: |N|/max(1, |Z|) of the rescaled pair."""
    res = wolter_recursion(stack, omega, rescale=True)
    return np.abs(res.N) / np.maximum(1.0, np.abs(res.Z))


def residual_floor(stack: Stack, omega) -> float:
    """Smallest residual double precision can certify at this frequency.

    Near a Lorentz pole the denominator w0^2 - w^2 - i*G*w is formed by
    cancellation, which amplifies rounding into a phase error of the
    layer exponentials; the floor estimates that phase error with a
    safety factor of 100.
    """
    w = complex(omega)
    eps = np.finfo(float).eps
    amp = 0.0
    for mat, d in stack.layers:
        if not mat.is_dispersive:
            continue
        den = mat.omega0**2 - w * w - 1j * mat.gamma * w
        n2 = 1.0 + mat.f / den
        delta = abs(np.sqrt(n2) * d * w / stack.c)
        den_rel = eps * (mat.omega0**2 + abs(w) ** 2) / abs(den)
        amp += delta * abs(n2 - 1.0) / (2.0 * abs(n2)) * den_rel
    return 100.0 * (eps + amp)


def exclusion_points(stack: Stack) -> list:
    """Lorentz poles and branch points that contours must keep clear of."""
    pts = []
    for mat in stack.media:
        if mat.is_dispersive:
            pts.extend(pole_frequencies(mat))
            pts.extend(branch_points(mat))
    return pts


def default_exclusion_radius(stack: Stack) -> float:
    gmax = max((m.gamma for m in stack.media if m.is_dispersive), default=0.0)
    return max(1e-3 * gmax, 1e-8)


def _boundary_points(corners, t):
    """Map t in [0, 4) to the rectangle boundary, counterclockwise."""
    re0, re1, im0, im1 = corners
    t = np.asarray(t, dtype=float)
    side = np.floor(t).astype(int) % 4
    frac = t - np.floor(t)
    w, h = re1 - re0, im1 - im0
    pts = np.empty(t.shape, dtype=complex)
    pts[side == 0] = re0 + w * frac[side == 0] + 1j * im0
    pts[side == 1] = re1 + 1j * (im0 + h * frac[side == 1])
    pts[side == 2] = re1 - w * frac[side == 2] + 1j * im1
    pts[side == 3] = re0 + 1j * (im1 - h * frac[side == 3])
    return pts


def _winding(f_and_resid: Callable, corners, points_per_side: int = 16,
             max_points: int = 400_000, contour_tol: float = 1e-13) -> int:
    """Winding number of H around 0 along the rectangle boundary.

    Segments are bisected until every phase step is below pi/2 AND the
    layer phases delta_j (computed without mod-2pi folding, hence
    alias-free) change by less than 0.5 per step.  The delta criterion
    guards against phase aliasing when e^{i delta} whips around between
    samples.  delta_j flips sign where the principal branch of n_j
    crosses its cut while H itself stays continuous, so the step is
    measured as min(|da|, |a+b|) to tolerate the flip.
    """
    t = np.linspace(0.0, 4.0, 4 * points_per_side + 1)
    vals, resid, aux = f_and_resid(_boundary_points(corners, t))
    vals = np.atleast_1d(vals)
    if np.min(np.atleast_1d(resid)) < contour_tol:
        raise ContourThroughZero("contour passes through a zero of N")
    while True:
        dphi = np.angle(vals[1:] / vals[:-1])
        bad = np.abs(dphi) >= 0.5 * np.pi
        if aux is not None:
            da = np.abs(aux[1:] - aux[:-1])
            sa = np.abs(aux[1:] + aux[:-1])
            bad = bad | np.any(np.minimum(da, sa) >= 0.5, axis=1)
        if not np.any(bad):
            break
        if np.any((t[1:] - t[:-1])[bad] < 1e-10):
            raise ContourThroughZero("phase step will not settle: zero on contour")
        mids = 0.5 * (t[:-1][bad] + t[1:][bad])
        if t.size + mids.size > max_points:
            raise ContourThroughZero("contour refinement budget exhausted")
        mv, mr, ma = f_and_resid(_boundary_points(corners, mids))
        if np.min(np.atleast_1d(mr)) < contour_tol:
            raise ContourThroughZero("contour passes through a zero of N")
        t = np.concatenate([t, mids])
        vals = np.concatenate([vals, np.atleast_1d(mv)])
        order = np.argsort(t)
        t, vals = t[order], vals[order]
        if aux is not None:
            aux = np.concatenate([aux, ma], axis=0)[order]
    total = np.sum(np.angle(vals[1:] / vals[:-1]))
    return int(round(total / (2.0 * np.pi)))


def _stack_evaluator(stack: Stack) -> Callable:
    from .transfer import layer_params

    def f(omega):
        w = np.atleast_1d(np.asarray(omega, dtype=complex))
        res = wolter_recursion(stack, w, rescale=True)
        H = res.N * _dispersive_factor(stack, w)
        resid = np.abs(res.N) / np.maximum(1.0, np.abs(res.Z))
        p = layer_params(stack, w)
        aux = np.stack([np.asarray(d) for d in p.delta], axis=-1)
        return H, resid, aux

    return f


def count_zeros(stack: Stack, region) -> int:
    """Number of modes strictly inside a rectangle, by the argument principle.

    The contour must keep clear of Lorentz poles and branch points; a
    ContourThroughZero signals the caller to shrink or shift the box.
    """
    corners = region.corners if isinstance(region, SearchRegion) else tuple(region)
    return _winding(_stack_evaluator(stack), corners)


def _newton_polish(stack: Stack, w0: complex, h: float, tol: float,
                   max_iter: int = 60):
    """Newton on the raw analytic H with central-difference derivative."""
    w = complex(w0)
    for _ in range(max_iter):
        vals = mode_function(stack, np.array([w - h, w, w + h]), rescale=False)
        deriv = (vals[2] - vals[0]) / (2.0 * h)
        if deriv == 0 or not np.isfinite(deriv):
            return None
        step = vals[1] / deriv
        w = w - step
        if not np.isfinite(w):
            return None
        if abs(step) < tol * max(1.0, abs(w)):
            return w
    return None


def find_modes(stack: Stack, region: SearchRegion, seed: int = 0) -> ModeSet:
    """Locate all modes in the region by quadrisection plus Newton polish.

    Split lines are drawn to keep clear of Lorentz poles and of the
    zeros themselves, and each subdivision is validated: the four child
    winding counts must add up to the parent's, otherwise new split
    lines are drawn.  This makes the search conservative (no zero can be
    lost or double counted across cell boundaries).  Modes within a few
    exclusion radii of a pole are not reported (use the near-resonance
    closed forms there).
    """
    rng = np.random.default_rng(seed)
    r_excl = region.exclusion_radius
    if r_excl is None:
        r_excl = default_exclusion_radius(stack)
    excl = exclusion_points(stack)
    evaluator = _stack_evaluator(stack)
    tol = region.newton_tol

    accepted: list = []
    unresolved: list = []
    top_count = None

    def singular_inside(corners):
        re0, re1, im0, im1 = corners
        return [p for p in excl
                if (re0 - r_excl < p.real < re1 + r_excl
                    and im0 - r_excl < p.imag < im1 + r_excl)]

    def pick_split(lo, hi, avoid):
        span = hi - lo
        for _ in range(50):
            s = lo + span * (0.5 + 0.2 * (rng.random() - 0.5))
            if all(abs(s - a) > r_excl for a in avoid):
                return s
        return lo + 0.5 * span

    def subdivide(corners, k_parent):
        """Split into four counted children; re-pick lines on failure."""
        re0, re1, im0, im1 = corners
        sing = singular_inside(corners)
        for _ in range(8):
            rs = pick_split(re0, re1, [p.real for p in sing])
            is_ = pick_split(im0, im1, [p.imag for p in sing])
            children = ((re0, rs, im0, is_), (rs, re1, im0, is_),
                        (re0, rs, is_, im1), (rs, re1, is_, im1))
            counts = []
            try:
                for ch in children:
                    if singular_inside(ch):
                        counts.append(None)
                    else:
                        counts.append(_winding(evaluator, ch))
            except ContourThroughZero:
                continue  # a split line grazed a zero; redraw
            if (k_parent is not None and None not in counts
                    and sum(counts) != k_parent):
                continue  # a zero sat too close to a line; redraw
            return list(zip(children, counts))
        return None

    # (corners, depth, winding count or None-if-unknown/singular)
    stack_cells = [(region.corners, 0, None)]
    first = True
    while stack_cells:
        corners, depth, k = stack_cells.pop()
        re0, re1, im0, im1 = corners
        w, h = re1 - re0, im1 - im0
        sing = singular_inside(corners)
        if sing:
            if max(w, h) <= 4.0 * r_excl:
                continue  # pole confined to an exclusion-sized cell
            parts = subdivide(corners, None)
            if parts is None:
                unresolved.append((corners, depth, "singular-split"))
            else:
                for ch, kc in parts:
                    stack_cells.append((ch, depth + 1, kc))
            first = False
            continue
        if k is None:
            try:
                k = _winding(evaluator, corners)
            except ContourThroughZero:
                unresolved.append((corners, depth, "contour"))
                continue
        if first:
            top_count = k
            first = False
        if k == 0:
            continue
        polish = k == 1 or depth >= region.max_depth
        if polish:
            w0 = complex(0.5 * (re0 + re1), 0.5 * (im0 + im1))
            # keep the difference step well above the spacing of doubles
            hstep = max(1e-6 * max(w, h),
                        1e4 * np.finfo(float).eps * max(1.0, abs(w0)))
            root = _newton_polish(stack, w0, hstep, tol)
            ok = False
            if root is not None:
                res = float(mode_residual(stack, root))
                # strictly inside: a polished root in a neighboring cell
                # would otherwise shadow this cell's own root via dedup
                inside = (re0 <= root.real <= re1
                          and im0 <= root.imag <= im1)
                res_tol = DEFAULT_RESIDUAL_TOL if k == 1 else 1e-6
                res_tol = max(res_tol, residual_floor(stack, root))
                if inside and res < res_tol:
                    accepted.append(Mode(root, k, "contour-newton", res))
                    ok = True
            if ok:
                continue
            if depth >= region.max_depth:
                unresolved.append((corners, depth, "max-depth"))
                continue
        parts = subdivide(corners, k)
        if parts is None:
            unresolved.append((corners, depth, "split"))
        else:
            for ch, kc in parts:
                stack_cells.append((ch, depth + 1, kc))

    # The blind confinement of a pole can swallow modes out to a few
    # exclusion radii, and which ones depends on the jittered splits; a
    # deterministic reporting cutoff keeps results seed-stable and
    # mirror-symmetric.
    if excl:
        accepted = [m for m in accepted
                    if min(abs(m.omega - p) for p in excl) > 8.0 * r_excl]
    modes = _dedup(accepted, 10.0 * tol)
    result = ModeSet(modes, stack.fingerprint())
    if unresolved:
        raise MaxDepthExceeded(
            f"{len(unresolved)} cells unresolved at max depth",
            unresolved_cells=unresolved, partial=result)
    if top_count is not None and result.total_multiplicity != top_count:
        raise NoConvergence(
            f"found {result.total_multiplicity} modes but the region's "
            f"winding count is {top_count}")
    return result


def _dedup(modes: list, radius: float) -> list:
    out: list = []
    for m in sorted(modes, key=lambda m: (m.omega.real, m.omega.imag, m.method)):
        if out and abs(m.omega - out[-1].omega) < radius:
            if m.multiplicity > out[-1].multiplicity:
                out[-1] = m
            continue
        out.append(m)
    return out


def quarterwave_stack(n_ratio: float, num_layers: int, c: float = 1.0) -> Stack:
    """Air | (HL)^(N/2) | H-substrate with unit optical thickness per layer.

    Every layer satisfies n*d = 1, so delta = omega/c for all layers and
    the quarter-wave condition holds at every frequency scale.
    """
    hi, lo = Material.constant(n_ratio), Material.constant(1.0)
    layers = []
    for j in range(num_layers):
        mat = hi if j % 2 == 0 else lo
        layers.append((mat, 1.0 / mat.n.real))
    return Stack(Material.constant(1.0), tuple(layers), hi, c=c)


def quarterwave_modes(n_ratio: float, num_layers: int,
                      period_index_range: Sequence[int] = (0,)) -> ModeSet:
    """Exact delta-plane modes of a quarter-wave stack via its polynomial.

    With a common phase delta for every layer, e^{i(m-1)delta} * N is a
    polynomial of degree N (the layer count) in x = e^{2i delta}.  Roots
    x_j map to delta = -(i/2) Log x_j folded into Re delta in [0, pi),
    then shifted by k*pi per requested period index k (the paper's
    degree-N statement uses the half-step variable; the zero set is the
    same).
    """
    if num_layers <= 0 or num_layers % 2 != 0:
        raise ValueError("num_layers must be a positive even integer")
    if n_ratio <= 0:
        raise ValueError("n_ratio must be > 0")
    if n_ratio == 1.0:
        raise DegenerateRatio("index ratio 1 collapses the polynomial")
    g = [1.0]
    for j in range(num_layers):
        g.append(n_ratio if j % 2 == 0 else 1.0)
    g.append(n_ratio)  # high-index substrate keeps the leading coefficient
    # Ascending-power coefficient recursion for P (numerator) and Q
    # (denominator): adding interface m multiplies the x-power of the
    # P-path by one.
    P = np.array([g[1] - g[0]], dtype=float)
    Q = np.array([g[1] + g[0]], dtype=float)
    for m in range(2, len(g)):
        a, b = g[m] - g[m - 1], g[m] + g[m - 1]
        xP = np.concatenate([[0.0], P])
        P_new = a * np.concatenate([Q, [0.0]]) + b * xP
        Q_new = b * np.concatenate([Q, [0.0]]) + a * xP
        P, Q = P_new, Q_new
    roots = np.roots(Q[::-1])
    scale = np.array([np.sum(np.abs(Q) * np.abs(x) ** np.arange(Q.size))
                      for x in roots])
    resid = np.abs(np.polyval(Q[::-1], roots)) / np.maximum(scale, 1.0)
    modes = []
    for x, r in zip(roots, resid):
        d0 = -0.5j * np.log(x)
        if d0.real < 0:
            d0 = d0 + np.pi
        for k in period_index_range:
            modes.append(Mode(complex(d0 + k * np.pi), 1, "exact-polynomial",
                              float(r)))
    return ModeSet(_dedup(modes, 1e-9), f"quarterwave:{n_ratio}:{num_layers}")


def langer_parameters(stack: Stack) -> Tuple[float, int]:
    """(B, J+1) of the expanded exponential sum of N for a real-index stack.

    B is the spread of the exponents 2*n_j*d_j/c and J+1 the number of
    distinct subset sums; mode counts in any Re-interval of length l lie
    within B*l/(2*pi) +/- (J+1).
    """
    taus = []
    for mat, d in stack.layers:
        if mat.is_dispersive:
            raise ValueError("Langer parameters apply to non-dispersive stacks")
        taus.append(2.0 * mat.n.real * d / stack.c)
    sums = {0.0}
    for tau in taus:
        sums = sums | {round(s + tau, 9) for s in sums}
    return float(sum(taus)), len(sums)
