"""Unit tests for the contour search, polynomial roots, and densities."""

import numpy as np
import pytest

from stratmodes.dispersion import Material, pole_frequencies
from stratmodes.errors import ContourThroughZero, DegenerateRatio
from stratmodes.modefinder import (
    SearchRegion,
    count_zeros,
    exclusion_points,
    find_modes,
    langer_parameters,
    mode_function,
    mode_residual,
    quarterwave_modes,
    quarterwave_stack,
)
from stratmodes.transfer import Stack, wolter_recursion

VAC = Material.constant(1.0)
SLAB = Stack(VAC, ((Material.constant(1.5), 1.0),), VAC)


def slab_mode(k):
    return (k * np.pi - 1j * np.log(5.0)) / 1.5


def test_search_region_validation():
    with pytest.raises(ValueError):
        SearchRegion(1.0, 0.0, -1.0, 0.0)
    with pytest.raises(ValueError):
        SearchRegion(0.0, 1.0, -1.0, 0.0, exclusion_radius=-1.0)


def test_find_modes_slab_small_window():
    region = SearchRegion(0.1, 4.5, -2.0, -0.5)
    ms = find_modes(SLAB, region, seed=0)
    assert len(ms) == 2
    got = sorted(ms.omegas, key=lambda w: w.real)
    for k, w in zip((1, 2), got):
        assert abs(w - slab_mode(k)) < 1e-12
        assert mode_residual(SLAB, w) < 1e-12
    assert ms.stack_fingerprint == SLAB.fingerprint()


def test_find_modes_seed_independent():
    region = SearchRegion(0.1, 4.5, -2.0, -0.5)
    sets = [sorted(find_modes(SLAB, region, seed=s).omegas,
                   key=lambda w: w.real) for s in (0, 1, 17)]
    for other in sets[1:]:
        assert np.allclose(sets[0], other, atol=1e-12)


def test_count_zeros_matches_find_modes():
    region = SearchRegion(0.1, 8.6, -2.0, -0.5)
    assert count_zeros(SLAB, region) == find_modes(SLAB, region).total_multiplicity


def test_count_zeros_empty_region():
    assert count_zeros(SLAB, SearchRegion(0.1, 1.5, -0.5, -0.1)) == 0


def test_contour_through_zero_raises():
    w1 = slab_mode(1)
    region = SearchRegion(w1.real - 0.5, w1.real + 0.5, w1.imag, w1.imag + 0.5)
    with pytest.raises(ContourThroughZero):
        count_zeros(SLAB, region)


def test_mode_function_analytic_across_index_cut():
    """H must be continuous where the principal sqrt of n^2 flips sign."""
    mat = Material.lorentz(f=0.25, omega0=1.0, gamma=1e-3)
    stack = Stack(VAC, ((mat, 1.0),), VAC)
    cut_im = -0.5 * 1e-3  # the cut locus Im omega = -gamma/2
    eps = 1e-9
    for re in (0.97, 0.99, 1.02):
        above = mode_function(stack, complex(re, cut_im + eps))
        below = mode_function(stack, complex(re, cut_im - eps))
        assert abs(above - below) < 1e-4 * max(abs(above), abs(below))


def test_exclusion_points_are_singularities():
    mat = Material.lorentz(f=0.25, omega0=1.0, gamma=1e-3)
    stack = Stack(VAC, ((mat, 1.0),), VAC)
    pts = exclusion_points(stack)
    assert len(pts) == 4  # two poles + two branch points
    for p in pole_frequencies(mat):
        assert any(abs(p - q) < 1e-12 for q in pts)
    assert exclusion_points(SLAB) == []


def test_quarterwave_polynomial_roots():
    ms = quarterwave_modes(1.5, 8)
    assert len(ms) == 8
    assert all(m.method == "exact-polynomial" for m in ms)
    assert max(m.residual for m in ms) < 1e-10
    # period shift adds k pi to the real part
    shifted = quarterwave_modes(1.5, 8, period_index_range=(1,))
    base = sorted(ms, key=lambda m: m.omega.real)
    up = sorted(shifted, key=lambda m: m.omega.real)
    for a, b in zip(base, up):
        assert abs(b.omega - (a.omega + np.pi)) < 1e-10


def test_quarterwave_cross_check_with_contour_search():
    stack = quarterwave_stack(1.5, 8)
    ms_poly = quarterwave_modes(1.5, 8)
    targets = sorted((m.omega for m in ms_poly if m.omega.imag < 0
                      and 0.05 < m.omega.real < np.pi - 0.05),
                     key=lambda w: w.real)
    region = SearchRegion(0.05, np.pi - 0.05, -0.3, -0.01)
    found = sorted(find_modes(stack, region, seed=0).omegas,
                   key=lambda w: w.real)
    assert len(found) == len(targets)
    for a, b in zip(targets, found):
        assert abs(a - b) < 1e-9


def test_quarterwave_validation():
    with pytest.raises(DegenerateRatio):
        quarterwave_modes(1.0, 8)
    with pytest.raises(ValueError):
        quarterwave_modes(1.5, 7)
    with pytest.raises(ValueError):
        quarterwave_modes(1.5, 0)


def test_langer_parameters():
    assert langer_parameters(quarterwave_stack(1.5, 8)) == (16.0, 9)
    B, J1 = langer_parameters(SLAB)
    assert B == pytest.approx(3.0)
    assert J1 == 2


def test_mode_residual_rescaled():
    w = slab_mode(3)
    assert mode_residual(SLAB, w) < 1e-12
    assert mode_residual(SLAB, w + 0.3) > 1e-3


def test_raw_recursion_is_analytic_numerator():
    """mode_function without rescale equals N times the index factor."""
    w = 2.0 - 0.8j
    raw = wolter_recursion(SLAB, w, rescale=False)
    assert abs(mode_function(SLAB, w) - raw.N) < 1e-12 * abs(raw.N)
