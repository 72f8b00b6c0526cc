"""Unit tests for the approximate mode families and censuses."""

import numpy as np
import pytest

from stratmodes.analysis import (
    asymptotic_modes,
    cluster_census,
    near_resonance_modes_slab,
    no_modes_beyond,
    rarified_residual,
    two_layer_near_resonance,
)
from stratmodes.dispersion import Material, pole_frequencies
from stratmodes.modefinder import Mode, ModeSet
from stratmodes.transfer import Stack

VAC = Material.constant(1.0)
MAT = Material.lorentz(f=0.25, omega0=1.0, gamma=1e-3)


def test_near_resonance_roots_satisfy_quadratic():
    for fam in near_resonance_modes_slab(MAT, 1.0, (5, 12, 30)):
        w = fam.omega_approx
        mp2 = (fam.m * np.pi) ** 2
        lhs = (w * 1.0) ** 2 * 0.25
        rhs = mp2 * (1.0 - w * w - 1e-3j * w)
        assert abs(lhs - rhs) < 1e-9 * abs(rhs)
        assert w.imag < 0 and w.real > 0


def test_near_resonance_family_approaches_pole():
    pole = pole_frequencies(MAT)[0]
    fams = near_resonance_modes_slab(MAT, 1.0, range(5, 40))
    dists = [abs(f.omega_approx - pole) for f in fams]
    assert all(a > b for a, b in zip(dists, dists[1:]))
    assert all(f.pole == pole for f in fams)


def test_near_resonance_validation():
    with pytest.raises(ValueError):
        near_resonance_modes_slab(Material.constant(1.5), 1.0, (10,))
    with pytest.raises(ValueError):
        near_resonance_modes_slab(MAT, 1.0, (0,))


def test_two_layer_families():
    m2 = Material.lorentz(f=0.25, omega0=2.0, gamma=1e-3)
    stack = Stack(VAC, ((MAT, 1.0), (m2, 1.0)), VAC)
    second = two_layer_near_resonance(stack, "second", (10, 11))
    assert all(f.layer_index == 1 for f in second)
    assert all(abs(f.pole - pole_frequencies(m2)[0]) < 1e-12 for f in second)
    first = two_layer_near_resonance(stack, "first", (10, 11))
    assert all(f.layer_index == 0 for f in first)
    # the first-resonance family still clusters at the first pole
    p1 = pole_frequencies(MAT)[0]
    assert abs(first[0].omega_approx - p1) < 1e-3
    with pytest.raises(ValueError):
        two_layer_near_resonance(stack, "third", (10,))
    with pytest.raises(ValueError):
        two_layer_near_resonance(Stack(VAC, ((MAT, 1.0),), VAC), "first", (10,))


def test_asymptotic_modes_formula_and_guards():
    fam = asymptotic_modes(0.25, 1.0, [50])[0]
    expected = 50 * np.pi + 1j * np.log(4 * (50 * np.pi) ** 2 / 0.25)
    assert abs(fam.omega_m - expected) < 1e-12
    assert fam.rarified_residual == pytest.approx(
        rarified_residual(0.25, 1.0, fam.omega_m))
    with pytest.raises(ValueError):
        asymptotic_modes(0.25, 1.0, [0])
    with pytest.raises(ValueError):
        asymptotic_modes(0.25, 1.0, [5])
    with pytest.raises(ValueError):
        asymptotic_modes(-1.0, 1.0, [50])
    neg = asymptotic_modes(0.25, 1.0, [-50])[0]
    assert neg.omega_m.real < 0


def mode_set(omegas):
    modes = [Mode(omega=w, multiplicity=1, method="test", residual=0.0)
             for w in omegas]
    return ModeSet(modes=modes, stack_fingerprint="deadbeef00000000")


def test_cluster_census_counts_and_flags():
    pole = 1.0 - 0.0005j
    ws = [pole + r * np.exp(1j * 0.3) for r in (0.009, 0.015, 0.04, 0.09)]
    table = cluster_census(mode_set(ws), pole, [0.1, 0.05, 0.02, 0.01])
    counts = dict(table.rows)
    assert counts[0.01] == 1 and counts[0.02] == 2
    assert counts[0.05] == 3 and counts[0.1] == 4
    assert table.non_decreasing and table.strictly_increasing_top2


def test_cluster_census_empty_set():
    table = cluster_census(mode_set([]), 1.0 - 0.0005j, [0.1, 0.01])
    assert all(c == 0 for _, c in table.rows)
    assert table.non_decreasing and not table.strictly_increasing_top2


def test_no_modes_beyond_window():
    stack = Stack(VAC, ((MAT, 1.0),), VAC)
    re0, re1, im0, im1 = no_modes_beyond(stack)
    assert re0 == pytest.approx(1.01)
    assert re1 == pytest.approx(3.0)
    assert im0 < im1 <= 0.0
