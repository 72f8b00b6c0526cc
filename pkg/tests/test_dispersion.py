"""Unit tests for material models and their singular points."""

import numpy as np
import pytest

from stratmodes.dispersion import (
    Material,
    branch_points,
    eval_n,
    high_freq_coefficient,
    pole_frequencies,
)
from stratmodes.errors import NotDispersive, PoleEvaluation


def test_constant_material_roundtrip():
    mat = Material.constant(1.5)
    assert not mat.is_dispersive
    assert eval_n(mat, 2.0 + 1.0j) == 1.5
    assert Material.from_config(mat.to_config()) == mat
    lossy = Material.constant(2.0 + 0.3j)
    cfg = lossy.to_config()
    assert cfg["n"] == [2.0, 0.3]
    assert Material.from_config(cfg) == lossy


def test_constant_material_validation():
    with pytest.raises(ValueError):
        Material.constant(0.0)
    with pytest.raises(ValueError):
        Material.constant(1.5 - 0.1j)  # gainy constant medium
    with pytest.raises(ValueError):
        Material(kind="weird")


def test_lorentz_validation():
    with pytest.raises(ValueError):
        Material.lorentz(f=-1.0, omega0=1.0)
    with pytest.raises(ValueError):
        Material.lorentz(f=0.25, omega0=0.0)
    with pytest.raises(ValueError):
        Material.lorentz(f=0.25, omega0=1.0, gamma=-1e-3)


def test_lorentz_index_matches_formula():
    mat = Material.lorentz(f=0.25, omega0=1.0, gamma=1e-3)
    w = 0.7 - 0.2j
    expected = np.sqrt(1.0 + 0.25 / (1.0 - w * w - 1e-3j * w))
    assert abs(eval_n(mat, w) - expected) < 1e-15
    arr = eval_n(mat, np.array([0.5, 0.7 - 0.2j]))
    assert arr.shape == (2,)
    assert abs(arr[1] - expected) < 1e-15


def test_pole_and_branch_points():
    mat = Material.lorentz(f=0.25, omega0=1.0, gamma=1e-3)
    p_plus, p_minus = pole_frequencies(mat)
    for p in (p_plus, p_minus):
        assert abs(1.0 - p * p - 1e-3j * p) < 1e-12
    b_plus, _ = branch_points(mat)
    # n^2 vanishes at a branch point
    n2 = 1.0 + 0.25 / (1.0 - b_plus * b_plus - 1e-3j * b_plus)
    assert abs(n2) < 1e-12
    assert p_plus.imag == pytest.approx(-0.5e-3)


def test_pole_evaluation_raises():
    mat = Material.lorentz(f=0.25, omega0=1.0, gamma=0.0)
    with pytest.raises(PoleEvaluation):
        eval_n(mat, 1.0)


def test_nondispersive_queries_raise():
    mat = Material.constant(1.5)
    for fn in (pole_frequencies, branch_points, high_freq_coefficient):
        with pytest.raises(NotDispersive):
            fn(mat)


def test_high_freq_coefficient():
    mat = Material.lorentz(f=0.25, omega0=1.0, gamma=1e-3)
    assert high_freq_coefficient(mat) == 0.25
    # n ~ 1 - A/(2 w^2) at large real frequency
    w = 300.0
    approx = 1.0 - 0.25 / (2.0 * w * w)
    assert abs(eval_n(mat, w) - approx) < 1e-8
