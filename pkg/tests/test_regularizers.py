"""Proximal operators against the grid-search oracle and known closed forms."""

import numpy as np
import pytest

from spglab.regularizers import (
    KINDS,
    l0,
    l0_ball,
    l1,
    l_half,
    l_two_thirds,
    penalty_1d,
    project_grid,
    prox_apply,
    prox_objective_1d,
    prox_oracle_1d,
    quantization,
    reg_value,
)

SEPARABLE = {
    "l0": lambda lam: l0(lam),
    "l1": lambda lam: l1(lam),
    "lhalf": lambda lam: l_half(lam),
    "ltwothirds": lambda lam: l_two_thirds(lam),
}


def scalar_penalty(r):
    return lambda y: float(penalty_1d(r, np.array([y]))[0])


@pytest.mark.parametrize("kind", sorted(SEPARABLE))
def test_prox_matches_oracle(kind):
    rng = np.random.default_rng(7)
    for _ in range(40):
        lam = 10.0 ** rng.uniform(-3, 0.3)
        eta = 10.0 ** rng.uniform(-2, 0.7)
        r = SEPARABLE[kind](lam)
        z = rng.normal(0.0, 3.0, size=6)
        out = prox_apply(r, z, eta)
        pen = scalar_penalty(r)
        for zi, yi in zip(z, out):
            star = prox_oracle_1d(zi, eta, pen)
            got = prox_objective_1d(yi, zi, eta, pen)
            best = prox_objective_1d(star, zi, eta, pen)
            assert got <= best + 1e-8


def test_quant_prox_matches_candidate_scan():
    rng = np.random.default_rng(11)
    grid = (-1.0, -0.25, 0.5, 1.0)
    r = quantization(grid, lam=0.8)
    z = rng.normal(0.0, 2.0, size=8)
    eta = 0.37
    out = prox_apply(r, z, eta)
    pen = scalar_penalty(r)
    # per coordinate the minimizer is the best blend toward one grid point,
    # possibly clamped at a cell boundary
    t = eta * r.lam
    for zi, yi in zip(z, out):
        cands = [(zi + t * g) / (1.0 + t) for g in grid]
        cands += [0.5 * (a + b) for a, b in zip(grid, grid[1:])]
        best = min(prox_objective_1d(c, zi, eta, pen) for c in cands)
        assert prox_objective_1d(yi, zi, eta, pen) <= best + 1e-12


def test_l0_hard_threshold_values():
    out = prox_apply(l0(1.0), np.array([3.0, 1.0, -0.5]), 1.0)
    assert np.array_equal(out, [3.0, 0.0, 0.0])


def test_l0_tie_zeroes():
    # |z| exactly at sqrt(2*eta*lam) goes to zero, either choice is optimal
    out = prox_apply(l0(1.0), np.array([1.0, -1.0, 1.0 + 1e-9]), 0.5)
    assert out[0] == 0.0 and out[1] == 0.0 and out[2] != 0.0


def test_l1_soft_threshold():
    out = prox_apply(l1(0.5), np.array([2.0, -0.2, 0.5]), 1.0)
    assert np.allclose(out, [1.5, 0.0, 0.0])


def test_lhalf_large_input_passthrough_region():
    # far above the threshold the prox root is close to z
    r = l_half(0.01)
    z = np.array([50.0])
    out = prox_apply(r, z, 0.1)
    assert 49.9 < out[0] < 50.0


def test_l0ball_keeps_k_largest():
    out = prox_apply(l0_ball(2), np.array([0.5, -3.0, 1.0, 0.1]), 1.0)
    assert np.array_equal(out, [0.0, -3.0, 1.0, 0.0])


def test_l0ball_tie_prefers_lowest_index():
    out = prox_apply(l0_ball(2), np.array([1.0, -1.0, 2.0]), 0.7)
    assert np.array_equal(out, [1.0, 0.0, 2.0])


def test_l0ball_k_at_least_dimension_is_identity():
    z = np.array([0.3, -0.2])
    assert np.array_equal(prox_apply(l0_ball(5), z, 1.0), z)


def test_project_grid_rounds_half_up():
    assert project_grid(np.array([0.3]), (-1.0, 1.0))[0] == 1.0
    assert project_grid(np.array([0.0]), (-1.0, 1.0))[0] == 1.0
    assert project_grid(np.array([-0.001]), (-1.0, 1.0))[0] == -1.0
    assert np.array_equal(project_grid(np.array([-1.0, 1.0]), (-1.0, 1.0)), [-1.0, 1.0])


def test_reg_value_agrees_with_penalty_1d():
    rng = np.random.default_rng(3)
    x = rng.normal(size=9)
    for kind, make in SEPARABLE.items():
        r = make(0.7)
        assert reg_value(r, x) == pytest.approx(penalty_1d(r, x).sum(), rel=1e-12)
    r = quantization((-1.0, 1.0), 2.0)
    assert reg_value(r, x) == pytest.approx(penalty_1d(r, x).sum(), rel=1e-12)


def test_penalty_1d_rejects_l0ball():
    with pytest.raises(ValueError):
        penalty_1d(l0_ball(2), np.array([1.0, 2.0]))


def test_reg_value_l0ball_indicator():
    r = l0_ball(1)
    assert reg_value(r, np.array([1.0, 0.0])) == 0.0
    assert reg_value(r, np.array([1.0, 2.0])) == np.inf


def test_prox_validation():
    with pytest.raises(ValueError):
        prox_apply(l0(1.0), np.ones((2, 2)), 1.0)
    with pytest.raises(ValueError):
        prox_apply(l0(1.0), np.ones(2), 0.0)
    with pytest.raises(ValueError):
        l0(-1.0)
    with pytest.raises(ValueError):
        l0_ball(0)
    with pytest.raises(ValueError):
        quantization((1.0, -1.0), 1.0)


def test_prox_does_not_mutate_input():
    z = np.array([3.0, 1.0, -0.5])
    keep = z.copy()
    prox_apply(l0(1.0), z, 1.0)
    assert np.array_equal(z, keep)


def test_oracle_snaps_small_results_to_zero():
    y = prox_oracle_1d(0.9, 0.5, scalar_penalty(l0(1.0)))
    assert y == 0.0


def test_oracle_refine_never_worse_than_grid():
    rng = np.random.default_rng(4)
    pen = scalar_penalty(l_two_thirds(0.3))
    for _ in range(20):
        z = rng.normal(0.0, 4.0)
        eta = 10.0 ** rng.uniform(-1.5, 0.5)
        coarse = prox_oracle_1d(z, eta, pen, refine=False)
        fine = prox_oracle_1d(z, eta, pen, refine=True)
        assert prox_objective_1d(fine, z, eta, pen) <= prox_objective_1d(coarse, z, eta, pen) + 1e-15


def test_kind_list_is_stable():
    assert KINDS == ("l0", "l1", "lhalf", "ltwothirds", "l0ball", "quant")
