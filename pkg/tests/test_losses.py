import numpy as np
import pytest
from scipy import sparse
from scipy.special import expit

from spglab.datasets import Dataset, synth_classification, synth_regression
from spglab.losses import (
    NLLS_LINK_CURVATURE,
    TLS_LINK_CURVATURE,
    build_objective,
    default_tls_alpha,
    estimate_noise_variance,
    estimate_smoothness,
    finite_diff_grad,
    full_gradient,
    full_objective,
    loss_value,
    nlls,
    population_grad_variance,
    sample_loss_grad,
    tls,
)
from spglab.regularizers import l0, l1
from spglab.rng import make_rng


def small_problem(loss, seed=0):
    if loss.kind == "nlls":
        data = synth_classification(40, 8, row_nnz=4, noise=0.1, seed=seed)
    else:
        data = synth_regression(40, 8, row_nnz=4, noise=0.3, seed=seed)
    return data, build_objective(data, loss, l1(0.01))


@pytest.mark.parametrize("loss", [nlls(), tls(2.0), tls(25.0)])
def test_gradient_matches_finite_difference(loss):
    rng = np.random.default_rng(5)
    _, obj = small_problem(loss)
    for _ in range(5):
        x = rng.normal(0.0, 1.5, size=8)
        ga = full_gradient(obj, x)
        gn = finite_diff_grad(obj, x)
        assert np.linalg.norm(ga - gn) / max(np.linalg.norm(ga), 1e-12) < 1e-5


def test_sample_gradients_average_to_full():
    _, obj = small_problem(nlls())
    x = np.linspace(-1, 1, 8)
    acc = np.zeros(8)
    vals = 0.0
    for i in range(40):
        v, g = sample_loss_grad(obj, x, i)
        acc += np.asarray(g.todense()).ravel()
        vals += v
    assert np.allclose(acc / 40, full_gradient(obj, x), atol=1e-12)
    assert vals / 40 == pytest.approx(loss_value(obj, x), abs=1e-12)


def test_full_objective_adds_penalty():
    _, obj = small_problem(nlls())
    x = np.full(8, 0.5)
    assert full_objective(obj, x) == pytest.approx(loss_value(obj, x) + 0.01 * np.abs(x).sum())


@pytest.mark.parametrize("loss", [nlls(), tls(3.0)])
def test_smoothness_constant_witnesses(loss):
    data, obj = small_problem(loss)
    rng = np.random.default_rng(9)
    for _ in range(30):
        x = rng.normal(0.0, 2.0, size=8)
        y = x + rng.normal(0.0, 0.5, size=8)
        lhs = np.linalg.norm(full_gradient(obj, x) - full_gradient(obj, y))
        assert lhs <= obj.L * np.linalg.norm(x - y) * (1 + 1e-9)


def test_nlls_link_curvature_constant():
    # max |d^2/dz^2 (b - sig(z))^2| over z and b in {0,1}; the constant
    # must cover the dense-grid maximum and stay within 2% of it
    z = np.linspace(-12, 12, 200001)
    s = expit(z)
    worst = 0.0
    for b in (0.0, 1.0):
        second = 2 * (s * (1 - s)) ** 2 + 2 * (s - b) * s * (1 - s) * (1 - 2 * s)
        worst = max(worst, np.abs(second).max())
    assert worst <= NLLS_LINK_CURVATURE <= worst * 1.02


def test_tls_link_curvature_is_one():
    rho = np.linspace(-30, 30, 100001)
    for alpha in (0.5, 4.0, 100.0):
        second = np.abs(1 - rho**2 / alpha) / (1 + rho**2 / alpha) ** 2
        assert second.max() <= TLS_LINK_CURVATURE + 1e-12
    assert np.abs(1 - 0.0) / 1.0 == TLS_LINK_CURVATURE


def test_smoothness_uses_worst_row():
    row = np.zeros((3, 4))
    row[0] = [2.0, 0, 0, 0]
    data = Dataset(sparse.csr_matrix(row), np.array([0.0, 1.0, 1.0]), "classification")
    L = estimate_smoothness(nlls(), data)
    assert L == pytest.approx(NLLS_LINK_CURVATURE * 4.0)


def test_zero_design_floor_warns():
    data = Dataset(sparse.csr_matrix((3, 4)), np.array([0.0, 1.0, 1.0]), "classification")
    with pytest.warns(UserWarning, match="floor"):
        L = estimate_smoothness(nlls(), data)
    assert L == 1e-12


def test_default_tls_alpha():
    assert default_tls_alpha(10) == pytest.approx(np.sqrt(100.0))
    assert default_tls_alpha(1000) == pytest.approx(100.0)


def test_noise_probe_tracks_population_variance():
    data, _ = small_problem(nlls(), seed=2)
    x = np.full(8, 0.3)
    pop = population_grad_variance(data, nlls(), x)
    est = estimate_noise_variance(data, nlls(), x, 20000, make_rng(0))
    assert est == pytest.approx(pop, rel=0.05)


def test_population_variance_zero_when_rows_identical():
    row = np.tile([1.0, -2.0, 0.5], (6, 1))
    data = Dataset(sparse.csr_matrix(row), np.ones(6), "classification")
    assert population_grad_variance(data, nlls(), np.array([0.1, 0.2, -0.3])) == pytest.approx(0.0, abs=1e-12)


def test_nlls_rejects_unbinarized_labels():
    data = synth_regression(20, 5, row_nnz=3, noise=0.2, seed=0)
    with pytest.raises(ValueError, match="binarize"):
        build_objective(data, nlls(), l0(1e-4))


def test_loss_validation():
    with pytest.raises(ValueError):
        tls(0.0)
    with pytest.raises(ValueError):
        tls(-3.0)


def test_build_objective_probe_is_deterministic():
    data, _ = small_problem(nlls())
    a = build_objective(data, nlls(), l0(1e-4))
    b = build_objective(data, nlls(), l0(1e-4))
    assert a.sigma2 == b.sigma2
    assert a.L == b.L
