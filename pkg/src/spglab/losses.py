"""Smooth losses over sparse designs, and the assembled objective.

Two per-sample losses are provided, both non-convex in general position:

* ``nlls``  --  squared deviation of the sigmoid response,
  (b_i - sig(a_i.x))^2, for binary labels b_i in {0, 1};
* ``tls``   --  smoothed robust regression, (alpha/2) log(1 + rho^2/alpha)
  with rho = y_i - a_i.x.  Averaging the per-sample values reproduces the
  (1/2n) sum alpha log(1 + rho^2/alpha) convention.

``Objective`` bundles data + loss + penalty with the certified smoothness
constant and a noise-variance estimate; solvers consume it.

Batch and full gradients share one accumulation path: a weighted
CSC-transpose product that adds sample contributions in ascending row
order, so identical index multisets reproduce bit-identical gradients.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.special import expit

from .regularizers import Regularizer, reg_value

__all__ = [
    "SmoothLoss",
    "nlls",
    "tls",
    "Objective",
    "build_objective",
    "weighted_value_grad",
    "sample_loss_grad",
    "full_gradient",
    "full_objective",
    "loss_value",
    "finite_diff_grad",
    "estimate_smoothness",
    "estimate_noise_variance",
    "population_grad_variance",
    "NLLS_LINK_CURVATURE",
    "TLS_LINK_CURVATURE",
]

# Tight upper bound on |d^2/dz^2 (b - sig(z))^2| over b in {0,1}:
# the dense-grid maximum 0.154052... rounded up to three significant
# figures.  (0.25 is the cruder cap from |sig'| <= 1/4 alone.)  The test
# suite re-derives this value.
NLLS_LINK_CURVATURE = 0.155

# |d^2/drho^2 (alpha/2) log(1 + rho^2/alpha)| = |1 - rho^2/alpha| / (1 + rho^2/alpha)^2 <= 1,
# attained at rho = 0, for every alpha > 0.
TLS_LINK_CURVATURE = 1.0


@dataclass(frozen=True)
class SmoothLoss:
    """Per-sample smooth loss: kind tag plus the tls scale parameter."""

    kind: str
    alpha: float = 0.0

    def __post_init__(self):
        if self.kind not in ("nlls", "tls"):
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if self.kind == "tls" and not (np.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"tls needs alpha > 0, got {self.alpha}")


def nlls():
    """Sigmoid squared loss for {0,1} labels."""
    return SmoothLoss("nlls")


def tls(alpha):
    """Smoothed robust regression loss with scale ``alpha``."""
    return SmoothLoss("tls", alpha=float(alpha))


def default_tls_alpha(n):
    """The customary scale sqrt(10 n) for an n-sample regression."""
    return math.sqrt(10.0 * n)


def _link(loss, z, y):
    """Per-sample value and d/dz slope at margins ``z`` with labels ``y``."""
    if loss.kind == "nlls":
        s = expit(z)
        e = y - s
        return e * e, -2.0 * e * s * (1.0 - s)
    rho = y - z
    t = rho * rho / loss.alpha
    return 0.5 * loss.alpha * np.log1p(t), -rho / (1.0 + t)


def weighted_value_grad(data, loss, x, rows=None, weights=None):
    """Weighted mean loss value and gradient over selected rows.

    ``weights`` already carry the 1/batch-size (or multiplicity/batch-size)
    factor; by default all rows enter with weight 1/n, which is the full
    objective.  The gradient is accumulated column-by-column of the
    transposed slice, i.e. in ascending sample order, which pins the
    floating-point result for a given index multiset.
    """
    A = data.X if rows is None else data.X[rows]
    yv = data.y if rows is None else data.y[rows]
    if weights is None:
        weights = np.full(A.shape[0], 1.0 / data.n)
    z = A.dot(x)
    vals, slopes = _link(loss, z, yv)
    value = float(np.dot(weights, vals))
    grad = A.T.dot(weights * slopes)
    return value, np.asarray(grad).ravel()


@dataclass
class Objective:
    """F(x) = mean_i loss_i(x) + r(x), with certified constants attached.

    ``L`` must upper-bound every per-sample gradient Lipschitz constant;
    ``sigma2`` estimates the single-draw gradient noise at the start
    point and feeds the accuracy-driven schedules.
    """

    data: object
    loss: SmoothLoss
    reg: Regularizer
    L: float
    sigma2: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.L) and self.L > 0):
            raise ValueError(f"L must be finite and > 0, got {self.L}")
        if self.loss.kind == "nlls" and not np.all(np.isin(self.data.y, (0.0, 1.0))):
            raise ValueError("nlls needs labels in {0,1}; run binarize_labels first")


def build_objective(data, loss, reg, n_probe=4096, rng=None, x0=None):
    """Assemble an Objective, estimating L and, optionally, sigma^2.

    The noise probe runs at ``x0`` (zeros by default) with ``n_probe``
    uniform draws from a fixed stream unless ``rng`` is given; pass
    n_probe=0 to skip it and leave sigma2 at 0.
    """
    from .rng import make_rng

    L = estimate_smoothness(loss, data)
    obj = Objective(data=data, loss=loss, reg=reg, L=L)
    if n_probe:
        if rng is None:
            rng = make_rng(0)
        x = np.zeros(data.d) if x0 is None else np.asarray(x0, dtype=float)
        obj.sigma2 = estimate_noise_variance(data, loss, x, n_probe, rng)
    return obj


def loss_value(obj, x):
    """Smooth part f(x) alone (mean per-sample loss)."""
    value, _ = weighted_value_grad(obj.data, obj.loss, np.asarray(x, dtype=float))
    return value


def full_objective(obj, x):
    """F(x) = f(x) + r(x)."""
    x = np.asarray(x, dtype=float)
    return loss_value(obj, x) + reg_value(obj.reg, x)


def full_gradient(obj, x):
    """Exact gradient of the smooth part at ``x``."""
    _, grad = weighted_value_grad(obj.data, obj.loss, np.asarray(x, dtype=float))
    return grad


def sample_loss_grad(obj, x, i):
    """Value and gradient of sample ``i`` alone.

    The gradient comes back as a 1 x d sparse row whose support equals
    the sample's feature support.
    """
    if not 0 <= i < obj.data.n:
        raise IndexError(f"sample index {i} outside [0, {obj.data.n})")
    row = obj.data.X[i]
    z = float(row.dot(np.asarray(x, dtype=float))[0])
    val, slope = _link(obj.loss, np.array([z]), obj.data.y[i : i + 1])
    return float(val[0]), row.multiply(float(slope[0])).tocsr()


def finite_diff_grad(obj, x, h=1e-6):
    """Central-difference gradient of the smooth part; the checking oracle.

    Deliberately dumb and slow: 2d full objective sweeps, no shared code
    with the analytic gradients.
    """
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        g[j] = (loss_value(obj, x + e) - loss_value(obj, x - e)) / (2.0 * h)
    return g


def estimate_smoothness(loss, data):
    """Certified Lipschitz constant of every per-sample gradient.

    For a linear-link loss, hess f_i = link''(z) a_i a_i^T, so
    L = B * max_i ||a_i||^2 with B the frozen curvature cap of the link.
    An all-zero design gets the floor 1e-12 (with a warning), keeping
    step sizes finite.
    """
    sq = np.asarray(data.X.multiply(data.X).sum(axis=1)).ravel()
    b = NLLS_LINK_CURVATURE if loss.kind == "nlls" else TLS_LINK_CURVATURE
    L = b * float(sq.max())
    if L <= 0.0:
        warnings.warn("all-zero design: smoothness floor 1e-12 applied", stacklevel=2)
        L = 1e-12
    return L


def _sample_sq_deviations(data, loss, x):
    """||grad f_i(x) - grad f(x)||^2 for every i, computed in closed form."""
    x = np.asarray(x, dtype=float)
    z = data.X.dot(x)
    _, slopes = _link(loss, z, data.y)
    g = data.X.T.dot(np.full(data.n, 1.0 / data.n) * slopes)
    g = np.asarray(g).ravel()
    row_sq = np.asarray(data.X.multiply(data.X).sum(axis=1)).ravel()
    cross = data.X.dot(g)
    dev = slopes * slopes * row_sq - 2.0 * slopes * cross + float(np.dot(g, g))
    return np.maximum(dev, 0.0), g


def population_grad_variance(data, loss, x):
    """Exact single-draw gradient variance (1/n) sum_i ||grad f_i - grad f||^2."""
    dev, _ = _sample_sq_deviations(data, loss, x)
    return float(dev.mean())


def estimate_noise_variance(data, loss, x, n_probe, rng):
    """Empirical single-draw gradient variance from ``n_probe`` uniform draws.

    Deviations are taken around the exact full gradient, normalized by
    1/(n_probe - 1).  A single-sample dataset reports exactly zero.
    """
    if n_probe < 2:
        raise ValueError(f"n_probe must be >= 2, got {n_probe}")
    dev, _ = _sample_sq_deviations(data, loss, x)
    draws = rng.integers(0, data.n, size=n_probe)
    return float(dev[draws].sum() / (n_probe - 1))
