"""Separable non-smooth penalties and their exact proximal maps.

A penalty is a :class:`Regularizer` record; ``reg_value`` evaluates it and
``prox_apply`` evaluates

    prox_{eta r}[x] = argmin_y  1/(2 eta) ||y - x||^2 + r(y)

through coordinate-wise closed forms.  All penalties here are non-convex
except the soft-threshold baseline, so the prox is a set in general; where
the minimizer is not unique the tie is broken toward the sparser point
(zero) or, for the quantization penalty, toward the larger grid point.
The chosen rule is stated on each prox.

``prox_oracle_1d`` is an independent brute-force minimizer (dense grid
plus one golden-section polish).  It shares no code with the closed forms
and is what the self-test suite certifies them against.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Regularizer",
    "l0",
    "l1",
    "l_half",
    "l_two_thirds",
    "l0_ball",
    "quantization",
    "reg_value",
    "prox_apply",
    "project_grid",
    "prox_oracle_1d",
    "prox_objective_1d",
    "KINDS",
]

KINDS = ("l0", "l1", "lhalf", "ltwothirds", "l0ball", "quant")


@dataclass(frozen=True)
class Regularizer:
    """One separable penalty: a kind tag plus its parameters.

    ``lam`` weights the penalty kinds, ``k`` is the cardinality cap of the
    hard sparsity ball, ``grid`` is the sorted quantization alphabet.
    Build instances through the module-level constructors below.
    """

    kind: str
    lam: float = 0.0
    k: int = 0
    grid: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown regularizer kind {self.kind!r}")
        if self.kind in ("l0", "l1", "lhalf", "ltwothirds", "quant"):
            if not np.isfinite(self.lam) or self.lam < 0:
                raise ValueError(f"lam must be finite and >= 0, got {self.lam}")
        if self.kind == "l0ball":
            if self.k < 1:
                raise ValueError(f"cardinality cap k must be >= 1, got {self.k}")
        if self.kind == "quant":
            g = np.asarray(self.grid, dtype=float)
            if g.size < 1 or not np.all(np.isfinite(g)):
                raise ValueError("quantization grid must hold at least one finite level")
            if g.size > 1 and not np.all(np.diff(g) > 0):
                raise ValueError("quantization grid must be strictly increasing")


def l0(lam):
    """lam * ||x||_0 (count of nonzeros)."""
    return Regularizer("l0", lam=float(lam))


def l1(lam):
    """lam * ||x||_1, the convex baseline."""
    return Regularizer("l1", lam=float(lam))


def l_half(lam):
    """lam * sum_i |x_i|^(1/2)."""
    return Regularizer("lhalf", lam=float(lam))


def l_two_thirds(lam):
    """lam * sum_i |x_i|^(2/3)."""
    return Regularizer("ltwothirds", lam=float(lam))


def l0_ball(k):
    """Indicator of {x : ||x||_0 <= k}; prox is the hard-threshold projection."""
    return Regularizer("l0ball", k=int(k))


def quantization(grid=(-1.0, 1.0), lam=1.0):
    """(lam/2) * ||x - P(x)||^2 where P rounds onto ``grid``."""
    return Regularizer("quant", lam=float(lam), grid=tuple(float(g) for g in grid))


# -- values -----------------------------------------------------------------


def project_grid(x, grid):
    """Round each coordinate to the nearest grid level, half toward the larger."""
    g = np.asarray(grid, dtype=float)
    x = np.asarray(x, dtype=float)
    mids = 0.5 * (g[:-1] + g[1:])
    # side="right": a coordinate sitting exactly on a cell boundary goes up
    return g[np.searchsorted(mids, x, side="right")]


def penalty_1d(r, x):
    """Per-coordinate penalty values, vectorized.

    Every kind except the sparsity ball is separable; this is the probe
    the brute-force oracle wants (one array call instead of thousands of
    scalar ones).
    """
    x = np.asarray(x, dtype=float)
    if r.kind == "l0":
        return r.lam * (x != 0.0).astype(float)
    if r.kind == "l1":
        return r.lam * np.abs(x)
    if r.kind == "lhalf":
        return r.lam * np.sqrt(np.abs(x))
    if r.kind == "ltwothirds":
        return r.lam * np.abs(x) ** (2.0 / 3.0)
    if r.kind == "quant":
        return 0.5 * r.lam * (x - project_grid(x, r.grid)) ** 2
    raise ValueError(f"{r.kind} is not coordinate-separable")


def _value_l0(r, x):
    return r.lam * np.count_nonzero(x)


def _value_l1(r, x):
    return r.lam * np.sum(np.abs(x))


def _value_lhalf(r, x):
    return r.lam * np.sum(np.sqrt(np.abs(x)))


def _value_ltwothirds(r, x):
    return r.lam * np.sum(np.abs(x) ** (2.0 / 3.0))


def _value_l0ball(r, x):
    return 0.0 if np.count_nonzero(x) <= r.k else np.inf


def _value_quant(r, x):
    d = np.asarray(x, dtype=float) - project_grid(x, r.grid)
    return 0.5 * r.lam * float(np.dot(d, d))


_VALUE = {
    "l0": _value_l0,
    "l1": _value_l1,
    "lhalf": _value_lhalf,
    "ltwothirds": _value_ltwothirds,
    "l0ball": _value_l0ball,
    "quant": _value_quant,
}


def reg_value(r, x):
    """Evaluate the penalty at ``x``.

    Returns IEEE +inf outside the domain of the sparsity-ball indicator;
    finite values everywhere else.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return float(_VALUE[r.kind](r, x))


# -- brute-force oracle ------------------------------------------------------


def prox_objective_1d(y, x, eta, r_scalar):
    """The scalar prox objective 1/(2 eta) (y - x)^2 + r(y)."""
    return 0.5 / eta * (y - x) ** 2 + r_scalar(y)


_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def prox_oracle_1d(x, eta, r_scalar, lo=-12.0, hi=12.0, n_grid=4001, refine=True):
    """Brute-force scalar prox: dense grid search plus one local polish.

    ``r_scalar`` is any penalty callable; it is probed with a full grid
    array first and called point-wise only if that fails, so vectorized
    penalties evaluate fast.  The grid point nearest zero is snapped to
    exact zero, otherwise cusps and jumps at the origin would never be
    sampled.  The golden-section polish around the best grid point is
    kept only when it actually lowers the objective, so the result is
    never worse than the best grid point even for discontinuous
    penalties.  Returns the argmin; the caller evaluates the objective.
    """
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ValueError("need finite lo < hi")
    if n_grid < 1000:
        raise ValueError("n_grid must be at least 1000")
    if not (np.isfinite(eta) and eta > 0):
        raise ValueError("eta must be finite and > 0")

    grid = np.linspace(lo, hi, n_grid)
    if lo < 0.0 < hi:
        grid[np.argmin(np.abs(grid))] = 0.0
    try:
        rv = np.asarray(r_scalar(grid), dtype=float)
        if rv.shape != grid.shape:
            raise ValueError
    except Exception:
        rv = np.asarray([float(r_scalar(g)) for g in grid])
    vals = 0.5 / eta * (grid - x) ** 2 + rv
    i = int(np.argmin(vals))
    best_y, best_v = float(grid[i]), float(vals[i])

    if refine:
        a = float(grid[max(i - 1, 0)])
        b = float(grid[min(i + 1, n_grid - 1)])
        c, d = b - _INVPHI * (b - a), a + _INVPHI * (b - a)
        fc = prox_objective_1d(c, x, eta, r_scalar)
        fd = prox_objective_1d(d, x, eta, r_scalar)
        for _ in range(70):
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - _INVPHI * (b - a)
                fc = prox_objective_1d(c, x, eta, r_scalar)
            else:
                a, c, fc = c, d, fd
                d = a + _INVPHI * (b - a)
                fd = prox_objective_1d(d, x, eta, r_scalar)
            y, v = (c, fc) if fc < fd else (d, fd)
            if v < best_v:
                best_y, best_v = float(y), float(v)
    return best_y


# -- closed-form proxes -------------------------------------------------------


def _prox_l0(r, z, eta):
    # keep iff z^2 > 2 eta lam; the tie z^2 == 2 eta lam goes to zero
    return np.where(z * z > 2.0 * eta * r.lam, z, 0.0)


def _prox_l1(r, z, eta):
    t = eta * r.lam
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


def _prox_lhalf(r, z, eta):
    mu = eta * r.lam
    if mu == 0.0:
        return z.copy()
    y = np.zeros_like(z)
    az = np.abs(z)
    act = az > 1.5 * mu ** (2.0 / 3.0)
    if np.any(act):
        za = z[act]
        phi = np.arccos(-(3.0**1.5 / 4.0) * mu * np.abs(za) ** -1.5)
        cand = (2.0 / 3.0) * za * (1.0 + np.cos((2.0 / 3.0) * phi))
        # candidate vs zero decided on the objective itself: robust at the
        # activation boundary, and exact ties stay sparse
        keep = (
            0.5 / eta * (cand - za) ** 2 + r.lam * np.sqrt(np.abs(cand))
            < 0.5 / eta * za**2
        )
        y[act] = np.where(keep, cand, 0.0)
    return y


def _prox_ltwothirds(r, z, eta):
    beta = 2.0 * eta * r.lam
    if beta == 0.0:
        return z.copy()
    az = np.abs(z)
    # Stationarity with y = u^3 (u > 0) gives the quartic
    #     u^4 - |z| u + beta/3 = 0 ,
    # whose resolvent cubic w^3 - (4 beta / 3) w - z^2 = 0 has exactly one
    # positive root.  From it the quartic factors and the largest real root
    # is the nonzero prox candidate.
    q3 = (4.0 * beta / 9.0) ** 3
    rr = 0.5 * az * az
    disc = rr * rr - q3
    w = np.empty_like(az)
    one = disc >= 0.0
    if np.any(one):
        s = np.sqrt(disc[one])
        # rr - s cancels catastrophically when q3 << rr^2; use
        # (rr + s)(rr - s) = q3 instead
        p = np.cbrt(rr[one] + s)
        w[one] = p + np.where(p > 0.0, np.cbrt(q3) / np.where(p > 0.0, p, 1.0), 0.0)
    if np.any(~one):
        qs = np.sqrt(4.0 * beta / 9.0)
        w[~one] = 2.0 * qs * np.cos(np.arccos(rr[~one] / qs**3) / 3.0)
    w = np.maximum(w, 0.0)
    a = np.sqrt(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        quad = 2.0 * az / a - w  # discriminant of u^2 - a u + (w - |z|/a)/2... reduced
        root = np.where(quad > 0.0, np.sqrt(np.maximum(quad, 0.0)), np.nan)
        cand = (0.125 * (a + root) ** 3) * np.sign(z)  # ((a + sqrt)/2)^3, signed
    ok = np.isfinite(cand)
    y = np.zeros_like(z)
    if np.any(ok):
        co, zo = cand[ok], z[ok]
        better = (
            0.5 / eta * (co - zo) ** 2 + r.lam * np.abs(co) ** (2.0 / 3.0)
            < 0.5 / eta * zo**2
        )
        y[ok] = np.where(better, co, 0.0)
    return y


def _prox_l0ball(r, z, eta):
    if r.k >= z.size:
        return z.copy()
    # stable sort on -|z|: among equal magnitudes the lowest index survives
    order = np.argsort(-np.abs(z), kind="stable")
    y = np.zeros_like(z)
    keep = order[: r.k]
    y[keep] = z[keep]
    return y


def _prox_quant(r, z, eta):
    g = np.asarray(r.grid, dtype=float)
    t = eta * r.lam
    if t == 0.0:
        return z.copy()
    shrink = 1.0 / (1.0 + t)
    if g.size == 1:
        return (z + t * g[0]) * shrink
    # Only the cells of the two grid levels bracketing z can hold the
    # minimizer: per cell the objective is a convex parabola with vertex
    # pulled from z toward that cell's level, so candidates are the two
    # clamped vertices plus the shared cell boundary.
    pos = np.searchsorted(g, z)
    lo = np.clip(pos - 1, 0, g.size - 1)
    hi = np.clip(pos, 0, g.size - 1)
    lo = np.where(hi == lo, np.maximum(lo - 1, 0), lo)
    mid = 0.5 * (g[lo] + g[hi])
    mid_lo = np.where(lo > 0, 0.5 * (g[np.maximum(lo - 1, 0)] + g[lo]), -np.inf)
    mid_hi = np.where(hi < g.size - 1, 0.5 * (g[hi] + g[np.minimum(hi + 1, g.size - 1)]), np.inf)
    y_lo = np.clip((z + t * g[lo]) * shrink, mid_lo, mid)
    y_hi = np.clip((z + t * g[hi]) * shrink, mid, mid_hi)

    def h(y):
        return 0.5 / eta * (y - z) ** 2 + 0.5 * r.lam * (y - project_grid(y, g)) ** 2

    cands = np.stack([y_lo, mid, y_hi])
    vals = np.stack([h(y_lo), h(mid), h(y_hi)])
    return np.take_along_axis(cands, np.argmin(vals, axis=0)[None, :], axis=0)[0]


_PROX = {
    "l0": _prox_l0,
    "l1": _prox_l1,
    "lhalf": _prox_lhalf,
    "ltwothirds": _prox_ltwothirds,
    "l0ball": _prox_l0ball,
    "quant": _prox_quant,
}


def prox_apply(r, x, eta):
    """Exact prox of ``eta * r`` at ``x``.  Pure: ``x`` is never modified.

    Every output coordinate lies between the input coordinate and zero
    (between the input and a grid level for the quantization penalty),
    and the prox objective at the output never exceeds its value at the
    input.
    """
    if not (np.isfinite(eta) and eta > 0):
        raise ValueError("eta must be finite and > 0")
    z = np.atleast_1d(np.asarray(x, dtype=float))
    if z.ndim != 1:
        raise ValueError("x must be one-dimensional")
    out = _PROX[r.kind](r, z, eta)
    return np.asarray(out, dtype=float)
