"""Built-in agreement suites: prox vs. brute-force oracle, gradients vs.
central differences.

These run from the CLI so a build can certify its own closed forms.
``prox_fn`` is injectable so the suite itself can be tested by feeding
it a deliberately wrong operator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import synth_classification, synth_regression
from .losses import build_objective, finite_diff_grad, full_gradient, nlls, tls
from .regularizers import (
    KINDS,
    Regularizer,
    l0_ball,
    penalty_1d,
    prox_apply,
    prox_objective_1d,
    prox_oracle_1d,
    quantization,
)
from .rng import make_rng

__all__ = ["prox_selftest", "grad_selftest", "SuiteReport", "format_report"]

PROX_TOL = 1e-8
GRAD_TOL = 1e-5


@dataclass
class SuiteRow:
    name: str
    cases: int
    worst: float
    tol: float
    passed: bool
    note: str = ""


@dataclass
class SuiteReport:
    suite: str
    rows: list

    @property
    def passed(self):
        return all(r.passed for r in self.rows)


def _random_reg(kind, rng):
    lam = float(10.0 ** rng.uniform(-4, 0.5))
    if kind == "l0ball":
        return l0_ball(int(rng.integers(1, 4)))
    if kind == "quant":
        k = int(rng.integers(2, 6))
        pts = np.sort(rng.uniform(-3, 3, size=k))
        while np.min(np.diff(pts)) < 1e-3:
            pts = np.sort(rng.uniform(-3, 3, size=k))
        return quantization(grid=tuple(float(p) for p in pts), lam=lam)
    return Regularizer(kind=kind, lam=lam)


def prox_selftest(n_cases=1000, seed=0, prox_fn=prox_apply, kinds=KINDS):
    """Each kind: randomized 1-D cases, prox objective vs. oracle objective.

    The check is one-sided: the closed form must do at least as well as
    the global grid search (within PROX_TOL), never worse.  Scalar kinds
    are probed one coordinate at a time; the sparsity ball needs a real
    vector, so it draws small vectors and compares against exhaustive
    support enumeration through the same oracle objective.
    """
    rng = make_rng(seed)
    rows = []
    for kind in kinds:
        worst = 0.0
        for _ in range(n_cases):
            reg = _random_reg(kind, rng)
            eta = float(10.0 ** rng.uniform(-2.5, 1.0))
            if kind == "l0ball":
                d = int(rng.integers(reg.k, reg.k + 4))
                z = rng.normal(0.0, 3.0, size=d)
                y = prox_fn(reg, z, eta)
                best = _l0ball_oracle(z, reg.k)
                got = float(np.sum((y - z) ** 2))
                worst = max(worst, got - best)
                continue
            z = float(rng.normal(0.0, 3.0))
            r1 = _scalar_value(reg)
            y = prox_fn(reg, np.array([z]), eta)[0]
            y_star = prox_oracle_1d(z, eta, r1)
            got = prox_objective_1d(y, z, eta, r1)
            ref = prox_objective_1d(y_star, z, eta, r1)
            worst = max(worst, got - ref)
        rows.append(SuiteRow(kind, n_cases, worst, PROX_TOL, worst <= PROX_TOL))
    rows.append(_guard_row(prox_fn))
    return SuiteReport("prox-oracle agreement", rows)


def _scalar_value(reg):
    def r1(v):
        v = np.asarray(v, dtype=float)
        if v.ndim == 0:
            return float(penalty_1d(reg, v[None])[0])
        return penalty_1d(reg, v)

    return r1


def _l0ball_oracle(z, k):
    # exhaustive over supports: best squared distance keeping at most k entries
    from itertools import combinations

    d = len(z)
    best = float(np.sum(z * z))
    for size in range(1, min(k, d) + 1):
        for sup in combinations(range(d), size):
            keep = np.zeros(d)
            keep[list(sup)] = z[list(sup)]
            best = min(best, float(np.sum((keep - z) ** 2)))
    return best


def _guard_row(prox_fn):
    # malformed inputs must be rejected, not absorbed
    bad = 0
    try:
        prox_fn(Regularizer(kind="l1", lam=0.1), np.zeros((2, 2)), 1.0)
        bad += 1
    except ValueError:
        pass
    try:
        prox_fn(Regularizer(kind="l1", lam=0.1), np.zeros(3), 0.0)
        bad += 1
    except ValueError:
        pass
    return SuiteRow("input guards", 2, float(bad), 0.0, bad == 0, note="rejects 2-D x and eta=0")


def grad_selftest(n_cases=100, seed=0):
    """Analytic gradients vs. central differences on random small problems."""
    rng = make_rng(seed)
    rows = []
    for kind in ("nlls", "tls"):
        worst = 0.0
        for _ in range(n_cases):
            n = int(rng.integers(5, 30))
            d = int(rng.integers(2, 12))
            seed_i = int(rng.integers(0, 2**31))
            if kind == "nlls":
                data = synth_classification(n, d, row_nnz=min(4, d), noise=0.2, seed=seed_i)
                loss = nlls()
            else:
                data = synth_regression(n, d, row_nnz=min(4, d), noise=0.3, seed=seed_i)
                loss = tls(float(10.0 ** rng.uniform(0, 2)))
            obj = build_objective(data, loss, Regularizer(kind="l1", lam=0.0), n_probe=0)
            x = rng.normal(0.0, 1.0, size=d)
            ga = full_gradient(obj, x)
            gf = finite_diff_grad(obj, x)
            rel = float(np.linalg.norm(ga - gf) / max(np.linalg.norm(ga), 1e-12))
            worst = max(worst, rel)
        rows.append(SuiteRow(kind, n_cases, worst, GRAD_TOL, worst <= GRAD_TOL))
    return SuiteReport("gradient agreement", rows)


def format_report(report):
    lines = [f"suite: {report.suite}"]
    lines.append(f"{'case':<18}{'n':>6}{'worst':>14}{'tol':>10}  result")
    for r in report.rows:
        status = "pass" if r.passed else "FAIL"
        note = f"  ({r.note})" if r.note else ""
        lines.append(f"{r.name:<18}{r.cases:>6}{r.worst:>14.3e}{r.tol:>10.0e}  {status}{note}")
    lines.append(f"overall: {'pass' if report.passed else 'FAIL'}")
    return "\n".join(lines)
