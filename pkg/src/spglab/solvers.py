"""Proximal solvers, their certified rate formulas, and run traces.

Every solver minimizes F(x) = f(x) + r(x) through iterations of the form

    x_{t+1} in prox_{eta r}[x_t - eta g_t]

with eta = c/L and g_t supplied by the algorithm: the exact gradient
(``pgd``), a mini-batch draw (``mb_spg``), a recursive variance-reduced
estimate with periodic anchors (``spgr``), or the stagewise variant whose
anchor batches and epochs grow quadratically (``spgr_imb``).  A projected
plain-SGD heuristic (``heuristic_qsgd``) is included as the baseline for
the quantization experiments; it takes no prox step.

The reported stationarity measure is

    || grad f(x_{t+1}) - g_t - (x_{t+1} - x_t)/eta ||,

the norm of an exhibited element of the limiting subdifferential of F at
x_{t+1}.  It needs one exact gradient, so it is measured every
``residual_every`` iterations and excluded from the optimization
gradient-evaluation tally.

The returned iterate x_R uses a pre-registered uniform index R drawn
before the loop, so a single snapshot suffices; the lowest-residual
iterate and the final one are also retained.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .estimators import (
    BatchSchedule,
    batch_size_at,
    fixed_batch,
    minibatch_grad,
    recursive_finite_sum,
    recursive_online,
    sarah_anchor,
    sarah_step,
    stage_sizes,
    stagewise_batch,
)
from .losses import full_gradient, full_objective
from .regularizers import project_grid, prox_apply

__all__ = [
    "ConfigError",
    "SolverConfig",
    "TracePoint",
    "RunTrace",
    "BoundConstants",
    "bound_constants",
    "theoretical_bound",
    "fixed_batch_size",
    "minibatch_horizon",
    "recursive_online_plan",
    "recursive_finite_sum_plan",
    "stationarity_residual",
    "sample_output_index",
    "select_output",
    "run_pgd",
    "run_mb_spg",
    "run_spgr",
    "run_spgr_imb",
    "run_heuristic_qsgd",
    "RUNNERS",
    "ALGORITHMS",
    "DIVERGENCE_F",
]

DIVERGENCE_F = 1e12

ALGORITHMS = ("pgd", "mb_spg", "spgr", "spgr_imb", "heuristic_qsgd")

_DEFAULT_C = {
    "pgd": 0.9,
    "mb_spg": 0.45,
    "spgr": 0.3,
    "spgr_imb": 0.3,
    "heuristic_qsgd": 0.45,
}

# Open upper end of the admissible c range per algorithm.  The recursive
# methods' rate certificate needs c < 1/3 (the descent bookkeeping keeps
# theta = (1 - 3 eta L)/(2 eta) positive); the mini-batch bound needs
# c < 1/2; plain proximal descent needs c < 1.
_C_MAX = {"pgd": 1.0, "mb_spg": 0.5, "spgr": 1.0 / 3.0, "spgr_imb": 1.0 / 3.0}


class ConfigError(ValueError):
    """An inconsistent or incomplete solver configuration."""


@dataclass
class SolverConfig:
    """Run parameters for one solver.

    Exactly one of ``T`` (iteration budget) and ``eps`` (target accuracy,
    from which the horizon and batch plan are derived) must be set.
    ``c`` scales the step eta = c/L and defaults per algorithm; ``eta``
    overrides the step outright for ad-hoc experiments.  ``setting``
    selects online or finite_sum anchors for the recursive methods.
    """

    algorithm: str
    c: float | None = None
    T: int = 0
    eps: float = 0.0
    schedule: BatchSchedule | None = None
    setting: str = ""
    seed: int = 0
    residual_every: int = 10
    halve_every: int = 100
    replace: bool = True
    eta: float | None = None
    name: str = ""

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if (self.T > 0) == (self.eps > 0):
            raise ConfigError("set exactly one of T (budget) and eps (target accuracy)")
        if self.T < 0 or not np.isfinite(self.eps) or self.eps < 0:
            raise ConfigError(f"bad horizon/accuracy: T={self.T}, eps={self.eps}")
        if self.c is None:
            self.c = _DEFAULT_C[self.algorithm]
        cmax = _C_MAX.get(self.algorithm, math.inf)
        if not (0.0 < self.c < cmax) and not (self.algorithm == "heuristic_qsgd" and self.c > 0):
            raise ConfigError(
                f"{self.algorithm} needs c in (0, {cmax:g}), got {self.c}"
            )
        if self.eta is not None and not (np.isfinite(self.eta) and self.eta > 0):
            raise ConfigError(f"eta override must be > 0, got {self.eta}")
        if self.residual_every < 1:
            raise ConfigError(f"residual_every must be >= 1, got {self.residual_every}")
        if self.halve_every < 1:
            raise ConfigError(f"halve_every must be >= 1, got {self.halve_every}")
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")
        if self.setting not in ("", "online", "finite_sum"):
            raise ConfigError(f"setting must be online or finite_sum, got {self.setting!r}")


@dataclass
class TracePoint:
    """State after iteration ``t``: objective, tally, sparsity, residual."""

    t: int
    grad_evals: int
    F: float
    residual: float | None
    nnz: int
    wall_ms: float


@dataclass
class RunTrace:
    """Everything one run produced.  ``records[k]`` describes x_{k+1}."""

    algorithm: str
    seed: int
    c: float
    eta: float
    T: int
    R: int
    records: list[TracePoint] = field(default_factory=list)
    x_R: np.ndarray | None = None
    x_final: np.ndarray | None = None
    x_best: np.ndarray | None = None
    best_residual: float = math.inf
    anchor_iters: int = 0
    inner_iters: int = 0
    wall_time_s: float = 0.0
    diverged: bool = False

    @property
    def grad_evals(self):
        return self.records[-1].grad_evals if self.records else 0


# -- certified constants and rate formulas -----------------------------------


@dataclass(frozen=True)
class BoundConstants:
    """Constants the rate certificates are written in, for eta = c/L.

    ``c1``/``c2`` drive the mini-batch bound (finite only for c < 1/2);
    ``gamma``/``theta`` drive the recursive bounds (theta > 0 iff
    c < 1/3); ``pgd_factor`` scales the deterministic bound (c < 1).
    """

    c: float
    L: float
    eta: float
    c1: float
    c2: float
    gamma: float
    theta: float
    pgd_factor: float


def bound_constants(c, L):
    if not (0.0 < c and np.isfinite(c) and L > 0 and np.isfinite(L)):
        raise ConfigError(f"need c > 0 and L > 0, got c={c}, L={L}")
    eta = c / L
    c1 = (2.0 * c * (1.0 - 2.0 * c) + 2.0) / (c * (1.0 - 2.0 * c)) if c < 0.5 else math.nan
    c2 = (6.0 - 4.0 * c) / (1.0 - 2.0 * c) if c < 0.5 else math.nan
    gamma = 4.0 * L * L + 1.0 / (eta * eta) + 2.0 * L / eta
    theta = (1.0 - 3.0 * c) / (2.0 * eta)
    pgd_factor = 4.0 * (c * c + 1.0) / (eta * (1.0 - c)) if c < 1.0 else math.nan
    return BoundConstants(
        c=c, L=L, eta=eta, c1=c1, c2=c2, gamma=gamma, theta=theta, pgd_factor=pgd_factor
    )


def theoretical_bound(
    kind,
    consts,
    T,
    delta_ub,
    sigma2=None,
    m=None,
    s1=None,
    b=None,
    mean_grad_err2=None,
):
    """Evaluate the certified upper bound on the mean squared residual.

    kinds: ``pgd`` (deterministic), ``minibatch`` (pass either the mean
    gradient-error second moment directly or sigma2 with the fixed batch
    size m), ``recursive_online`` / ``recursive_finite_sum`` (anchor size
    s1 enters only online), ``stagewise_online`` / ``stagewise_finite_sum``
    (stage growth b enters only online).
    """
    if T < 1:
        raise ConfigError(f"T must be >= 1, got {T}")
    if delta_ub < 0:
        raise ConfigError(f"delta_ub must be >= 0, got {delta_ub}")
    k = consts
    if kind == "pgd":
        return k.pgd_factor * delta_ub / T
    if kind == "minibatch":
        if math.isnan(k.c1):
            raise ConfigError("minibatch bound needs c < 1/2")
        if mean_grad_err2 is None:
            if sigma2 is None or m is None:
                raise ConfigError("pass mean_grad_err2, or sigma2 with m")
            mean_grad_err2 = sigma2 / m
        return k.c1 * mean_grad_err2 + k.c2 * delta_ub / (k.eta * T)
    if k.theta <= 0:
        raise ConfigError("recursive bounds need c < 1/3")
    lead = (2.0 * k.theta + k.gamma * k.eta) * delta_ub / (k.eta * k.theta * T)
    if kind == "recursive_finite_sum" or kind == "stagewise_finite_sum":
        return lead
    if kind == "recursive_online":
        if sigma2 is None or s1 is None:
            raise ConfigError("online bound needs sigma2 and s1")
        return lead + (k.gamma + 4.0 * k.theta * k.L) * sigma2 / (2.0 * k.theta * k.L * s1)
    if kind == "stagewise_online":
        if sigma2 is None or b is None:
            raise ConfigError("stagewise online bound needs sigma2 and b")
        tail = (4.0 * k.theta * k.L + k.gamma) * sigma2
        tail *= 0.5 * math.log(2.0 * T / b) + 1.0
        return lead + tail / (2.0 * b * k.theta * k.L * T)
    raise ConfigError(f"unknown bound kind {kind!r}")


def fixed_batch_size(c, sigma2, eps):
    """Fixed mini-batch size certifying mean squared residual <= eps^2."""
    k = bound_constants(c, 1.0)
    if math.isnan(k.c1):
        raise ConfigError("fixed-batch planning needs c < 1/2")
    if eps <= 0:
        raise ConfigError(f"eps must be > 0, got {eps}")
    return max(1, math.ceil(2.0 * k.c1 * sigma2 / (eps * eps)))


def minibatch_horizon(c, L, delta_ub, eps):
    """Iteration budget certifying the mini-batch bound at accuracy eps."""
    k = bound_constants(c, L)
    if math.isnan(k.c2):
        raise ConfigError("horizon planning needs c < 1/2")
    if eps <= 0:
        raise ConfigError(f"eps must be > 0, got {eps}")
    return max(1, math.ceil(2.0 * k.c2 * delta_ub / (k.eta * eps * eps)))


def recursive_online_plan(c, L, sigma2, delta_ub, eps):
    """(schedule, T) certifying the online recursive bound at accuracy eps."""
    k = bound_constants(c, L)
    if k.theta <= 0:
        raise ConfigError("recursive planning needs c < 1/3")
    if eps <= 0:
        raise ConfigError(f"eps must be > 0, got {eps}")
    s1 = max(1, math.ceil((k.gamma + 4.0 * k.theta * L) * sigma2 / (k.theta * L * eps * eps)))
    T = max(
        1,
        math.ceil(
            2.0 * (2.0 * k.theta + k.gamma * k.eta) * delta_ub / (k.eta * k.theta * eps * eps)
        ),
    )
    return recursive_online(s1), T


def recursive_finite_sum_plan(c, L, n, delta_ub, eps):
    """(schedule, T) certifying the finite-sum recursive bound at accuracy eps."""
    k = bound_constants(c, L)
    if k.theta <= 0:
        raise ConfigError("recursive planning needs c < 1/3")
    if eps <= 0:
        raise ConfigError(f"eps must be > 0, got {eps}")
    T = max(
        1,
        math.ceil((2.0 * k.theta + k.gamma * k.eta) * delta_ub / (k.eta * k.theta * eps * eps)),
    )
    return recursive_finite_sum(n), T


# -- measurement --------------------------------------------------------------


def stationarity_residual(obj, x_prev, x_next, g, eta):
    """Norm of the exhibited subgradient element at x_next.

    Exactly the g that produced the prox step must be passed in,
    otherwise the returned vector is not a subgradient witness.
    """
    v = full_gradient(obj, x_next) - g - (np.asarray(x_next) - np.asarray(x_prev)) / eta
    return float(np.linalg.norm(v))


def sample_output_index(T, rng):
    """Pre-registered output index, uniform on {1, ..., T}."""
    if T < 1:
        raise ConfigError(f"T must be >= 1, got {T}")
    return int(rng.integers(1, T + 1))


def select_output(trace):
    """The uniformly selected iterate (x_R, R) of a finished run."""
    if trace.x_R is None:
        raise RuntimeError(
            f"run stopped before the pre-registered index R={trace.R}; no output iterate"
        )
    return trace.x_R, trace.R


# -- shared loop machinery -----------------------------------------------------


def _plan(obj, config):
    """Resolve (eta, T, schedule) from the config, deriving from eps if set."""
    n = obj.data.n
    c = config.c
    eta = config.eta if config.eta is not None else c / obj.L
    algo = config.algorithm
    schedule = config.schedule
    T = config.T

    if algo == "pgd":
        if config.eps > 0:
            raise ConfigError("pgd takes an explicit T, not an eps target")
        return eta, T, None

    if algo == "mb_spg":
        if config.eps > 0:
            delta = full_objective(obj, np.zeros(obj.data.d))
            schedule = fixed_batch(fixed_batch_size(c, obj.sigma2, config.eps))
            T = minibatch_horizon(c, obj.L, delta, config.eps)
        elif schedule is None:
            schedule = fixed_batch(1)
        if schedule.kind not in ("fixed", "increasing"):
            raise ConfigError(f"mb_spg needs a fixed or increasing schedule, got {schedule.kind}")
        return eta, T, schedule

    if algo == "spgr":
        setting = config.setting or (
            "online" if schedule is not None and schedule.kind == "recursive_online"
            else "finite_sum"
        )
        if config.eps > 0:
            delta = full_objective(obj, np.zeros(obj.data.d))
            if setting == "online":
                schedule, T = recursive_online_plan(c, obj.L, obj.sigma2, delta, config.eps)
            else:
                schedule, T = recursive_finite_sum_plan(c, obj.L, n, delta, config.eps)
        elif schedule is None:
            if setting == "online":
                raise ConfigError("online anchors need an explicit schedule or an eps target")
            schedule = recursive_finite_sum(n)
        want = "recursive_online" if setting == "online" else "recursive_finite_sum"
        if schedule.kind != want:
            raise ConfigError(f"setting {setting!r} conflicts with schedule {schedule.kind!r}")
        if setting == "finite_sum" and schedule.s1 != n:
            raise ConfigError(
                f"finite-sum anchors average all samples; schedule says s1={schedule.s1}, data has n={n}"
            )
        return eta, T, schedule

    if algo == "spgr_imb":
        if config.eps > 0:
            raise ConfigError("spgr_imb takes an explicit T, not an eps target")
        if schedule is None:
            schedule = stagewise_batch(1)
        if schedule.kind != "stagewise":
            raise ConfigError(f"spgr_imb needs a stagewise schedule, got {schedule.kind}")
        return eta, T, schedule

    # heuristic_qsgd
    if config.eps > 0:
        raise ConfigError("heuristic_qsgd takes an explicit T, not an eps target")
    if obj.reg.kind != "quant":
        raise ConfigError("heuristic_qsgd projects onto a grid; use a quantization penalty")
    if schedule is None:
        schedule = fixed_batch(1)
    if schedule.kind != "fixed":
        raise ConfigError(f"heuristic_qsgd needs a fixed schedule, got {schedule.kind}")
    return eta, T, schedule


class _Recorder:
    """Trace bookkeeping shared by the solver loops."""

    def __init__(self, obj, trace, residual_every):
        self.obj = obj
        self.trace = trace
        self.residual_every = residual_every
        self.start = time.perf_counter()

    def measure(self, t, x_prev, x_next, g, eta, evals, with_residual=True):
        trace = self.trace
        F = full_objective(self.obj, x_next)
        res = None
        due = (t + 1) % self.residual_every == 0 or t == trace.T - 1
        if with_residual and due:
            res = stationarity_residual(self.obj, x_prev, x_next, g, eta)
            if res < trace.best_residual:
                trace.best_residual = res
                trace.x_best = x_next.copy()
        wall = (time.perf_counter() - self.start) * 1e3
        trace.records.append(
            TracePoint(t=t, grad_evals=evals, F=F, residual=res, nnz=int(np.count_nonzero(x_next)), wall_ms=wall)
        )
        if t + 1 == trace.R:
            trace.x_R = x_next.copy()
        bad = not np.isfinite(F) or F > DIVERGENCE_F or not np.all(np.isfinite(x_next))
        if bad:
            trace.diverged = True
        return F, res, bad

    def finish(self, x_last):
        self.trace.x_final = np.asarray(x_last, dtype=float).copy()
        self.trace.wall_time_s = time.perf_counter() - self.start
        return self.trace


def _prox_loop(obj, config, direction, x0, callback):
    """Generic prox-step loop; ``direction`` yields (g, cost, tag) at (t, x)."""
    from .rng import spawn_rngs

    eta, T, schedule = _plan(obj, config)
    if T < 1:
        raise ConfigError(f"resolved horizon must be >= 1, got {T}")
    rng_sel, rng_draw = spawn_rngs(config.seed, 2)
    trace = RunTrace(
        algorithm=config.algorithm,
        seed=config.seed,
        c=config.c,
        eta=eta,
        T=T,
        R=sample_output_index(T, rng_sel),
    )
    rec = _Recorder(obj, trace, config.residual_every)
    x = np.zeros(obj.data.d) if x0 is None else np.asarray(x0, dtype=float).copy()
    evals = 0
    for t in range(T):
        g, cost, tag = direction(t, x, rng_draw, schedule)
        evals += cost
        if tag == "anchor":
            trace.anchor_iters += 1
        elif tag == "inner":
            trace.inner_iters += 1
        x_next = prox_apply(obj.reg, x - eta * g, eta)
        F, res, bad = rec.measure(t, x, x_next, g, eta, evals)
        if callback is not None:
            callback(
                {
                    "t": t, "x": x, "g": g, "x_next": x_next, "eta": eta,
                    "cost": cost, "tag": tag, "F": F, "residual": res,
                }
            )
        x = x_next
        if bad:
            break
    return rec.finish(x)


def run_pgd(obj, config, x0=None, callback=None):
    """Deterministic proximal gradient descent: one full gradient per step."""

    def direction(t, x, rng, schedule):
        return full_gradient(obj, x), obj.data.n, "full"

    return _prox_loop(obj, config, direction, x0, callback)


def run_mb_spg(obj, config, x0=None, callback=None):
    """Mini-batch stochastic proximal gradient with a fixed or growing batch."""

    def direction(t, x, rng, schedule):
        m = batch_size_at(schedule, t)
        g, cost = minibatch_grad(obj, x, m, rng, replace=config.replace)
        return g, cost, "batch"

    return _prox_loop(obj, config, direction, x0, callback)


def run_spgr(obj, config, x0=None, callback=None):
    """Recursive variance reduction: anchors every q steps, corrections between."""
    state = None

    def direction(t, x, rng, schedule):
        nonlocal state
        before = state.grad_evals if state is not None else 0
        if t % schedule.q == 0:
            state = sarah_anchor(obj, x, schedule, rng, state=state)
            tag = "anchor"
        else:
            state = sarah_step(obj, state, x, schedule.s2, rng)
            tag = "inner"
        return state.g, state.grad_evals - before, tag

    return _prox_loop(obj, config, direction, x0, callback)


def run_spgr_imb(obj, config, x0=None, callback=None):
    """Stagewise recursive variance reduction with growing anchors and epochs.

    Stage s (1-based) runs b*s iterations: one anchor of batch b^2 s^2
    (an exact full gradient in the finite_sum setting), then b*s - 1
    recursive steps of batch b*s.  The run stops at T even mid-stage.
    """
    state = None
    stage = {"s": 0, "left": 0, "sched": None}
    exact = config.setting == "finite_sum"

    def direction(t, x, rng, schedule):
        nonlocal state
        before = state.grad_evals if state is not None else 0
        if stage["left"] == 0:
            stage["s"] += 1
            s1, s2, inner = stage_sizes(stage["s"], schedule.b)
            if exact:
                s1 = obj.data.n
                kind = "recursive_finite_sum"
            else:
                kind = "recursive_online"
            stage["sched"] = BatchSchedule(kind, s1=s1, s2=s2, q=inner)
            stage["left"] = inner
            state = sarah_anchor(obj, x, stage["sched"], rng, state=state)
            tag = "anchor"
        else:
            state = sarah_step(obj, state, x, stage["sched"].s2, rng)
            tag = "inner"
        stage["left"] -= 1
        return state.g, state.grad_evals - before, tag

    return _prox_loop(obj, config, direction, x0, callback)


def run_heuristic_qsgd(obj, config, x0=None, callback=None):
    """Projected-point SGD baseline for quantized models.

    Updates x_{t+1} = x_t - eta_t g_t with g_t drawn at the grid
    projection of x_t, eta_t halving every ``halve_every`` iterations.
    No prox step and no residual: the stationarity witness does not
    apply, so the residual column stays empty.
    """
    from .rng import spawn_rngs

    eta, T, schedule = _plan(obj, config)
    if T < 1:
        raise ConfigError(f"resolved horizon must be >= 1, got {T}")
    rng_sel, rng_draw = spawn_rngs(config.seed, 2)
    trace = RunTrace(
        algorithm=config.algorithm,
        seed=config.seed,
        c=config.c,
        eta=eta,
        T=T,
        R=sample_output_index(T, rng_sel),
    )
    rec = _Recorder(obj, trace, config.residual_every)
    x = np.zeros(obj.data.d) if x0 is None else np.asarray(x0, dtype=float).copy()
    evals = 0
    for t in range(T):
        xq = project_grid(x, obj.reg.grid)
        g, cost = minibatch_grad(obj, xq, batch_size_at(schedule, t), rng_draw, replace=config.replace)
        evals += cost
        eta_t = eta * 0.5 ** (t // config.halve_every)
        x_next = x - eta_t * g
        F, _, bad = rec.measure(t, x, x_next, g, eta_t, evals, with_residual=False)
        if callback is not None:
            callback(
                {
                    "t": t, "x": x, "x_proj": xq, "g": g, "x_next": x_next,
                    "eta": eta_t, "cost": cost, "tag": "batch", "F": F, "residual": None,
                }
            )
        x = x_next
        if bad:
            break
    return rec.finish(x)


RUNNERS = {
    "pgd": run_pgd,
    "mb_spg": run_mb_spg,
    "spgr": run_spgr,
    "spgr_imb": run_spgr_imb,
    "heuristic_qsgd": run_heuristic_qsgd,
}
