"""Stochastic gradient estimators and batch-size schedules.

Mini-batches draw indices uniformly with replacement by default (the
regime the expectation bounds are stated in); finite-sum callers can opt
into without-replacement draws.  The recursive variance-reduced estimator
keeps its running state in :class:`EstimatorState`: an anchor evaluates a
large batch (or the exact full gradient in the finite-sum setting) and
each inner step corrects the previous estimate with one mini-batch
evaluated at both the current and previous iterate, on the *same*
samples, at a cost of 2 |S2| sample gradients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .losses import full_gradient, weighted_value_grad

__all__ = [
    "BatchSchedule",
    "fixed_batch",
    "increasing_batch",
    "recursive_online",
    "recursive_finite_sum",
    "stagewise_batch",
    "batch_size_at",
    "stage_sizes",
    "EstimatorState",
    "minibatch_grad",
    "sarah_anchor",
    "sarah_step",
    "EpochBoundaryError",
]


class EpochBoundaryError(RuntimeError):
    """A recursive step was requested where an anchor is due."""


@dataclass(frozen=True)
class BatchSchedule:
    """How many samples each iteration draws.

    kinds: ``fixed`` (m per step), ``increasing`` (b*(t+1) per step),
    ``recursive_online`` (anchor batch s1, inner batch s2, epoch q),
    ``recursive_finite_sum`` (exact anchors, inner batch s2 = q), and
    ``stagewise`` (stage s uses anchor b^2 s^2 and b*s inner steps of
    batch b*s).  Build through the constructors below.
    """

    kind: str
    m: int = 0
    b: int = 0
    s1: int = 0
    s2: int = 0
    q: int = 0


def fixed_batch(m):
    if m < 1:
        raise ValueError(f"batch size must be >= 1, got {m}")
    return BatchSchedule("fixed", m=int(m))


def increasing_batch(b):
    if b < 1:
        raise ValueError(f"batch growth must be >= 1, got {b}")
    return BatchSchedule("increasing", b=int(b))


def recursive_online(s1):
    """Online anchors of size s1; epoch and inner batch are round(sqrt(s1))."""
    if s1 < 1:
        raise ValueError(f"anchor batch must be >= 1, got {s1}")
    s2 = max(1, round(math.sqrt(s1)))
    return BatchSchedule("recursive_online", s1=int(s1), s2=s2, q=s2)


def recursive_finite_sum(n):
    """Exact anchors over all n samples; epoch and inner batch are ceil(sqrt(n))."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    s2 = max(1, math.ceil(math.sqrt(n)))
    return BatchSchedule("recursive_finite_sum", s1=int(n), s2=s2, q=s2)


def stagewise_batch(b):
    if b < 1:
        raise ValueError(f"stage growth must be >= 1, got {b}")
    return BatchSchedule("stagewise", b=int(b))


def batch_size_at(schedule, t):
    """Mini-batch size at iteration ``t`` (0-based) for the simple schedules."""
    if schedule.kind == "fixed":
        return schedule.m
    if schedule.kind == "increasing":
        return schedule.b * (t + 1)
    raise ValueError(f"no per-iteration batch size for {schedule.kind!r}")


def stage_sizes(s, b):
    """(anchor batch, inner batch, inner steps) of stage ``s`` (1-based)."""
    if s < 1 or b < 1:
        raise ValueError(f"stage and growth must be >= 1, got s={s}, b={b}")
    return b * b * s * s, b * s, b * s


def _draw(rng, n, m, replace):
    if replace:
        return rng.integers(0, n, size=m)
    if m > n:
        raise ValueError(f"cannot draw {m} of {n} samples without replacement")
    return rng.choice(n, size=m, replace=False)


def _batch_grad(obj, x, idx):
    """Mean gradient over an index multiset, ascending-index accumulation."""
    counts = np.bincount(idx, minlength=obj.data.n)
    rows = np.flatnonzero(counts)
    weights = counts[rows] / idx.size
    _, g = weighted_value_grad(obj.data, obj.loss, x, rows=rows, weights=weights)
    return g


def minibatch_grad(obj, x, m, rng, replace=True):
    """Unbiased mini-batch gradient; returns (g, sample gradients spent).

    With replacement the estimator has second moment
    E||g - grad f||^2 = population variance / m exactly; a full
    without-replacement draw (m = n) reproduces ``full_gradient``
    bit for bit.
    """
    if m < 1:
        raise ValueError(f"batch size must be >= 1, got {m}")
    x = np.asarray(x, dtype=float)
    idx = _draw(rng, obj.data.n, m, replace)
    return _batch_grad(obj, x, idx), m


@dataclass
class EstimatorState:
    """Running state of the recursive estimator.

    ``g`` is the current direction, formed at iterate ``x``; ``pos``
    counts iterations since the anchor (0 at an anchor) within an epoch
    of length ``q``.  ``grad_evals`` accumulates exactly the sample
    gradients spent: s1 per anchor, 2*s2 per recursive step.
    """

    g: np.ndarray
    x: np.ndarray
    pos: int
    q: int
    grad_evals: int


def sarah_anchor(obj, x, schedule, rng, state=None):
    """Open an epoch: exact full gradient (finite-sum) or an s1-draw (online)."""
    x = np.asarray(x, dtype=float)
    if schedule.kind in ("recursive_finite_sum",) and schedule.s1 == obj.data.n:
        g = full_gradient(obj, x)
        cost = obj.data.n
    else:
        g, cost = minibatch_grad(obj, x, schedule.s1, rng, replace=True)
    prev = state.grad_evals if state is not None else 0
    return EstimatorState(g=g, x=x.copy(), pos=0, q=schedule.q, grad_evals=prev + cost)


def sarah_step(obj, state, x, s2, rng):
    """One recursive correction g' = g + batch(x) - batch(x_prev).

    Both batch gradients use one index draw (a single ``rng.integers``
    call), so setting x = x_prev returns the previous direction exactly.
    Stepping past the epoch end raises EpochBoundaryError: the caller
    must anchor there.
    """
    if state.pos + 1 >= state.q:
        raise EpochBoundaryError(
            f"epoch of length {state.q} exhausted at pos {state.pos}; anchor required"
        )
    x = np.asarray(x, dtype=float)
    idx = rng.integers(0, obj.data.n, size=s2)
    g_new = _batch_grad(obj, x, idx)
    g_old = _batch_grad(obj, state.x, idx)
    g = (g_new - g_old) + state.g
    return EstimatorState(
        g=g, x=x.copy(), pos=state.pos + 1, q=state.q, grad_evals=state.grad_evals + 2 * s2
    )
