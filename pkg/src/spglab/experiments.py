"""Experiment specs, run orchestration, and trace emission.

A spec is one YAML file describing a dataset, a loss, a regularizer, a
list of solver entries, and the seeds to repeat them over.  Unknown keys
are errors: a typo must fail loudly, not silently fall back to a
default.  ``parse_spec`` normalizes (fills defaults), so
``parse_spec(emit_spec(spec)) == spec`` holds for any parsed spec.

``run_experiment`` executes every (entry, seed) pair, optionally in a
process pool, and writes rows in the planned order regardless of
completion order, so reruns of the same spec produce byte-identical
CSV output (the wall-clock column is the one column that varies).
"""

from __future__ import annotations

import csv
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import yaml

from .datasets import (
    binarize_labels,
    normalize_features,
    parse_libsvm,
    synth_classification,
    synth_regression,
    train_test_split,
)
from .estimators import (
    fixed_batch,
    increasing_batch,
    recursive_online,
    stagewise_batch,
)
from .losses import build_objective, default_tls_alpha, nlls, tls
from .regularizers import KINDS as REG_KINDS
from .regularizers import Regularizer, project_grid
from .solvers import ALGORITHMS, RUNNERS, SolverConfig

__all__ = [
    "SpecError",
    "ExperimentSpec",
    "parse_spec",
    "emit_spec",
    "load_spec",
    "build_problem",
    "entry_to_config",
    "run_experiment",
    "ExperimentResult",
    "write_trace_csv",
    "write_summary",
    "read_trace_csv",
    "evaluate_quantized",
    "CSV_COLUMNS",
    "SUMMARY_THRESHOLDS",
]

CSV_COLUMNS = (
    "run_id",
    "algorithm",
    "seed",
    "t",
    "grad_evals",
    "F",
    "exact_residual",
    "nnz",
    "wall_ms",
)

SUMMARY_THRESHOLDS = (1e-1, 1e-2, 1e-3)


class SpecError(ValueError):
    """A malformed or inconsistent experiment spec."""


def _require(cond, path, msg):
    if not cond:
        raise SpecError(f"{path}: {msg}")


def _check_keys(section, allowed, path):
    _require(isinstance(section, dict), path, f"expected a mapping, got {type(section).__name__}")
    unknown = set(section) - set(allowed)
    _require(not unknown, path, f"unknown keys {sorted(unknown)}; allowed: {sorted(allowed)}")


def _as_int(v, path, lo=None):
    _require(isinstance(v, int) and not isinstance(v, bool), path, f"expected an integer, got {v!r}")
    if lo is not None:
        _require(v >= lo, path, f"must be >= {lo}, got {v}")
    return v


def _as_float(v, path, lo=None, strict=False):
    _require(
        isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v),
        path,
        f"expected a finite number, got {v!r}",
    )
    v = float(v)
    if lo is not None:
        _require(v > lo if strict else v >= lo, path, f"must be {'>' if strict else '>='} {lo}, got {v}")
    return v


_DATASET_KEYS = {
    "synth_classification": (
        "kind", "n", "d", "row_nnz", "noise", "seed", "planted_nnz", "test_fraction", "split_seed",
    ),
    "synth_regression": (
        "kind", "n", "d", "row_nnz", "noise", "seed", "planted_nnz", "outlier_frac",
        "outlier_scale", "test_fraction", "split_seed",
    ),
    "libsvm": ("kind", "path", "d", "task", "normalize", "test_fraction", "split_seed"),
}

_ENTRY_KEYS = (
    "algorithm", "name", "c", "T", "eps", "m", "b", "s1", "setting",
    "residual_every", "halve_every", "replace", "eta",
)

_TOP_KEYS = ("name", "dataset", "loss", "regularizer", "solvers", "seeds", "outputs", "n_probe")


@dataclass
class ExperimentSpec:
    """A parsed, normalized experiment description."""

    name: str
    dataset: dict
    loss: dict
    regularizer: dict
    solvers: list = field(default_factory=list)
    seeds: list = field(default_factory=list)
    outputs: dict = field(default_factory=dict)
    n_probe: int = 4096


def _parse_dataset(section):
    path = "dataset"
    _require(isinstance(section, dict), path, "expected a mapping")
    kind = section.get("kind")
    _require(kind in _DATASET_KEYS, f"{path}.kind", f"expected one of {sorted(_DATASET_KEYS)}, got {kind!r}")
    _check_keys(section, _DATASET_KEYS[kind], path)
    out = {"kind": kind}
    if kind == "libsvm":
        _require(isinstance(section.get("path"), str) and section["path"], f"{path}.path", "required")
        out["path"] = section["path"]
        out["d"] = _as_int(section["d"], f"{path}.d", lo=1) if "d" in section else None
        task = section.get("task")
        _require(task in (None, "classification", "regression"), f"{path}.task", f"bad task {task!r}")
        out["task"] = task
        norm = section.get("normalize", "none")
        _require(norm in ("none", "unit_row_norm"), f"{path}.normalize", f"bad mode {norm!r}")
        out["normalize"] = norm
    else:
        out["n"] = _as_int(section.get("n"), f"{path}.n", lo=1)
        out["d"] = _as_int(section.get("d"), f"{path}.d", lo=1)
        out["row_nnz"] = _as_int(section.get("row_nnz", min(10, out["d"])), f"{path}.row_nnz", lo=1)
        out["noise"] = _as_float(section.get("noise", 0.1), f"{path}.noise", lo=0.0)
        out["seed"] = _as_int(section.get("seed", 0), f"{path}.seed", lo=0)
        out["planted_nnz"] = (
            _as_int(section["planted_nnz"], f"{path}.planted_nnz", lo=1)
            if section.get("planted_nnz") is not None
            else None
        )
        if kind == "synth_regression":
            out["outlier_frac"] = _as_float(section.get("outlier_frac", 0.05), f"{path}.outlier_frac", lo=0.0)
            out["outlier_scale"] = _as_float(section.get("outlier_scale", 25.0), f"{path}.outlier_scale", lo=0.0)
    tf = section.get("test_fraction")
    if tf is not None:
        tf = _as_float(tf, f"{path}.test_fraction", lo=0.0, strict=True)
        _require(tf < 1.0, f"{path}.test_fraction", f"must be < 1, got {tf}")
    out["test_fraction"] = tf
    out["split_seed"] = _as_int(section.get("split_seed", 0), f"{path}.split_seed", lo=0)
    return out


def _parse_loss(section):
    path = "loss"
    _check_keys(section, ("kind", "alpha"), path)
    kind = section.get("kind")
    _require(kind in ("nlls", "tls"), f"{path}.kind", f"expected nlls or tls, got {kind!r}")
    alpha = section.get("alpha")
    if alpha is not None:
        _require(kind == "tls", f"{path}.alpha", "only the tls loss takes alpha")
        alpha = _as_float(alpha, f"{path}.alpha", lo=0.0, strict=True)
    return {"kind": kind, "alpha": alpha}


def _parse_regularizer(section):
    path = "regularizer"
    _check_keys(section, ("kind", "lam", "k", "grid"), path)
    kind = section.get("kind")
    _require(kind in REG_KINDS, f"{path}.kind", f"expected one of {sorted(REG_KINDS)}, got {kind!r}")
    out = {"kind": kind, "lam": None, "k": None, "grid": None}
    if kind == "l0ball":
        _require(section.get("lam") is None, f"{path}.lam", "the sparsity ball takes k, not lam")
        if section.get("k") is not None:
            out["k"] = _as_int(section["k"], f"{path}.k", lo=1)
    else:
        # weight defaults to 1e-4, except the quantization penalty's 1.0
        lam = section.get("lam", 1.0 if kind == "quant" else 1e-4)
        out["lam"] = _as_float(lam, f"{path}.lam", lo=0.0)
        _require(section.get("k") is None, f"{path}.k", f"{kind} does not take k")
    if kind == "quant":
        grid = section.get("grid", [-1.0, 1.0])
        _require(isinstance(grid, list) and len(grid) >= 1, f"{path}.grid", "expected a nonempty list")
        out["grid"] = [_as_float(g, f"{path}.grid[{i}]") for i, g in enumerate(grid)]
        _require(all(a < b for a, b in zip(out["grid"], out["grid"][1:])), f"{path}.grid", "must increase strictly")
    else:
        _require(section.get("grid") is None, f"{path}.grid", f"{kind} does not take grid")
    return out


def _parse_entry(section, idx):
    path = f"solvers[{idx}]"
    _check_keys(section, _ENTRY_KEYS, path)
    algo = section.get("algorithm")
    _require(algo in ALGORITHMS, f"{path}.algorithm", f"expected one of {ALGORITHMS}, got {algo!r}")
    out = {k: None for k in _ENTRY_KEYS}
    out["algorithm"] = algo
    if section.get("name") is not None:
        _require(isinstance(section["name"], str) and section["name"], f"{path}.name", "must be a nonempty string")
        out["name"] = section["name"]
    for key, lo in (("T", 1), ("m", 1), ("b", 1), ("s1", 1), ("residual_every", 1), ("halve_every", 1)):
        if section.get(key) is not None:
            out[key] = _as_int(section[key], f"{path}.{key}", lo=lo)
    for key in ("c", "eps", "eta"):
        if section.get(key) is not None:
            out[key] = _as_float(section[key], f"{path}.{key}", lo=0.0, strict=True)
    _require((out["T"] is not None) != (out["eps"] is not None), path, "set exactly one of T and eps")
    setting = section.get("setting")
    _require(setting in (None, "online", "finite_sum"), f"{path}.setting", f"bad setting {setting!r}")
    _require(
        setting is None or algo in ("spgr", "spgr_imb"),
        f"{path}.setting",
        f"{algo} does not take a setting",
    )
    out["setting"] = setting
    if section.get("replace") is not None:
        _require(isinstance(section["replace"], bool), f"{path}.replace", "must be a boolean")
        out["replace"] = section["replace"]
    _require(not (out["m"] is not None and out["b"] is not None), path, "set at most one of m and b")
    if out["m"] is not None:
        _require(algo in ("mb_spg", "heuristic_qsgd"), f"{path}.m", f"{algo} does not take m")
    if out["b"] is not None:
        _require(algo in ("mb_spg", "spgr_imb"), f"{path}.b", f"{algo} does not take b")
    if out["s1"] is not None:
        _require(algo == "spgr", f"{path}.s1", f"{algo} does not take s1")
        _require(out["setting"] == "online", f"{path}.s1", "anchor batches apply to the online setting only")
    if out["halve_every"] is not None:
        _require(algo == "heuristic_qsgd", f"{path}.halve_every", f"{algo} does not take halve_every")
    return out


def entry_name(entry):
    if entry.get("name"):
        return entry["name"]
    name = entry["algorithm"]
    if entry["algorithm"] in ("spgr", "spgr_imb"):
        name += "-" + (entry.get("setting") or "finite_sum")
    return name


def parse_spec(text):
    """Parse and normalize spec YAML; unknown keys anywhere are errors."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise SpecError(f"not valid YAML: {e}") from None
    _require(isinstance(doc, dict), "spec", "top level must be a mapping")
    _check_keys(doc, _TOP_KEYS, "spec")
    name = doc.get("name")
    _require(isinstance(name, str) and name, "name", "required, a nonempty string")
    _require(all(ch.isalnum() or ch in "_-." for ch in name), "name", f"bad characters in {name!r}")
    for key in ("dataset", "loss", "regularizer", "solvers", "seeds"):
        _require(key in doc, key, "required section missing")
    dataset = _parse_dataset(doc["dataset"])
    loss = _parse_loss(doc["loss"])
    reg = _parse_regularizer(doc["regularizer"])
    _require(isinstance(doc["solvers"], list) and doc["solvers"], "solvers", "need at least one entry")
    entries = [_parse_entry(e, i) for i, e in enumerate(doc["solvers"])]
    names = [entry_name(e) for e in entries]
    _require(len(set(names)) == len(names), "solvers", f"entry names collide: {names}; set name: explicitly")
    seeds = doc["seeds"]
    _require(isinstance(seeds, list) and seeds, "seeds", "need a nonempty list")
    seeds = [_as_int(s, f"seeds[{i}]", lo=0) for i, s in enumerate(seeds)]
    _require(len(set(seeds)) == len(seeds), "seeds", "duplicate seeds")
    outputs = doc.get("outputs") or {}
    _check_keys(outputs, ("csv", "svg", "summary", "models"), "outputs")
    norm_out = {}
    for key, default in (
        ("csv", f"{name}_traces.csv"),
        ("svg", f"{name}_curves.svg"),
        ("summary", f"{name}_summary.txt"),
        ("models", None),
    ):
        v = outputs.get(key, default)
        _require(v is None or (isinstance(v, str) and v), f"outputs.{key}", "must be a nonempty path")
        norm_out[key] = v
    n_probe = _as_int(doc.get("n_probe", 4096), "n_probe", lo=0)
    if loss["kind"] == "nlls":
        _require(
            dataset["kind"] != "synth_regression",
            "loss.kind",
            "nlls needs 0/1 labels; synth_regression produces real targets",
        )
    return ExperimentSpec(
        name=name, dataset=dataset, loss=loss, regularizer=reg,
        solvers=entries, seeds=seeds, outputs=norm_out, n_probe=n_probe,
    )


def _strip_nones(obj):
    if isinstance(obj, dict):
        return {k: _strip_nones(v) for k, v in obj.items() if v is not None}
    if isinstance(obj, list):
        return [_strip_nones(v) for v in obj]
    return obj


def emit_spec(spec):
    """Spec back to YAML.  parse_spec(emit_spec(s)) == s."""
    doc = {
        "name": spec.name,
        "dataset": _strip_nones(spec.dataset),
        "loss": _strip_nones(spec.loss),
        "regularizer": _strip_nones(spec.regularizer),
        "solvers": _strip_nones(spec.solvers),
        "seeds": list(spec.seeds),
        # outputs keep explicit nulls: "no figure" must survive the round trip
        "outputs": dict(spec.outputs),
        "n_probe": spec.n_probe,
    }
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False)


def load_spec(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_spec(fh.read())


# -- problem assembly ----------------------------------------------------------


@dataclass
class Problem:
    train: object
    test: object  # None unless the spec asks for a split
    obj: object


def _load_dataset(ds):
    kind = ds["kind"]
    if kind == "libsvm":
        data = parse_libsvm(ds["path"], d=ds["d"], task=ds["task"])
        if ds["normalize"] != "none":
            data = normalize_features(data, mode=ds["normalize"])
        return data
    common = dict(
        n=ds["n"], d=ds["d"], row_nnz=ds["row_nnz"], noise=ds["noise"],
        seed=ds["seed"], planted_nnz=ds["planted_nnz"],
    )
    if kind == "synth_classification":
        return synth_classification(**common)
    return synth_regression(
        outlier_frac=ds["outlier_frac"], outlier_scale=ds["outlier_scale"], **common
    )


def _make_regularizer(reg_spec, d):
    kind = reg_spec["kind"]
    if kind == "l0ball":
        k = reg_spec["k"] if reg_spec["k"] is not None else math.ceil(0.2 * d)
        return Regularizer(kind="l0ball", k=min(k, d))
    if kind == "quant":
        return Regularizer(kind="quant", lam=reg_spec["lam"], grid=tuple(reg_spec["grid"]))
    return Regularizer(kind=kind, lam=reg_spec["lam"])


def build_problem(spec):
    """Load data, apply the split, and assemble the objective."""
    data = _load_dataset(spec.dataset)
    test = None
    tf = spec.dataset["test_fraction"]
    if tf is not None:
        data, test = train_test_split(data, 1.0 - tf, spec.dataset["split_seed"])
    if spec.loss["kind"] == "nlls":
        data = binarize_labels(data)
        if test is not None:
            test = binarize_labels(test)
        loss = nlls()
    else:
        alpha = spec.loss["alpha"]
        loss = tls(alpha if alpha is not None else default_tls_alpha(data.n))
    reg = _make_regularizer(spec.regularizer, data.d)
    obj = build_objective(data, loss, reg, n_probe=spec.n_probe)
    return Problem(train=data, test=test, obj=obj)


def entry_to_config(entry, seed, n):
    """Solver entry dict + seed -> a validated SolverConfig."""
    algo = entry["algorithm"]
    schedule = None
    setting = entry.get("setting") or ""
    if algo == "mb_spg":
        if entry.get("m") is not None:
            schedule = fixed_batch(entry["m"])
        elif entry.get("b") is not None:
            schedule = increasing_batch(entry["b"])
    elif algo == "spgr":
        setting = setting or "finite_sum"
        if entry.get("s1") is not None:
            _require(setting == "online", "solvers", "s1 applies to the online setting only")
            schedule = recursive_online(entry["s1"])
    elif algo == "spgr_imb":
        setting = setting or "online"
        schedule = stagewise_batch(entry.get("b") or 1)
    elif algo == "heuristic_qsgd":
        schedule = fixed_batch(entry.get("m") or 1)
    kwargs = {}
    for key in ("c", "eta"):
        if entry.get(key) is not None:
            kwargs[key] = entry[key]
    for key, default in (("residual_every", 10), ("halve_every", 100)):
        kwargs[key] = entry.get(key) or default
    if entry.get("replace") is not None:
        kwargs["replace"] = entry["replace"]
    return SolverConfig(
        algorithm=algo,
        T=entry.get("T") or 0,
        eps=entry.get("eps") or 0.0,
        schedule=schedule,
        setting=setting,
        seed=seed,
        name=entry_name(entry),
        **kwargs,
    )


# -- execution -----------------------------------------------------------------


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    run_ids: list
    traces: dict  # run_id -> RunTrace
    any_diverged: bool


def _run_pair(args):
    obj, entry, seed, n = args
    config = entry_to_config(entry, seed, n)
    trace = RUNNERS[config.algorithm](obj, config)
    return f"{config.name}-s{seed}", trace


def run_experiment(spec, jobs=1, seeds=None, obj=None):
    """Execute every (entry, seed) pair; returns traces keyed by run_id.

    ``seeds`` overrides the spec's list (the CLI --seed hook); ``obj``
    skips problem assembly when the caller already built it.
    """
    if obj is None:
        obj = build_problem(spec).obj
    seeds = list(spec.seeds) if seeds is None else list(seeds)
    pairs = [(obj, entry, seed, obj.data.n) for entry in spec.solvers for seed in seeds]
    run_ids = [f"{entry_name(entry)}-s{seed}" for entry in spec.solvers for seed in seeds]
    if jobs > 1 and len(pairs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            done = dict(pool.map(_run_pair, pairs))
    else:
        done = dict(map(_run_pair, pairs))
    traces = {rid: done[rid] for rid in run_ids}  # planned order, not completion order
    return ExperimentResult(
        spec=spec,
        run_ids=run_ids,
        traces=traces,
        any_diverged=any(tr.diverged for tr in traces.values()),
    )


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_trace_csv(result, path):
    """One row per recorded iteration, in planned run order."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rid in result.run_ids:
            tr = result.traces[rid]
            label = rid.rsplit("-s", 1)[0]
            for rec in tr.records:
                w.writerow(
                    [
                        rid, label, tr.seed, rec.t, rec.grad_evals,
                        _fmt(rec.F), _fmt(rec.residual), rec.nnz, _fmt(rec.wall_ms),
                    ]
                )


def read_trace_csv(path):
    """Rows back as dicts with numeric fields restored (residual may be None)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SpecError(f"{path}: empty CSV")
        if tuple(header) != CSV_COLUMNS:
            raise SpecError(f"{path}: unknown columns {header}; expected {list(CSV_COLUMNS)}")
        rows = []
        for row in reader:
            rows.append(
                {
                    "run_id": row[0],
                    "algorithm": row[1],
                    "seed": int(row[2]),
                    "t": int(row[3]),
                    "grad_evals": int(row[4]),
                    "F": float(row[5]),
                    "exact_residual": float(row[6]) if row[6] else None,
                    "nnz": int(row[7]),
                    "wall_ms": float(row[8]) if row[8] else None,
                }
            )
    if not rows:
        raise SpecError(f"{path}: no data rows")
    return rows


def evals_to_threshold(trace, tau):
    """Gradient evaluations when the measured residual first reaches tau."""
    for rec in trace.records:
        if rec.residual is not None and rec.residual <= tau:
            return rec.grad_evals
    return math.inf


def write_summary(result, path):
    spec = result.spec
    lines = [f"experiment: {spec.name}"]
    ds = spec.dataset
    if ds["kind"] == "libsvm":
        lines.append(f"dataset: libsvm {ds['path']}")
    else:
        lines.append(f"dataset: {ds['kind']} n={ds['n']} d={ds['d']} noise={ds['noise']}")
    n_div = sum(tr.diverged for tr in result.traces.values())
    lines.append(
        f"runs: {len(result.run_ids)} ({len(spec.solvers)} entries x "
        f"{len(result.run_ids) // max(1, len(spec.solvers))} seeds), diverged: {n_div}"
    )
    for rid in result.run_ids:
        if result.traces[rid].diverged:
            lines.append(f"  DIVERGED: {rid}")
    lines.append("")
    lines.append("median grad_evals to reach exact-residual threshold")
    head = f"{'entry':<24}" + "".join(f"{tau:>12g}" for tau in SUMMARY_THRESHOLDS)
    lines.append(head)
    by_entry = {}
    for rid in result.run_ids:
        by_entry.setdefault(rid.rsplit("-s", 1)[0], []).append(result.traces[rid])
    for label, traces in by_entry.items():
        cells = []
        for tau in SUMMARY_THRESHOLDS:
            med = statistics.median(evals_to_threshold(tr, tau) for tr in traces)
            cells.append(f"{'-':>12}" if math.isinf(med) else f"{med:>12g}")
        lines.append(f"{label:<24}" + "".join(cells))
    text = "\n".join(lines) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text


# -- quantized-model evaluation ------------------------------------------------


def evaluate_quantized(x, grid, test_data):
    """Project x onto the grid and score 0/1 accuracy on held-out data.

    Predicts 1 when the projected model's score is positive (the link's
    midpoint).  Labels may be {0,1} or {-1,+1}.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (test_data.d,):
        raise SpecError(f"model dimension {x.shape} does not match test d={test_data.d}")
    xq = project_grid(x, np.asarray(grid, dtype=float))
    scores = test_data.X.dot(xq)
    pred = (scores > 0).astype(float)
    y = np.where(test_data.y > 0, 1.0, 0.0)
    tp = int(np.sum((pred == 1) & (y == 1)))
    tn = int(np.sum((pred == 0) & (y == 0)))
    fp = int(np.sum((pred == 1) & (y == 0)))
    fn = int(np.sum((pred == 0) & (y == 1)))
    total = test_data.n
    return {
        "accuracy": (tp + tn) / total,
        "correct": tp + tn,
        "total": total,
        "tp": tp, "tn": tn, "fp": fp, "fn": fn,
        "nnz_quantized": int(np.count_nonzero(xq)),
    }


def write_models_csv(result, path):
    """Final iterates, one row per run: run_id then the d coordinates."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for rid in result.run_ids:
            x = result.traces[rid].x_final
            w.writerow([rid] + [repr(float(v)) for v in x])


def read_model_file(path):
    """Models from a run CSV (run_id, coords...) or a plain vector file.

    Returns a list of (label, vector) pairs; a vector file yields one
    pair labeled by the file name.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SpecError(f"{path}: empty model file")
    if "," in lines[0]:
        out = []
        for ln in lines:
            parts = ln.split(",")
            out.append((parts[0], np.array([float(v) for v in parts[1:]])))
        return out
    return [(path, np.array([float(ln.strip()) for ln in lines]))]
