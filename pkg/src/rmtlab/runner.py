"""Monte Carlo orchestration and the experiment driver behind the CLI."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from typing import Callable

import numpy as np

from rmtlab import io
from rmtlab.config import ExperimentConfig
from rmtlab.ensembles import SeedSpec, sample_ginibre, sample_gue, sample_haar_unitary, sample_unit_vector
from rmtlab.errors import IoFailure
from rmtlab.gaf import gaf_zeros, required_truncation, sample_gaf
from rmtlab.linalg import eigen_decompose
from rmtlab.models import ModelConfig, ModelKind, build_matrix
from rmtlab.outliers import Annulus, Disk, detect_separation, musical_domains
from rmtlab.overlaps import diagonal_overlaps, overlap_matrix
from rmtlab.trajectories import track

# stream layout inside one trial
BASE_STREAM, V_STREAM, W_STREAM = 0, 1, 2

# calibrated UA thresholds: outlier inside 0.6, bulk outside 0.85
UA_INNER, UA_OUTER = 0.6, 0.85


def _call(args):
    fn, spec = args
    return spec.trial_index, fn(spec)


def run_trials(fn: Callable[[SeedSpec], object], trials: int, master_seed: int, workers: int = 1) -> list:
    """Evaluate ``fn(SeedSpec(master_seed, k))`` for ``k < trials``.

    Results come back in trial order whatever the scheduling. With
    ``workers > 1`` a process pool is used, so ``fn`` must be picklable.
    """
    specs = [SeedSpec(master_seed, k) for k in range(int(trials))]
    if workers <= 1:
        return [fn(s) for s in specs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        pairs = list(pool.map(_call, [(fn, s) for s in specs]))
    return [r for _, r in sorted(pairs, key=lambda p: p[0])]


def draw_base(kind: ModelKind, n: int, seed: SeedSpec) -> np.ndarray:
    """Ginibre, GUE or Haar base matrix for the model family."""
    rng = seed.substream(BASE_STREAM)
    if kind is ModelKind.ADDITIVE:
        return sample_ginibre(n, rng)
    if kind is ModelKind.ANTI_HERMITIAN:
        return sample_gue(n, rng)
    return sample_haar_unitary(n, rng)


def draw_instance(kind, n: int, seed: SeedSpec, w: str = "v") -> tuple[ModelConfig, np.ndarray]:
    """A model with uniform unit ``v`` (and ``w``) plus its base matrix.

    ``w="uniform"`` draws an independent left vector for the additive model.
    """
    kind = ModelKind.parse(kind)
    base = draw_base(kind, n, seed)
    v = sample_unit_vector(n, seed.substream(V_STREAM))
    left = None
    if kind is ModelKind.ADDITIVE and w == "uniform":
        left = sample_unit_vector(n, seed.substream(W_STREAM))
    return ModelConfig(kind, v, left), base


def default_domains(model: ModelConfig, n: int, t: float, epsilon: float):
    """The separation domains the ``outlier`` analysis classifies against."""
    if model.kind is ModelKind.ADDITIVE:
        return Disk(t * complex(np.vdot(model.left, model.v)), 1.0), Disk(0.0, 1.2)
    if model.kind is ModelKind.ANTI_HERMITIAN:
        return tuple(musical_domains(n, t, epsilon))
    return Disk(0.0, UA_INNER), Annulus(0.0, UA_OUTER)


def _summary_path(config: ExperimentConfig):
    return config.out / "summary.json"


def _write_summary(config: ExperimentConfig, summary: dict) -> dict:
    path = _summary_path(config)
    record = {"config": config.as_record(), **summary}
    try:
        path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise IoFailure(path, str(exc)) from exc
    return record


def _sample_trial(config: ExperimentConfig, seed: SeedSpec):
    model, base = draw_instance(config.kind, config.n, seed, config.w)
    return [(t, np.linalg.eigvals(build_matrix(model, base, t))) for t in config.t_values()]


def _trajectory_trial(config: ExperimentConfig, seed: SeedSpec):
    model, base = draw_instance(config.kind, config.n, seed, config.w)
    ts = config.t_values()
    return track(model, base, ts[0], ts[-1], initial_steps=ts.shape[0] - 1)


def _outlier_trial(config: ExperimentConfig, seed: SeedSpec):
    model, base = draw_instance(config.kind, config.n, seed, config.w)
    t = float(config.t_values()[0])
    d1, d2 = default_domains(model, config.n, t, config.epsilon)
    return detect_separation(np.linalg.eigvals(build_matrix(model, base, t)), d1, d2)


def _overlap_trial(config: ExperimentConfig, seed: SeedSpec):
    model, base = draw_instance(config.kind, config.n, seed, config.w)
    es = eigen_decompose(build_matrix(model, base, float(config.t_values()[0])))
    O = overlap_matrix(es)
    return es.values, diagonal_overlaps(es), float(np.max(np.abs(O.sum(axis=1) - 1.0)))


def _gaf_trial(config: ExperimentConfig, seed: SeedSpec):
    g = sample_gaf(required_truncation(config.radius), seed)
    return gaf_zeros(g, config.c, config.radius)


class _Bound:
    """Picklable ``seed -> trial_fn(config, seed)`` closure."""

    def __init__(self, fn, config):
        self.fn, self.config = fn, config

    def __call__(self, seed):
        return self.fn(self.config, seed)


def run(config: ExperimentConfig) -> dict:
    """Run one analysis, write its CSV (and SVG) files and a JSON summary.

    Returns the summary record.
    """
    io.ensure_dir(config.out)
    name = config.analysis
    fn = {
        "sample": _sample_trial,
        "trajectories": _trajectory_trial,
        "outlier": _outlier_trial,
        "overlaps": _overlap_trial,
        "gaf": _gaf_trial,
    }[name]
    results = run_trials(_Bound(fn, config), config.trials, config.master_seed, config.workers)
    kind = config.kind.value
    files = []
    summary: dict = {"analysis": name}

    if name == "sample":
        records = [(kind, k, t, z) for k, res in enumerate(results) for t, z in res]
        files.append(io.write_spectra(config.out / "spectra.csv", records))
        summary["rows"] = sum(z.shape[0] for *_, z in records)
        summary["max_abs"] = max(float(np.max(np.abs(z))) for *_, z in records)

    elif name == "trajectories":
        records = []
        per_trial = []
        for k, b in enumerate(results):
            grid, paths = b.base_grid()
            records.append((kind, k, grid, paths))
            far = int(np.argmax(np.max(np.abs(paths), axis=1)))
            per_trial.append(
                {
                    "trial": k,
                    "paths": int(paths.shape[0]),
                    "grid_points": int(grid.shape[0]),
                    "refinements": int(b.refinements),
                    "min_gap": b.min_gap,
                    "escaping_paths": int(np.sum(np.max(np.abs(paths), axis=1) > 2.0)),
                    "min_abs": float(np.min(np.abs(paths))),
                    "farthest_path_start": [paths[far, 0].real, paths[far, 0].imag],
                }
            )
            if config.svg:
                svg = io.trajectory_svg(b.grid, b.paths, title=f"{kind} n={config.n} trial {k}")
                files.append(io.write_svg(config.out / f"trajectories_{k:04d}.svg", svg))
        files.append(io.write_trajectories(config.out / "trajectories.csv", records))
        summary["trials"] = per_trial

    elif name == "outlier":
        rows = [r.as_record() | {"trial": k} for k, r in enumerate(results)]
        path = config.out / "outliers.csv"
        keys = ["trial", "satisfied", "outlier_count", "stray_count", "outlier_re", "outlier_im", "margin"]
        cells = [[io.fmt(r[c]) if isinstance(r[c], float) else r[c] for c in keys] for r in rows]
        files.append(io.write_rows(path, keys, cells))
        summary["frequency"] = float(np.mean([r.satisfied for r in results]))
        summary["margin"] = results[0].margin

    elif name == "overlaps":
        records = [(k, vals, diag) for k, (vals, diag, _) in enumerate(results)]
        files.append(io.write_overlaps(config.out / "overlaps.csv", records))
        summary["max_row_sum_error"] = max(r[2] for r in results)
        summary["min_diagonal"] = min(float(np.min(r[1])) for r in results)

    else:
        records = [(k, config.c, z) for k, z in enumerate(results)]
        files.append(io.write_zeros(config.out / "zeros.csv", records))
        r = config.radius
        summary["mean_count"] = float(np.mean([z.shape[0] for z in results]))
        if config.c == 0:
            summary["predicted_mean_count"] = r * r / (1.0 - r * r)
        summary["truncation"] = required_truncation(r)

    summary["files"] = [str(f) for f in files]
    return _write_summary(config, summary)
