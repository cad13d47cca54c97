"""The acceptance suite.

Each criterion is a function ``criterion(master_seed) -> CriterionResult``
that runs a fixed, seeded experiment and compares one statistic with a
threshold. Compound criteria report the worst sub-check as ``statistic``
and keep every sub-check in ``details``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from rmtlab.ensembles import (
    SeedSpec,
    complex_normal,
    kostlan_expected_outside,
    sample_ginibre,
    sample_gue,
    sample_unit_vector,
    semicircle_mass,
)
from rmtlab.errors import CountMismatch, RmtLabError
from rmtlab.gaf import compare_clouds, gaf_zeros, required_truncation, sample_gaf
from rmtlab.linalg import eigen_decompose, sylvester_check
from rmtlab.models import ModelKind, build_matrix, expected_count, level_target, spectral_function
from rmtlab.outliers import local_law_margin
from rmtlab.overlaps import overlap_matrix
from rmtlab.runner import UA_INNER, UA_OUTER, draw_instance
from rmtlab.trajectories import (
    integrate_ode,
    large_t_limits,
    match_sets,
    ode_residual,
    split_outlier,
    track,
    velocity_field,
)

DEFAULT_SEED = 20240611
FREQUENCY = 0.95
GAF_MATCH_ANNULI = ((0.0, 0.5), (0.5, 0.7))


@dataclass
class CriterionResult:
    name: str
    statistic: float
    threshold: float
    passed: bool
    comparison: str = "<="
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def as_record(self) -> dict:
        return {
            "name": self.name,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "comparison": self.comparison,
            "pass": self.passed,
            "seconds": round(self.seconds, 3),
            "details": self.details,
        }

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: {self.statistic:.6g} {self.comparison} {self.threshold:.6g}"


def _result(name, statistic, threshold, comparison, details=None) -> CriterionResult:
    ok = statistic <= threshold if comparison == "<=" else statistic >= threshold
    return CriterionResult(name, float(statistic), float(threshold), bool(ok), comparison, details or {})


def _seed(master: int, trial: int, stream: int = 0) -> SeedSpec:
    return SeedSpec(master, trial, stream)


# 1 ------------------------------------------------------------------------


def exact_identities(master_seed: int = DEFAULT_SEED) -> CriterionResult:
    """Sylvester, trace, determinant, biorthogonality and overlap identities.

    The statistic is the largest violation divided by its tolerance, so the
    criterion passes at ``<= 1``.
    """
    worst = {}

    def note(key, ratio):
        worst[key] = max(worst.get(key, 0.0), float(ratio))

    for k in range(100):
        rng = _seed(master_seed, k, 10).generator()
        n = int(rng.integers(1, 9))
        d = int(rng.integers(1, 4))
        A = complex_normal(rng, (n, d))
        B = complex_normal(rng, (d, n))
        lhs, rhs = sylvester_check(A, B)
        note("sylvester", abs(lhs - rhs) / 1e-10)

    for k in range(20):
        seed = _seed(master_seed, k, 11)
        n = 4 + k % 17
        rng = seed.generator()
        t = float(rng.uniform(0.1, 5.0))
        model, H = draw_instance(ModelKind.ANTI_HERMITIAN, n, seed)
        lam = np.linalg.eigvals(build_matrix(model, H, t))
        note("trace", abs(lam.imag.sum() - t) / (1e-9 * n))

        t = float(rng.uniform(-0.95, 0.95))
        model, U = draw_instance(ModelKind.MULTIPLICATIVE, n, seed)
        lam = np.linalg.eigvals(build_matrix(model, U, t))
        note("determinant", abs(np.prod(np.abs(lam)) - abs(t)) / (1e-8 * max(abs(t), 1e-300)))

        model, G = draw_instance(ModelKind.ADDITIVE, n, seed, w="uniform")
        es = eigen_decompose(build_matrix(model, G, float(rng.uniform(0.5, 3.0))))
        note("biorthogonality", es.biorthogonality_error() / 1e-8)
        O = overlap_matrix(es)
        note("row_sums", np.max(np.abs(O.sum(axis=1) - 1.0)) / 1e-7)
        note("diag_ge_1", max(0.0, 1.0 - 1e-8 - float(np.min(O.diagonal().real))) / 1e-8)

    stat = max(worst.values())
    return _result("exact_identities", stat, 1.0, "<=", worst)


# 2 ------------------------------------------------------------------------


def level_sets(master_seed: int = DEFAULT_SEED) -> CriterionResult:
    """Every eigenvalue of ``G(t)`` solves ``W(lambda) = level(t)``."""
    worst = {}
    failures = 0
    for kind in ModelKind:
        err = 0.0
        for k in range(50):
            seed = _seed(master_seed, k, 20)
            rng = seed.generator()
            n = int(rng.integers(2, 21))
            model, base = draw_instance(kind, n, seed, w="uniform")
            if kind is ModelKind.MULTIPLICATIVE:
                t = float(rng.uniform(-0.9, 0.9))
            else:
                t = float(rng.uniform(0.5, 3.0)) * (1 if rng.random() < 0.5 else -1)
            target = level_target(model, t)
            for lam in np.linalg.eigvals(build_matrix(model, base, t)):
                try:
                    err = max(err, abs(spectral_function(model, base, lam) - target))
                except RmtLabError:
                    failures += 1
                    err = math.inf
        worst[kind.value] = err
    worst["solver_failures"] = failures
    stat = max(v for k, v in worst.items() if k != "solver_failures")
    return _result("level_sets", stat, 1e-7, "<=", worst)


# 3 ------------------------------------------------------------------------


def additive_single_outlier(master_seed: int = DEFAULT_SEED, trials: int = 200) -> CriterionResult:
    """Ginibre ``n = 100`` plus ``20 v v^*``: one eigenvalue beyond 1.2, within 1 of 20."""
    n, t = 100, 20.0
    hits = 0
    for k in range(trials):
        model, G = draw_instance(ModelKind.ADDITIVE, n, _seed(master_seed, k, 30))
        lam = np.linalg.eigvals(build_matrix(model, G, t))
        big = lam[np.abs(lam) > 1.2]
        hits += big.shape[0] == 1 and abs(big[0] - t) <= 1.0
    freq = float(hits / trials)
    return _result("additive_single_outlier", freq, FREQUENCY, ">=", {"trials": trials})


# 4 ------------------------------------------------------------------------


def antihermitian_outlier(master_seed: int = DEFAULT_SEED, trials: int = 200) -> CriterionResult:
    """GUE ``n = 100``: outlier near ``1.5 i`` at ``t = 2``; nothing above 0.1 at ``t = 0.5``."""
    n = 100
    hits_super = hits_sub = 0
    for k in range(trials):
        model, H = draw_instance(ModelKind.ANTI_HERMITIAN, n, _seed(master_seed, k, 40))
        lam = np.linalg.eigvals(build_matrix(model, H, 2.0))
        order = np.argsort(lam.imag)[::-1]
        top, rest = lam[order[0]], lam[order[1:]]
        hits_super += abs(top - 1.5j) <= 0.3 and rest.imag.max() <= 0.15
        lam = np.linalg.eigvals(build_matrix(model, H, 0.5))
        hits_sub += lam.imag.max() <= 0.1
    f_super, f_sub = float(hits_super / trials), float(hits_sub / trials)
    return _result(
        "antihermitian_outlier",
        min(f_super, f_sub),
        FREQUENCY,
        ">=",
        {"supercritical": f_super, "subcritical": f_sub, "trials": trials},
    )


# 5 ------------------------------------------------------------------------


def _ua_separated(lam: np.ndarray) -> bool:
    a = np.abs(lam)
    return int(np.sum(a <= UA_INNER)) == 1 and int(np.sum(a < UA_OUTER)) == 1


def ua_outlier(master_seed: int = DEFAULT_SEED, trials: int = 200) -> CriterionResult:
    """Haar ``n = 250``: one ``|lambda| <= 0.6`` and the rest ``>= 0.85`` at ``t = n^-0.7``.

    The contrast at ``t = 5 / sqrt(n)`` must fall below the frequency bar.
    The statistic is the main frequency; the criterion also requires the
    contrast frequency to stay below it.
    """
    n = 250
    t_main, t_contrast = n**-0.7, 5.0 / math.sqrt(n)
    main = contrast = 0
    counts = []
    for k in range(trials):
        model, U = draw_instance(ModelKind.MULTIPLICATIVE, n, _seed(master_seed, k, 50))
        lam = np.linalg.eigvals(build_matrix(model, U, t_main))
        main += _ua_separated(lam)
        counts.append(int(np.sum(np.abs(lam) < UA_OUTER)))
        contrast += _ua_separated(np.linalg.eigvals(build_matrix(model, U, t_contrast)))
    f_main, f_contrast = main / trials, contrast / trials
    res = _result(
        "ua_outlier",
        f_main,
        FREQUENCY,
        ">=",
        {
            "contrast_frequency": f_contrast,
            "mean_count_inside_outer": float(np.mean(counts)),
            "trials": trials,
        },
    )
    res.passed = res.passed and f_contrast < FREQUENCY
    return res


# 6 ------------------------------------------------------------------------


def bessel_count(master_seed: int = DEFAULT_SEED, trials: int = 500) -> CriterionResult:
    """Mean number of eigenvalues above ``Im = 0.03`` at ``n = 100``, ``t = 1``.

    The statistic is ``max(ratio, 1 / ratio)`` of empirical to predicted mean.
    """
    n, t, y = 100, 1.0, 0.03
    counts = []
    for k in range(trials):
        model, H = draw_instance(ModelKind.ANTI_HERMITIAN, n, _seed(master_seed, k, 60))
        lam = np.linalg.eigvals(build_matrix(model, H, t))
        counts.append(int(np.sum(lam.imag > y)))
    emp = float(np.mean(counts))
    pred = expected_count(n, t, y)
    ratio = emp / pred if emp > 0 else math.inf
    stat = max(ratio, 1.0 / ratio) if ratio > 0 else math.inf
    return _result("bessel_count", stat, 2.0, "<=", {"empirical": emp, "predicted": pred, "trials": trials})


# 7 ------------------------------------------------------------------------


def _matched_zero_cloud(c: complex, master_seed: int, trials: int, stream: int) -> list:
    r_max = GAF_MATCH_ANNULI[-1][1]
    K = 2 * required_truncation(r_max)
    out = []
    for k in range(trials):
        g = sample_gaf(K, _seed(master_seed, k, stream)).times_z()
        out.append(gaf_zeros(g, c, r_max))
    return out


def gaf_match(master_seed: int = DEFAULT_SEED, trials: int = 200) -> CriterionResult:
    """Annulus counts of rescaled outliers against zeros of ``z g(z) - c``.

    Additive, ``n = 200``, ``t = 2 sqrt(n)`` with independent ``v`` and ``w``:
    inverses of the eigenvalues beyond modulus 1.05 against ``c = 1/2``.
    UA, ``n = 250``, ``t = 2 / sqrt(n)``: the whole spectrum against
    ``c = sqrt(n) t / (1 - t)``. The statistic is the largest ``|z-score|``.
    """
    mu = 2.0
    n_add, n_ua = 200, 250
    t_add = mu * math.sqrt(n_add)
    add_pts = []
    for k in range(trials):
        model, G = draw_instance(ModelKind.ADDITIVE, n_add, _seed(master_seed, k, 70), w="uniform")
        lam = np.linalg.eigvals(build_matrix(model, G, t_add))
        add_pts.append(1.0 / lam[np.abs(lam) > 1.05])
    add_ref = _matched_zero_cloud(1.0 / mu, master_seed, trials, 71)

    t_ua = 2.0 / math.sqrt(n_ua)
    ua_pts = []
    for k in range(trials):
        model, U = draw_instance(ModelKind.MULTIPLICATIVE, n_ua, _seed(master_seed, k, 72))
        ua_pts.append(np.linalg.eigvals(build_matrix(model, U, t_ua)))
    ua_ref = _matched_zero_cloud(math.sqrt(n_ua) * t_ua / (1.0 - t_ua), master_seed, trials, 73)

    details = {}
    worst = 0.0
    for label, a, b in (("additive", add_pts, add_ref), ("ua", ua_pts, ua_ref)):
        comps = compare_clouds(a, b, GAF_MATCH_ANNULI)
        details[label] = [c.as_record() for c in comps]
        worst = max(worst, max(abs(c.z_score) for c in comps))
    details["trials"] = trials
    return _result("gaf_match", worst, 3.0, "<=", details)


# 8 ------------------------------------------------------------------------


def gaf_sanity(master_seed: int = DEFAULT_SEED, trials: int = 2000) -> CriterionResult:
    """Mean zero count of ``g`` in ``|z| <= 0.5`` against ``1/3``; root and winding counts agree."""
    r = 0.5
    K = required_truncation(r)
    counts = []
    mismatches = 0
    for k in range(trials):
        try:
            counts.append(gaf_zeros(sample_gaf(K, _seed(master_seed, k, 80)), 0.0, r).shape[0])
        except CountMismatch:
            mismatches += 1
    mean = float(np.mean(counts)) if counts else math.nan
    deviation = abs(mean - r * r / (1 - r * r))
    res = _result("gaf_sanity", deviation, 0.05, "<=", {"mean": mean, "mismatches": mismatches, "K": K})
    res.passed = res.passed and mismatches == 0
    return res


# 9 ------------------------------------------------------------------------


def ode_checks(master_seed: int = DEFAULT_SEED) -> CriterionResult:
    """Residual of the trajectory ODE, RK4 endpoints and first-order velocities.

    Statistic: largest of residual / 1e-3, endpoint error / 1e-4 and
    velocity error / 1e-6.
    """
    residuals = []
    skipped = 0
    for k in range(10):
        model, G = draw_instance(ModelKind.ADDITIVE, 20, _seed(master_seed, k, 90))
        b = track(model, G, 2.0, 3.0, initial_steps=200)
        try:
            residuals.append(ode_residual(b).ravel())
        except RmtLabError:
            skipped += 1
    med = float(np.median(np.concatenate(residuals))) if residuals else math.inf

    end_err = 0.0
    vel_err = 0.0
    used = 0
    k = 0
    while used < 10 and k < 100:
        model, G = draw_instance(ModelKind.ADDITIVE, 5, _seed(master_seed, k, 91))
        k += 1
        b = track(model, G, 0.0, 1.0, initial_steps=200)
        if b.min_gap < 0.05:
            continue
        used += 1
        z0, p0 = velocity_field(model, G, 0.0)
        sol = integrate_ode(z0, p0, (0.0, 1.0), 1e-3)
        direct = np.linalg.eigvals(build_matrix(model, G, 1.0))
        perm = match_sets(sol.endpoint(), direct)
        end_err = max(end_err, float(np.max(np.abs(direct[perm] - sol.endpoint()))))

        h = 1e-5
        fwd = np.linalg.eigvals(build_matrix(model, G, h))
        bwd = np.linalg.eigvals(build_matrix(model, G, -h))
        fd = (fwd[match_sets(z0, fwd)] - bwd[match_sets(z0, bwd)]) / (2 * h)
        vel_err = max(vel_err, float(np.max(np.abs(fd - p0))))
    details = {
        "median_residual": med,
        "endpoint_error": end_err,
        "velocity_error": vel_err,
        "residual_runs_skipped": skipped,
        "integration_runs": used,
    }
    stat = max(med / 1e-3, end_err / 1e-4, vel_err / 1e-6)
    return _result("ode_checks", stat, 1.0, "<=", details)


# 10 -----------------------------------------------------------------------


def large_t(master_seed: int = DEFAULT_SEED, trials: int = 20) -> CriterionResult:
    """Finite spectrum at ``t = 1e6`` against the large-``t`` limits.

    Anti-Hermitian ``n = 50``: non-outlier eigenvalues real to 1e-3, equal to
    the compression spectrum to 1e-3 and interlacing the base spectrum.
    Additive ``n = 20``: equal to the numerator roots to 1e-3.
    Statistic: the largest of these deviations (interlacing violations count
    as their distance).
    """
    t = 1e6
    imag_err = match_err = interlace_err = add_err = 0.0
    for k in range(trials):
        model, H = draw_instance(ModelKind.ANTI_HERMITIAN, 50, _seed(master_seed, k, 100))
        lam = np.linalg.eigvals(build_matrix(model, H, t))
        lim = large_t_limits(model, H, method="compression")
        out, matched = split_outlier(lam, lim)
        finite = lam[matched]
        imag_err = max(imag_err, float(np.max(np.abs(finite.imag))))
        match_err = max(match_err, float(np.max(np.abs(finite - lim))))
        mu = np.sort(lim.real)
        h = np.sort(np.linalg.eigvalsh(H))
        below = np.maximum(h[:-1] - mu, 0.0)
        above = np.maximum(mu - h[1:], 0.0)
        interlace_err = max(interlace_err, float(max(below.max(), above.max())))

        model, G = draw_instance(ModelKind.ADDITIVE, 20, _seed(master_seed, k, 101))
        lam = np.linalg.eigvals(build_matrix(model, G, t))
        lim = large_t_limits(model, G, method="polynomial")
        out, matched = split_outlier(lam, lim)
        add_err = max(add_err, float(np.max(np.abs(lam[matched] - lim))))
    details = {
        "antihermitian_imag": imag_err,
        "antihermitian_match": match_err,
        "interlacing_violation": interlace_err,
        "additive_match": add_err,
    }
    return _result("large_t_limits", max(details.values()), 1e-3, "<=", details)


# 11 -----------------------------------------------------------------------


def local_law(master_seed: int = DEFAULT_SEED, trials: int = 200) -> CriterionResult:
    """GUE ``n = 200`` at ``z = 2.5 + 0.5i``: local-law margin at most 1 at ``eps = 0.1``."""
    n, z, eps = 200, 2.5 + 0.5j, 0.1
    margins = []
    for k in range(trials):
        seed = _seed(master_seed, k, 110)
        H = sample_gue(n, seed.substream(0))
        v = sample_unit_vector(n, seed.substream(1))
        margins.append(local_law_margin(H, v, z, eps))
    margins = np.array(margins)
    freq = float(np.mean(margins <= 1.0))
    return _result("local_law", freq, FREQUENCY, ">=", {"median_margin": float(np.median(margins))})


# 12 -----------------------------------------------------------------------


def ensemble_statistics(master_seed: int = DEFAULT_SEED) -> CriterionResult:
    """Semicircle mass, circular-law containment and Kostlan's modulus law.

    Statistic: largest of ``|mass - target| / 0.03``,
    ``(0.99 - containment) / 0.01 + 1`` (at most 1 when containment >= 0.99) and
    ``|count - expected| / (3 stderr)``.
    """
    ev = np.concatenate([np.linalg.eigvalsh(sample_gue(200, _seed(master_seed, k, 120))) for k in range(50)])
    mass = float(np.mean(np.abs(ev) <= 1.0))
    target = semicircle_mass(-1.0, 1.0)

    lam = np.concatenate([np.linalg.eigvals(sample_ginibre(200, _seed(master_seed, k, 121))) for k in range(20)])
    containment = float(np.mean(np.abs(lam) <= 1.05))

    n, r, m = 100, 0.8, 400
    outside = [
        int(np.sum(np.abs(np.linalg.eigvals(sample_ginibre(n, _seed(master_seed, k, 122)))) > r)) for k in range(m)
    ]
    mean = float(np.mean(outside))
    stderr = float(np.std(outside, ddof=1) / math.sqrt(m))
    predicted = kostlan_expected_outside(n, r)

    parts = {
        "semicircle": abs(mass - target) / 0.03,
        "containment": (0.99 - containment) / 0.01 + 1.0,
        "kostlan": abs(mean - predicted) / (3.0 * stderr),
    }
    details = {
        "semicircle_mass": mass,
        "semicircle_target": target,
        "containment": containment,
        "kostlan_mean": mean,
        "kostlan_stderr": stderr,
        "kostlan_predicted": predicted,
        "scaled": parts,
    }
    return _result("ensemble_statistics", max(parts.values()), 1.0, "<=", details)


CRITERIA = {
    1: exact_identities,
    2: level_sets,
    3: additive_single_outlier,
    4: antihermitian_outlier,
    5: ua_outlier,
    6: bessel_count,
    7: gaf_match,
    8: gaf_sanity,
    9: ode_checks,
    10: large_t,
    11: local_law,
    12: ensemble_statistics,
}

SUITES = {
    "identities": (1,),
    "level-sets": (2,),
    "single-outlier": (3,),
    "musical-chairs": (4,),
    "ua": (5,),
    "bessel": (6,),
    "gaf-match": (7,),
    "gaf": (8,),
    "ode": (9,),
    "limits": (10,),
    "local-law": (11,),
    "ensembles": (12,),
    "all": tuple(CRITERIA),
}


def run_criterion(number: int, master_seed: int = DEFAULT_SEED) -> CriterionResult:
    start = time.perf_counter()
    res = CRITERIA[number](master_seed)
    res.seconds = time.perf_counter() - start
    return res


def verify(suite: str = "all", master_seed: int = DEFAULT_SEED) -> list[CriterionResult]:
    """Run a named suite; raises ``KeyError`` for an unknown name."""
    return [run_criterion(k, master_seed) for k in SUITES[suite]]
