"""Seeded genetic-algorithm search over scheme parameters.

The search vector concatenates the eight input-state parameters with the
beam-splitter transmittance, and for quadrature conditioning also the
outcome x and the phase lam.  Angle dimensions live on [0, 2*pi) and use
wrapped arithmetic in crossover and mutation, so 0 and 2*pi are the same
point and the boundary attracts nothing.  Bounded dimensions reflect
off their limits during mutation instead of clipping; this keeps the
population strictly inside the box almost surely, which matters because
evaluation below the squeezing threshold falls back to the slow
first-principles route.

Search runs at a reduced cutoff; the returned best point is re-scored at
the full cutoff so the reported numbers carry no truncation shortcut.
All randomness derives from a single seed through spawned generators, one
per restart, so a (config, seed, target) triple fixes the result exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from . import tolerances as tol
from .errors import ConfigError
from .fock import FockVector
from .scheme import (
    HM,
    SPD,
    SchemeParams,
    average_misfit,
    conditional_output,
    hm_outcome_density,
    misfit,
    success_prob_hm,
    success_prob_spd,
)
from .states import SqueezedCoherentParams, TargetSpec, target_state

_TWO_PI = 2.0 * np.pi

SPD_LAYOUT = ("r1", "theta1", "alpha1", "phi1", "r2", "theta2", "alpha2", "phi2", "T")
HM_LAYOUT = SPD_LAYOUT + ("x", "lam")

_DIM_BOUNDS = {
    "r1": (0.0, 1.7, False),
    "r2": (0.0, 1.7, False),
    "alpha1": (0.0, 4.0, False),
    "alpha2": (0.0, 4.0, False),
    "theta1": (0.0, _TWO_PI, True),
    "theta2": (0.0, _TWO_PI, True),
    "phi1": (0.0, _TWO_PI, True),
    "phi2": (0.0, _TWO_PI, True),
    "T": (0.1, 0.9, False),
    "x": (0.0, 4.0, False),
    "lam": (0.0, _TWO_PI, True),
}


def layout_for_kind(kind: str) -> tuple[str, ...]:
    if kind == "spd":
        return SPD_LAYOUT
    if kind == "hm":
        return HM_LAYOUT
    raise ValueError(f"unknown measurement kind {kind!r}")


@dataclass(frozen=True)
class Bounds:
    """Per-dimension search box with periodicity flags for angles."""

    names: tuple[str, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    periodic: tuple[bool, ...]

    def __post_init__(self):
        n = len(self.names)
        if not len(self.lower) == len(self.upper) == len(self.periodic) == n:
            raise ValueError("bounds field lengths disagree")
        for name, lo, hi in zip(self.names, self.lower, self.upper):
            if not lo < hi:
                raise ValueError(f"{name}: empty range [{lo}, {hi}]")

    @classmethod
    def for_kind(cls, kind: str) -> "Bounds":
        names = layout_for_kind(kind)
        lo, hi, per = zip(*(_DIM_BOUNDS[n] for n in names))
        return cls(names, lo, hi, per)

    def contains(self, vec: np.ndarray) -> bool:
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        return bool(np.all(vec >= lo) and np.all(vec <= hi))


@dataclass(frozen=True)
class FixedMask:
    """Optional pinned value per dimension; pinned dims never move."""

    values: tuple[float | None, ...]

    @classmethod
    def free(cls, kind: str) -> "FixedMask":
        return cls((None,) * len(layout_for_kind(kind)))

    @classmethod
    def pin(cls, kind: str, **by_name: float) -> "FixedMask":
        names = layout_for_kind(kind)
        unknown = set(by_name) - set(names)
        if unknown:
            raise ValueError(f"unknown dimensions {sorted(unknown)}")
        return cls(tuple(by_name.get(n) for n in names))


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 200
    generations: int = 500
    tournament_size: int = 4
    crossover_rate: float = 0.9
    mutation_sigma_fraction: float = 0.05
    elitism_count: int = 2
    restarts: int = 4
    seed: int = 1

    def __post_init__(self):
        for name in ("population_size", "generations", "tournament_size", "restarts"):
            if getattr(self, name) < 1:
                raise ConfigError(f"ga.{name}", "must be a positive integer")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ConfigError("ga.crossover_rate", "must lie in [0, 1]")
        if self.mutation_sigma_fraction < 0.0:
            raise ConfigError("ga.mutation_sigma_fraction", "must be non-negative")
        if not 0 <= self.elitism_count < self.population_size:
            raise ConfigError(
                "ga.elitism_count", "must be non-negative and below the population size"
            )


@dataclass(frozen=True)
class OptimizationResult:
    best_params: SchemeParams
    best_misfit: float
    success_prob: float
    eps_avg: float | None
    trace: tuple[float, ...]
    seed: int
    evaluations_count: int


def vector_to_params(
    vec: Sequence[float], kind: str, window_halfwidth: float = 0.0
) -> SchemeParams:
    """Assemble SchemeParams from a search vector, wrapping angle entries."""
    v = np.asarray(vec, dtype=float)
    if v.shape != (len(layout_for_kind(kind)),):
        raise ValueError(f"expected {len(layout_for_kind(kind))} entries for {kind}")
    in1 = SqueezedCoherentParams(v[0], v[1] % _TWO_PI, v[2], v[3] % _TWO_PI)
    in2 = SqueezedCoherentParams(v[4], v[5] % _TWO_PI, v[6], v[7] % _TWO_PI)
    if kind == "spd":
        meas: SPD | HM = SPD()
    else:
        meas = HM(v[9], v[10] % _TWO_PI, window_halfwidth)
    return SchemeParams(in1, in2, v[8], meas)


def params_to_vector(p: SchemeParams) -> tuple[np.ndarray, str, float]:
    """Inverse of vector_to_params; returns (vector, kind, window_halfwidth)."""
    head = [
        p.in1.r, p.in1.theta, p.in1.alpha_abs, p.in1.phi,
        p.in2.r, p.in2.theta, p.in2.alpha_abs, p.in2.phi,
        p.transmittance,
    ]
    if isinstance(p.measurement, SPD):
        return np.array(head), "spd", 0.0
    m = p.measurement
    return np.array(head + [m.x, m.lam]), "hm", m.window_halfwidth


def _target_vector(target: TargetSpec | FockVector, cutoff: int) -> FockVector:
    if isinstance(target, FockVector):
        if target.cutoff != cutoff:
            raise ValueError(
                f"target cutoff {target.cutoff} does not match evaluation cutoff {cutoff}"
            )
        return target
    # The search pipeline must be total over the whole box, so targets are
    # materialized without the truncation-quality guard.
    return target_state(target, cutoff, check_tail=False)


def objective(
    params: SchemeParams, target: TargetSpec | FockVector, cutoff: int
) -> float:
    """Misfit of the conditional output against the target.

    Pure and deterministic.  Uses the closed-form output path, falling back
    to the first-principles route when an input squeezing sits below the
    regular-evaluation threshold.  The input tail check is disabled so the
    whole bounded search box evaluates to a finite number.
    """
    tgt = _target_vector(target, cutoff)
    out = conditional_output(params, cutoff, check_input_tail=False)
    return misfit(out, tgt)


def _reflect_into(v: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Fold values into [lo, hi] by reflection at both walls."""
    span = hi - lo
    w = np.mod(v - lo, 2.0 * span)
    return lo + np.minimum(w, 2.0 * span - w)


def _normalize_kind(kind) -> tuple[str, float]:
    if isinstance(kind, str):
        k = kind.lower()
        if k in ("spd", "hm"):
            return k, 0.0
        raise ValueError(f"unknown measurement kind {kind!r}")
    if isinstance(kind, SPD) or kind is SPD:
        return "spd", 0.0
    if isinstance(kind, HM):
        return "hm", kind.window_halfwidth
    if kind is HM:
        return "hm", 0.0
    raise TypeError(f"cannot interpret {kind!r} as a measurement kind")


def _run_restart(
    evaluate, bounds: Bounds, mask: FixedMask, cfg: GAConfig, rng: np.random.Generator
) -> tuple[np.ndarray, float, list[float], int]:
    lo = np.asarray(bounds.lower)
    hi = np.asarray(bounds.upper)
    per = np.asarray(bounds.periodic)
    hard = ~per
    span = hi - lo
    sigma = cfg.mutation_sigma_fraction * span
    pinned = np.array([v is not None for v in mask.values])
    pin_vals = np.array([v if v is not None else 0.0 for v in mask.values])

    pop = lo + rng.uniform(size=(cfg.population_size, lo.size)) * span
    pop[:, pinned] = pin_vals[pinned]
    fit = np.array([evaluate(row) for row in pop])
    evals = cfg.population_size
    gen_best: list[float] = []

    n_child = cfg.population_size - cfg.elitism_count
    for _ in range(cfg.generations):
        order = np.argsort(fit, kind="stable")
        elites = pop[order[: cfg.elitism_count]].copy()
        elite_fit = fit[order[: cfg.elitism_count]].copy()

        # One batched draw per generation keeps the stream layout fixed.
        t_idx = rng.integers(0, cfg.population_size, size=(n_child, 2, cfg.tournament_size))
        coin = rng.uniform(size=n_child)
        blend = rng.uniform(size=(n_child, lo.size))
        noise = rng.standard_normal(size=(n_child, lo.size))

        cand_fit = fit[t_idx]
        winners = np.take_along_axis(
            t_idx, np.argmin(cand_fit, axis=2)[:, :, None], axis=2
        )[:, :, 0]
        p1 = pop[winners[:, 0]]
        p2 = pop[winners[:, 1]]

        delta = p2 - p1
        delta[:, per] = np.mod(delta[:, per] + np.pi, _TWO_PI) - np.pi
        children = p1 + np.where(coin[:, None] < cfg.crossover_rate, blend, 0.0) * delta
        children = children + sigma * noise
        children[:, per] = np.mod(children[:, per], _TWO_PI)
        children[:, hard] = _reflect_into(children[:, hard], lo[hard], hi[hard])
        children[:, pinned] = pin_vals[pinned]

        child_fit = np.array([evaluate(row) for row in children])
        evals += n_child
        pop = np.vstack([elites, children])
        fit = np.concatenate([elite_fit, child_fit])
        gen_best.append(float(fit.min()))

    best = int(np.argmin(fit))
    return pop[best].copy(), float(fit[best]), gen_best, evals


def _score(
    params: SchemeParams, target: TargetSpec | FockVector, cutoff: int
) -> tuple[float, float, float | None]:
    """Misfit, success probability, and windowed average misfit at a cutoff."""
    tgt = _target_vector(target, cutoff)
    out = conditional_output(params, cutoff, check_input_tail=False)
    eps = misfit(out, tgt)
    if isinstance(params.measurement, SPD):
        return eps, success_prob_spd(params, cutoff, check_input_tail=False), None
    if params.measurement.window_halfwidth > 0.0:
        prob = success_prob_hm(params, cutoff, check_input_tail=False)
        eps_avg = average_misfit(params, tgt, cutoff, check_input_tail=False)
    else:
        prob = hm_outcome_density(params, params.measurement.x, cutoff, check_input_tail=False)
        eps_avg = None
    return eps, prob, eps_avg


def optimize(
    target: TargetSpec | FockVector,
    kind,
    bounds: Bounds | None = None,
    mask: FixedMask | None = None,
    cfg: GAConfig | None = None,
    *,
    window_halfwidth: float | None = None,
    search_cutoff: int = tol.SEARCH_CUTOFF,
    final_cutoff: int = tol.DEFAULT_CUTOFF,
) -> OptimizationResult:
    """Genetic-algorithm minimization of the conditional-output misfit.

    Tournament selection, blend crossover (shortest-arc on angles),
    Gaussian mutation with per-dimension sigma equal to
    mutation_sigma_fraction times the range, elitism, and independent
    restarts keeping the overall best.  The trace is the running best
    misfit over all generations of all restarts, so it is monotone by
    construction.  The best point is re-scored at final_cutoff; for
    quadrature conditioning with a positive window halfwidth the success
    probability integrates over the acceptance window and eps_avg is the
    window-averaged misfit, otherwise the probability density at x is
    reported.
    """
    kname, whw = _normalize_kind(kind)
    if window_halfwidth is not None:
        whw = window_halfwidth
    bounds = bounds if bounds is not None else Bounds.for_kind(kname)
    mask = mask if mask is not None else FixedMask.free(kname)
    cfg = cfg if cfg is not None else GAConfig()
    names = layout_for_kind(kname)
    if bounds.names != names:
        raise ValueError("bounds layout does not match the measurement kind")
    if len(mask.values) != len(names):
        raise ValueError("mask layout does not match the measurement kind")
    for name, v, lo, hi in zip(names, mask.values, bounds.lower, bounds.upper):
        if v is not None and not lo <= v <= hi:
            raise ValueError(f"pinned {name}={v} outside [{lo}, {hi}]")

    tgt_search = _target_vector(target, search_cutoff) if not isinstance(
        target, FockVector
    ) else target

    def evaluate(vec: np.ndarray) -> float:
        p = vector_to_params(vec, kname, whw)
        out = conditional_output(p, search_cutoff, check_input_tail=False)
        return misfit(out, tgt_search)

    children = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    best_vec: np.ndarray | None = None
    best_val = np.inf
    all_gen_best: list[float] = []
    evals = 0
    for child in children:
        vec, val, gen_best, n = _run_restart(
            evaluate, bounds, mask, cfg, np.random.default_rng(child)
        )
        all_gen_best.extend(gen_best)
        evals += n
        if val < best_val:
            best_val = val
            best_vec = vec

    trace = tuple(np.minimum.accumulate(all_gen_best))
    best_params = vector_to_params(best_vec, kname, whw)
    eps, prob, eps_avg = _score(best_params, target, final_cutoff)
    return OptimizationResult(
        best_params=best_params,
        best_misfit=eps,
        success_prob=prob,
        eps_avg=eps_avg,
        trace=trace,
        seed=cfg.seed,
        evaluations_count=evals,
    )


def local_polish(
    result: OptimizationResult | SchemeParams,
    target: TargetSpec | FockVector,
    cutoff: int = tol.DEFAULT_CUTOFF,
    max_iters: int = 400,
    mask: FixedMask | None = None,
) -> OptimizationResult:
    """Derivative-free simplex descent from a found or tabulated point.

    Runs Nelder-Mead on the unpinned dimensions, keeping bounded
    dimensions inside the search box and leaving angles free to cross the
    0/2*pi seam (they are wrapped on assembly).  The polished misfit never
    exceeds the starting one: if the simplex fails to improve, the input
    point is returned unchanged.
    """
    if isinstance(result, SchemeParams):
        start_params = result
        prior_trace: tuple[float, ...] = ()
        seed = 0
        prior_evals = 0
    else:
        start_params = result.best_params
        prior_trace = result.trace
        seed = result.seed
        prior_evals = result.evaluations_count

    vec, kname, whw = params_to_vector(start_params)
    names = layout_for_kind(kname)
    bounds = Bounds.for_kind(kname)
    if mask is None:
        mask = FixedMask.free(kname)
    if len(mask.values) != len(names):
        raise ValueError("mask layout does not match the measurement kind")
    free = np.array([v is None for v in mask.values])
    full = vec.copy()
    full[~free] = [v for v in mask.values if v is not None]

    tgt = _target_vector(target, cutoff) if not isinstance(target, FockVector) else target

    def assemble(x: np.ndarray) -> SchemeParams:
        w = full.copy()
        w[free] = x
        return vector_to_params(w, kname, whw)

    def fun(x: np.ndarray) -> float:
        out = conditional_output(assemble(x), cutoff, check_input_tail=False)
        return misfit(out, tgt)

    x0 = full[free]
    eps_start = fun(x0)
    nm_bounds = [
        (-np.inf, np.inf) if p else (lo, hi)
        for lo, hi, p, f in zip(bounds.lower, bounds.upper, bounds.periodic, free)
        if f
    ]
    res = minimize(
        fun,
        x0,
        method="Nelder-Mead",
        bounds=nm_bounds,
        options={"maxiter": max_iters, "xatol": 1e-10, "fatol": 1e-14},
    )
    evals = prior_evals + int(res.nfev) + 1
    if res.fun < eps_start:
        best_params = assemble(res.x)
        eps_here = float(res.fun)
    else:
        best_params = assemble(x0)
        eps_here = eps_start

    eps, prob, eps_avg = _score(best_params, target, cutoff)
    trace = prior_trace if prior_trace else (eps_start, eps_here)
    return OptimizationResult(
        best_params=best_params,
        best_misfit=eps,
        success_prob=prob,
        eps_avg=eps_avg,
        trace=trace,
        seed=seed,
        evaluations_count=evals,
    )
