"""Seeded GA search, bounds/mask plumbing, and simplex polish."""

import numpy as np
import pytest

from heraldkit.errors import ConfigError
from heraldkit.optimizer import (
    Bounds,
    FixedMask,
    GAConfig,
    local_polish,
    objective,
    optimize,
    params_to_vector,
    vector_to_params,
)
from heraldkit.optimizer import _reflect_into, layout_for_kind
from heraldkit.scheme import HM, SPD, SchemeParams, conditional_output, misfit
from heraldkit.states import Binomial, SqueezedCoherentParams, target_state

ROW_BINOM_SPD = SchemeParams(
    SqueezedCoherentParams(0.74, 3.50, 0.10, 2.14),
    SqueezedCoherentParams(0.16, 4.43, 1.97, 0.08),
    0.69,
    SPD(),
)
ROW_BINOM_HM = SchemeParams(
    SqueezedCoherentParams(0.45, 0.74, 0.34, 1.01),
    SqueezedCoherentParams(0.45, 0.28, 1.97, 0.06),
    0.90,
    HM(0.61, 0.04, 0.30),
)

TINY = GAConfig(
    population_size=14,
    generations=10,
    tournament_size=3,
    elitism_count=2,
    restarts=2,
    seed=7,
)


# --------------------------------------------------------------- plumbing


def test_layouts():
    assert layout_for_kind("spd") == (
        "r1", "theta1", "alpha1", "phi1", "r2", "theta2", "alpha2", "phi2", "T",
    )
    assert layout_for_kind("hm") == layout_for_kind("spd") + ("x", "lam")
    with pytest.raises(ValueError):
        layout_for_kind("adaptive")


def test_default_bounds():
    b = Bounds.for_kind("hm")
    by_name = dict(zip(b.names, zip(b.lower, b.upper, b.periodic)))
    two_pi = 2 * np.pi
    assert by_name["r1"] == (0.0, 1.7, False)
    assert by_name["alpha2"] == (0.0, 4.0, False)
    assert by_name["T"] == (0.1, 0.9, False)
    assert by_name["x"] == (0.0, 4.0, False)
    for angle in ("theta1", "phi1", "theta2", "phi2", "lam"):
        lo, hi, per = by_name[angle]
        assert (lo, per) == (0.0, True)
        assert hi == pytest.approx(two_pi)


def test_bounds_validation_and_containment():
    with pytest.raises(ValueError):
        Bounds(("a",), (1.0,), (1.0,), (False,))
    b = Bounds.for_kind("spd")
    vec, _, _ = params_to_vector(ROW_BINOM_SPD)
    assert b.contains(vec)
    vec_out = vec.copy()
    vec_out[0] = 2.0
    assert not b.contains(vec_out)


def test_fixed_mask_constructors():
    free = FixedMask.free("hm")
    assert free.values == (None,) * 11
    pinned = FixedMask.pin("spd", r1=0.5, T=0.3)
    assert pinned.values[0] == 0.5 and pinned.values[8] == 0.3
    assert all(v is None for i, v in enumerate(pinned.values) if i not in (0, 8))
    with pytest.raises(ValueError):
        FixedMask.pin("spd", x=1.0)  # an HM-only dimension


def test_ga_config_validation_paths():
    with pytest.raises(ConfigError) as err:
        GAConfig(population_size=0)
    assert err.value.path == "ga.population_size"
    with pytest.raises(ConfigError):
        GAConfig(generations=0)
    with pytest.raises(ConfigError):
        GAConfig(crossover_rate=1.5)
    with pytest.raises(ConfigError):
        GAConfig(elitism_count=50, population_size=10)


def test_vector_params_round_trip():
    for p in (ROW_BINOM_SPD, ROW_BINOM_HM):
        vec, kind, window = params_to_vector(p)
        back = vector_to_params(vec, kind, window)
        assert back == p
    # angles wrap on assembly
    vec, _, _ = params_to_vector(ROW_BINOM_SPD)
    vec[1] += 2 * np.pi
    assert vector_to_params(vec, "spd").in1.theta == pytest.approx(
        ROW_BINOM_SPD.in1.theta
    )


def test_reflect_into_folds_into_box():
    lo = np.array([0.0, 0.1])
    hi = np.array([1.7, 0.9])
    rng = np.random.default_rng(5)
    v = rng.uniform(-6, 6, size=(200, 2))
    folded = _reflect_into(v, lo, hi)
    assert np.all(folded >= lo) and np.all(folded <= hi)
    # interior points are fixed, near-wall overshoot reflects back inside
    inside = np.array([[0.5, 0.5]])
    np.testing.assert_allclose(_reflect_into(inside, lo, hi), inside)
    over = np.array([[1.7 + 0.03, 0.9 + 0.01]])
    np.testing.assert_allclose(_reflect_into(over, lo, hi), [[1.7 - 0.03, 0.9 - 0.01]])


# -------------------------------------------------------------- objective


def test_objective_composition_identity():
    tgt_spec = Binomial(0.3, 7)
    got = objective(ROW_BINOM_SPD, tgt_spec, 30)
    tgt = target_state(tgt_spec, 30)
    expect = misfit(conditional_output(ROW_BINOM_SPD, 30, check_input_tail=False), tgt)
    assert got == expect


def test_objective_self_target_is_zero():
    out = conditional_output(ROW_BINOM_SPD, 30, check_input_tail=False)
    assert objective(ROW_BINOM_SPD, out.state, 30) <= 1e-12


def test_objective_reproduces_tabulated_row():
    assert objective(ROW_BINOM_SPD, Binomial(0.3, 7), 40) == pytest.approx(
        1.26e-4, abs=2e-5
    )


def test_objective_rejects_cutoff_mismatch():
    tgt = target_state(Binomial(0.3, 7), 25)
    with pytest.raises(ValueError):
        objective(ROW_BINOM_SPD, tgt, 30)


# ----------------------------------------------------------------- search


def test_optimize_deterministic():
    a = optimize(Binomial(0.5, 2), "spd", cfg=TINY, search_cutoff=12, final_cutoff=12)
    b = optimize(Binomial(0.5, 2), "spd", cfg=TINY, search_cutoff=12, final_cutoff=12)
    assert a.best_params == b.best_params
    assert a.best_misfit == b.best_misfit
    assert a.trace == b.trace
    assert a.evaluations_count == b.evaluations_count
    assert a.seed == TINY.seed


def test_optimize_result_shape():
    res = optimize(Binomial(0.5, 2), "spd", cfg=TINY, search_cutoff=12, final_cutoff=12)
    # best-so-far trace never rises, across restart boundaries included
    assert all(b <= a for a, b in zip(res.trace, res.trace[1:]))
    assert len(res.trace) == TINY.restarts * TINY.generations
    per_restart = TINY.population_size + TINY.generations * (
        TINY.population_size - TINY.elitism_count
    )
    assert res.evaluations_count == TINY.restarts * per_restart
    vec, _, _ = params_to_vector(res.best_params)
    assert Bounds.for_kind("spd").contains(vec)
    assert res.eps_avg is None  # no acceptance window in play
    assert res.best_misfit == objective(res.best_params, Binomial(0.5, 2), 12)


def test_optimize_hm_kind_carries_window():
    res = optimize(
        Binomial(0.5, 2),
        HM(0.0, 0.0, 0.25),
        cfg=GAConfig(population_size=10, generations=6, restarts=1, seed=3),
        search_cutoff=12,
        final_cutoff=12,
    )
    assert isinstance(res.best_params.measurement, HM)
    assert res.best_params.measurement.window_halfwidth == 0.25
    assert res.eps_avg is not None and 0.0 <= res.eps_avg <= 1.0
    assert 0.0 <= res.success_prob <= 1.0


def test_optimize_respects_pins():
    mask = FixedMask.pin("spd", T=0.69, r1=0.74)
    res = optimize(
        Binomial(0.3, 7), "spd", mask=mask, cfg=TINY, search_cutoff=12, final_cutoff=12
    )
    assert res.best_params.transmittance == 0.69
    assert res.best_params.in1.r == 0.74


def test_optimize_fully_pinned_is_flat():
    vec, _, _ = params_to_vector(ROW_BINOM_SPD)
    names = layout_for_kind("spd")
    mask = FixedMask.pin("spd", **dict(zip(names, vec)))
    res = optimize(
        Binomial(0.3, 7), "spd", mask=mask, cfg=TINY, search_cutoff=30, final_cutoff=30
    )
    assert len(set(res.trace)) == 1
    assert res.best_misfit == objective(ROW_BINOM_SPD, Binomial(0.3, 7), 30)
    assert res.best_params == ROW_BINOM_SPD


def test_optimize_pin_outside_bounds_rejected():
    with pytest.raises(ValueError):
        optimize(
            Binomial(0.5, 2), "spd", mask=FixedMask.pin("spd", T=0.95),
            cfg=TINY, search_cutoff=12, final_cutoff=12,
        )


def test_optimize_then_polish_finds_easy_target():
    res = optimize(
        Binomial(0.5, 1), "spd",
        cfg=GAConfig(population_size=60, generations=60, restarts=2, seed=2),
        search_cutoff=15, final_cutoff=15,
    )
    assert res.best_misfit < 0.1
    polished = local_polish(res, Binomial(0.5, 1), cutoff=15, max_iters=600)
    assert polished.best_misfit < 1e-2


# ----------------------------------------------------------------- polish


def test_polish_never_increases():
    res = optimize(Binomial(0.5, 2), "spd", cfg=TINY, search_cutoff=12, final_cutoff=12)
    polished = local_polish(res, Binomial(0.5, 2), cutoff=12, max_iters=120)
    assert polished.best_misfit <= res.best_misfit
    # the search trace is carried through untouched
    assert polished.trace == res.trace
    assert polished.evaluations_count > res.evaluations_count


def test_polish_from_raw_params_records_descent():
    first = local_polish(ROW_BINOM_SPD, Binomial(0.3, 7), cutoff=30, max_iters=300)
    assert len(first.trace) == 2
    assert first.trace[1] <= first.trace[0]
    assert first.best_misfit == first.trace[1]


def test_polish_stays_put_at_converged_point():
    # run the simplex to convergence, then confirm a second pass is inert
    first = local_polish(ROW_BINOM_SPD, Binomial(0.3, 7), cutoff=30, max_iters=4000)
    second = local_polish(
        first.best_params, Binomial(0.3, 7), cutoff=30, max_iters=4000
    )
    assert second.best_misfit <= first.best_misfit
    assert first.best_misfit - second.best_misfit <= 1e-12


def test_polish_recovers_rounding_loss_on_hm_row():
    polished = local_polish(ROW_BINOM_HM, Binomial(0.45, 8), cutoff=40, max_iters=400)
    assert polished.best_misfit <= 10 * 8.06e-4
    vec, _, _ = params_to_vector(polished.best_params)
    assert Bounds.for_kind("hm").contains(vec)


def test_polish_respects_mask():
    mask = FixedMask.pin("spd", T=0.69, alpha2=1.97)
    polished = local_polish(
        ROW_BINOM_SPD, Binomial(0.3, 7), cutoff=30, max_iters=200, mask=mask
    )
    assert polished.best_params.transmittance == 0.69
    assert polished.best_params.in2.alpha_abs == 1.97
    assert polished.best_misfit <= objective(ROW_BINOM_SPD, Binomial(0.3, 7), 30)
