"""Loss modeling and the sensitivity sweeps."""

import numpy as np
import pytest

from heraldkit.fock import (
    MODE_SECOND,
    DensityMatrix,
    FockVector,
    basis_state,
    fidelity,
    partial_trace,
)
from heraldkit.imperfections import (
    ImperfectionSpec,
    conditional_output_lossy,
    loss_channel,
    sweep_efficiency,
    sweep_parameter_deviation,
)
from heraldkit.scheme import (
    HM,
    SPD,
    SchemeParams,
    conditional_output,
    embedded_two_mode_state,
    misfit,
    success_prob_spd,
)
from heraldkit.states import SqueezedCoherentParams, binomial_state, coherent_state

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


def random_density(cutoff: int, seed: int) -> DensityMatrix:
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((cutoff + 1, cutoff + 1)) + 1j * rng.standard_normal(
        (cutoff + 1, cutoff + 1)
    )
    rho = a @ a.conj().T
    return DensityMatrix(rho / np.trace(rho).real, cutoff)


def random_pure(cutoff: int, seed: int) -> FockVector:
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(cutoff + 1) + 1j * rng.standard_normal(cutoff + 1)
    return FockVector(amps / np.linalg.norm(amps), cutoff)


# ------------------------------------------------------------ loss channel


def test_single_photon_loss():
    rho = loss_channel(basis_state(1, 10), 0.75, 10)
    expect = np.zeros((11, 11))
    expect[0, 0] = 0.25
    expect[1, 1] = 0.75
    np.testing.assert_allclose(rho.rho, expect, atol=1e-12)


def test_coherent_state_stays_coherent():
    alpha = 1.1 * np.exp(0.4j)
    eta = 0.8
    rho = loss_channel(coherent_state(alpha, 40), eta, 40)
    shrunk = coherent_state(np.sqrt(eta) * alpha, 40)
    assert fidelity(shrunk, rho) >= 1 - 1e-10


def test_identity_channel():
    rho_in = random_density(12, seed=3)
    rho_out = loss_channel(rho_in, 1.0, 12)
    np.testing.assert_allclose(rho_out.rho, rho_in.rho, atol=1e-12)


def test_full_absorption_gives_vacuum():
    rho = loss_channel(random_pure(12, seed=4), 0.0, 12)
    expect = np.zeros((13, 13))
    expect[0, 0] = 1.0
    np.testing.assert_allclose(rho.rho, expect, atol=1e-12)


@pytest.mark.parametrize("eta", [0.3, 0.9])
def test_trace_preserved(eta):
    for state in (random_pure(15, seed=7), random_density(15, seed=8)):
        rho = loss_channel(state, eta, 15)
        assert np.trace(rho.rho).real == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(rho.rho, rho.rho.conj().T, atol=1e-12)


def test_channel_composition():
    psi = random_pure(15, seed=11)
    once = loss_channel(loss_channel(psi, 0.8, 15), 0.9, 15)
    direct = loss_channel(psi, 0.72, 15)
    np.testing.assert_allclose(once.rho, direct.rho, atol=1e-10)


def test_kraus_route_matches_dilation_route():
    # pure inputs go through the explicit vacuum-ancilla dilation, density
    # matrices through the Kraus sum; both must be the same channel
    psi = random_pure(12, seed=13)
    via_pure = loss_channel(psi, 0.6, 12)
    rho_in = DensityMatrix(np.outer(psi.amps, psi.amps.conj()), 12)
    via_mixed = loss_channel(rho_in, 0.6, 12)
    np.testing.assert_allclose(via_pure.rho, via_mixed.rho, atol=1e-12)


def test_loss_channel_validates_eta():
    with pytest.raises(ValueError):
        loss_channel(basis_state(0, 5), 1.2, 5)
    with pytest.raises(ValueError):
        loss_channel(basis_state(0, 5), -0.1, 5)


def test_imperfection_spec_validation():
    with pytest.raises(ValueError):
        ImperfectionSpec(eta_det=1.5)
    with pytest.raises(ValueError):
        ImperfectionSpec(eta_signal=-0.2)


# ------------------------------------------------------------ lossy pipeline


@pytest.mark.parametrize("p", [ROW_BINOM_SPD, ROW_BINOM_HM], ids=["spd", "hm"])
def test_unit_efficiency_reproduces_ideal(p):
    rho, weight = conditional_output_lossy(
        p, ImperfectionSpec(), 30, check_input_tail=False
    )
    ideal = conditional_output(p, 30, check_input_tail=False)
    assert fidelity(ideal.state, rho) >= 1 - 1e-12
    if isinstance(p.measurement, SPD):
        expect = success_prob_spd(p, 30, check_input_tail=False)
        assert weight == pytest.approx(expect, rel=1e-10)


def test_blind_detector_never_heralds():
    rho, weight = conditional_output_lossy(
        ROW_BINOM_SPD, ImperfectionSpec(eta_det=0.0), 30, check_input_tail=False
    )
    assert rho is None
    assert weight == 0.0


def test_lossy_output_is_valid_density_matrix():
    for imp in (ImperfectionSpec(eta_det=0.85), ImperfectionSpec(eta_signal=0.85),
                ImperfectionSpec(eta_det=0.9, eta_signal=0.8)):
        rho, weight = conditional_output_lossy(
            ROW_BINOM_SPD, imp, 30, check_input_tail=False
        )
        assert weight > 0.0
        np.testing.assert_allclose(rho.rho, rho.rho.conj().T, atol=1e-12)
        assert np.trace(rho.rho).real == pytest.approx(1.0, abs=1e-10)
        assert np.min(np.linalg.eigvalsh(rho.rho)) >= -1e-10


def test_signal_loss_factorizes_through_loss_channel():
    # loss after conditioning is exactly the loss channel applied to the
    # ideal conditional state, and does not change the herald weight
    eta = 0.83
    rho, weight = conditional_output_lossy(
        ROW_BINOM_SPD, ImperfectionSpec(eta_signal=eta), 30, check_input_tail=False
    )
    ideal = conditional_output(ROW_BINOM_SPD, 30, check_input_tail=False)
    expect = loss_channel(ideal.state, eta, 30)
    np.testing.assert_allclose(rho.rho, expect.rho, atol=1e-10)
    assert weight == pytest.approx(
        success_prob_spd(ROW_BINOM_SPD, 30, check_input_tail=False), rel=1e-10
    )


def test_inefficient_spd_herald_weight_matches_povm():
    # heralding on one photon behind a loss eta is the diagonal POVM
    # element n eta (1-eta)^(n-1) on the pre-loss measured arm
    eta = 0.7
    _, weight = conditional_output_lossy(
        ROW_BINOM_SPD, ImperfectionSpec(eta_det=eta), 30, check_input_tail=False
    )
    st = embedded_two_mode_state(ROW_BINOM_SPD, 30, check_input_tail=False)
    rho3 = partial_trace(st, MODE_SECOND)
    diag = np.diag(rho3.rho).real / np.trace(rho3.rho).real
    n = np.arange(61)
    povm = n * eta * (1.0 - eta) ** (n - 1)
    povm[0] = 0.0
    assert weight == pytest.approx(float(np.dot(povm, diag)), rel=1e-10)


@pytest.mark.parametrize("p", [ROW_BINOM_SPD, ROW_BINOM_HM], ids=["spd", "hm"])
def test_detector_loss_strictly_degrades_fit(p):
    tgt = binomial_state(0.3, 7, 30) if isinstance(p.measurement, SPD) else \
        binomial_state(0.45, 8, 30)
    ideal = misfit(conditional_output(p, 30, check_input_tail=False), tgt)
    rho, _ = conditional_output_lossy(
        p, ImperfectionSpec(eta_det=0.9), 30, check_input_tail=False
    )
    assert misfit(rho, tgt) > ideal


# ------------------------------------------------------------------- sweeps


def test_deviation_sweep_zero_point_is_exact():
    tgt = binomial_state(0.3, 7, 30)
    pts = sweep_parameter_deviation(
        ROW_BINOM_SPD, tgt, [0.0, 0.05], n_samples=8, seed=5, cutoff=30
    )
    ideal = misfit(conditional_output(ROW_BINOM_SPD, 30, check_input_tail=False), tgt)
    assert pts[0].sweep_var == 0.0
    assert pts[0].misfit_mean == ideal
    assert pts[0].misfit_max == ideal


def test_deviation_sweep_deterministic_and_order_insensitive():
    tgt = binomial_state(0.3, 7, 30)
    kw = dict(n_samples=6, seed=9, cutoff=30)
    a = sweep_parameter_deviation(ROW_BINOM_SPD, tgt, [0.0, 0.02, 0.1], **kw)
    b = sweep_parameter_deviation(ROW_BINOM_SPD, tgt, [0.1, 0.0, 0.02], **kw)
    for pa, pb in zip(a, b):
        assert pa == pb


def test_deviation_sweep_envelope_monotone():
    tgt = binomial_state(0.3, 7, 30)
    for sampling in ("signed_uniform", "worst_case"):
        pts = sweep_parameter_deviation(
            ROW_BINOM_SPD, tgt, [0.0, 0.01, 0.05, 0.1, 0.2],
            sampling=sampling, n_samples=10, seed=3, cutoff=30,
        )
        maxes = [pt.misfit_max for pt in pts]
        assert all(b >= a for a, b in zip(maxes, maxes[1:]))


def test_deviation_sweep_small_deviation_stays_small():
    tgt = binomial_state(0.3, 7, 30)
    pts = sweep_parameter_deviation(
        ROW_BINOM_SPD, tgt, [0.01], n_samples=20, seed=1, cutoff=30
    )
    assert pts[0].misfit_max < 1e-1


def test_deviation_sweep_validation():
    tgt = binomial_state(0.3, 7, 30)
    with pytest.raises(ValueError):
        sweep_parameter_deviation(ROW_BINOM_SPD, tgt, [0.0, 0.5], cutoff=30)
    with pytest.raises(ValueError):
        sweep_parameter_deviation(ROW_BINOM_SPD, tgt, [0.1], sampling="gauss",
                                  cutoff=30)
    with pytest.raises(ValueError):
        sweep_parameter_deviation(ROW_BINOM_SPD, tgt, [0.1], n_samples=0, cutoff=30)


def test_efficiency_sweep_unit_endpoint():
    tgt = binomial_state(0.3, 7, 30)
    pts = sweep_efficiency(
        ROW_BINOM_SPD, tgt, [0.9, 1.0, 0.8], cutoff=30, check_input_tail=False
    )
    ideal = misfit(conditional_output(ROW_BINOM_SPD, 30, check_input_tail=False), tgt)
    assert [pt.sweep_var for pt in pts] == [0.8, 0.9, 1.0]
    assert abs(pts[-1].misfit_mean - ideal) <= 1e-12
    # lower efficiency never helps
    eps = [pt.misfit_mean for pt in pts]
    assert eps[0] > eps[1] > eps[2]


def test_efficiency_sweep_signal_blackout():
    tgt = binomial_state(0.3, 7, 30)
    pts = sweep_efficiency(
        ROW_BINOM_SPD, tgt, [0.0], which="signal", cutoff=30, check_input_tail=False
    )
    # total absorption leaves vacuum on the signal arm
    expect = 1.0 - abs(tgt.amps[0]) ** 2
    assert pts[0].misfit_mean == pytest.approx(expect, abs=1e-10)


def test_efficiency_sweep_validation():
    tgt = binomial_state(0.3, 7, 30)
    with pytest.raises(ValueError):
        sweep_efficiency(ROW_BINOM_SPD, tgt, [0.9], which="elsewhere", cutoff=30)
    with pytest.raises(ValueError):
        sweep_efficiency(ROW_BINOM_SPD, tgt, [1.5], cutoff=30)
