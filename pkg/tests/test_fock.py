"""Fock-layer unit tests: Hermite evaluation, beam splitter, projections."""

import math

import numpy as np
import pytest

from heraldkit.errors import HermiteOverflowError, NormalizationError
from heraldkit.fock import (
    MODE_FIRST,
    MODE_SECOND,
    BeamSplitterSpec,
    DensityMatrix,
    FockVector,
    basis_state,
    beam_splitter_apply,
    fidelity,
    hermite_sequence,
    partial_trace,
    project_fock,
    project_quadrature,
    quadrature_wavefunction,
    sector_unitary,
    sqrt_factorials,
    tensor,
    vacuum,
)


def random_fock(cutoff: int, seed: int) -> FockVector:
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(cutoff + 1) + 1j * rng.standard_normal(cutoff + 1)
    return FockVector(amps / np.linalg.norm(amps), cutoff)


def random_two_mode(cutoff: int, seed: int, max_total: int | None = None):
    """Random normalized two-mode state, optionally restricted in total photon number."""
    rng = np.random.default_rng(seed)
    c = rng.standard_normal((cutoff + 1, cutoff + 1)) + 1j * rng.standard_normal(
        (cutoff + 1, cutoff + 1)
    )
    if max_total is not None:
        n = np.arange(cutoff + 1)
        c[n[:, None] + n[None, :] > max_total] = 0.0
    from heraldkit.fock import TwoModeState

    return TwoModeState(c / np.linalg.norm(c), cutoff)


def test_sqrt_factorials_match_math_factorial():
    vals = sqrt_factorials(30)
    for n in range(31):
        assert vals[n] == pytest.approx(math.sqrt(math.factorial(n)), rel=1e-13)


def test_hermite_low_orders():
    # H_0 = 1, H_1 = 2z, H_2 = 4z^2 - 2
    h = hermite_sequence(0.5, 1)
    np.testing.assert_allclose(h, [1.0, 1.0])
    h = hermite_sequence(1j, 2)
    np.testing.assert_allclose(h, [1.0, 2j, -6.0])


def hermite_explicit_sum(z: complex, n: int) -> complex:
    # H_n(z) = n! sum_m (-1)^m / (m! (n-2m)!) (2z)^(n-2m)
    total = 0.0 + 0.0j
    for m in range(n // 2 + 1):
        total += (
            (-1) ** m
            / (math.factorial(m) * math.factorial(n - 2 * m))
            * (2 * z) ** (n - 2 * m)
        )
    return math.factorial(n) * total


def test_hermite_recurrence_matches_explicit_sum():
    z = 1.3 + 0.2j
    h = hermite_sequence(z, 10)
    for n in range(11):
        ref = hermite_explicit_sum(z, n)
        assert abs(h[n] - ref) <= 1e-10 * abs(ref)


@pytest.mark.parametrize("z", [0.3, -2.0, 5.0, 2.1 - 1.7j, 0.5 + 4.9j])
def test_hermite_agreement_moderate_orders(z):
    h = hermite_sequence(z, 25)
    for n in range(26):
        ref = hermite_explicit_sum(z, n)
        assert abs(h[n] - ref) <= 1e-10 * max(abs(ref), 1.0)


def test_hermite_overflow_reports_index():
    with pytest.raises(HermiteOverflowError) as err:
        hermite_sequence(1e160, 3)
    assert err.value.index >= 1


def test_quadrature_wavefunction_values():
    assert quadrature_wavefunction(0, 0.0, 1.234) == pytest.approx(np.pi ** -0.25)
    assert quadrature_wavefunction(1, 0.0, 0.0) == 0.0
    # phase rotation preserves the modulus
    a = quadrature_wavefunction(3, 1.2, 0.7)
    b = quadrature_wavefunction(3, 1.2, 0.0)
    assert abs(a) == pytest.approx(abs(b), abs=1e-14)
    assert a == pytest.approx(b * np.exp(-3j * 0.7), abs=1e-14)


def test_quadrature_wavefunction_normalized_over_x():
    # integral of |<x|n>|^2 over x is 1 for each n
    x, w = np.polynomial.legendre.leggauss(200)
    x = x * 10.0
    w = w * 10.0
    for n in (0, 1, 5, 12):
        vals = np.array([abs(quadrature_wavefunction(n, xi, 0.3)) ** 2 for xi in x])
        assert float(np.dot(w, vals)) == pytest.approx(1.0, abs=1e-8)


def test_basis_state_and_vacuum():
    v = basis_state(3, 10)
    assert v.amps[3] == 1.0 and np.count_nonzero(v.amps) == 1
    assert np.array_equal(vacuum(5).amps, basis_state(0, 5).amps)
    with pytest.raises(ValueError):
        basis_state(11, 10)


def test_tensor_products():
    z = tensor(vacuum(4), vacuum(4))
    assert z.amps[0, 0] == 1.0 and np.count_nonzero(z.amps) == 1
    s = tensor(basis_state(1, 4), vacuum(4))
    assert s.amps[1, 0] == 1.0 and np.count_nonzero(s.amps) == 1
    a = random_fock(6, 1)
    b = random_fock(6, 2)
    assert np.linalg.norm(tensor(a, b).amps) == pytest.approx(1.0, abs=1e-12)


def test_tensor_cutoff_mismatch_rejected():
    with pytest.raises(ValueError):
        tensor(vacuum(4), vacuum(5))


@pytest.mark.parametrize("s", [1, 2, 5, 11])
@pytest.mark.parametrize("t", [0.1, 0.5, 0.73])
def test_sector_unitary_is_unitary(s, t):
    u = sector_unitary(s, BeamSplitterSpec(t))
    np.testing.assert_allclose(u @ u.conj().T, np.eye(s + 1), atol=1e-12)


def test_beam_splitter_transparent():
    st = tensor(basis_state(1, 4), vacuum(4))
    out, dropped = beam_splitter_apply(st, BeamSplitterSpec(1.0))
    assert dropped == 0.0
    # |1,0> passes through up to a global phase
    assert abs(out.amps[1, 0]) == pytest.approx(1.0, abs=1e-12)


def test_beam_splitter_hong_ou_mandel():
    st = tensor(basis_state(1, 4), basis_state(1, 4))
    out, dropped = beam_splitter_apply(st, BeamSplitterSpec(0.5))
    assert dropped == 0.0
    # balanced splitter cancels the coincidence amplitude exactly
    assert out.amps[1, 1] == 0.0
    assert out.amps[2, 0] == pytest.approx(1j / np.sqrt(2), abs=1e-12)
    assert out.amps[0, 2] == pytest.approx(1j / np.sqrt(2), abs=1e-12)


def test_beam_splitter_unitary_on_supported_states():
    st = random_two_mode(12, seed=5, max_total=12)
    out, dropped = beam_splitter_apply(st, BeamSplitterSpec(0.37))
    assert dropped == 0.0
    assert np.linalg.norm(out.amps) == pytest.approx(1.0, abs=1e-12)


def test_beam_splitter_conserves_photon_number():
    st = tensor(basis_state(2, 8), basis_state(3, 8))
    out, _ = beam_splitter_apply(st, BeamSplitterSpec(0.3))
    n = np.arange(9)
    off_sector = out.amps[n[:, None] + n[None, :] != 5]
    assert np.max(np.abs(off_sector)) == 0.0


def test_beam_splitter_reports_dropped_mass():
    st = random_two_mode(6, seed=9)  # full support, total number up to 12
    out, dropped = beam_splitter_apply(st, BeamSplitterSpec(0.6))
    kept = float(np.sum(np.abs(out.amps) ** 2))
    assert dropped > 0.0
    assert kept + dropped == pytest.approx(1.0, abs=1e-12)


def test_project_fock_basics():
    st = tensor(basis_state(1, 4), vacuum(4))
    vec, prob = project_fock(st, MODE_FIRST, 1)
    assert prob == pytest.approx(1.0, abs=1e-12)
    assert vec.amps[0] == pytest.approx(1.0, abs=1e-12)

    vec, prob = project_fock(tensor(vacuum(4), vacuum(4)), MODE_FIRST, 1)
    assert prob == 0.0
    assert np.all(vec.amps == 0.0)


def test_project_fock_matches_partial_trace_diagonal():
    st, _ = beam_splitter_apply(random_two_mode(10, seed=3, max_total=10),
                                BeamSplitterSpec(0.42))
    rho = partial_trace(st, MODE_SECOND)  # reduced state of the first mode
    for n in (0, 1, 4):
        _, prob = project_fock(st, MODE_FIRST, n)
        assert prob == pytest.approx(float(rho.rho[n, n].real), abs=1e-12)


def test_project_quadrature_vacuum_density():
    _, density = project_quadrature(tensor(vacuum(4), vacuum(4)), MODE_FIRST, 0.0, 0.0)
    assert density == pytest.approx(np.pi ** -0.5, abs=1e-12)


def test_project_quadrature_periodic_in_lambda():
    st = random_two_mode(8, seed=11)
    a, da = project_quadrature(st, MODE_FIRST, 0.7, 0.4)
    b, db = project_quadrature(st, MODE_FIRST, 0.7, 0.4 + 2 * np.pi)
    np.testing.assert_allclose(a.amps, b.amps, atol=1e-12)
    assert da == pytest.approx(db, abs=1e-14)


def test_project_quadrature_density_integrates_to_one():
    st = random_two_mode(8, seed=13)
    x, w = np.polynomial.legendre.leggauss(400)
    x = x * 12.0
    w = w * 12.0
    total = sum(
        wi * project_quadrature(st, MODE_FIRST, xi, 0.9)[1] for xi, wi in zip(x, w)
    )
    assert total == pytest.approx(1.0, abs=1e-6)


def test_partial_trace_pure_and_mixed():
    st = tensor(basis_state(1, 4), vacuum(4))
    rho = partial_trace(st, MODE_SECOND)
    expect = np.zeros((5, 5))
    expect[1, 1] = 1.0
    np.testing.assert_allclose(rho.rho, expect, atol=1e-12)

    # Bell-like state en route to the maximally mixed qubit
    from heraldkit.fock import TwoModeState

    c = np.zeros((3, 3), dtype=complex)
    c[0, 0] = c[1, 1] = 1 / np.sqrt(2)
    bell = TwoModeState(c, 2)
    for mode in (MODE_FIRST, MODE_SECOND):
        rho = partial_trace(bell, mode)
        np.testing.assert_allclose(np.diag(rho.rho), [0.5, 0.5, 0.0], atol=1e-12)
        assert abs(rho.rho[0, 1]) <= 1e-12


def test_partial_trace_of_product_state():
    a = random_fock(7, 21)
    b = random_fock(7, 22)
    rho = partial_trace(tensor(a, b), MODE_SECOND)
    np.testing.assert_allclose(rho.rho, np.outer(a.amps, a.amps.conj()), atol=1e-12)


def test_density_matrix_invariants():
    st = random_two_mode(8, seed=17)
    rho = partial_trace(st, MODE_FIRST)
    np.testing.assert_allclose(rho.rho, rho.rho.conj().T, atol=1e-12)
    assert np.trace(rho.rho).real == pytest.approx(1.0, abs=1e-10)
    assert np.min(np.linalg.eigvalsh(rho.rho)) >= -1e-10


def test_fidelity_pure_cases():
    psi = random_fock(9, 31)
    assert fidelity(psi, psi) == pytest.approx(1.0, abs=1e-12)
    assert fidelity(basis_state(0, 5), basis_state(1, 5)) == 0.0


def test_fidelity_mixed_matches_direct_sum():
    rng = np.random.default_rng(41)
    p = rng.dirichlet(np.ones(4))
    rho = np.zeros((6, 6), dtype=complex)
    for k in range(4):
        rho[k, k] = p[k]
    t = random_fock(5, 42)
    expected = sum(p[k] * abs(t.amps[k]) ** 2 for k in range(4))
    assert fidelity(t, DensityMatrix(rho, 5)) == pytest.approx(expected, abs=1e-12)


def test_fidelity_rejects_unnormalized():
    bad = FockVector(np.array([0.5, 0.0]), 1)
    with pytest.raises(NormalizationError):
        fidelity(bad, basis_state(0, 1))
    with pytest.raises(NormalizationError):
        fidelity(basis_state(0, 1), bad)
