"""Constructors for input and target states of the heralding scheme.

Inputs are squeezed coherent states |zeta, alpha> = D(alpha) S(zeta) |0> with
zeta = r e^{i theta}, alpha = |alpha| e^{i phi} and the squeeze operator in
the convention S(zeta) = exp(zeta* a^2 / 2 - zeta a'^2 / 2), which gives the
squeezed-vacuum column <2k|S(r)|0> = (-tanh(r)/2)^k sqrt((2k)!)/k! /
sqrt(cosh r).

Target families: binomial, negative binomial, amplitude squeezed, squeezed
few-term superpositions (useful as resources for cubic nonlinear gates), and
literal ad hoc superpositions.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from . import tolerances as tol
from .errors import SingularSqueezingError, TailMassError, TruncationQualityError
from .fock import FockVector, hermite_sequence, sqrt_factorials


@dataclass(frozen=True)
class SqueezedCoherentParams:
    """One input arm: squeezing magnitude/phase and coherent magnitude/phase."""

    r: float
    theta: float
    alpha_abs: float
    phi: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"squeezing magnitude r={self.r} must be >= 0")
        if self.alpha_abs < 0:
            raise ValueError(f"alpha_abs={self.alpha_abs} must be >= 0")


def check_tail_mass(amps: np.ndarray, cutoff: int):
    """Raise TailMassError when the top Fock levels hold too much relative mass."""
    total = float(np.sum(np.abs(amps) ** 2))
    if total == 0.0:
        return
    tail = float(np.sum(np.abs(amps[cutoff - tol.TAIL_WINDOW + 1:]) ** 2)) / total
    if tail > tol.TAIL_MASS_LIMIT:
        raise TailMassError(tail, cutoff)


def squeezed_coherent_amplitudes(p: SqueezedCoherentParams, cutoff: int) -> np.ndarray:
    """Unnormalized truncated amplitudes of D(alpha)S(zeta)|0>.

    For r >= MIN_SQUEEZING these are

        c_n = pref * (e^{i theta} tanh(r) / 2)^{n/2} H_n(beta h^{-1}) / sqrt(n!)

    with pref = exp(-|alpha|^2/2 - alpha*^2 e^{i theta} tanh(r)/2)/sqrt(cosh r),
    beta = alpha cosh(r) + alpha* e^{i theta} sinh(r) and h = sqrt(e^{i theta}
    sinh(2r)).  Both principal square roots carry the same branch of
    e^{i theta/2}, which keeps the product (..)^{n/2} H_n(..) single-valued.
    Below MIN_SQUEEZING the Hermite form is 0/0-singular and the coherent
    branch c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!) is used instead.
    """
    n = np.arange(cutoff + 1)
    alpha = p.alpha_abs * np.exp(1j * p.phi)
    sqf = sqrt_factorials(cutoff)
    if p.r < tol.MIN_SQUEEZING:
        return np.exp(-0.5 * p.alpha_abs**2) * alpha**n / sqf
    eith = np.exp(1j * p.theta)
    th = np.tanh(p.r)
    pref = np.exp(-0.5 * p.alpha_abs**2 - 0.5 * np.conj(alpha) ** 2 * eith * th)
    pref = pref / np.sqrt(np.cosh(p.r))
    g = np.sqrt(0.5 * eith * th)
    h = np.sqrt(eith * np.sinh(2.0 * p.r))
    beta = alpha * np.cosh(p.r) + np.conj(alpha) * eith * np.sinh(p.r)
    herm = hermite_sequence(complex(beta / h), cutoff)
    return pref * g**n * herm / sqf


def squeezed_coherent(
    p: SqueezedCoherentParams, cutoff: int, check_tail: bool = True
) -> FockVector:
    """Normalized squeezed coherent state |zeta, alpha> at the cutoff.

    Raises TailMassError when too much of the state sits in the top Fock
    levels (the cutoff is too small for these parameters); pass
    check_tail=False to skip the guard when the caller tracks truncation
    loss itself.
    """
    amps = squeezed_coherent_amplitudes(p, cutoff)
    if check_tail:
        check_tail_mass(amps, cutoff)
    return FockVector(amps, cutoff).normalized()


def coherent_state(alpha: complex, cutoff: int, check_tail: bool = True) -> FockVector:
    """Coherent state |alpha>, a convenience wrapper used mostly by tests."""
    a = complex(alpha)
    return squeezed_coherent(
        SqueezedCoherentParams(0.0, 0.0, abs(a), float(np.angle(a))),
        cutoff,
        check_tail=check_tail,
    )


def binomial_state(p: float, M: int, cutoff: int) -> FockVector:
    """Binomial state: c_n = [C(M,n) p^n (1-p)^(M-n)]^(1/2) on n = 0..M."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    if not 0 <= M <= cutoff:
        raise ValueError(f"M={M} must lie in 0..cutoff={cutoff}")
    amps = np.zeros(cutoff + 1, dtype=np.complex128)
    n = np.arange(M + 1)
    log_comb = gammaln(M + 1) - gammaln(n + 1) - gammaln(M - n + 1)
    with np.errstate(divide="ignore"):
        log_pn = np.where(n > 0, n * np.log(np.maximum(p, 1e-300)), 0.0)
        log_qn = np.where(M - n > 0, (M - n) * np.log(np.maximum(1.0 - p, 1e-300)), 0.0)
    c = np.exp(0.5 * (log_comb + log_pn + log_qn))
    if p == 0.0:
        c = np.where(n == 0, 1.0, 0.0)
    elif p == 1.0:
        c = np.where(n == M, 1.0, 0.0)
    amps[: M + 1] = c
    return FockVector(amps, cutoff).normalized()


def negative_binomial_state(
    eta_nb: float, M: int, varphi: float, cutoff: int, check_tail: bool = True
) -> FockVector:
    """Negative binomial state with c_n ∝ sqrt(C(M+n-1, n)) eta_nb^n e^{i n varphi}.

    M=1 reduces to the geometric ladder sqrt(1 - eta_nb^2) eta_nb^n.
    """
    if not 0.0 <= eta_nb < 1.0:
        raise ValueError(f"eta_nb={eta_nb} outside [0, 1)")
    if M < 1:
        raise ValueError(f"M={M} must be >= 1")
    n = np.arange(cutoff + 1)
    log_comb = gammaln(M + n) - gammaln(n + 1) - gammaln(M)
    with np.errstate(divide="ignore"):
        mag = np.exp(0.5 * log_comb + n * np.log(np.maximum(eta_nb, 1e-300)))
    if eta_nb == 0.0:
        mag = np.where(n == 0, 1.0, 0.0)
    amps = mag * np.exp(1j * varphi * n)
    if check_tail:
        check_tail_mass(amps, cutoff)
    return FockVector(amps, cutoff).normalized()


def amplitude_squeezed_state(
    alpha0: float, u: float, delta_as: float, cutoff: int, check_tail: bool = True
) -> FockVector:
    """Photon-number-squeezed superposition,

        c_n ∝ sqrt(2 pi) alpha0^n / (u sqrt(n!)) exp(-(delta_as - n)^2 / (2 u^2)),

    a coherent ladder with a Gaussian envelope of width u around delta_as.
    """
    if alpha0 <= 0:
        raise ValueError("alpha0 must be > 0")
    if u <= 0:
        raise ValueError("u must be > 0")
    if delta_as < 0:
        raise ValueError("delta_as must be >= 0")
    n = np.arange(cutoff + 1)
    log_mag = n * np.log(alpha0) - gammaln(n + 1) / 2.0 - (delta_as - n) ** 2 / (2.0 * u * u)
    log_mag -= np.max(log_mag)
    amps = (np.sqrt(2.0 * np.pi) / u) * np.exp(log_mag).astype(np.complex128)
    if check_tail:
        check_tail_mass(amps, cutoff)
    return FockVector(amps, cutoff).normalized()


def squeeze_operator_matrix(
    zeta: complex, cutoff: int, quality_columns: int | None = None
) -> np.ndarray:
    """Number-basis matrix <m|S(zeta)|n> of the squeeze operator.

    Built from the disentangled closed form

        S = exp(-c a'^2) mu^{-(a'a + 1/2)} exp(c* a^2),
        mu = cosh|zeta|,  c = (zeta / |zeta|) tanh|zeta| / 2,

    which gives a finite single sum per element with integer complex powers
    only (no branch ambiguity).  Elements with m - n odd are exactly zero.

    Truncation degrades with |zeta|; magnitudes above 2 are refused.  When
    quality_columns is given, columns 0..quality_columns must keep norm 1
    within 1e-8 at this cutoff or TruncationQualityError is raised.  High
    columns inevitably spill past any cutoff once |zeta| is sizable, so the
    guard is applied to the columns a caller actually consumes.
    """
    z = complex(zeta)
    if abs(z) > 2.0:
        raise ValueError(f"|zeta|={abs(z):.3f} above 2; truncation untrustworthy")
    dim = cutoff + 1
    if abs(z) == 0.0:
        return np.eye(dim, dtype=np.complex128)
    mu = np.cosh(abs(z))
    c = (z / abs(z)) * np.tanh(abs(z)) / 2.0
    lg = gammaln(np.arange(2 * dim + 2) + 1.0)
    out = np.zeros((dim, dim), dtype=np.complex128)
    for n_col in range(dim):
        for m_row in range(n_col % 2, dim, 2):
            j_lo = max(0, (n_col - m_row + 1) // 2)
            j_hi = n_col // 2
            acc = 0.0 + 0.0j
            for j in range(j_lo, j_hi + 1):
                k = (m_row - n_col + 2 * j) // 2
                log_mag = 0.5 * (lg[n_col] + lg[m_row]) - lg[k] - lg[j] - lg[n_col - 2 * j]
                acc += (
                    (-c) ** k
                    * np.conj(c) ** j
                    * mu ** (-(n_col - 2 * j))
                    * np.exp(log_mag)
                )
            out[m_row, n_col] = acc / np.sqrt(mu)
    if quality_columns is not None:
        norms = np.linalg.norm(out[:, : quality_columns + 1], axis=0)
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > 1e-8:
            raise TruncationQualityError(
                f"squeeze matrix columns 0..{quality_columns} deviate from unit "
                f"norm by {worst:.3e} at cutoff {cutoff}; increase the cutoff"
            )
    return out


def displacement_operator_matrix(alpha: complex, cutoff: int) -> np.ndarray:
    """Number-basis matrix <m|D(alpha)|n> with D(alpha) = exp(alpha a' - alpha* a).

    Uses the associated-Laguerre closed form; the lower triangle follows from
    D(alpha)^dagger = D(-alpha).
    """
    a = complex(alpha)
    dim = cutoff + 1
    out = np.empty((dim, dim), dtype=np.complex128)
    x = abs(a) ** 2
    lg = gammaln(np.arange(dim) + 1.0)
    for n_col in range(dim):
        for m_row in range(n_col, dim):
            d = m_row - n_col
            base = np.exp(0.5 * (lg[n_col] - lg[m_row]) - 0.5 * x) * eval_genlaguerre(
                n_col, d, x
            )
            out[m_row, n_col] = base * a**d
            if m_row != n_col:
                out[n_col, m_row] = base * (-np.conj(a)) ** d
    return out


def resource_state(
    zeta: complex, chi_prime: complex, cutoff: int, check_tail: bool = True
) -> FockVector:
    """Squeezed three-term superposition

        N S(zeta) (|0> + chi' (3 / (2 sqrt(2))) |1> + chi' (sqrt(3)/2) |3>),

    used as a resource for cubic nonlinear gates.  Squeezing pushes mass
    upward, so the truncated image is checked: if more than TAIL_MASS_LIMIT
    of the exact state falls above the cutoff the construction refuses.
    check_tail=False accepts the truncation instead.
    """
    core = np.zeros(cutoff + 1, dtype=np.complex128)
    core[0] = 1.0
    core[1] = chi_prime * 3.0 / (2.0 * np.sqrt(2.0))
    core[3] = chi_prime * np.sqrt(3.0) / 2.0
    core /= np.linalg.norm(core)
    s = squeeze_operator_matrix(zeta, cutoff)
    amps = s @ core
    if check_tail:
        lost = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
        if lost > tol.TAIL_MASS_LIMIT:
            raise TruncationQualityError(
                f"squeezing pushed {lost:.3e} of the state mass above cutoff "
                f"{cutoff}; increase the cutoff"
            )
        check_tail_mass(amps, cutoff)
    return FockVector(amps, cutoff).normalized()


def adhoc_superposition(coeffs: Sequence[complex], cutoff: int) -> FockVector:
    """Normalized superposition sum_n coeffs[n] |n>."""
    c = np.asarray(list(coeffs), dtype=np.complex128)
    if c.ndim != 1 or len(c) == 0:
        raise ValueError("coeffs must be a nonempty 1-d sequence")
    if len(c) > cutoff + 1:
        raise ValueError(f"{len(c)} coefficients exceed cutoff {cutoff}")
    if not np.any(c):
        raise ValueError("all-zero coefficient list")
    amps = np.zeros(cutoff + 1, dtype=np.complex128)
    amps[: len(c)] = c
    return FockVector(amps, cutoff).normalized()


# --- target family specs -----------------------------------------------------


@dataclass(frozen=True)
class Binomial:
    p: float
    M: int


@dataclass(frozen=True)
class NegativeBinomial:
    eta_nb: float
    M: int
    varphi: float = 0.0


@dataclass(frozen=True)
class AmplitudeSqueezed:
    alpha0: float
    u: float
    delta_as: float


@dataclass(frozen=True)
class Resource:
    zeta: complex
    chi_prime: complex


@dataclass(frozen=True)
class AdHoc:
    coefficients: tuple


TargetSpec = Union[Binomial, NegativeBinomial, AmplitudeSqueezed, Resource, AdHoc]


def target_state(spec: TargetSpec, cutoff: int, check_tail: bool = True) -> FockVector:
    """Build the normalized target vector for any family spec.

    check_tail=False skips the truncation-quality guard for the families
    that carry one; binomial and ad hoc targets have finite support and
    never need it.
    """
    if isinstance(spec, Binomial):
        return binomial_state(spec.p, spec.M, cutoff)
    if isinstance(spec, NegativeBinomial):
        return negative_binomial_state(
            spec.eta_nb, spec.M, spec.varphi, cutoff, check_tail=check_tail
        )
    if isinstance(spec, AmplitudeSqueezed):
        return amplitude_squeezed_state(
            spec.alpha0, spec.u, spec.delta_as, cutoff, check_tail=check_tail
        )
    if isinstance(spec, Resource):
        return resource_state(spec.zeta, spec.chi_prime, cutoff, check_tail=check_tail)
    if isinstance(spec, AdHoc):
        return adhoc_superposition(spec.coefficients, cutoff)
    raise TypeError(f"unknown target spec {type(spec).__name__}")
