"""Truncated number-basis linear algebra for a two-mode interferometer.

All states live in a hard-truncated Fock space spanned by |0>..|N_cut>.
Operations are pure: inputs are never mutated and returned arrays are frozen
after construction.  The quadrature convention is X = (a + a') / sqrt(2), so
the vacuum quadrature variance is 1/2, and the rotated eigenbra satisfies

    <x|n>_lam = pi**-0.25 (2**n n!)**-0.5 H_n(x) exp(-x**2/2) exp(-i n lam).

The beam splitter mixes input modes 1 and 2 into output modes 3 and 4.  The
default phase convention is the symmetric one,

    a1' -> sqrt(T) a3' + i sqrt(1-T) a4',
    a2' -> i sqrt(1-T) a3' + sqrt(T) a4',

written here as the substitution rule applied to creation operators.  In a
two-mode amplitude array c[n, m] the first index is mode 3 and the second is
mode 4.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import comb, gammaln

from . import tolerances as tol
from .errors import HermiteOverflowError, NormalizationError

# Mode labels used throughout: the measured output arm and the signal arm.
MODE_FIRST = 3
MODE_SECOND = 4

_PI_QUARTER = np.pi ** -0.25


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def sqrt_factorials(n_max: int) -> np.ndarray:
    """sqrt(n!) for n = 0..n_max, computed in log space to avoid overflow."""
    return np.exp(0.5 * gammaln(np.arange(n_max + 1) + 1.0))


def factorials(n_max: int) -> np.ndarray:
    return np.exp(gammaln(np.arange(n_max + 1) + 1.0))


@dataclass
class FockVector:
    """Amplitudes of a single-mode state over |0>..|cutoff>.

    The vector is not required to be normalized; projection results carry
    their raw weight in the amplitudes.
    """

    amps: np.ndarray
    cutoff: int

    def __post_init__(self):
        a = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if a.ndim != 1 or a.shape[0] != self.cutoff + 1:
            raise ValueError(
                f"amplitude array of length {a.shape} does not match "
                f"cutoff {self.cutoff}"
            )
        self.amps = _freeze(a)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def normalized(self) -> "FockVector":
        n = self.norm_sq()
        if n <= 0.0:
            raise NormalizationError("cannot normalize a zero vector")
        return FockVector(self.amps / np.sqrt(n), self.cutoff)

    def tail_mass(self, window: int = tol.TAIL_WINDOW) -> float:
        """Relative probability mass in the top `window` Fock levels."""
        total = self.norm_sq()
        if total == 0.0:
            return 0.0
        return float(np.sum(np.abs(self.amps[self.cutoff - window + 1:]) ** 2)) / total

    def overlap(self, other: "FockVector") -> complex:
        """<self|other> with the bra conjugated."""
        if other.cutoff != self.cutoff:
            raise ValueError("cutoff mismatch in overlap")
        return complex(np.vdot(self.amps, other.amps))


@dataclass
class TwoModeState:
    """Pure two-mode amplitudes c[n, m]; first index mode 3, second mode 4."""

    amps: np.ndarray
    cutoff: int

    def __post_init__(self):
        c = np.ascontiguousarray(self.amps, dtype=np.complex128)
        d = self.cutoff + 1
        if c.shape != (d, d):
            raise ValueError(f"two-mode array {c.shape} does not match cutoff {self.cutoff}")
        n = float(np.sum(np.abs(c) ** 2))
        if n > 1.0 + 1e-12:
            raise ValueError(f"two-mode norm {n} exceeds 1")
        self.amps = _freeze(c)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))


@dataclass
class DensityMatrix:
    """Hermitian single-mode operator in the truncated number basis."""

    rho: np.ndarray
    cutoff: int

    def __post_init__(self):
        r = np.ascontiguousarray(self.rho, dtype=np.complex128)
        d = self.cutoff + 1
        if r.shape != (d, d):
            raise ValueError(f"density matrix {r.shape} does not match cutoff {self.cutoff}")
        herm_err = float(np.max(np.abs(r - r.conj().T))) if d else 0.0
        if herm_err > tol.HERMITICITY_ATOL:
            raise ValueError(f"density matrix not Hermitian: deviation {herm_err:.3e}")
        self.rho = _freeze(r)

    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)))

    def normalized(self) -> "DensityMatrix":
        t = self.trace()
        if t <= 0.0:
            raise NormalizationError("cannot normalize a trace-zero operator")
        return DensityMatrix(self.rho / t, self.cutoff)

    def min_eigenvalue(self) -> float:
        return float(np.min(np.linalg.eigvalsh(self.rho)))

    def expectation(self, vec: FockVector) -> float:
        """<vec| rho |vec> as a real number."""
        if vec.cutoff != self.cutoff:
            raise ValueError("cutoff mismatch")
        return float(np.real(np.vdot(vec.amps, self.rho @ vec.amps)))


def basis_state(n: int, cutoff: int) -> FockVector:
    """Number state |n> at the given cutoff."""
    if not 0 <= n <= cutoff:
        raise ValueError(f"basis index {n} outside 0..{cutoff}")
    a = np.zeros(cutoff + 1, dtype=np.complex128)
    a[n] = 1.0
    return FockVector(a, cutoff)


def vacuum(cutoff: int) -> FockVector:
    return basis_state(0, cutoff)


def hermite_sequence(z: complex, n_max: int) -> np.ndarray:
    """Physicists' Hermite polynomials H_0(z)..H_n_max(z) at a complex point.

    Uses the three-term recurrence H_{k+1} = 2 z H_k - 2 k H_{k-1}.  If the
    values leave the double range the failing order is reported instead of
    silently propagating inf/nan.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    h = np.empty(n_max + 1, dtype=np.complex128)
    h[0] = 1.0
    if n_max >= 1:
        h[1] = 2.0 * z
    # overflow is detected after the fact, so the intermediate warnings
    # would only be noise
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n_max):
            h[k + 1] = 2.0 * z * h[k] - 2.0 * k * h[k - 1]
    bad = ~np.isfinite(h)
    if bad.any():
        raise HermiteOverflowError(int(np.argmax(bad)), z)
    return h


def hermite_gaussian_columns(n_max: int, x: np.ndarray | float) -> np.ndarray:
    """Normalized Hermite-Gaussian values phi_n(x) for n = 0..n_max.

    phi_n(x) = pi**-0.25 (2**n n!)**-0.5 H_n(x) exp(-x**2/2), evaluated with
    the normalized recurrence so no intermediate can overflow.  Returns an
    array of shape (n_max + 1,) + shape(x).
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.empty((n_max + 1,) + x.shape, dtype=np.float64)
    out[0] = _PI_QUARTER * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for k in range(2, n_max + 1):
        out[k] = np.sqrt(2.0 / k) * x * out[k - 1] - np.sqrt((k - 1.0) / k) * out[k - 2]
    return out


def quadrature_wavefunction(n: int, x: float, lam: float) -> complex:
    """<x|n>_lam for the rotated quadrature X_lam = (a e^{-i lam} + a' e^{i lam})/sqrt(2)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    phi = hermite_gaussian_columns(n, float(x))[n]
    return complex(phi * np.exp(-1j * n * lam))


def tensor(a: FockVector, b: FockVector) -> TwoModeState:
    """Product state with a on the first index and b on the second."""
    if a.cutoff != b.cutoff:
        raise ValueError("tensor requires matching cutoffs")
    return TwoModeState(np.outer(a.amps, b.amps), a.cutoff)


class BeamSplitterConvention(Enum):
    """Phase convention of the two-mode mixing unitary."""

    SYMMETRIC = "symmetric"  # i on both cross terms
    ROTATION = "rotation"    # real rotation-like matrix


@dataclass(frozen=True)
class BeamSplitterSpec:
    """Transmittance and phase convention of the mixing element."""

    transmittance: float
    convention: BeamSplitterConvention = BeamSplitterConvention.SYMMETRIC

    def __post_init__(self):
        if not 0.0 <= self.transmittance <= 1.0:
            raise ValueError(f"transmittance {self.transmittance} outside [0, 1]")

    def single_photon_matrix(self) -> np.ndarray:
        """2x2 matrix u with a_j' -> sum_i u[i, j] b_i' on creation operators."""
        t = np.sqrt(self.transmittance)
        r = np.sqrt(1.0 - self.transmittance)
        if self.convention is BeamSplitterConvention.SYMMETRIC:
            return np.array([[t, 1j * r], [1j * r, t]], dtype=np.complex128)
        return np.array([[t, r], [-r, t]], dtype=np.complex128)


def sector_unitary(s: int, spec: BeamSplitterSpec) -> np.ndarray:
    """Beam-splitter block on the total-photon-number-s subspace.

    Entry [p, n] is <p, s-p| U |n, s-n>.  Column n is built by expanding
    (u00 x + u10 y)**n (u01 x + u11 y)**(s-n) and attaching the bosonic
    normalization sqrt(p! (s-p)! / (n! (s-n)!)).
    """
    u = spec.single_photon_matrix()
    sqf = sqrt_factorials(s)
    w = np.empty((s + 1, s + 1), dtype=np.complex128)
    for n in range(s + 1):
        k1 = np.arange(n + 1)
        p1 = comb(n, k1) * u[0, 0] ** k1 * u[1, 0] ** (n - k1)
        k2 = np.arange(s - n + 1)
        p2 = comb(s - n, k2) * u[0, 1] ** k2 * u[1, 1] ** (s - n - k2)
        col = np.convolve(p1, p2)
        w[:, n] = col * sqf * sqf[::-1] / (sqf[n] * sqf[s - n])
    return w


def beam_splitter_apply(state: TwoModeState, spec: BeamSplitterSpec) -> tuple[TwoModeState, float]:
    """Mix the two modes of `state` through the beam splitter.

    Total photon number n + m is conserved exactly, so each sector with
    n + m <= cutoff is rotated by its exact unitary block.  Sectors with
    n + m > cutoff cannot be represented completely on the truncated grid;
    their amplitudes are dropped and the dropped probability mass is
    returned alongside the new state.
    """
    n_cut = state.cutoff
    c = state.amps
    grid = np.add.outer(np.arange(n_cut + 1), np.arange(n_cut + 1))
    dropped = float(np.sum(np.abs(c[grid > n_cut]) ** 2))
    out = np.zeros_like(c)
    for s in range(n_cut + 1):
        rows = np.arange(s + 1)
        cols = s - rows
        v = c[rows, cols]
        if not np.any(v):
            continue
        out[rows, cols] = sector_unitary(s, spec) @ v
    return TwoModeState(out, n_cut), dropped


def _measured_axis_first(state: TwoModeState, measured_mode: int) -> np.ndarray:
    if measured_mode == MODE_FIRST:
        return state.amps
    if measured_mode == MODE_SECOND:
        return state.amps.T
    raise ValueError(f"measured_mode must be {MODE_FIRST} or {MODE_SECOND}")


def project_fock(state: TwoModeState, measured_mode: int, n: int) -> tuple[FockVector, float]:
    """Condition on finding exactly n photons in the measured mode.

    Returns the unnormalized amplitude slice of the other mode together with
    the outcome probability (the squared norm of the slice).
    """
    if not 0 <= n <= state.cutoff:
        raise ValueError(f"photon count {n} outside 0..{state.cutoff}")
    c = _measured_axis_first(state, measured_mode)
    slice_ = np.array(c[n, :])
    prob = float(np.sum(np.abs(slice_) ** 2))
    return FockVector(slice_, state.cutoff), prob


def project_quadrature(
    state: TwoModeState, measured_mode: int, x: float, lam: float
) -> tuple[FockVector, float]:
    """Condition on a quadrature reading x along phase lam in the measured mode.

    Contracts the measured index with <x|n>_lam.  Returns the unnormalized
    amplitude vector of the other mode and the outcome probability density
    (its squared norm), normalized so integrating over x gives 1.
    """
    c = _measured_axis_first(state, measured_mode)
    n_idx = np.arange(state.cutoff + 1)
    bra = hermite_gaussian_columns(state.cutoff, float(x)) * np.exp(-1j * lam * n_idx)
    v = bra @ c
    density = float(np.sum(np.abs(v) ** 2))
    return FockVector(v, state.cutoff), density


def partial_trace(state: TwoModeState, traced_mode: int) -> DensityMatrix:
    """Reduced density matrix after tracing out one mode of a pure state."""
    c = state.amps
    if traced_mode == MODE_SECOND:
        rho = c @ c.conj().T
    elif traced_mode == MODE_FIRST:
        rho = c.T @ c.conj()
    else:
        raise ValueError(f"traced_mode must be {MODE_FIRST} or {MODE_SECOND}")
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho, state.cutoff)


def _require_unit_norm(label: str, value: float):
    if abs(value - 1.0) > tol.INPUT_NORM_ATOL:
        raise NormalizationError(f"{label} must be normalized, got squared norm {value}")


def fidelity(target: FockVector, out: FockVector | DensityMatrix) -> float:
    """|<target|out>|**2 for pure `out`, <target|rho|target> for mixed.

    Both arguments must be normalized; unnormalized input raises.
    """
    _require_unit_norm("target", target.norm_sq())
    if isinstance(out, FockVector):
        _require_unit_norm("out", out.norm_sq())
        return float(abs(target.overlap(out)) ** 2)
    _require_unit_norm("out", out.trace())
    return out.expectation(target)
