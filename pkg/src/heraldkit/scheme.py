"""Conditional output states of the mix-and-measure preparation scheme.

Two squeezed coherent inputs interfere on a beam splitter of transmittance T
(symmetric phase convention), then mode 3 is measured: either a single-photon
detection (SPD) heralds exactly one photon, or a homodyne measurement (HM)
records a rotated-quadrature value x along phase lam.  Either outcome
projects mode 4 onto the conditional state returned here.

Each measurement kind has two interchangeable evaluation routes:

* a closed form that collapses the measurement analytically and never builds
  the two-mode array (fast; used by the optimizer), and
* an oracle that embeds the inputs at twice the cutoff, applies the exact
  sector-by-sector beam splitter and projects (slow; used to cross-check).

Both routes keep every output amplitude up to total photon number 2*cutoff
before truncating, so their retained and discarded masses agree exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.signal import convolve2d
from scipy.special import comb

from . import tolerances as tol
from .errors import QuadratureError, SingularSqueezingError
from .fock import (
    MODE_FIRST,
    BeamSplitterSpec,
    DensityMatrix,
    FockVector,
    TwoModeState,
    beam_splitter_apply,
    fidelity,
    hermite_sequence,
    project_fock,
    project_quadrature,
    sqrt_factorials,
    tensor,
)
from .states import SqueezedCoherentParams, check_tail_mass, squeezed_coherent_amplitudes

_PHASE_CYCLE = np.array([1.0, 1.0j, -1.0, -1.0j], dtype=np.complex128)


@dataclass(frozen=True)
class SPD:
    """Herald on exactly one photon in the measured arm."""


@dataclass(frozen=True)
class HM:
    """Herald on a rotated-quadrature reading.

    x is the recorded value, lam the local-oscillator phase, and
    window_halfwidth the acceptance halfwidth delta used for success
    probability and average misfit (0 means no window was chosen).
    """

    x: float
    lam: float
    window_halfwidth: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.x <= 4.0:
            raise ValueError(f"heralded quadrature value {self.x} outside [0, 4]")
        if self.window_halfwidth < 0.0:
            raise ValueError("window_halfwidth must be >= 0")


Measurement = Union[SPD, HM]


@dataclass(frozen=True)
class SchemeParams:
    """Full parameter set of one scheme evaluation."""

    in1: SqueezedCoherentParams
    in2: SqueezedCoherentParams
    transmittance: float
    measurement: Measurement

    def __post_init__(self):
        if not 0.1 <= self.transmittance <= 0.9:
            raise ValueError(f"transmittance {self.transmittance} outside [0.1, 0.9]")


@dataclass(frozen=True)
class ConditionalOutput:
    """Normalized heralded state plus the bookkeeping of how it was obtained.

    raw_weight is the squared norm of the unnormalized projection restricted
    to the retained space |0>..|cutoff>: outcome probability for SPD,
    probability density at x for HM.  truncation_loss is the fraction of the
    projected mass that fell above the cutoff and was discarded.
    """

    state: FockVector
    raw_weight: float
    truncation_loss: float


def _input_amplitudes(
    p: SchemeParams, cutoff: int, check_input_tail: bool
) -> tuple[np.ndarray, np.ndarray]:
    a1 = squeezed_coherent_amplitudes(p.in1, cutoff)
    a2 = squeezed_coherent_amplitudes(p.in2, cutoff)
    if check_input_tail:
        check_tail_mass(a1, cutoff)
        check_tail_mass(a2, cutoff)
    return a1, a2


def _require_regular_squeezing(p: SchemeParams):
    r_small = min(p.in1.r, p.in2.r)
    if r_small < tol.MIN_SQUEEZING:
        raise SingularSqueezingError(
            f"squeezing magnitude {r_small:.3e} below {tol.MIN_SQUEEZING:.0e}; "
            "the Hermite-argument form degenerates there, use the oracle route"
        )


def _split_output(full: np.ndarray, cutoff: int) -> ConditionalOutput:
    retained = full[: cutoff + 1]
    raw_weight = float(np.sum(np.abs(retained) ** 2))
    dropped = float(np.sum(np.abs(full[cutoff + 1:]) ** 2))
    total = raw_weight + dropped
    loss = dropped / total if total > 0.0 else 0.0
    vec = FockVector(retained, cutoff)
    # an impossible outcome (vacuum inputs under SPD) projects to the zero
    # vector; report weight 0 instead of failing to normalize
    state = vec.normalized() if raw_weight > 0.0 else vec
    return ConditionalOutput(state, raw_weight, loss)


def _spd_full_amplitudes(a1: np.ndarray, a2: np.ndarray, t: float) -> np.ndarray:
    """Unnormalized SPD output over |0>..|2*cutoff-1>.

    Only two reflect/transmit splittings can leave one photon in the
    measured arm, which collapses the heralding to a double sum over the
    input photon numbers n, m:

        c[n+m-1] += i^{n+1} (a1[n]/sqrt(n!)) (a2[m]/sqrt(m!)) sqrt((n+m-1)!)
                    * [m R^{(n+1)/2} T^{(m-1)/2} - n R^{(n-1)/2} T^{(m+1)/2}]

    with R = 1 - T.  The m = 0 and n = 0 legs vanish with their prefactor,
    so the half-integer powers below zero never contribute.
    """
    n_cut = len(a1) - 1
    n = np.arange(n_cut + 1)
    sqf = sqrt_factorials(n_cut)
    a1s = a1 / sqf
    a2s = a2 / sqf
    sq_t = np.sqrt(t)
    sq_r = np.sqrt(1.0 - t)
    pow_t = sq_t ** np.arange(n_cut + 2)
    pow_r = sq_r ** np.arange(n_cut + 2)
    col_m = np.zeros(n_cut + 1)
    col_m[1:] = n[1:] * pow_t[: n_cut]
    row_n = np.zeros(n_cut + 1)
    row_n[1:] = n[1:] * pow_r[: n_cut]
    geom = np.outer(pow_r[1:], col_m) - np.outer(row_n, pow_t[1:])
    m_mat = (_PHASE_CYCLE[(n + 1) % 4] * a1s)[:, None] * a2s[None, :] * geom
    t_idx = np.add.outer(n, n).ravel()
    flat = m_mat.ravel()
    conv = np.bincount(t_idx, weights=flat.real, minlength=2 * n_cut + 1) + 1j * np.bincount(
        t_idx, weights=flat.imag, minlength=2 * n_cut + 1
    )
    sqf2 = sqrt_factorials(2 * n_cut)
    return sqf2[: 2 * n_cut] * conv[1:]


class _HMEvaluator:
    """Homodyne closed form with the x-independent work hoisted out.

    The quadruple sum factors into per-arm matrices U1[k, d1], U2[l, d2]
    (d = photons sent to the signal arm, k/l = photons sent to the measured
    arm) contracted against the Hankel matrix H_{d1+d2}(x):

        c[s] = pi^{-1/4} e^{-x^2/2} sqrt(s!)
               sum_{k+l=s} (U1 @ Hankel(x) @ U2^T)[k, l].

    A single quadrature value is cheapest through the two matrix products
    above.  For loops over many x the U1/U2 pair is convolved once into
    W[j, s] so each value costs one O(cutoff^2) dot product,
    c[s] = pref sqrt(s!) sum_j H_j(x) W[j, s].
    """

    def __init__(self, a1: np.ndarray, a2: np.ndarray, t: float, lam: float):
        n_cut = len(a1) - 1
        n = np.arange(n_cut + 1)
        sqf = sqrt_factorials(n_cut)
        e_lam = np.exp(-1j * lam) / np.sqrt(2.0)
        a1s = a1 * e_lam**n / sqf
        a2s = a2 * (1j * e_lam) ** n / sqf
        sq_t = np.sqrt(t)
        sq_r = np.sqrt(1.0 - t)
        w = np.sqrt(2.0) * 1j * np.exp(1j * lam)
        idx = np.add.outer(n, n)
        valid = idx <= n_cut
        binom = np.where(valid, comb(np.minimum(idx, n_cut) + 0.0, n[:, None]), 0.0)
        amp1_ext = np.where(valid, a1s[np.minimum(idx, n_cut)], 0.0)
        amp2_ext = np.where(valid, a2s[np.minimum(idx, n_cut)], 0.0)
        self.u1 = amp1_ext * binom * (sq_r * w) ** n[:, None] * sq_t ** n[None, :]
        self.u2 = (
            (-1.0) ** n[:, None]
            * amp2_ext
            * binom
            * (sq_t * w) ** n[:, None]
            * sq_r ** n[None, :]
        )
        self.n_cut = n_cut
        self.sqf2 = sqrt_factorials(2 * n_cut)
        self._w_mat = None
        self._anti_idx = np.add.outer(n, n).ravel()

    def amplitudes_once(self, x: float) -> np.ndarray:
        """One-shot unnormalized HM output over |0>..|2*cutoff>."""
        n_cut = self.n_cut
        h = hermite_sequence(complex(x), 2 * n_cut).real
        hankel = h[np.add.outer(np.arange(n_cut + 1), np.arange(n_cut + 1))]
        q = (self.u1 @ hankel @ self.u2.T).ravel()
        anti = np.bincount(self._anti_idx, weights=q.real, minlength=2 * n_cut + 1)
        anti = anti + 1j * np.bincount(
            self._anti_idx, weights=q.imag, minlength=2 * n_cut + 1
        )
        pref = np.pi**-0.25 * np.exp(-0.5 * x * x)
        return pref * self.sqf2 * anti

    def full_amplitudes(self, x: float) -> np.ndarray:
        """Loop-friendly unnormalized HM output over |0>..|2*cutoff>."""
        if self._w_mat is None:
            self._w_mat = convolve2d(self.u1.T, self.u2.T, mode="full")
        h = hermite_sequence(complex(x), 2 * self.n_cut).real
        pref = np.pi**-0.25 * np.exp(-0.5 * x * x)
        return pref * self.sqf2 * (h @ self._w_mat)

    def mass(self, x: float) -> float:
        return float(np.sum(np.abs(self.full_amplitudes(x)) ** 2))


def output_spd_closed_form(
    p: SchemeParams, cutoff: int, check_input_tail: bool = True
) -> ConditionalOutput:
    """SPD conditional state from the collapsed double sum.

    Requires both squeezing magnitudes at or above MIN_SQUEEZING; below
    that the analytic form is treated as degenerate and conditional_output
    falls back to the oracle route.
    """
    if not isinstance(p.measurement, SPD):
        raise TypeError("measurement must be SPD")
    _require_regular_squeezing(p)
    a1, a2 = _input_amplitudes(p, cutoff, check_input_tail)
    full = _spd_full_amplitudes(a1, a2, p.transmittance)
    return _split_output(full, cutoff)


def output_hm_closed_form(
    p: SchemeParams, cutoff: int, check_input_tail: bool = True
) -> ConditionalOutput:
    """HM conditional state from the factorized quadruple sum.

    Same squeezing-regularity requirement as the SPD closed form.
    """
    if not isinstance(p.measurement, HM):
        raise TypeError("measurement must be HM")
    _require_regular_squeezing(p)
    a1, a2 = _input_amplitudes(p, cutoff, check_input_tail)
    ev = _HMEvaluator(a1, a2, p.transmittance, p.measurement.lam)
    return _split_output(ev.amplitudes_once(p.measurement.x), cutoff)


def embedded_two_mode_state(
    p: SchemeParams, cutoff: int, check_input_tail: bool = True
) -> TwoModeState:
    """Post-beam-splitter state embedded at twice the cutoff.

    At cutoff 2N every total-photon sector reachable from inputs truncated
    at N is complete, so the beam splitter drops nothing and projections of
    this state are exact for the truncated inputs.
    """
    a1, a2 = _input_amplitudes(p, cutoff, check_input_tail)
    big = 2 * cutoff
    e1 = np.zeros(big + 1, dtype=np.complex128)
    e2 = np.zeros(big + 1, dtype=np.complex128)
    e1[: cutoff + 1] = a1
    e2[: cutoff + 1] = a2
    joint = tensor(FockVector(e1, big), FockVector(e2, big))
    mixed, dropped = beam_splitter_apply(joint, BeamSplitterSpec(p.transmittance))
    if dropped != 0.0:
        raise AssertionError("embedding at twice the cutoff must not drop mass")
    return mixed


def output_oracle(
    p: SchemeParams, cutoff: int, check_input_tail: bool = True
) -> ConditionalOutput:
    """Reference evaluation through the explicit two-mode pipeline."""
    mixed = embedded_two_mode_state(p, cutoff, check_input_tail)
    if isinstance(p.measurement, SPD):
        vec, _ = project_fock(mixed, MODE_FIRST, 1)
    elif isinstance(p.measurement, HM):
        vec, _ = project_quadrature(mixed, MODE_FIRST, p.measurement.x, p.measurement.lam)
    else:
        raise TypeError(f"unknown measurement {type(p.measurement).__name__}")
    return _split_output(vec.amps, cutoff)


def conditional_output(
    p: SchemeParams,
    cutoff: int,
    method: str = "closed",
    check_input_tail: bool = True,
) -> ConditionalOutput:
    """Heralded signal state for either measurement kind.

    method selects the evaluation route: "closed" (default; falls back to
    the oracle when a squeezing magnitude is below MIN_SQUEEZING) or
    "oracle".
    """
    if method == "oracle":
        return output_oracle(p, cutoff, check_input_tail)
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    if min(p.in1.r, p.in2.r) < tol.MIN_SQUEEZING:
        return output_oracle(p, cutoff, check_input_tail)
    if isinstance(p.measurement, SPD):
        return output_spd_closed_form(p, cutoff, check_input_tail)
    if isinstance(p.measurement, HM):
        return output_hm_closed_form(p, cutoff, check_input_tail)
    raise TypeError(f"unknown measurement {type(p.measurement).__name__}")


def misfit(
    out: ConditionalOutput | FockVector | DensityMatrix, target: FockVector
) -> float:
    """1 - fidelity between the prepared state and the normalized target."""
    state = out.state if isinstance(out, ConditionalOutput) else out
    return 1.0 - fidelity(target, state)


def _input_norm_sq(a1: np.ndarray, a2: np.ndarray) -> float:
    return float(np.sum(np.abs(a1) ** 2) * np.sum(np.abs(a2) ** 2))


def success_prob_spd(p: SchemeParams, cutoff: int, check_input_tail: bool = True) -> float:
    """Probability of the single-photon herald, including mass above the cutoff."""
    if not isinstance(p.measurement, SPD):
        raise TypeError("measurement must be SPD")
    a1, a2 = _input_amplitudes(p, cutoff, check_input_tail)
    full = _spd_full_amplitudes(a1, a2, p.transmittance)
    return float(np.sum(np.abs(full) ** 2)) / _input_norm_sq(a1, a2)


def _gauss_legendre_adaptive(f, lo: float, hi: float) -> float:
    """Integrate f over [lo, hi], doubling the node count until stable.

    Starts at QUADRATURE_MIN_NODES and raises QuadratureError if successive
    estimates still differ by more than QUADRATURE_STEP_ATOL at the node
    budget.
    """
    prev = None
    nodes = tol.QUADRATURE_MIN_NODES
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    while nodes <= tol.QUADRATURE_MAX_NODES:
        xs, ws = leggauss(nodes)
        val = half * float(sum(w * f(mid + half * x) for x, w in zip(xs, ws)))
        if prev is not None and abs(val - prev) <= tol.QUADRATURE_STEP_ATOL:
            return val
        prev = val
        nodes *= 2
    raise QuadratureError(
        f"quadrature over [{lo:.6g}, {hi:.6g}] did not stabilize within "
        f"{tol.QUADRATURE_MAX_NODES} nodes (last change {abs(val - prev):.3e})"
    )


def hm_outcome_density(
    p: SchemeParams, x_value: float, cutoff: int, check_input_tail: bool = True
) -> float:
    """Probability density of reading x_value on the measured arm."""
    if not isinstance(p.measurement, HM):
        raise TypeError("measurement must be HM")
    a1, a2 = _input_amplitudes(p, cutoff, check_input_tail)
    ev = _HMEvaluator(a1, a2, p.transmittance, p.measurement.lam)
    return ev.mass(x_value) / _input_norm_sq(a1, a2)


def success_prob_hm(p: SchemeParams, cutoff: int, check_input_tail: bool = True) -> float:
    """Probability of a quadrature reading inside x +/- window_halfwidth."""
    if not isinstance(p.measurement, HM):
        raise TypeError("measurement must be HM")
    delta = p.measurement.window_halfwidth
    if delta == 0.0:
        return 0.0
    a1, a2 = _input_amplitudes(p, cutoff, check_input_tail)
    ev = _HMEvaluator(a1, a2, p.transmittance, p.measurement.lam)
    norm = _input_norm_sq(a1, a2)
    x0 = p.measurement.x
    return _gauss_legendre_adaptive(lambda x: ev.mass(x) / norm, x0 - delta, x0 + delta)


def average_misfit(
    p: SchemeParams,
    target: FockVector,
    cutoff: int,
    n_subranges: int = tol.DEFAULT_SUBRANGES,
    check_input_tail: bool = True,
) -> float:
    """Probability-weighted misfit over the acceptance window.

    The window x +/- window_halfwidth is split into n_subranges equal
    pieces; each contributes its midpoint misfit weighted by the
    probability of landing in that piece.
    """
    if not isinstance(p.measurement, HM):
        raise TypeError("measurement must be HM")
    delta = p.measurement.window_halfwidth
    if delta <= 0.0:
        raise ValueError("measurement.window_halfwidth must be > 0")
    if n_subranges < 1:
        raise ValueError("n_subranges must be >= 1")
    a1, a2 = _input_amplitudes(p, cutoff, check_input_tail)
    ev = _HMEvaluator(a1, a2, p.transmittance, p.measurement.lam)
    norm = _input_norm_sq(a1, a2)
    edges = np.linspace(p.measurement.x - delta, p.measurement.x + delta, n_subranges + 1)
    weight_sum = 0.0
    weighted_misfit = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        state = _split_output(ev.full_amplitudes(mid), cutoff).state
        eps = misfit(state, target)
        prob = _gauss_legendre_adaptive(lambda x: ev.mass(x) / norm, lo, hi)
        weight_sum += prob
        weighted_misfit += eps * prob
    if weight_sum <= 0.0:
        raise QuadratureError("acceptance window carries no probability mass")
    return weighted_misfit / weight_sum
