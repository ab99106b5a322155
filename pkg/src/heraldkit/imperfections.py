"""Loss modeling and sensitivity sweeps for the preparation scheme.

Photon loss is modeled by a fictitious beam splitter coupling the lossy
mode to vacuum, with transmittance equal to the efficiency eta; tracing out
the ancilla gives the channel.  The Kraus operators used for mixed states
are read off the same beam-splitter blocks, so both routes agree to machine
precision by construction.

An inefficient single-photon detector is loss followed by an ideal
projection: the measured arm passes through the eta_det channel before the
(ideal) click or quadrature reading.  Signal-path transmission eta_signal
acts on the heralded mode after conditioning.

Sweeps report misfit statistics as a function of parameter deviation
(input-state parameters scattered around their chosen values) or detection
efficiency, sorted by the swept variable.  The misfit_max column of the
deviation sweep is a running worst case over all deviations up to the
current one, so it is monotone by construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import tolerances as tol
from .errors import NormalizationError
from .fock import (
    MODE_SECOND,
    BeamSplitterSpec,
    DensityMatrix,
    FockVector,
    beam_splitter_apply,
    hermite_gaussian_columns,
    partial_trace,
    sector_unitary,
    tensor,
    vacuum,
)
from .scheme import (
    HM,
    SPD,
    SchemeParams,
    conditional_output,
    embedded_two_mode_state,
    misfit,
)
from .states import SqueezedCoherentParams


@dataclass(frozen=True)
class ImperfectionSpec:
    """Efficiencies of the measurement path and the signal path."""

    eta_det: float = 1.0
    eta_signal: float = 1.0

    def __post_init__(self):
        for name in ("eta_det", "eta_signal"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")


def _dilation_columns(eta: float, n_max: int) -> list[np.ndarray]:
    """Per-photon-number amplitudes of the loss beam splitter.

    cols[n][p] is the amplitude for p of n photons surviving (n - p going
    to the ancilla), taken directly from the |n, 0> column of the exact
    beam-splitter sector block.
    """
    spec = BeamSplitterSpec(eta)
    return [sector_unitary(n, spec)[:, n].copy() for n in range(n_max + 1)]


def _loss_kraus(eta: float, cutoff: int) -> list[np.ndarray]:
    """Kraus operators K_q (q photons lost) built from the dilation columns."""
    cols = _dilation_columns(eta, cutoff)
    ops = []
    for q in range(cutoff + 1):
        k = np.zeros((cutoff + 1, cutoff + 1), dtype=np.complex128)
        for n in range(q, cutoff + 1):
            k[n - q, n] = cols[n][n - q]
        ops.append(k)
    return ops


def loss_channel(
    state: FockVector | DensityMatrix, eta: float, cutoff: int
) -> DensityMatrix:
    """Transmit a state through efficiency eta; returns the mixed output.

    Pure inputs run through the explicit dilate-and-trace pipeline (exact on
    the truncated space because the ancilla starts in vacuum, so no sector
    exceeds the cutoff).  Mixed inputs use the Kraus form read off the same
    dilation.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta={eta} outside [0, 1]")
    if state.cutoff != cutoff:
        raise ValueError(f"state cutoff {state.cutoff} does not match {cutoff}")
    if isinstance(state, FockVector):
        joint = tensor(state, vacuum(cutoff))
        mixed, dropped = beam_splitter_apply(joint, BeamSplitterSpec(eta))
        if dropped != 0.0:
            raise AssertionError("loss dilation must conserve the truncated support")
        return partial_trace(mixed, MODE_SECOND)
    out = np.zeros_like(state.rho)
    for k in _loss_kraus(eta, cutoff):
        out += k @ state.rho @ k.conj().T
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(out, cutoff)


def conditional_output_lossy(
    p: SchemeParams,
    imp: ImperfectionSpec,
    cutoff: int,
    check_input_tail: bool = True,
) -> tuple[DensityMatrix | None, float]:
    """Heralded mixed state and herald weight with inefficient detection.

    The measured arm passes through the eta_det loss channel before the
    ideal projection; the heralded arm passes through eta_signal afterwards.
    The weight uses the same normalization as the ideal success
    probabilities: outcome probability for SPD, probability density at x
    for HM.  When the herald can never fire (eta_det = 0 with SPD) the
    weight is exactly 0 and the state is None.
    """
    mixed = embedded_two_mode_state(p, cutoff, check_input_tail)
    c = mixed.amps
    big = mixed.cutoff
    total = mixed.norm_sq()
    cols = _dilation_columns(imp.eta_det, big)
    rho_big = np.zeros((big + 1, big + 1), dtype=np.complex128)
    weight = 0.0
    if isinstance(p.measurement, SPD):
        # Losing q photons before an n=1 click means 1+q were present.
        for q in range(big):
            coef = cols[1 + q][1]
            if coef == 0.0:
                continue
            row = c[1 + q, :]
            rho_big += (abs(coef) ** 2) * np.outer(row, row.conj())
            weight += (abs(coef) ** 2) * float(np.sum(np.abs(row) ** 2))
    elif isinstance(p.measurement, HM):
        n_idx = np.arange(big + 1)
        phi = hermite_gaussian_columns(big, p.measurement.x) * np.exp(
            -1j * p.measurement.lam * n_idx
        )
        for q in range(big + 1):
            bra = np.zeros(big + 1, dtype=np.complex128)
            for n in range(q, big + 1):
                bra[n] = phi[n - q] * cols[n][n - q]
            v = bra @ c
            rho_big += np.outer(v, v.conj())
            weight += float(np.sum(np.abs(v) ** 2))
    else:
        raise TypeError(f"unknown measurement {type(p.measurement).__name__}")
    weight /= total
    if weight == 0.0:
        return None, 0.0
    rho_t = rho_big[: cutoff + 1, : cutoff + 1]
    rho_t = 0.5 * (rho_t + rho_t.conj().T)
    tr = float(np.real(np.trace(rho_t)))
    if tr <= 0.0:
        raise NormalizationError("heralded state lost all mass to truncation")
    rho = DensityMatrix(rho_t / tr, cutoff)
    if imp.eta_signal != 1.0:
        rho = loss_channel(rho, imp.eta_signal, cutoff)
    return rho, weight


@dataclass(frozen=True)
class SweepPoint:
    """One row of a sensitivity curve."""

    sweep_var: float
    misfit_mean: float
    misfit_max: float
    herald_weight: float


def _perturbed_input(
    base: SqueezedCoherentParams, d: float, xi: np.ndarray
) -> SqueezedCoherentParams:
    """Scatter one input's parameters: magnitudes by a factor in [1-d, 1+d],
    angles by an additive shift in [-2*pi*d, 2*pi*d]."""
    return SqueezedCoherentParams(
        r=base.r * (1.0 + d * xi[0]),
        theta=base.theta + 2.0 * np.pi * d * xi[1],
        alpha_abs=base.alpha_abs * (1.0 + d * xi[2]),
        phi=base.phi + 2.0 * np.pi * d * xi[3],
    )


def sweep_parameter_deviation(
    p: SchemeParams,
    target: FockVector,
    rel_devs: Sequence[float],
    sampling: str = "signed_uniform",
    n_samples: int = 50,
    seed: int = 0,
    cutoff: int = tol.DEFAULT_CUTOFF,
) -> list[SweepPoint]:
    """Misfit statistics as the eight input-state parameters are scattered.

    For each relative deviation d the eight parameters (r, theta,
    alpha_abs, phi of both inputs) are drawn n_samples times:
    "signed_uniform" draws the unit scatter uniformly in [-1, 1],
    "worst_case" uses random corner signs (every scatter at +/-1).  d = 0
    skips perturbation entirely and reproduces the unperturbed evaluation
    bit for bit.  Points are processed and returned sorted ascending, and
    misfit_max accumulates the worst value seen at any deviation <= d.
    """
    devs = sorted(float(d) for d in rel_devs)
    if devs and not 0.0 <= devs[0] <= devs[-1] <= 0.2:
        raise ValueError("relative deviations must lie within [0, 0.2]")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if sampling not in ("signed_uniform", "worst_case"):
        raise ValueError(f"unknown sampling {sampling!r}")
    children = np.random.SeedSequence(seed).spawn(len(devs))
    points: list[SweepPoint] = []
    envelope = -np.inf
    for d, child in zip(devs, children):
        if d == 0.0:
            out = conditional_output(p, cutoff, check_input_tail=False)
            eps_list = [misfit(out, target)]
            weights = [out.raw_weight]
        else:
            rng = np.random.default_rng(child)
            xi = rng.uniform(-1.0, 1.0, size=(n_samples, 8))
            if sampling == "worst_case":
                xi = np.where(xi >= 0.0, 1.0, -1.0)
            eps_list = []
            weights = []
            for row in xi:
                q = SchemeParams(
                    _perturbed_input(p.in1, d, row[:4]),
                    _perturbed_input(p.in2, d, row[4:]),
                    p.transmittance,
                    p.measurement,
                )
                out = conditional_output(q, cutoff, check_input_tail=False)
                eps_list.append(misfit(out, target))
                weights.append(out.raw_weight)
        envelope = max(envelope, float(np.max(eps_list)))
        points.append(
            SweepPoint(d, float(np.mean(eps_list)), envelope, float(np.mean(weights)))
        )
    return points


def sweep_efficiency(
    p: SchemeParams,
    target: FockVector,
    eta_grid: Sequence[float],
    which: str = "det",
    cutoff: int = tol.DEFAULT_CUTOFF,
    check_input_tail: bool = True,
) -> list[SweepPoint]:
    """Misfit of the lossy pipeline over an efficiency grid, sorted ascending.

    which selects where the loss sits: the measurement path ("det"), the
    signal path ("signal"), or both ("both").
    """
    if which not in ("det", "signal", "both"):
        raise ValueError(f"unknown placement {which!r}")
    points = []
    for eta in sorted(float(e) for e in eta_grid):
        imp = ImperfectionSpec(
            eta_det=eta if which in ("det", "both") else 1.0,
            eta_signal=eta if which in ("signal", "both") else 1.0,
        )
        rho, weight = conditional_output_lossy(p, imp, cutoff, check_input_tail)
        eps = 1.0 if rho is None else misfit(rho, target)
        points.append(SweepPoint(eta, eps, eps, weight))
    return points
