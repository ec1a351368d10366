"""
Coherent control by instantaneous pi-pulses interleaved with free evolution.
"""

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .exceptions import ProtocolError
from .model import CompositeState, SystemParams, make_params
from .observables import evolve

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PiPulse:
    """Instantaneous internal flip |g> -> -i|e>, |e> -> -i|g>."""

    def describe(self) -> str:
        return "pulse"


@dataclass(frozen=True)
class FreeEvolve:
    duration: float
    params: SystemParams

    def __post_init__(self):
        if not self.duration >= 0.0:
            raise ProtocolError(f"free evolution duration must be >= 0, got {self.duration}")

    def describe(self) -> str:
        return f"evolve t={self.duration:.6g}"


ProtocolStep = Union[PiPulse, FreeEvolve]


@dataclass(frozen=True, eq=False)
class ProtocolResult:
    final_state: CompositeState
    fidelity: float
    leakage: float
    trajectory: tuple

    def as_dict(self) -> dict:
        return {
            "fidelity": self.fidelity,
            "infidelity": 1.0 - self.fidelity,
            "leakage": self.leakage,
            "steps": len(self.trajectory) - 1,
        }


def _trim(sectors: np.ndarray) -> np.ndarray:
    occupied = np.nonzero(np.any(sectors != 0.0, axis=1))[0]
    return sectors[: occupied[-1] + 1] if occupied.size else sectors[:0]


def apply_pi_pulse(state: CompositeState) -> CompositeState:
    """
    Flip the internal state of every component, leaving photon and external
    labels alone. Components move between sectors: (n, ext, g) sits in
    sector n (the ground pair for n = 0), (n, ext, e) in sector n + 1.
    """
    excited = state.sectors[:, [0, 2]]
    lower = np.vstack((state.ground[np.newaxis, :], state.sectors[:, [1, 3]]))
    count = state.n_sectors

    flipped_lower = np.zeros((count + 1, 2), dtype=complex)
    flipped_lower[:count] = -1j * excited

    sectors = np.zeros((count + 1, 4), dtype=complex)
    sectors[:, [0, 2]] = -1j * lower
    sectors[:count, [1, 3]] = flipped_lower[1:]
    return state.with_amplitudes(flipped_lower[0], _trim(sectors))


def _support(state: CompositeState) -> np.ndarray:
    """Boolean mask over sectors 0..S where the state has amplitude."""
    return np.concatenate((
        [np.any(state.ground != 0.0)],
        np.any(state.sectors != 0.0, axis=1),
    ))


def _leakage(state: CompositeState, target: CompositeState) -> float:
    populations = state.sector_populations() / state.norm_squared
    support = _support(target)
    shared = min(populations.size, support.size)
    inside = float(np.sum(populations[:shared][support[:shared]]))
    return max(0.0, 1.0 - inside)


def run_protocol(
    steps,
    initial: CompositeState,
    target: CompositeState,
    method: str = "oracle",
) -> ProtocolResult:
    """
    Apply a schedule and score the final state against `target`.

    The fidelity is |<target|psi>|^2, blind to the global phase; leakage is the
    population outside the excitation sectors the target occupies.

    Raises:
        ProtocolError: empty schedule or unknown step
    """
    steps = list(steps)
    if not steps:
        raise ProtocolError("protocol has no steps")

    state = initial
    trajectory = [state]
    for step in steps:
        if isinstance(step, PiPulse):
            state = apply_pi_pulse(state)
        elif isinstance(step, FreeEvolve):
            state = evolve(state, step.params, step.duration, method=method)
        else:
            raise ProtocolError(f"unknown protocol step {step!r}")
        trajectory.append(state)

    fidelity = abs(target.overlap(state)) ** 2 / (target.norm_squared * state.norm_squared)
    result = ProtocolResult(
        final_state=state,
        fidelity=float(fidelity),
        leakage=_leakage(state, target),
        trajectory=tuple(trajectory),
    )
    log.debug("protocol of %d steps: fidelity=%.12f leakage=%.3e", len(steps), result.fidelity, result.leakage)
    return result


def protocol_params(
    tunnel_split: float,
    g: float,
    kappa: float = math.pi / 4.0,
    chi: float = -math.pi / 4.0,
    half_sep: float = 1.0,
) -> SystemParams:
    """Parameters at the preparation detuning delta = -g^2 sin(2 kappa) / D (one photon)."""
    if not tunnel_split > 0.0:
        raise ProtocolError(f"well preparation needs a positive tunnel splitting, got {tunnel_split}")
    delta = -g ** 2 * math.sin(2.0 * kappa) / tunnel_split
    return make_params(g=g, delta=delta, tunnel_split=tunnel_split, kappa=kappa, chi=chi, half_sep=half_sep)


def superposition_schedule(theta: float, params: SystemParams) -> list:
    """
    Pulse, free evolution for theta / (sqrt(2) D), pulse.

    Starting from |0,-,g> this leaves the ground doublet with
    rho_LL = 1/2 + (1 - cos theta)/4; theta = pi prepares |0,L,g>.
    """
    if not 0.0 <= theta <= math.pi:
        raise ProtocolError(f"theta must lie in [0, pi], got {theta}")
    if not params.tunnel_split > 0.0:
        raise ProtocolError("superposition schedule needs a positive tunnel splitting")
    duration = theta / (math.sqrt(2.0) * params.tunnel_split)
    return [PiPulse(), FreeEvolve(duration=duration, params=params), PiPulse()]


def left_well_protocol(params: SystemParams) -> list:
    return superposition_schedule(math.pi, params)
