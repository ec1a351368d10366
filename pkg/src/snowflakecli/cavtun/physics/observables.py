"""
Composite-state evolution, partial traces and time series of the atomic
observables.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .exceptions import ParameterError, TruncationError
from .model import CompositeState, SystemParams, well_change_matrix, well_vector
from .sector_dynamics import (
    evolve_ground,
    propagator_analytic,
    propagator_oracle,
    sector_spectrum,
)

log = logging.getLogger(__name__)

DEFAULT_TAIL = 1e-12
MAX_PHOTONS = 4096
DEFAULT_SAMPLES = 4096
UNIFORM_STEP_TOLERANCE = 1e-9


@dataclass(frozen=True)
class FieldSpec:
    """
    Initial cavity field: a Fock state |n> or a coherent state |alpha>.

    Attributes:
        kind: "fock" or "coherent"
        photons: photon number of a Fock field
        alpha: coherent amplitude
        truncation_tail: probability mass allowed outside the kept photon numbers
    """
    kind: str
    photons: int = 0
    alpha: complex = 0j
    truncation_tail: float = DEFAULT_TAIL

    def __post_init__(self):
        if self.kind not in ("fock", "coherent"):
            raise ParameterError(f"field kind must be 'fock' or 'coherent', got {self.kind!r}")
        if self.kind == "fock" and (int(self.photons) != self.photons or self.photons < 0):
            raise ParameterError(f"Fock photon number must be a non-negative integer, got {self.photons}")
        if not 0.0 < self.truncation_tail < 1.0:
            raise ParameterError(f"truncation_tail must lie in (0, 1), got {self.truncation_tail}")
        if not np.isfinite(complex(self.alpha)):
            raise ParameterError(f"alpha must be finite, got {self.alpha}")

    @classmethod
    def fock(cls, photons: int) -> "FieldSpec":
        return cls(kind="fock", photons=int(photons))

    @classmethod
    def coherent(cls, alpha: complex, truncation_tail: float = DEFAULT_TAIL) -> "FieldSpec":
        return cls(kind="coherent", alpha=complex(alpha), truncation_tail=truncation_tail)

    @property
    def mean_photons(self) -> float:
        if self.kind == "fock":
            return float(self.photons)
        return abs(complex(self.alpha)) ** 2

    def describe(self) -> str:
        if self.kind == "fock":
            return f"fock(n={self.photons})"
        return f"coherent(alpha={complex(self.alpha)}, tail={self.truncation_tail:g})"


def photon_amplitudes(field: FieldSpec) -> tuple:
    """
    Photon-number amplitudes c_0..c_nmax of the field and the discarded tail.

    For a coherent field n_max is the smallest photon number whose Poisson
    survival function is within the truncation tail. Amplitudes are built in
    log space, so large photon numbers do not overflow.

    Raises:
        TruncationError: the tail needs more than MAX_PHOTONS photons
    """
    if field.kind == "fock":
        amplitudes = np.zeros(field.photons + 1, dtype=complex)
        amplitudes[field.photons] = 1.0
        return amplitudes, 0.0

    alpha = complex(field.alpha)
    mean = abs(alpha) ** 2
    if mean == 0.0:
        return np.ones(1, dtype=complex), 0.0

    n_max = poisson.isf(field.truncation_tail, mean)
    if not math.isfinite(n_max):
        raise TruncationError(f"cannot reach tail {field.truncation_tail:g} for |alpha|^2 = {mean:g}")
    n_max = int(n_max)
    while n_max <= MAX_PHOTONS and poisson.sf(n_max, mean) > field.truncation_tail:
        n_max += 1
    if n_max > MAX_PHOTONS:
        raise TruncationError(
            f"coherent field |alpha|^2 = {mean:g} needs more than {MAX_PHOTONS} photons "
            f"for tail {field.truncation_tail:g}"
        )

    n = np.arange(n_max + 1)
    log_modulus = -mean / 2.0 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    amplitudes = np.exp(log_modulus + 1j * n * np.angle(alpha))
    tail = max(1.0 - float(np.sum(np.abs(amplitudes) ** 2)), 0.0)
    log.debug("coherent field alpha=%s: n_max=%d, tail=%.3e", alpha, n_max, tail)
    return amplitudes, tail


def initial_state(field: FieldSpec, well: str, internal: str) -> CompositeState:
    """
    Product state field x external x internal, distributed over excitation
    sectors: photon n with the atom excited lands in sector n+1 (slots 1, 3),
    photon n >= 1 with the atom in |g> in sector n (slots 2, 4), and the
    vacuum with |g> in the ground pair.
    """
    if internal not in ("g", "e"):
        raise ParameterError(f"internal state must be 'g' or 'e', got {internal!r}")
    photons, tail = photon_amplitudes(field)
    external = well_vector(well)
    pairs = np.outer(photons, external)

    ground = np.zeros(2, dtype=complex)
    if internal == "e":
        sectors = np.zeros((len(photons), 4), dtype=complex)
        sectors[:, [0, 2]] = pairs
    else:
        ground = pairs[0]
        sectors = np.zeros((len(photons) - 1, 4), dtype=complex)
        sectors[:, [1, 3]] = pairs[1:]
    return CompositeState(ground=ground, sectors=sectors, truncated_tail=tail)


def _sector_propagator(params: SystemParams, n_exc: int, t: float, method: str):
    if method == "oracle":
        return propagator_oracle(params, n_exc, t)
    if method == "analytic":
        return propagator_analytic(params, n_exc, t)
    raise ParameterError(f"propagator method must be 'oracle' or 'analytic', got {method!r}")


def _occupied_sectors(state: CompositeState) -> list:
    return [n + 1 for n in range(state.n_sectors) if np.any(state.sectors[n] != 0.0)]


def evolve(
    state: CompositeState,
    params: SystemParams,
    t: float,
    method: str = "oracle",
    max_workers: int = 1,
) -> CompositeState:
    """
    Advance every excitation sector by its own propagator and the ground pair
    by its phases. Empty sectors are skipped.
    """
    ground = evolve_ground(params, t, state.ground)
    sectors = np.array(state.sectors, dtype=complex)

    def advance(n_exc: int) -> np.ndarray:
        return _sector_propagator(params, n_exc, t, method).apply(state.sectors[n_exc - 1])

    occupied = _occupied_sectors(state)
    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as pool:
        for n_exc, amps in zip(occupied, pool.map(advance, occupied)):
            sectors[n_exc - 1] = amps
    return state.with_amplitudes(ground, sectors)


def _external_pairs(state: CompositeState) -> np.ndarray:
    """All (|+>, |->) amplitude pairs sharing field and internal labels."""
    return np.vstack((
        state.ground[np.newaxis, :],
        state.sectors[:, [0, 2]],
        state.sectors[:, [1, 3]],
    ))


def _to_wells(rho_pm: np.ndarray) -> np.ndarray:
    change = well_change_matrix()
    return np.einsum("ij,...jk,lk->...il", change, rho_pm, change)


def reduce_external(state: CompositeState) -> np.ndarray:
    """
    External reduced density matrix on (|L>, |R>), normalized over the kept
    photon numbers.
    """
    pairs = _external_pairs(state)
    rho_pm = pairs.T @ pairs.conj()
    return _to_wells(rho_pm / state.norm_squared)


def reduce_internal(state: CompositeState) -> np.ndarray:
    """
    Internal reduced density matrix on (|g>, |e>). Off-diagonal entries are
    in the frame with the (N - 1/2) omega phase removed.
    """
    excited = state.sectors[:, [0, 2]]
    lower = np.vstack((state.ground[np.newaxis, :], state.sectors[:, [1, 3]]))
    rho_ee = float(np.sum(np.abs(excited) ** 2))
    rho_gg = float(np.sum(np.abs(lower) ** 2))
    # photon n pairs g in sector n (or ground) with e in sector n+1
    rho_ge = complex(np.sum(lower[: len(excited)] * excited.conj()))
    rho = np.array([[rho_gg, rho_ge], [np.conj(rho_ge), rho_ee]], dtype=complex)
    return rho / state.norm_squared


def mean_position(state: CompositeState, params: SystemParams) -> float:
    """<x> = (b/2)(rho_RR - rho_LL)."""
    rho = reduce_external(state)
    return params.half_sep * float(np.real(rho[1, 1] - rho[0, 0]))


@dataclass(frozen=True, eq=False)
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    label: str
    params: Optional[SystemParams] = None
    field: Optional[FieldSpec] = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise ParameterError("time grid must be a non-empty 1-D array")
        if values.shape != times.shape:
            raise ParameterError(f"values shape {values.shape} does not match times {times.shape}")
        if times.size > 1:
            steps = np.diff(times)
            if np.any(steps <= 0.0):
                raise ParameterError("times must be strictly increasing")
            if np.ptp(steps) > UNIFORM_STEP_TOLERANCE * abs(steps[0]) * times.size:
                raise ParameterError("times must be uniformly spaced")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def step(self) -> float:
        if self.times.size < 2:
            return 0.0
        return float(self.times[1] - self.times[0])

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def __len__(self) -> int:
        return self.times.size


@dataclass(frozen=True, eq=False)
class SeriesBundle:
    rho_LL: TimeSeries
    rho_RR: TimeSeries
    rho_ee: TimeSeries
    x_mean: TimeSeries

    @property
    def times(self) -> np.ndarray:
        return self.rho_LL.times

    def columns(self) -> dict:
        """CSV columns, with time expressed as g*t and <x> in units of b/2."""
        params = self.x_mean.params
        return {
            "gt": self.times * params.g,
            "rho_LL": self.rho_LL.values,
            "rho_RR": self.rho_RR.values,
            "rho_ee": self.rho_ee.values,
            "x_mean_over_halfb": self.x_mean.values / params.half_sep,
        }


def uniform_grid(t_start: float, t_stop: float, samples: int = DEFAULT_SAMPLES) -> np.ndarray:
    if samples < 2 or not t_stop > t_start:
        raise ParameterError(
            f"time window needs t_stop > t_start and at least 2 samples, "
            f"got [{t_start}, {t_stop}] with {samples}"
        )
    return np.linspace(t_start, t_stop, samples)


def trace_series(
    field: FieldSpec,
    well: str,
    internal: str,
    params: SystemParams,
    t_grid,
    max_workers: int = 1,
) -> SeriesBundle:
    """
    Time series of rho_LL, rho_RR, rho_ee and <x> for the given initial
    product state.

    Each occupied sector is diagonalized once and evolved over the whole grid;
    sectors are evaluated on up to `max_workers` threads and summed in sector
    order, so the result does not depend on the worker count.

    Raises:
        ParameterError: empty or non-uniform time grid
    """
    times = np.asarray(t_grid, dtype=float)
    if times.size == 0:
        raise ParameterError("time grid is empty")

    state = initial_state(field, well, internal)
    ground = state.ground * np.exp(
        -1j * np.outer(times, [0.5, -0.5]) * params.tunnel_split
    )
    rho_pm = np.einsum("ti,tj->tij", ground, ground.conj())
    rho_ee = np.zeros(times.size)

    def sector_terms(n_exc: int) -> tuple:
        amps = sector_spectrum(params, n_exc).evolve(state.sectors[n_exc - 1], times)
        excited = amps[:, [0, 2]]
        lower = amps[:, [1, 3]]
        outer = (
            np.einsum("ti,tj->tij", excited, excited.conj())
            + np.einsum("ti,tj->tij", lower, lower.conj())
        )
        return outer, np.sum(np.abs(excited) ** 2, axis=1)

    occupied = _occupied_sectors(state)
    log.debug("tracing %d sectors over %d samples on %d workers", len(occupied), times.size, max_workers)
    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as pool:
        for outer, excited in pool.map(sector_terms, occupied):
            rho_pm += outer
            rho_ee += excited

    norm = state.norm_squared
    rho_lr = _to_wells(rho_pm / norm)
    rho_ll = np.real(rho_lr[:, 0, 0])
    rho_rr = np.real(rho_lr[:, 1, 1])

    def series(values, label):
        return TimeSeries(times=times, values=values, label=label, params=params, field=field)

    return SeriesBundle(
        rho_LL=series(rho_ll, "rho_LL"),
        rho_RR=series(rho_rr, "rho_RR"),
        rho_ee=series(rho_ee / norm, "rho_ee"),
        x_mean=series(params.half_sep * (rho_rr - rho_ll), "x_mean"),
    )
