"""
Parameter record, basis conventions and the composite atom-field state.

Units: hbar = 1, frequencies are angular frequencies. The sector basis for
excitation number N >= 1 is ordered

    |1> = |N-1,+,e>,  |2> = |N,+,g>,  |3> = |N-1,-,e>,  |4> = |N,-,g>

and the uncoupled ground pair is (|0,+,g>, |0,-,g>).
"""

import logging
import math
import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ParameterError

log = logging.getLogger(__name__)

# Sector matrices drop the (N - 1/2) omega offset; every observable we emit is
# diagonal in photon number, so the dropped phase never shows up.
GAUGE = "reduced: (N-1/2)*omega removed per sector"

LATTICE_TOLERANCE = 1e-9
NORM_TOLERANCE = 1e-12

SLOT_LABELS = {
    1: "|N-1,+,e>",
    2: "|N,+,g>",
    3: "|N-1,-,e>",
    4: "|N,-,g>",
}

# Rows are <L| and <R| expressed on (|+>, |->).
_WELL_CHANGE = np.array([[1.0, -1.0], [1.0, 1.0]]) / math.sqrt(2.0)

_WELL_VECTORS = {
    "+": np.array([1.0, 0.0]),
    "-": np.array([0.0, 1.0]),
    "L": np.array([1.0, -1.0]) / math.sqrt(2.0),
    "R": np.array([1.0, 1.0]) / math.sqrt(2.0),
}


def wrap_angle(angle: float) -> float:
    """Map an angle into [0, 2*pi)."""
    wrapped = math.fmod(angle, 2.0 * math.pi)
    if wrapped < 0.0:
        wrapped += 2.0 * math.pi
    # fmod can land exactly on 2*pi after the shift for tiny negative inputs
    return 0.0 if wrapped >= 2.0 * math.pi else wrapped


def on_analytic_lattice(chi: float) -> bool:
    """True when chi = -pi/4 - 2*n*pi for some integer n."""
    offset = wrap_angle(chi + math.pi / 4.0)
    return min(offset, 2.0 * math.pi - offset) < LATTICE_TOLERANCE


@dataclass(frozen=True)
class SystemParams:
    """
    All model constants of the two-level atom in a double well coupled to one
    cavity mode.

    Attributes:
        g: atom-field coupling
        delta: detuning omega - omega0
        tunnel_split: tunnel splitting Delta of the ground doublet
        kappa: k*b/2
        chi: k*x0
        half_sep: b/2, only used to scale <x>
    """
    g: float
    delta: float
    tunnel_split: float
    kappa: float
    chi: float
    half_sep: float = 1.0
    gauge: str = field(default=GAUGE, init=False, compare=False)

    def __post_init__(self):
        values = {
            "g": self.g,
            "delta": self.delta,
            "tunnel_split": self.tunnel_split,
            "kappa": self.kappa,
            "chi": self.chi,
            "half_sep": self.half_sep,
        }
        for name, value in values.items():
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value}")
        if self.g < 0.0:
            raise ParameterError(f"g must be non-negative, got {self.g}")
        if self.tunnel_split < 0.0:
            raise ParameterError(f"tunnel_split must be non-negative, got {self.tunnel_split}")
        if self.half_sep <= 0.0:
            raise ParameterError(f"half_sep must be positive, got {self.half_sep}")

    @property
    def analytic_capable(self) -> bool:
        return on_analytic_lattice(self.chi)

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {
            "g": self.g,
            "delta": self.delta,
            "tunnel_split": self.tunnel_split,
            "kappa": self.kappa,
            "chi": self.chi,
            "half_sep": self.half_sep,
            "analytic_capable": self.analytic_capable,
            "gauge": self.gauge,
        }


def make_params(
    g: float,
    delta: float,
    tunnel_split: float,
    kappa: float,
    chi: float,
    half_sep: float = 1.0,
) -> SystemParams:
    """
    Build a validated parameter record.

    The record type itself admits g = 0 so the decoupled limit stays reachable
    from library code; callers going through this constructor need a real
    coupling.

    Raises:
        ParameterError: non-positive g or half_sep, negative tunnel_split, NaN
    """
    if not g > 0.0:
        raise ParameterError(f"g must be positive, got {g}")
    params = SystemParams(
        g=float(g),
        delta=float(delta),
        tunnel_split=float(tunnel_split),
        kappa=float(kappa),
        chi=float(chi),
        half_sep=float(half_sep),
    )
    log.debug("params %s analytic_capable=%s", params, params.analytic_capable)
    return params


@dataclass(frozen=True)
class BasisLabel:
    sector: int
    slot: object

    def __post_init__(self):
        if not isinstance(self.sector, int) or self.sector < 0:
            raise ParameterError(f"sector must be a non-negative integer, got {self.sector!r}")
        if self.sector == 0:
            if self.slot not in ("+", "-"):
                raise ParameterError(f"ground sector slot must be '+' or '-', got {self.slot!r}")
        elif self.slot not in SLOT_LABELS:
            raise ParameterError(f"sector slot must be one of 1..4, got {self.slot!r}")

    @property
    def ket(self) -> str:
        if self.sector == 0:
            return f"|0,{self.slot},g>"
        photons = self.sector - 1 if self.slot in (1, 3) else self.sector
        external = "+" if self.slot in (1, 2) else "-"
        internal = "e" if self.slot in (1, 3) else "g"
        return f"|{photons},{external},{internal}>"


def well_vector(well: str) -> np.ndarray:
    """Coefficients of |+>, |->, |L> or |R> on (|+>, |->)."""
    try:
        return _WELL_VECTORS[well].copy()
    except KeyError:
        raise ParameterError(f"Unknown well label '{well}', expected one of L, R, +, -")


def basis_change_well(state_pm) -> np.ndarray:
    """
    Re-express amplitudes on (|+>, |->) as amplitudes on (|L>, |R>).

    |L> = (|+> - |->)/sqrt(2) and |R> = (|+> + |->)/sqrt(2); the map is a real
    orthogonal matrix, so the inverse is its transpose.
    """
    state_pm = np.asarray(state_pm, dtype=complex)
    return _WELL_CHANGE @ state_pm


def basis_change_pm(state_lr) -> np.ndarray:
    state_lr = np.asarray(state_lr, dtype=complex)
    return _WELL_CHANGE.T @ state_lr


def well_change_matrix() -> np.ndarray:
    return _WELL_CHANGE.copy()


def _frozen_array(values, shape: tuple) -> np.ndarray:
    array = np.array(values, dtype=complex)
    if array.shape != shape:
        raise ParameterError(f"expected amplitudes of shape {shape}, got {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ParameterError("amplitudes must be finite")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class CompositeState:
    """
    Pure atom-field state, stored per excitation sector.

    Attributes:
        ground: amplitudes on (|0,+,g>, |0,-,g>)
        sectors: array of shape (S, 4); row N-1 holds sector N in slot order
        truncated_tail: probability mass discarded when the field was truncated
    """
    ground: np.ndarray
    sectors: np.ndarray
    truncated_tail: float = 0.0

    def __post_init__(self):
        ground = _frozen_array(self.ground, (2,))
        sectors = np.asarray(self.sectors, dtype=complex)
        if sectors.ndim != 2 or sectors.shape[1] != 4:
            raise ParameterError(f"sector amplitudes must have shape (S, 4), got {sectors.shape}")
        sectors = _frozen_array(sectors, sectors.shape)
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "sectors", sectors)
        if self.truncated_tail < 0.0:
            raise ParameterError("truncated_tail must be non-negative")
        deficit = self.norm_squared + self.truncated_tail - 1.0
        if abs(deficit) > NORM_TOLERANCE:
            raise ParameterError(
                f"state is not normalized: |psi|^2 + tail - 1 = {deficit:.3e}"
            )

    @property
    def n_sectors(self) -> int:
        return self.sectors.shape[0]

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.ground) ** 2) + np.sum(np.abs(self.sectors) ** 2))

    def sector(self, n_exc: int) -> np.ndarray:
        if n_exc < 1:
            raise ParameterError("sector numbers start at 1; use .ground for N = 0")
        if n_exc > self.n_sectors:
            return np.zeros(4, dtype=complex)
        return self.sectors[n_exc - 1]

    def amplitude(self, label: BasisLabel) -> complex:
        if label.sector == 0:
            return complex(self.ground[0 if label.slot == "+" else 1])
        return complex(self.sector(label.sector)[label.slot - 1])

    def sector_populations(self) -> np.ndarray:
        """Populations of N = 0, 1, ..., S."""
        return np.concatenate((
            [np.sum(np.abs(self.ground) ** 2)],
            np.sum(np.abs(self.sectors) ** 2, axis=1),
        ))

    def overlap(self, other: "CompositeState") -> complex:
        """<self|other> over the sectors both states carry."""
        shared = min(self.n_sectors, other.n_sectors)
        value = np.vdot(self.ground, other.ground)
        value += np.vdot(self.sectors[:shared], other.sectors[:shared])
        return complex(value)

    def with_amplitudes(self, ground, sectors) -> "CompositeState":
        return CompositeState(ground=ground, sectors=sectors, truncated_tail=self.truncated_tail)


def ground_state(well: str) -> CompositeState:
    """Vacuum field, atom in |g> and in the given external state."""
    return CompositeState(ground=well_vector(well), sectors=np.zeros((0, 4)))
