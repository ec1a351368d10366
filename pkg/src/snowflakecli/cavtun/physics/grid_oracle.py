"""
Grid solution of the external motion in V(x) = A x^4 - B x^2.

Used to check the two-level (ground doublet) description: the spectral solve
yields the tunnel splitting, the gap to the next level and the well
separation; a split-operator integrator propagates one excitation sector
with the spatially varying cavity coupling, and the result is compared with
the four-level sector model.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import fft
from scipy.integrate import quad
from scipy.linalg import eigh, toeplitz
from scipy.optimize import brentq

from .exceptions import DomainViolationError, GridResolutionError, IntegratorStepError, ParameterError
from .model import SystemParams
from .observables import TimeSeries
from .sector_dynamics import SectorSpectrum, sector_spectrum

log = logging.getLogger(__name__)

CONVERGENCE_TOLERANCE = 1e-3
POINTS_PER_WAVELENGTH = 8
STEP_PHASE_LIMIT = math.pi / 4.0
DEFAULT_MAX_STEP = 0.05
TWO_LEVEL_TOLERANCE = 0.05


@dataclass(frozen=True)
class DoubleWellSpec:
    """
    Quartic double well on a uniform, cell-centred grid (hbar = 1).

    Attributes:
        quartic: A
        quadratic: B
        mass: particle mass
        x_min: left grid edge
        x_max: right grid edge
        points: grid point count
        n_states: number of eigenpairs retained
    """
    quartic: float = 0.08
    quadratic: float = 1.0
    mass: float = 1.0
    x_min: float = -8.0
    x_max: float = 8.0
    points: int = 1024
    n_states: int = 8

    def __post_init__(self):
        if not (self.quartic > 0.0 and self.quadratic > 0.0):
            raise ParameterError(
                f"a double well needs A > 0 and B > 0, got A={self.quartic}, B={self.quadratic}"
            )
        if not self.mass > 0.0:
            raise ParameterError(f"mass must be positive, got {self.mass}")
        if not self.x_max > self.x_min:
            raise ParameterError(f"grid needs x_max > x_min, got [{self.x_min}, {self.x_max}]")
        if self.points < 16:
            raise ParameterError(f"grid needs at least 16 points, got {self.points}")
        if not 3 <= self.n_states <= self.points:
            raise ParameterError(f"n_states must lie in [3, points], got {self.n_states}")
        if not (self.x_min < -self.minimum and self.x_max > self.minimum):
            raise ParameterError(f"grid [{self.x_min}, {self.x_max}] does not span both wells")

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / self.points

    @property
    def grid(self) -> np.ndarray:
        return self.x_min + (np.arange(self.points) + 0.5) * self.spacing

    @property
    def minimum(self) -> float:
        """Position of the right-hand classical minimum."""
        return math.sqrt(self.quadratic / (2.0 * self.quartic))

    @property
    def potential_minimum(self) -> float:
        return -self.quadratic ** 2 / (4.0 * self.quartic)

    @property
    def omega_osc(self) -> float:
        """Harmonic frequency of a single well, from V'' at the minimum."""
        curvature = 12.0 * self.quartic * self.minimum ** 2 - 2.0 * self.quadratic
        return math.sqrt(curvature / self.mass)

    def potential(self, x):
        x = np.asarray(x, dtype=float)
        return self.quartic * x ** 4 - self.quadratic * x ** 2

    def with_points(self, points: int) -> "DoubleWellSpec":
        return dataclasses.replace(self, points=int(points))


@dataclass(frozen=True, eq=False)
class SpectralResult:
    """
    Lowest eigenpairs of the grid Hamiltonian.

    Eigenvectors are normalized on the grid (sum of |psi|^2 is 1). states[0]
    is the symmetric |-> and states[1] the antisymmetric |+>, with signs
    fixed so that <+|x|-> > 0.
    """
    spec: DoubleWellSpec
    energies: np.ndarray
    states: np.ndarray

    @property
    def grid(self) -> np.ndarray:
        return self.spec.grid

    @property
    def tunnel_split(self) -> float:
        return float(self.energies[1] - self.energies[0])

    @property
    def gap(self) -> float:
        """Distance from the upper doublet member to the next level."""
        return float(self.energies[2] - self.energies[1])

    @property
    def separation(self) -> float:
        """b = 2 <+|x|->."""
        return 2.0 * float(np.sum(self.states[1] * self.grid * self.states[0]))

    @property
    def symmetric(self) -> np.ndarray:
        return self.states[0]

    @property
    def antisymmetric(self) -> np.ndarray:
        return self.states[1]

    def well_state(self, well: str) -> np.ndarray:
        if well == "R":
            return (self.states[1] + self.states[0]) / math.sqrt(2.0)
        if well == "L":
            return (self.states[1] - self.states[0]) / math.sqrt(2.0)
        raise ParameterError(f"well must be 'L' or 'R', got {well!r}")

    def as_dict(self) -> dict:
        return {
            "tunnel_split": self.tunnel_split,
            "gap": self.gap,
            "separation": self.separation,
            "energies": [float(e) for e in self.energies],
            "points": self.spec.points,
        }


def _kinetic_matrix(spec: DoubleWellSpec) -> np.ndarray:
    """Sinc-DVR kinetic energy on the uniform grid."""
    offsets = np.arange(spec.points)
    column = np.empty(spec.points)
    column[0] = math.pi ** 2 / 6.0
    column[1:] = (-1.0) ** offsets[1:] / offsets[1:] ** 2
    return toeplitz(column / (spec.mass * spec.spacing ** 2))


def _fix_signs(states: np.ndarray, grid: np.ndarray) -> np.ndarray:
    states = states.copy()
    for index, state in enumerate(states):
        if state[np.argmax(np.abs(state))] < 0.0:
            states[index] = -state
    if np.sum(states[0][grid > 0.0]) < 0.0:
        states[0] = -states[0]
    if np.sum(states[1] * grid * states[0]) < 0.0:
        states[1] = -states[1]
    return states


def _solve(spec: DoubleWellSpec) -> SpectralResult:
    hamiltonian = _kinetic_matrix(spec) + np.diag(spec.potential(spec.grid))
    energies, vectors = eigh(hamiltonian, subset_by_index=[0, spec.n_states - 1])
    states = _fix_signs(vectors.T, spec.grid)
    return SpectralResult(spec=spec, energies=energies, states=states)


def _check_resolution(result: SpectralResult) -> None:
    spec = result.spec
    momentum = math.sqrt(2.0 * spec.mass * (result.energies[-1] - spec.potential_minimum))
    per_wavelength = 2.0 * math.pi / momentum / spec.spacing
    if per_wavelength < POINTS_PER_WAVELENGTH:
        raise GridResolutionError(
            f"grid resolves the highest retained state with {per_wavelength:.1f} points per "
            f"wavelength, need {POINTS_PER_WAVELENGTH}"
        )


def solve_double_well(spec: DoubleWellSpec, check_convergence: bool = True) -> SpectralResult:
    """
    Diagonalize -(1/2m) d^2/dx^2 + V(x) on the grid.

    Raises:
        GridResolutionError: too few points per wavelength, or the tunnel
            splitting moves by more than 0.1% when the point count doubles
    """
    result = _solve(spec)
    energies = result.energies
    if not (energies[0] < energies[1] < energies[2]):
        raise GridResolutionError(f"degenerate low-lying spectrum: {energies[:3]}")
    _check_resolution(result)

    if check_convergence:
        fine = _solve(spec.with_points(2 * spec.points))
        shift = abs(fine.tunnel_split - result.tunnel_split) / result.tunnel_split
        log.debug(
            "grid convergence: splitting %.10g at %d points, %.10g at %d points (shift %.2e)",
            result.tunnel_split, spec.points, fine.tunnel_split, 2 * spec.points, shift,
        )
        if shift > CONVERGENCE_TOLERANCE:
            raise GridResolutionError(
                f"tunnel splitting shifts by {shift:.2e} under grid doubling",
                coarse_split=result.tunnel_split,
                fine_split=fine.tunnel_split,
            )
    return result


def harmonic_ground_energy(spec: DoubleWellSpec) -> float:
    return spec.potential_minimum + 0.5 * spec.omega_osc


def wkb_splitting(spec: DoubleWellSpec, ground_energy: float = None) -> float:
    """
    Semiclassical estimate omega_osc * exp(-S) of the tunnel splitting, with
    S = integral of sqrt(2m(V - E0)) between the inner turning points.

    ground_energy defaults to the harmonic estimate of one well.

    Raises:
        DomainViolationError: E0 is not below the barrier top
    """
    energy = harmonic_ground_energy(spec) if ground_energy is None else float(ground_energy)
    barrier = float(spec.potential(0.0))
    if not energy < barrier:
        raise DomainViolationError(
            f"ground energy {energy:.6g} is not below the barrier top {barrier:.6g}"
        )
    if not energy > spec.potential_minimum:
        raise DomainViolationError(f"ground energy {energy:.6g} lies below the potential minimum")

    turning = brentq(lambda z: float(spec.potential(z)) - energy, 0.0, spec.minimum)
    half_action, _ = quad(
        lambda z: math.sqrt(max(2.0 * spec.mass * (float(spec.potential(z)) - energy), 0.0)),
        0.0,
        turning,
    )
    return spec.omega_osc * math.exp(-2.0 * half_action)


def doublet_validity_ratio(spectral: SpectralResult, g: float, delta: float, n_exc: int = 1) -> float:
    """Gap to the next level over the largest sector frequency scale sqrt(4 g^2 N + delta^2)."""
    return spectral.gap / math.sqrt(4.0 * g ** 2 * n_exc + delta ** 2)


@dataclass(frozen=True, eq=False)
class SectorWavefunction:
    """
    Grid wavefunction of one excitation sector.

    Attributes:
        excited: atom in |e>, photon number N - 1
        lower: atom in |g>, photon number N
        time: evolution time
    """
    excited: np.ndarray
    lower: np.ndarray
    time: float = 0.0

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.excited) ** 2) + np.sum(np.abs(self.lower) ** 2))


@dataclass(frozen=True, eq=False)
class DoubletProjection:
    amplitudes: np.ndarray
    residual: float


def project_to_doublet(wavefunction: SectorWavefunction, spectral: SpectralResult) -> DoubletProjection:
    """
    Overlaps with (|N-1,+,e>, |N,+,g>, |N-1,-,e>, |N,-,g>) and the population
    left outside the doublet.
    """
    size = spectral.grid.size
    if wavefunction.excited.shape != (size,) or wavefunction.lower.shape != (size,):
        raise ParameterError(
            f"wavefunction grid does not match the spectral grid of {size} points"
        )
    plus, minus = spectral.antisymmetric, spectral.symmetric
    amplitudes = np.array([
        np.vdot(plus, wavefunction.excited),
        np.vdot(plus, wavefunction.lower),
        np.vdot(minus, wavefunction.excited),
        np.vdot(minus, wavefunction.lower),
    ])
    residual = max(wavefunction.norm - float(np.sum(np.abs(amplitudes) ** 2)), 0.0)
    return DoubletProjection(amplitudes=amplitudes, residual=residual)


def right_well_state(spectral: SpectralResult, kind: str = "doublet") -> np.ndarray:
    """
    A state localized in the right well: (phi_0 + phi_1)/sqrt(2) for
    kind "doublet", the harmonic ground state of the right well for "gaussian".
    """
    if kind == "doublet":
        return spectral.well_state("R").astype(complex)
    if kind == "gaussian":
        spec = spectral.spec
        width = spec.mass * spec.omega_osc
        state = np.exp(-0.5 * width * (spectral.grid - spec.minimum) ** 2).astype(complex)
        return state / np.linalg.norm(state)
    raise ParameterError(f"right-well state kind must be 'doublet' or 'gaussian', got {kind!r}")


@dataclass(frozen=True)
class GridCoupling:
    """Cavity coupling g sqrt(N) sin(k (x - x0)) between the two channels."""
    g: float
    delta: float
    wavenumber: float
    offset: float

    @classmethod
    def from_angles(cls, g: float, delta: float, kappa: float, chi: float, separation: float) -> "GridCoupling":
        """k = 2 kappa / b and x0 = chi / k."""
        if kappa == 0.0:
            raise DomainViolationError("kappa = 0 leaves the mode offset x0 = chi/k undefined")
        wavenumber = 2.0 * kappa / separation
        return cls(g=g, delta=delta, wavenumber=wavenumber, offset=chi / wavenumber)

    def profile(self, x: np.ndarray, n_exc: int) -> np.ndarray:
        return self.g * math.sqrt(n_exc) * np.sin(self.wavenumber * (x - self.offset))


class SplitOperatorIntegrator:
    """
    Strang splitting for the two-channel sector Hamiltonian

        [[T + V - delta/2, C(x)], [C(x), T + V + delta/2]]

    The kinetic step is applied in momentum space; the potential half-steps
    exponentiate the 2x2 matrix at each grid point in closed form.
    """

    def __init__(self, spec: DoubleWellSpec, coupling: GridCoupling, n_exc: int, timestep: float):
        self._spec = spec
        self._coupling = profile = coupling.profile(spec.grid, n_exc)
        self._potential = spec.potential(spec.grid)
        self._delta = coupling.delta
        self._momentum = 2.0 * math.pi * fft.fftfreq(spec.points, d=spec.spacing)
        self.set_timestep(timestep)
        log.debug("split-operator step %.4g on %d points, max coupling %.3g", timestep, spec.points, np.max(np.abs(profile)))

    def set_timestep(self, timestep: float) -> None:
        self._timestep = timestep
        half = 0.5 * timestep
        rate = np.sqrt(0.25 * self._delta ** 2 + self._coupling ** 2)
        cosine = np.cos(rate * half)
        # sin(rate * half) / rate, finite at rate = 0
        sine_over_rate = half * np.sinc(rate * half / math.pi)
        phase = np.exp(-1j * self._potential * half)
        self._p11 = phase * (cosine + 0.5j * self._delta * sine_over_rate)
        self._p22 = phase * (cosine - 0.5j * self._delta * sine_over_rate)
        self._p12 = phase * (-1j * self._coupling * sine_over_rate)
        self._kinetic = np.exp(-1j * self._momentum ** 2 / (2.0 * self._spec.mass) * timestep)

    def _half_potential(self, psi: np.ndarray) -> np.ndarray:
        excited, lower = psi
        return np.array([
            self._p11 * excited + self._p12 * lower,
            self._p12 * excited + self._p22 * lower,
        ])

    def __call__(self, psi: np.ndarray) -> np.ndarray:
        psi = self._half_potential(psi)
        psi = fft.ifft(fft.fft(psi, axis=1) * self._kinetic, axis=1)
        return self._half_potential(psi)

    def energy(self, psi: np.ndarray) -> float:
        kinetic = np.sum(np.abs(fft.fft(psi, axis=1)) ** 2 * self._momentum ** 2) / (
            2.0 * self._spec.mass * self._spec.points
        )
        density = np.abs(psi) ** 2
        potential = np.sum(density * self._potential)
        detuning = 0.5 * self._delta * (np.sum(density[1]) - np.sum(density[0]))
        coupling = 2.0 * np.real(np.sum(self._coupling * np.conj(psi[0]) * psi[1]))
        return float(kinetic + potential + detuning + coupling)


def stable_step(spectral: SpectralResult, coupling: GridCoupling, n_exc: int, max_step: float = DEFAULT_MAX_STEP) -> float:
    """Largest step with dt * (E_top - E_0 + sqrt(4 g^2 N + delta^2)) <= pi/4, capped at max_step."""
    return min(max_step, STEP_PHASE_LIMIT / _spectral_range(spectral, coupling, n_exc))


def _spectral_range(spectral: SpectralResult, coupling: GridCoupling, n_exc: int) -> float:
    energies = spectral.energies
    return float(energies[-1] - energies[0]) + math.sqrt(4.0 * coupling.g ** 2 * n_exc + coupling.delta ** 2)


@dataclass(frozen=True, eq=False)
class GridSeries:
    """
    Observables of a grid propagation. rho_RR is the doublet-projected
    right-well population; rho_RR_raw is the probability mass at x > 0.
    """
    rho_LL: TimeSeries
    rho_RR: TimeSeries
    rho_RR_raw: TimeSeries
    rho_ee: TimeSeries
    doublet_residual: TimeSeries
    norm: TimeSeries
    energy: TimeSeries
    x_mean: TimeSeries
    x_mean_raw: TimeSeries

    @property
    def times(self) -> np.ndarray:
        return self.rho_RR.times


def propagate_sector(
    spectral: SpectralResult,
    coupling: GridCoupling,
    n_exc: int,
    initial: SectorWavefunction,
    t_grid,
    step: float = None,
    max_step: float = DEFAULT_MAX_STEP,
) -> GridSeries:
    """
    Propagate a sector wavefunction with the split-operator integrator and
    sample the atomic observables on t_grid (times measured from the initial
    state's time).

    Raises:
        IntegratorStepError: an explicit step violates the phase criterion
        ParameterError: empty grid, N < 1, or times before the initial state
    """
    if n_exc < 1:
        raise ParameterError(f"grid propagation needs N >= 1, got {n_exc}")
    times = np.asarray(t_grid, dtype=float)
    if times.size == 0:
        raise ParameterError("time grid is empty")
    if times[0] < initial.time:
        raise ParameterError("time grid starts before the initial state")

    spec = spectral.spec
    limit = STEP_PHASE_LIMIT / _spectral_range(spectral, coupling, n_exc)
    if step is not None and step > limit:
        raise IntegratorStepError(
            f"step {step:.4g} exceeds the stability limit {limit:.4g} "
            "(dt * (E_top - E_0 + sqrt(4 g^2 N + delta^2)) <= pi/4)"
        )
    target_step = step if step is not None else min(max_step, limit)

    integrator = SplitOperatorIntegrator(spec, coupling, n_exc, target_step)
    psi = np.array([initial.excited, initial.lower], dtype=complex)
    right = spectral.grid > 0.0
    half_sep = 0.5 * spectral.separation
    plus, minus = spectral.antisymmetric, spectral.symmetric

    columns = {name: np.empty(times.size) for name in GridSeries.__dataclass_fields__}
    clock = initial.time
    for index, sample in enumerate(times):
        interval = sample - clock
        if interval > 0.0:
            substeps = max(1, math.ceil(interval / target_step - 1e-9))
            integrator.set_timestep(interval / substeps)
            for _ in range(substeps):
                psi = integrator(psi)
            clock = sample

        density = np.abs(psi) ** 2
        on_plus = psi @ plus.conj()
        on_minus = psi @ minus.conj()
        rho_ll = float(np.sum(np.abs(on_plus - on_minus) ** 2) / 2.0)
        rho_rr = float(np.sum(np.abs(on_plus + on_minus) ** 2) / 2.0)
        norm = float(np.sum(density))
        columns["rho_LL"][index] = rho_ll
        columns["rho_RR"][index] = rho_rr
        columns["rho_RR_raw"][index] = float(np.sum(density[:, right]))
        columns["rho_ee"][index] = float(np.sum(density[0]))
        columns["doublet_residual"][index] = max(norm - rho_ll - rho_rr, 0.0)
        columns["norm"][index] = norm
        columns["energy"][index] = integrator.energy(psi)
        columns["x_mean"][index] = half_sep * (rho_rr - rho_ll)
        columns["x_mean_raw"][index] = float(np.sum(density * spectral.grid))

    return GridSeries(**{
        name: TimeSeries(times=times, values=values, label=f"grid_{name}")
        for name, values in columns.items()
    })




def projected_sector_hamiltonian(spectral: SpectralResult, coupling: GridCoupling, n_exc: int) -> np.ndarray:
    """
    Sector block on (|N-1,+,e>, |N,+,g>, |N-1,-,e>, |N,-,g>) with the
    couplings taken from the grid doublet, <i|g sqrt(N) sin(k(x - x0))|j>,
    rather than from the point-like wells at +-b/2.
    """
    profile = coupling.profile(spectral.grid, n_exc)
    plus, minus = spectral.antisymmetric, spectral.symmetric
    on_plus = float(np.sum(plus * profile * plus))
    on_minus = float(np.sum(minus * profile * minus))
    across = float(np.sum(plus * profile * minus))

    split, delta = spectral.tunnel_split, coupling.delta
    matrix = np.diag([
        (split - delta) / 2.0,
        (split + delta) / 2.0,
        (-split - delta) / 2.0,
        (-split + delta) / 2.0,
    ])
    matrix[0, 1] = matrix[1, 0] = on_plus
    matrix[2, 3] = matrix[3, 2] = on_minus
    matrix[0, 3] = matrix[3, 0] = across
    matrix[2, 1] = matrix[1, 2] = across
    return matrix


def _doublet_observables(evolved: np.ndarray) -> tuple:
    rho_rr = (
        np.abs(evolved[:, 0] + evolved[:, 2]) ** 2 + np.abs(evolved[:, 1] + evolved[:, 3]) ** 2
    ) / 2.0
    rho_ee = np.abs(evolved[:, 0]) ** 2 + np.abs(evolved[:, 2]) ** 2
    return rho_rr, rho_ee


@dataclass(frozen=True, eq=False)
class GridComparison:
    """
    Grid run against two four-level references: the analytic sector model
    (couplings from kappa and chi) and the doublet projection of the grid
    Hamiltonian. The second isolates the two-level truncation; the first
    also carries the finite width of the well states.
    """
    params: SystemParams
    grid: GridSeries
    analytic_rho_RR: TimeSeries
    analytic_rho_ee: TimeSeries
    projected_rho_RR: TimeSeries
    projected_rho_ee: TimeSeries
    max_residual: float
    initial_residual: float

    @staticmethod
    def _deviation(grid: TimeSeries, reference: TimeSeries) -> float:
        return float(np.max(np.abs(grid.values - reference.values)))

    @property
    def max_deviation_rho_RR(self) -> float:
        return self._deviation(self.grid.rho_RR, self.analytic_rho_RR)

    @property
    def max_deviation_rho_ee(self) -> float:
        return self._deviation(self.grid.rho_ee, self.analytic_rho_ee)

    @property
    def max_projected_deviation_rho_RR(self) -> float:
        return self._deviation(self.grid.rho_RR, self.projected_rho_RR)

    @property
    def max_projected_deviation_rho_ee(self) -> float:
        return self._deviation(self.grid.rho_ee, self.projected_rho_ee)

    def analytic_within(self, tolerance: float = TWO_LEVEL_TOLERANCE) -> bool:
        return max(self.max_deviation_rho_RR, self.max_deviation_rho_ee) < tolerance

    def projected_within(self, tolerance: float = TWO_LEVEL_TOLERANCE) -> bool:
        return max(self.max_projected_deviation_rho_RR, self.max_projected_deviation_rho_ee) < tolerance

    def verdict(self, tolerance: float = TWO_LEVEL_TOLERANCE) -> str:
        analytic = max(self.max_deviation_rho_RR, self.max_deviation_rho_ee)
        projected = max(self.max_projected_deviation_rho_RR, self.max_projected_deviation_rho_ee)

        def outcome(within: bool) -> str:
            return "is within" if within else "misses"

        return (
            f"kappa/chi sector model {outcome(self.analytic_within(tolerance))} the {tolerance:g} tolerance "
            f"(max deviation {analytic:.3g}); doublet-projected model "
            f"{outcome(self.projected_within(tolerance))} it (max deviation {projected:.3g})"
        )

    @property
    def norm_drift(self) -> float:
        norm = self.grid.norm.values
        return float(np.max(np.abs(norm - norm[0])))

    def as_dict(self) -> dict:
        return {
            "max_deviation_rho_RR": self.max_deviation_rho_RR,
            "max_deviation_rho_ee": self.max_deviation_rho_ee,
            "max_projected_deviation_rho_RR": self.max_projected_deviation_rho_RR,
            "max_projected_deviation_rho_ee": self.max_projected_deviation_rho_ee,
            "max_doublet_residual": self.max_residual,
            "initial_doublet_residual": self.initial_residual,
            "norm_drift": self.norm_drift,
            "tolerance": TWO_LEVEL_TOLERANCE,
            "analytic_within_tolerance": self.analytic_within(),
            "projected_within_tolerance": self.projected_within(),
        }


def compare_two_level(
    spectral: SpectralResult,
    g: float,
    delta: float,
    kappa: float,
    chi: float,
    t_grid,
    n_exc: int = 1,
    kind: str = "doublet",
    max_step: float = DEFAULT_MAX_STEP,
) -> GridComparison:
    """
    Start an excited atom in the right well, propagate it on the grid and in
    the four-level sector model, and collect both sets of rho_RR and rho_ee.
    """
    separation = spectral.separation
    coupling = GridCoupling.from_angles(g, delta, kappa, chi, separation)
    params = SystemParams(
        g=g,
        delta=delta,
        tunnel_split=spectral.tunnel_split,
        kappa=kappa,
        chi=chi,
        half_sep=0.5 * separation,
    )
    spatial = right_well_state(spectral, kind)
    initial = SectorWavefunction(excited=spatial, lower=np.zeros_like(spatial))
    times = np.asarray(t_grid, dtype=float)

    grid = propagate_sector(spectral, coupling, n_exc, initial, times, max_step=max_step)

    projection = project_to_doublet(initial, spectral)
    amps = projection.amplitudes / math.sqrt(float(np.sum(np.abs(projection.amplitudes) ** 2)))
    analytic_rr, analytic_ee = _doublet_observables(sector_spectrum(params, n_exc).evolve(amps, times))

    eigenvalues, eigenvectors = eigh(projected_sector_hamiltonian(spectral, coupling, n_exc))
    projected = SectorSpectrum(n_exc=n_exc, eigenvalues=eigenvalues, eigenvectors=eigenvectors)
    projected_rr, projected_ee = _doublet_observables(projected.evolve(amps, times))

    def series(values, label):
        return TimeSeries(times=times, values=values, label=label, params=params)

    comparison = GridComparison(
        params=params,
        grid=grid,
        analytic_rho_RR=series(analytic_rr, "analytic_rho_RR"),
        analytic_rho_ee=series(analytic_ee, "analytic_rho_ee"),
        projected_rho_RR=series(projected_rr, "projected_rho_RR"),
        projected_rho_ee=series(projected_ee, "projected_rho_ee"),
        max_residual=float(np.max(grid.doublet_residual.values)),
        initial_residual=projection.residual,
    )
    log.debug("two-level comparison: %s", comparison.as_dict())
    return comparison
