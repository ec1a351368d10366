"""
Dynamics inside one excitation sector.

The Hamiltonian is block diagonal in the excitation number N. Each N >= 1
block is a real symmetric 4x4 matrix on (|N-1,+,e>, |N,+,g>, |N-1,-,e>,
|N,-,g>); the pair |0,+-,g> is uncoupled. Two propagators are provided: the
closed form (valid on chi = -pi/4 - 2 n pi) and an exact spectral
exponentiation that works for any chi and serves as the reference.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import AnalyticPathUnavailable, DomainViolationError, ParameterError
from .model import LATTICE_TOLERANCE, SystemParams, wrap_angle

log = logging.getLogger(__name__)

# Lambda = Omega_+ Omega_- Omega^2 carries dimension frequency^4; below this
# fraction of scale^4 the closed form loses too many digits.
DEGENERACY_TOLERANCE = 1e-5
RADICAND_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class SectorHamiltonian:
    n_exc: int
    matrix: np.ndarray


@dataclass(frozen=True)
class EigenFrequencies:
    omega_plus: float
    omega_minus: float
    omega_sq: float

    @property
    def lambdas(self) -> tuple:
        """Gauge-reduced eigenvalues in ascending order."""
        return (
            -self.omega_plus / 2.0,
            -self.omega_minus / 2.0,
            self.omega_minus / 2.0,
            self.omega_plus / 2.0,
        )

    @property
    def tunnel(self) -> float:
        return 0.5 * (self.omega_plus + self.omega_minus)


@dataclass(frozen=True, eq=False)
class SectorPropagator:
    n_exc: int
    time: float
    matrix: np.ndarray
    method: str

    def apply(self, amps) -> np.ndarray:
        return self.matrix @ np.asarray(amps, dtype=complex)


@dataclass(frozen=True, eq=False)
class SectorSpectrum:
    """Eigen-decomposition of one sector block, reusable for many times."""
    n_exc: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def propagator(self, t: float) -> np.ndarray:
        phases = np.exp(-1j * self.eigenvalues * t)
        return (self.eigenvectors * phases) @ self.eigenvectors.conj().T

    def evolve(self, amps, times) -> np.ndarray:
        """
        Evolve one set of sector amplitudes to every time in `times`.

        Returns:
            complex array of shape (len(times), 4)
        """
        coefficients = self.eigenvectors.conj().T @ np.asarray(amps, dtype=complex)
        phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), self.eigenvalues))
        return (phases * coefficients) @ self.eigenvectors.T


def _check_sector(n_exc: int) -> None:
    if int(n_exc) != n_exc or n_exc < 1:
        raise DomainViolationError(
            f"excitation number must be an integer >= 1, got {n_exc}; "
            "the N = 0 pair is handled by evolve_ground"
        )


def _check_time(t: float) -> None:
    if not t >= 0.0:
        raise DomainViolationError(f"evolution time must be >= 0, got {t}")


def _couplings(params: SystemParams, n_exc) -> tuple:
    root = params.g * np.sqrt(n_exc)
    internal_only = -root * math.sin(params.chi) * math.cos(params.kappa)
    with_recoil = root * math.cos(params.chi) * math.sin(params.kappa)
    return internal_only, with_recoil


def build_sector_hamiltonian(params: SystemParams, n_exc: int) -> SectorHamiltonian:
    """
    Build the gauge-reduced block of excitation sector N.

    Diagonal ((D - d)/2, (D + d)/2, (-D - d)/2, (-D + d)/2) with D the tunnel
    splitting and d the detuning; <1|H|2> = <3|H|4> = -g sqrt(N) sin(chi) cos(kappa)
    and <1|H|4> = <3|H|2> = g sqrt(N) cos(chi) sin(kappa).
    """
    _check_sector(n_exc)
    split, delta = params.tunnel_split, params.delta
    internal_only, with_recoil = _couplings(params, n_exc)

    matrix = np.diag([
        (split - delta) / 2.0,
        (split + delta) / 2.0,
        (-split - delta) / 2.0,
        (-split + delta) / 2.0,
    ])
    matrix[0, 1] = matrix[1, 0] = internal_only
    matrix[2, 3] = matrix[3, 2] = internal_only
    matrix[0, 3] = matrix[3, 0] = with_recoil
    matrix[2, 1] = matrix[1, 2] = with_recoil
    return SectorHamiltonian(n_exc=int(n_exc), matrix=matrix)


def _omega_terms(params: SystemParams, n_exc):
    """Omega_+, Omega_- and Omega^2 for real (possibly array-valued) N."""
    n_exc = np.asarray(n_exc, dtype=float)
    g2n = n_exc * params.g ** 2
    split2 = params.tunnel_split ** 2
    delta2 = params.delta ** 2
    cos_k, sin_k = math.cos(params.kappa), math.sin(params.kappa)
    cos_c, sin_c = math.cos(params.chi), math.sin(params.chi)

    inner = (
        4.0 * g2n * cos_k ** 2 * sin_c ** 2 * (split2 + 4.0 * g2n * sin_k ** 2 * cos_c ** 2)
        + delta2 * split2
    )
    base = (
        2.0 * g2n * (1.0 - math.cos(2.0 * params.kappa) * math.cos(2.0 * params.chi))
        + delta2
        + split2
    )
    omega_sq = np.sqrt(inner)
    plus_radicand = base + 2.0 * omega_sq
    minus_radicand = base - 2.0 * omega_sq

    floor = -RADICAND_TOLERANCE * np.maximum(base, 1.0)
    assert np.all(minus_radicand >= floor), (
        f"negative radicand under Omega_-: {minus_radicand}"
    )
    omega_plus = np.sqrt(plus_radicand)
    omega_minus = np.sqrt(np.clip(minus_radicand, 0.0, None))
    return omega_plus, omega_minus, omega_sq


def eigenfrequencies(params: SystemParams, n_exc: int) -> EigenFrequencies:
    """Closed-form Omega_+, Omega_- and Omega^2 for sector N (any chi)."""
    _check_sector(n_exc)
    omega_plus, omega_minus, omega_sq = _omega_terms(params, n_exc)
    return EigenFrequencies(
        omega_plus=float(omega_plus),
        omega_minus=float(omega_minus),
        omega_sq=float(omega_sq),
    )


def tunnel_frequency(params: SystemParams, n_exc):
    """
    Omega_tun = (Omega_+ + Omega_-)/2, for real N >= 1 (scalar or array).
    """
    n_exc = np.asarray(n_exc, dtype=float)
    if np.any(n_exc < 1.0):
        raise DomainViolationError(f"excitation number must be >= 1, got {n_exc}")
    omega_plus, omega_minus, _ = _omega_terms(params, n_exc)
    value = 0.5 * (omega_plus + omega_minus)
    return float(value) if value.ndim == 0 else value


def sector_spectrum(params: SystemParams, n_exc: int) -> SectorSpectrum:
    hamiltonian = build_sector_hamiltonian(params, n_exc)
    eigenvalues, eigenvectors = scipy.linalg.eigh(hamiltonian.matrix)
    return SectorSpectrum(n_exc=hamiltonian.n_exc, eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def propagator_oracle(params: SystemParams, n_exc: int, t: float) -> SectorPropagator:
    """
    Exact propagator of sector N at time t by spectral decomposition of the
    Hermitian block; valid for any chi.
    """
    _check_time(t)
    spectrum = sector_spectrum(params, n_exc)
    return SectorPropagator(
        n_exc=int(n_exc),
        time=float(t),
        matrix=spectrum.propagator(t),
        method="oracle",
    )


def _printed_entries(params: SystemParams, n_exc: int, t: float, terms: tuple):
    """
    Return a function (delta, split) -> (U11, U12, U13, U23) evaluating the
    closed forms on the chi = -pi/4 lattice. Omega_+-, Omega^2 and Lambda are
    even in delta and split, so they are shared between sign flips.
    """
    omega_plus, omega_minus, omega_sq = terms
    g2n = n_exc * params.g ** 2
    root = math.sqrt(n_exc) * params.g
    cos_k, sin_k = math.cos(params.kappa), math.sin(params.kappa)
    lam = omega_plus * omega_minus * omega_sq
    both = omega_plus * omega_minus

    omega = {1: omega_plus, -1: omega_minus}
    cosine = {mu: math.cos(omega[mu] * t / 2.0) for mu in (1, -1)}
    sine = {mu: math.sin(omega[mu] * t / 2.0) for mu in (1, -1)}

    def entries(delta: float, split: float) -> tuple:
        xi = split * (delta ** 2 + 2.0 * g2n * cos_k ** 2 - delta * split)
        u11 = sum(
            mu * sine[mu] * omega[-mu] * (xi + mu * (split - delta) * omega_sq)
            - 1j * mu * both * cosine[mu] * (delta * split - mu * omega_sq)
            for mu in (1, -1)
        ) * (-1j / (2.0 * lam))
        u12 = sum(
            mu * sine[mu] * omega[-mu] * (split ** 2 + 2.0 * g2n * sin_k ** 2 + mu * omega_sq)
            + 1j * mu * both * split * cosine[mu]
            for mu in (1, -1)
        ) * (-1j * root * cos_k / (math.sqrt(2.0) * lam))
        u13 = sum(
            mu * delta * omega[mu] * sine[-mu] + 1j * mu * both * cosine[mu]
            for mu in (1, -1)
        ) * (-1j * g2n * math.sin(2.0 * params.kappa) / (2.0 * lam))
        u23 = sum(
            mu * omega[mu] * sine[-mu] * (delta * split + 2.0 * g2n * cos_k ** 2 - mu * omega_sq)
            for mu in (1, -1)
        ) * (1j * root * sin_k / (math.sqrt(2.0) * lam))
        return u11, u12, u13, u23

    return entries


def propagator_analytic(params: SystemParams, n_exc: int, t: float) -> SectorPropagator:
    """
    Closed-form propagator of sector N at time t for chi = -pi/4 - 2 n pi.

    The printed entries U11, U12, U13, U23 fix the rest through
    U22(d, D) = U33(-d, -D) = U44(d, -D) = U11(-d, D), U24(d, D) = U13(-d, D),
    U14(d, D) = U23(d, -D), U34(d, D) = U12(d, -D) and U_ij = U_ji.
    When Lambda = Omega_+ Omega_- Omega^2 is numerically degenerate the
    request is served by the spectral path instead.

    Raises:
        AnalyticPathUnavailable: chi is off the lattice
    """
    _check_sector(n_exc)
    _check_time(t)
    if not params.analytic_capable:
        raise AnalyticPathUnavailable(
            f"closed-form propagator requires chi = -pi/4 - 2*n*pi, got chi = {params.chi}; "
            "use propagator_oracle"
        )

    terms = _omega_terms(params, n_exc)
    omega_plus, omega_minus, omega_sq = (float(value) for value in terms)
    scale = max(abs(params.delta), params.tunnel_split, params.g * math.sqrt(n_exc))
    lam = omega_plus * omega_minus * omega_sq
    if scale == 0.0 or lam < DEGENERACY_TOLERANCE * scale ** 4:
        log.debug("sector %d: Lambda=%.3e degenerate at scale %.3e, using oracle", n_exc, lam, scale)
        return propagator_oracle(params, n_exc, t)

    entries = _printed_entries(params, n_exc, t, (omega_plus, omega_minus, omega_sq))
    delta, split = params.delta, params.tunnel_split
    u11, u12, u13, u23 = entries(delta, split)
    u22 = entries(-delta, split)[0]
    u33, u34, _, u14 = entries(delta, -split)
    u44 = entries(-delta, -split)[0]
    u24 = entries(-delta, split)[2]

    matrix = np.array([
        [u11, u12, u13, u14],
        [u12, u22, u23, u24],
        [u13, u23, u33, u34],
        [u14, u24, u34, u44],
    ], dtype=complex)
    return SectorPropagator(n_exc=int(n_exc), time=float(t), matrix=matrix, method="analytic")


def evolve_ground(params: SystemParams, t, amps) -> np.ndarray:
    """
    Evolve the uncoupled pair (|0,+,g>, |0,-,g>): phases exp(-+ i D t / 2).
    """
    amps = np.asarray(amps, dtype=complex)
    if amps.shape != (2,):
        raise ParameterError(f"ground amplitudes must have shape (2,), got {amps.shape}")
    half = 0.5 * params.tunnel_split * t
    return amps * np.array([np.exp(-1j * half), np.exp(1j * half)])


def _is_resonant_quarter(params: SystemParams) -> bool:
    scale = max(params.g, params.tunnel_split, 1.0)
    kappa_offset = wrap_angle(params.kappa - math.pi / 4.0)
    return (
        abs(params.delta) <= 1e-12 * scale
        and min(kappa_offset, 2.0 * math.pi - kappa_offset) < LATTICE_TOLERANCE
        and params.analytic_capable
    )


def _require_resonant(params: SystemParams, name: str) -> None:
    if not _is_resonant_quarter(params):
        raise DomainViolationError(
            f"{name} holds for delta = 0, kappa = pi/4 and chi = -pi/4 - 2*n*pi; "
            f"got delta={params.delta}, kappa={params.kappa}, chi={params.chi}"
        )


def resonant_rho_LL(params: SystemParams, n_exc: int, t):
    """
    Left-well population for an atom starting in |N-1,R,e>, resonant field and
    kappa = pi/4: D^2/(D^2 + N g^2) sin^2(Omega_tun t / 2).
    """
    _require_resonant(params, "resonant_rho_LL")
    _check_sector(n_exc)
    split2 = params.tunnel_split ** 2
    denominator = split2 + n_exc * params.g ** 2
    amplitude = split2 / denominator if denominator > 0.0 else 0.0
    omega_tun = tunnel_frequency(params, n_exc)
    return amplitude * np.sin(omega_tun * np.asarray(t, dtype=float) / 2.0) ** 2


def resonant_rho_ee(params: SystemParams, n_exc: int, t):
    """
    Excited-state population for an atom starting in |N-1,R,e>, resonant field
    and kappa = pi/4. Three frequencies contribute: Omega_+, Omega_- and
    (Omega_+ - Omega_-)/2.
    """
    _require_resonant(params, "resonant_rho_ee")
    _check_sector(n_exc)
    t = np.asarray(t, dtype=float)
    freqs = eigenfrequencies(params, n_exc)
    split2 = params.tunnel_split ** 2
    denominator = 8.0 * (n_exc * params.g ** 2 + split2)
    if denominator == 0.0:
        return np.ones_like(t)
    numerator = (
        (freqs.omega_plus ** 2 - split2) * np.cos(freqs.omega_plus * t)
        + (freqs.omega_minus ** 2 - split2) * np.cos(freqs.omega_minus * t)
        + 4.0 * split2 * np.cos(0.5 * (freqs.omega_plus - freqs.omega_minus) * t)
    )
    return 0.5 + numerator / denominator


@dataclass(frozen=True)
class RamanEstimate:
    """
    Effective two-level description of the far-detuned regime.

    omega_bar keeps the sign of the detuning, as in its defining expression;
    the regime needs tunnel_ratio << 1 and detuning_ratio << 1 with a Raman
    product of order one.
    """
    omega_bar: float
    tunnel_ratio: float
    detuning_ratio: float
    raman_product: float

    @property
    def in_regime(self) -> bool:
        return self.tunnel_ratio < 0.2 and self.detuning_ratio < 0.2


def _require_detuned(params: SystemParams, name: str) -> None:
    if params.delta == 0.0:
        raise DomainViolationError(f"{name} requires a non-zero detuning")
    if not params.analytic_capable:
        raise DomainViolationError(f"{name} holds on chi = -pi/4 - 2*n*pi, got chi = {params.chi}")


def _raman_width(params: SystemParams, n_exc: int) -> float:
    return math.sqrt(
        (params.delta * params.tunnel_split) ** 2
        + (n_exc * params.g ** 2 * math.sin(2.0 * params.kappa)) ** 2
    )


def far_detuned_effective(params: SystemParams, n_exc: int) -> RamanEstimate:
    """
    Raman-like frequency sqrt(d^2 D^2 + N^2 g^4 sin^2(2 kappa)) / d of the
    far-detuned regime, reported with the small parameters that justify it.
    """
    _require_detuned(params, "far_detuned_effective")
    _check_sector(n_exc)
    g = params.g
    estimate = RamanEstimate(
        omega_bar=_raman_width(params, n_exc) / params.delta,
        tunnel_ratio=params.tunnel_split / g if g > 0.0 else math.inf,
        detuning_ratio=g / abs(params.delta),
        raman_product=params.tunnel_split * abs(params.delta) / g ** 2 if g > 0.0 else math.inf,
    )
    if not estimate.in_regime:
        log.debug("far-detuned estimate outside its regime: %s", estimate)
    return estimate


def far_detuned_rho_LL(params: SystemParams, n_exc: int, t):
    """
    Left-well population for an atom starting in |N-1,-,e> in the far-detuned
    regime, accurate to O(D/g):

        1/2 - N d D sin(2 kappa) / (2 Omega_bar^2 (d/g)^2) [1 - cos(Omega_bar t)]
    """
    _require_detuned(params, "far_detuned_rho_LL")
    _check_sector(n_exc)
    t = np.asarray(t, dtype=float)
    width2 = _raman_width(params, n_exc) ** 2
    if width2 == 0.0:
        return np.full_like(t, 0.5)
    omega_bar = math.sqrt(width2) / params.delta
    weight = (
        n_exc * params.delta * params.tunnel_split * math.sin(2.0 * params.kappa)
        * params.g ** 2 / (2.0 * width2)
    )
    return 0.5 - weight * (1.0 - np.cos(omega_bar * t))


def far_detuned_propagator(params: SystemParams, n_exc: int, t: float) -> np.ndarray:
    """
    Effective propagator on (|N-1,+,e>, |N-1,-,e>) in the far-detuned regime,
    up to a global phase and O(D/g) corrections.
    """
    _require_detuned(params, "far_detuned_propagator")
    _check_sector(n_exc)
    _check_time(t)
    width = _raman_width(params, n_exc)
    if width == 0.0:
        return np.eye(2, dtype=complex)
    omega_bar = width / params.delta
    cos_half = math.cos(omega_bar * t / 2.0)
    sin_half = math.sin(omega_bar * t / 2.0)
    bias = params.delta * params.tunnel_split / width
    transfer = 1j * n_exc * params.g ** 2 * math.sin(2.0 * params.kappa) / width * sin_half
    return np.array([
        [cos_half - 1j * bias * sin_half, transfer],
        [transfer, cos_half + 1j * bias * sin_half],
    ], dtype=complex)
