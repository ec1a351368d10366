"""
Cavity-assisted tunneling of a two-level atom in a double well.

This package provides the sector-resolved dynamics of the atom-field system,
the reductions to atomic observables, collapse/revival analysis, pi-pulse
control protocols and a grid solver for validating the two-level model.
"""

from .control import (
    FreeEvolve,
    PiPulse,
    ProtocolResult,
    apply_pi_pulse,
    left_well_protocol,
    protocol_params,
    run_protocol,
    superposition_schedule,
)
from .envelope import (
    CollapseEstimate,
    RevivalEstimate,
    RevivalReport,
    collapse_time,
    detect_revival,
    dominant_frequencies,
    power_spectrum,
    revival_time,
)
from .exceptions import (
    AnalyticPathUnavailable,
    CavityTunnelingError,
    DomainViolationError,
    GridResolutionError,
    IntegratorStepError,
    NoRevivalDetected,
    ParameterError,
    ProtocolError,
    TruncationError,
)
from .grid_oracle import (
    DoubleWellSpec,
    GridComparison,
    GridCoupling,
    SectorWavefunction,
    SpectralResult,
    compare_two_level,
    doublet_validity_ratio,
    harmonic_ground_energy,
    project_to_doublet,
    projected_sector_hamiltonian,
    propagate_sector,
    right_well_state,
    solve_double_well,
    wkb_splitting,
)
from .model import (
    BasisLabel,
    CompositeState,
    SystemParams,
    basis_change_pm,
    basis_change_well,
    ground_state,
    make_params,
)
from .observables import (
    FieldSpec,
    SeriesBundle,
    TimeSeries,
    evolve,
    initial_state,
    mean_position,
    reduce_external,
    reduce_internal,
    trace_series,
    uniform_grid,
)
from .sector_dynamics import (
    EigenFrequencies,
    RamanEstimate,
    SectorPropagator,
    SectorSpectrum,
    build_sector_hamiltonian,
    eigenfrequencies,
    evolve_ground,
    far_detuned_effective,
    far_detuned_propagator,
    far_detuned_rho_LL,
    propagator_analytic,
    propagator_oracle,
    resonant_rho_ee,
    resonant_rho_LL,
    sector_spectrum,
    tunnel_frequency,
)

__all__ = [
    'AnalyticPathUnavailable',
    'BasisLabel',
    'CavityTunnelingError',
    'CollapseEstimate',
    'CompositeState',
    'DomainViolationError',
    'DoubleWellSpec',
    'EigenFrequencies',
    'FieldSpec',
    'FreeEvolve',
    'GridComparison',
    'GridCoupling',
    'GridResolutionError',
    'IntegratorStepError',
    'NoRevivalDetected',
    'ParameterError',
    'PiPulse',
    'ProtocolError',
    'ProtocolResult',
    'RamanEstimate',
    'RevivalEstimate',
    'RevivalReport',
    'SectorPropagator',
    'SectorSpectrum',
    'SectorWavefunction',
    'SeriesBundle',
    'SpectralResult',
    'SystemParams',
    'TimeSeries',
    'TruncationError',
    'apply_pi_pulse',
    'basis_change_pm',
    'basis_change_well',
    'build_sector_hamiltonian',
    'collapse_time',
    'compare_two_level',
    'detect_revival',
    'dominant_frequencies',
    'doublet_validity_ratio',
    'eigenfrequencies',
    'evolve',
    'evolve_ground',
    'far_detuned_effective',
    'far_detuned_propagator',
    'far_detuned_rho_LL',
    'ground_state',
    'harmonic_ground_energy',
    'initial_state',
    'left_well_protocol',
    'make_params',
    'mean_position',
    'power_spectrum',
    'project_to_doublet',
    'projected_sector_hamiltonian',
    'propagate_sector',
    'propagator_analytic',
    'propagator_oracle',
    'protocol_params',
    'reduce_external',
    'reduce_internal',
    'resonant_rho_ee',
    'resonant_rho_LL',
    'revival_time',
    'right_well_state',
    'run_protocol',
    'sector_spectrum',
    'solve_double_well',
    'superposition_schedule',
    'trace_series',
    'tunnel_frequency',
    'uniform_grid',
    'wkb_splitting',
]
