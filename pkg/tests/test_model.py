import math

import numpy as np
import pytest

from snowflakecli.cavtun.physics import (
    BasisLabel,
    CompositeState,
    ParameterError,
    SystemParams,
    basis_change_pm,
    basis_change_well,
    ground_state,
    make_params,
)
from snowflakecli.cavtun.physics.model import on_analytic_lattice, well_vector, wrap_angle

QUARTER = math.pi / 4.0


def test_make_params_requires_positive_coupling() -> None:
    with pytest.raises(ParameterError):
        make_params(g=0.0, delta=0.0, tunnel_split=1.0, kappa=QUARTER, chi=-QUARTER)
    with pytest.raises(ParameterError):
        make_params(g=-1.0, delta=0.0, tunnel_split=1.0, kappa=QUARTER, chi=-QUARTER)


def test_record_admits_decoupled_limit() -> None:
    params = SystemParams(g=0.0, delta=0.0, tunnel_split=1.0, kappa=QUARTER, chi=-QUARTER)
    assert params.g == 0.0


@pytest.mark.parametrize("changes", [
    {"tunnel_split": -0.1},
    {"delta": float("nan")},
    {"kappa": float("inf")},
    {"half_sep": 0.0},
])
def test_make_params_rejects_invalid_values(changes) -> None:
    values = {"g": 1.0, "delta": 0.0, "tunnel_split": 1.0, "kappa": QUARTER, "chi": -QUARTER}
    values.update(changes)
    with pytest.raises(ParameterError):
        make_params(**values)


@pytest.mark.parametrize("chi, expected", [
    (-QUARTER, True),
    (-QUARTER - 2.0 * math.pi, True),
    (7.0 * QUARTER, True),
    (QUARTER, False),
    (3.0 * QUARTER, False),
    (0.0, False),
])
def test_analytic_lattice(chi, expected) -> None:
    assert on_analytic_lattice(chi) is expected
    params = make_params(g=1.0, delta=0.0, tunnel_split=1.0, kappa=QUARTER, chi=chi)
    assert params.analytic_capable is expected


def test_wrap_angle() -> None:
    assert wrap_angle(-QUARTER) == pytest.approx(7.0 * QUARTER)
    assert wrap_angle(2.0 * math.pi) == 0.0
    assert wrap_angle(-1e-300) == 0.0
    assert 0.0 <= wrap_angle(123.456) < 2.0 * math.pi


def test_well_basis_change() -> None:
    assert np.allclose(basis_change_pm([1.0, 0.0]), np.array([1.0, -1.0]) / math.sqrt(2.0))
    assert np.allclose(basis_change_well(well_vector("R")), [0.0, 1.0])
    assert np.allclose(basis_change_well(well_vector("L")), [1.0, 0.0])
    amps = np.array([0.3 + 0.1j, -0.2 + 0.9j])
    assert np.allclose(basis_change_pm(basis_change_well(amps)), amps)


def test_unknown_well_label() -> None:
    with pytest.raises(ParameterError):
        well_vector("X")


@pytest.mark.parametrize("sector, slot, ket", [
    (0, "+", "|0,+,g>"),
    (0, "-", "|0,-,g>"),
    (1, 1, "|0,+,e>"),
    (1, 2, "|1,+,g>"),
    (3, 3, "|2,-,e>"),
    (2, 4, "|2,-,g>"),
])
def test_basis_labels(sector, slot, ket) -> None:
    assert BasisLabel(sector, slot).ket == ket


@pytest.mark.parametrize("sector, slot", [(0, 1), (1, "+"), (2, 5), (-1, 1)])
def test_basis_label_rejects_bad_slots(sector, slot) -> None:
    with pytest.raises(ParameterError):
        BasisLabel(sector, slot)


def test_composite_state_checks_normalization() -> None:
    with pytest.raises(ParameterError):
        CompositeState(ground=[1.0, 1.0], sectors=np.zeros((0, 4)))
    with pytest.raises(ParameterError):
        CompositeState(ground=[1.0, 0.0], sectors=np.zeros((2, 3)))
    state = CompositeState(ground=[0.0, 0.0], sectors=[[0.6, 0.0, 0.0, 0.0]], truncated_tail=0.64)
    assert state.norm_squared == pytest.approx(0.36)


def test_composite_state_is_read_only(random_state) -> None:
    state = random_state(3)
    with pytest.raises(ValueError):
        state.sectors[0, 0] = 1.0
    with pytest.raises(ValueError):
        state.ground[0] = 1.0


def test_composite_state_accessors(random_state) -> None:
    state = random_state(3)
    assert state.n_sectors == 3
    assert np.array_equal(state.sector(5), np.zeros(4))
    assert state.amplitude(BasisLabel(2, 3)) == state.sectors[1, 2]
    assert state.amplitude(BasisLabel(0, "-")) == state.ground[1]
    populations = state.sector_populations()
    assert populations.shape == (4,)
    assert np.sum(populations) == pytest.approx(1.0)
    assert state.overlap(state) == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        state.sector(0)


def test_ground_state() -> None:
    state = ground_state("L")
    assert state.n_sectors == 0
    assert np.allclose(state.ground, np.array([1.0, -1.0]) / math.sqrt(2.0))
    assert state.amplitude(BasisLabel(0, "+")) == pytest.approx(1.0 / math.sqrt(2.0))
