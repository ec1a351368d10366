import math

import numpy as np
import pytest

from snowflakecli.cavtun.physics import (
    CompositeState,
    FreeEvolve,
    PiPulse,
    ProtocolError,
    apply_pi_pulse,
    ground_state,
    left_well_protocol,
    make_params,
    protocol_params,
    reduce_external,
    run_protocol,
    superposition_schedule,
)

QUARTER = math.pi / 4.0


def test_pulse_on_ground_pair() -> None:
    flipped = apply_pi_pulse(ground_state("-"))
    assert np.allclose(flipped.ground, 0.0)
    assert flipped.n_sectors == 1
    assert np.allclose(flipped.sectors[0], [0.0, 0.0, -1j, 0.0])


def test_pulse_lowers_excited_atom() -> None:
    excited = CompositeState(ground=[0.0, 0.0], sectors=[[1.0, 0.0, 0.0, 0.0]])
    flipped = apply_pi_pulse(excited)
    assert np.allclose(flipped.ground, [-1j, 0.0])
    assert flipped.n_sectors == 0

    photon = CompositeState(ground=[0.0, 0.0], sectors=[[0.0, 1.0, 0.0, 0.0]])
    flipped = apply_pi_pulse(photon)
    assert flipped.n_sectors == 2
    assert np.allclose(flipped.sectors[1], [-1j, 0.0, 0.0, 0.0])


def test_double_pulse_is_minus_identity(random_state) -> None:
    state = random_state(4)
    twice = apply_pi_pulse(apply_pi_pulse(state))
    assert twice.sectors.shape == state.sectors.shape
    assert np.allclose(twice.ground, -state.ground)
    assert np.allclose(twice.sectors, -state.sectors)


def test_pulse_keeps_external_state(random_state) -> None:
    state = random_state(3)
    flipped = apply_pi_pulse(state)
    assert flipped.norm_squared == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(reduce_external(flipped), reduce_external(state), atol=1e-12)


def test_protocol_params() -> None:
    params = protocol_params(tunnel_split=0.05, g=1.0)
    assert params.delta == pytest.approx(-20.0)
    assert params.kappa == pytest.approx(QUARTER)
    assert params.chi == pytest.approx(-QUARTER)
    with pytest.raises(ProtocolError):
        protocol_params(tunnel_split=0.0, g=1.0)


def test_schedule_shape() -> None:
    params = protocol_params(tunnel_split=0.05, g=1.0)
    steps = left_well_protocol(params)
    assert [type(step) for step in steps] == [PiPulse, FreeEvolve, PiPulse]
    assert steps[1].duration == pytest.approx(math.pi / (math.sqrt(2.0) * 0.05))
    assert [step.describe() for step in steps][0] == "pulse"


@pytest.mark.parametrize("theta", [-0.1, math.pi + 0.1])
def test_schedule_rejects_angles(theta) -> None:
    params = protocol_params(tunnel_split=0.05, g=1.0)
    with pytest.raises(ProtocolError):
        superposition_schedule(theta, params)


def test_negative_duration_is_rejected() -> None:
    params = protocol_params(tunnel_split=0.05, g=1.0)
    with pytest.raises(ProtocolError):
        FreeEvolve(duration=-1.0, params=params)


def test_empty_protocol() -> None:
    with pytest.raises(ProtocolError):
        run_protocol([], ground_state("-"), ground_state("L"))
    with pytest.raises(ProtocolError):
        run_protocol(["wait"], ground_state("-"), ground_state("L"))


def test_zero_duration_schedule_is_identity() -> None:
    params = protocol_params(tunnel_split=0.05, g=1.0)
    result = run_protocol(superposition_schedule(0.0, params), ground_state("-"), ground_state("-"))
    assert result.fidelity == pytest.approx(1.0, abs=1e-12)
    assert result.leakage == pytest.approx(0.0, abs=1e-12)
    assert len(result.trajectory) == 4


def _left_well_fidelity(ratio: float):
    params = protocol_params(tunnel_split=ratio, g=1.0)
    return run_protocol(left_well_protocol(params), ground_state("-"), ground_state("L"))


@pytest.mark.parametrize("ratio", [0.2, 0.1, 0.05, 0.02])
def test_left_well_preparation(ratio) -> None:
    result = _left_well_fidelity(ratio)
    assert 1.0 - result.fidelity < 3.0 * ratio ** 2
    assert result.leakage < ratio ** 2
    assert result.as_dict()["infidelity"] == pytest.approx(1.0 - result.fidelity)


def test_left_well_preparation_converges() -> None:
    fidelities = [_left_well_fidelity(ratio).fidelity for ratio in (0.2, 0.1, 0.05, 0.02)]
    assert np.all(np.diff(fidelities) > 0.0)
    assert fidelities[2] >= 0.99


def test_analytic_path_prepares_the_same_state() -> None:
    params = protocol_params(tunnel_split=0.05, g=1.0)
    steps = left_well_protocol(params)
    oracle = run_protocol(steps, ground_state("-"), ground_state("L"))
    analytic = run_protocol(steps, ground_state("-"), ground_state("L"), method="analytic")
    assert analytic.fidelity == pytest.approx(oracle.fidelity, abs=1e-8)


def test_half_angle_superposition() -> None:
    params = protocol_params(tunnel_split=0.02, g=1.0)
    result = run_protocol(
        superposition_schedule(math.pi / 2.0, params), ground_state("-"), ground_state("L")
    )
    rho = reduce_external(result.final_state)
    assert np.real(rho[0, 0]) == pytest.approx(0.75, abs=0.05)


def test_protocol_with_explicit_steps() -> None:
    params = make_params(g=1.0, delta=-20.0, tunnel_split=0.05, kappa=QUARTER, chi=-QUARTER)
    steps = [PiPulse(), FreeEvolve(duration=math.pi / (math.sqrt(2.0) * 0.05), params=params), PiPulse()]
    result = run_protocol(steps, ground_state("-"), ground_state("L"))
    assert result.fidelity >= 0.99
