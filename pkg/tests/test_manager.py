import math
from contextlib import contextmanager

import pandas as pd
import pytest
import yaml

from snowflakecli.cavtun import manager as manager_module
from snowflakecli.cavtun.manager import GRID_COLUMNS, SERIES_COLUMNS, ScenarioManager
from snowflakecli.cavtun.physics import DomainViolationError
from snowflakecli.cavtun.scenario_spec import ConfigParseError, parse_config


class RecordingConsole:
    def __init__(self):
        self.messages = []

    def step(self, message: str) -> None:
        self.messages.append(("step", message))

    def warning(self, message: str) -> None:
        self.messages.append(("warning", message))

    @contextmanager
    def phase(self, message: str):
        self.messages.append(("phase", message))
        yield


@pytest.fixture
def console(monkeypatch) -> RecordingConsole:
    recorder = RecordingConsole()
    monkeypatch.setattr(manager_module, "cc", recorder)
    return recorder


def _manager(tmp_path, text: str, name: str = "scenario", threads: int = 1) -> ScenarioManager:
    path = tmp_path / f"{name}.cfg"
    path.write_text(text)
    return ScenarioManager(parse_config(path), threads=threads)


def _read_series(path) -> pd.DataFrame:
    with open(path) as handle:
        assert handle.readline() == "# cavtun.series v1\n"
    return pd.read_csv(path, comment="#")


RESONANT = """
kind = resonant
tunnel_split_over_g = 2
field = fock
photons = 0
well = R
internal = e
t_stop = 20
samples = 401
"""


def test_resonant_run(tmp_path, console) -> None:
    outcome = _manager(tmp_path, RESONANT).run()
    series_path, report_path = outcome.outputs
    assert series_path == tmp_path / "scenario_series.csv"
    assert report_path == outcome.report_path == tmp_path / "scenario_report.txt"

    frame = _read_series(series_path)
    assert list(frame.columns) == SERIES_COLUMNS
    assert len(frame) == 401
    assert frame["gt"].iloc[-1] == pytest.approx(20.0)
    assert frame["rho_LL"].iloc[0] == pytest.approx(0.0, abs=1e-12)
    assert (frame["rho_LL"] + frame["rho_RR"]).to_numpy() == pytest.approx(1.0, abs=1e-10)

    report = yaml.safe_load(report_path.read_text())
    assert report["kind"] == "resonant"
    assert report["results"]["sector"] == 1
    assert report["results"]["omega_tun"] == pytest.approx(math.sqrt(5.0))
    assert report["results"]["rho_LL_amplitude"] == pytest.approx(0.8)
    assert report["results"]["max_closed_form_deviation"] < 1e-10
    assert ("step", "Writing report...") in console.messages


def test_rerun_is_byte_identical(tmp_path, console) -> None:
    first = _manager(tmp_path, RESONANT, threads=1).run()
    contents = [path.read_bytes() for path in first.outputs]
    second = _manager(tmp_path, RESONANT, threads=3).run()
    assert [path.read_bytes() for path in second.outputs] == contents


def test_detuned_run(tmp_path, console) -> None:
    text = """
kind = detuned
tunnel_split_over_g = 0.05
delta_over_g = -20
well = -
internal = e
t_stop = 100
samples = 2001
"""
    results = _manager(tmp_path, text).run().results
    assert results["in_regime"]
    assert results["omega_bar"] == pytest.approx(-math.sqrt(2.0) / 20.0)
    assert results["max_closed_form_deviation"] < 0.25


def test_quasiperiodic_run_reports_frequencies(tmp_path, console) -> None:
    text = """
kind = detuned
tunnel_split_over_g = 1
delta_over_g = 1
field = fock
photons = 0
well = R
internal = e
t_stop = 100
samples = 4096
"""
    results = _manager(tmp_path, text).run().results
    root3 = math.sqrt(3.0)
    assert results["omega_plus_over_g"] == pytest.approx(root3 + 1.0)
    assert results["omega_minus_over_g"] == pytest.approx(root3 - 1.0)
    assert results["x_mean_frequencies_over_g"] == pytest.approx([1.0, root3], abs=0.05)
    assert results["start_well_mean_occupation"] == pytest.approx(2.0 / 3.0, abs=0.02)
    assert "max_closed_form_deviation" not in results


def test_collapse_revival_run(tmp_path, console) -> None:
    text = """
kind = collapse_revival
tunnel_split_over_g = 2
field = coherent
alpha = 5
t_stop = 120
samples = 4096
"""
    results = _manager(tmp_path, text).run().results
    assert results["collapsed"]
    assert results["n_mean"] == pytest.approx(25.0)
    assert results["t_r_exact"] == pytest.approx(68.23, rel=5e-3)
    assert results["revival_relative_error"] < 0.1


@pytest.mark.parametrize("text, fragment", [
    ("kind = collapse_revival\nfield = coherent\nalpha = 5\nt_stop = 60\nsamples = 4096", "shorter than 1.5"),
    ("kind = collapse_revival\nfield = fock\nphotons = 3\nt_stop = 200", "coherent field"),
    ("kind = resonant\nt_stop = 100\nsamples = 10", "does not resolve"),
    ("kind = resonant\ndelta_over_g = 0.5\nt_stop = 10", "resonan"),
    ("kind = detuned\ndelta_over_g = 0\nt_stop = 10", "detuning"),
])
def test_validation_errors(tmp_path, console, text, fragment) -> None:
    with pytest.raises(DomainViolationError) as excinfo:
        _manager(tmp_path, text).validate()
    assert fragment in str(excinfo.value)


def test_validation_warnings_are_reported(tmp_path, console) -> None:
    _manager(tmp_path, "kind = resonant\nkappa = 9*pi/4\nt_stop = 10").validate()
    warnings = [message for level, message in console.messages if level == "warning"]
    assert len(warnings) == 1
    assert "kappa" in warnings[0]


def test_protocol_run(tmp_path, console) -> None:
    outcome = _manager(tmp_path, "kind = protocol\noutput = out/prep").run()
    results = outcome.results
    assert results["fidelity"] >= 0.99
    assert results["steps"] == 3
    assert results["schedule"][0] == "pulse"

    frame = _read_series(tmp_path / "out" / "prep_series.csv")
    assert len(frame) == 4
    assert frame["gt"].iloc[-1] == pytest.approx(math.pi / (math.sqrt(2.0) * 0.05))
    assert frame["rho_ee"].to_numpy()[:2] == pytest.approx([0.0, 1.0])
    assert frame["rho_LL"].iloc[-1] >= 0.99


def test_protocol_from_schedule_file(tmp_path, console) -> None:
    (tmp_path / "steps.protocol").write_text(
        "pulse\nevolve 44.4288293816 -20 0.05 pi/4 -pi/4\npulse\n"
    )
    scheduled = _manager(tmp_path, "kind = protocol\nschedule = steps.protocol", name="scheduled").run()
    built_in = _manager(tmp_path, "kind = protocol", name="built_in").run()
    assert scheduled.results["fidelity"] == pytest.approx(built_in.results["fidelity"], abs=1e-9)


def test_missing_schedule_file(tmp_path, console) -> None:
    with pytest.raises(ConfigParseError):
        _manager(tmp_path, "kind = protocol\nschedule = absent.protocol").validate()


def test_grid_validation_run(tmp_path, console) -> None:
    text = """
kind = grid_validation
g = 0.01
delta_over_g = 3
t_stop = 2
samples = 21
"""
    outcome = _manager(tmp_path, text).run()
    assert [path.name for path in outcome.outputs] == [
        "scenario_series.csv", "scenario_grid_series.csv", "scenario_report.txt",
    ]
    grid = _read_series(tmp_path / "scenario_grid_series.csv")
    assert list(grid.columns) == GRID_COLUMNS
    assert grid["gt"].iloc[-1] == pytest.approx(2.0)

    results = outcome.results
    assert results["tunnel_split_over_g"] == pytest.approx(0.3336, rel=0.01)
    assert results["doublet_validity_ratio"] == pytest.approx(44.4, rel=0.02)
    assert results["comparison"]["max_projected_deviation_rho_ee"] < 0.01
    assert results["comparison"]["norm_drift"] < 1e-10
    assert results["comparison"]["analytic_within_tolerance"]
    assert results["verdict"].startswith("kappa/chi sector model is within")
    assert not [message for level, message in console.messages if level == "warning"]
    assert "gaussian_start" not in results


def test_spectrum_run(tmp_path, console) -> None:
    outcome = _manager(tmp_path, "kind = spectrum").run()
    frame = _read_series(tmp_path / "scenario_spectrum.csv")
    assert list(frame.columns) == ["index", "energy"]
    assert len(frame) == 8
    results = outcome.results
    assert results["spectral"]["tunnel_split"] == pytest.approx(0.003336, rel=0.01)
    assert results["harmonic_ground_energy"] == pytest.approx(-2.125)
    assert results["omega_osc"] == pytest.approx(2.0)
