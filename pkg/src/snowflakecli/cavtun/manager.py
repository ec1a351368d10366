import math
from dataclasses import dataclass, asdict, field
from pathlib import Path

import numpy as np
import pandas as pd
from snowflake.cli.api.console import cli_console as cc

from snowflakecli.cavtun.physics.control import (
    protocol_params,
    run_protocol,
    superposition_schedule,
    FreeEvolve,
)
from snowflakecli.cavtun.physics.envelope import detect_revival, dominant_frequencies, revival_time
from snowflakecli.cavtun.physics.exceptions import DomainViolationError
from snowflakecli.cavtun.physics.grid_oracle import (
    GridCoupling,
    compare_two_level,
    doublet_validity_ratio,
    harmonic_ground_energy,
    solve_double_well,
    wkb_splitting,
)
from snowflakecli.cavtun.physics.model import ground_state
from snowflakecli.cavtun.physics.observables import (
    photon_amplitudes,
    reduce_external,
    reduce_internal,
    trace_series,
    uniform_grid,
)
from snowflakecli.cavtun.physics.sector_dynamics import (
    eigenfrequencies,
    far_detuned_effective,
    far_detuned_rho_LL,
    resonant_rho_LL,
)
from snowflakecli.cavtun.scenario_spec import (
    SERIES_SCHEMA,
    Scenario,
    make_report,
    parse_protocol_file,
)

SERIES_COLUMNS = ["gt", "rho_LL", "rho_RR", "rho_ee", "x_mean_over_halfb"]
GRID_COLUMNS = SERIES_COLUMNS + ["rho_RR_raw", "doublet_residual"]


@dataclass
class RunOutcome:
    report_path: Path
    outputs: list = field(default_factory=list)
    results: dict = field(default_factory=dict)


class ScenarioManager:

    def __init__(self, scenario: Scenario, threads: int = 1):
        self._scenario = scenario
        self._threads = max(1, int(threads))

    @property
    def scenario(self) -> Scenario:
        return self._scenario

    def _path(self, suffix: str) -> Path:
        prefix = self._scenario.output
        return prefix.parent / f"{prefix.name}_{suffix}"

    def _times(self) -> np.ndarray:
        window = self._scenario.window
        g = self._scenario.params.g if self._scenario.params else self._scenario.get("g")
        return uniform_grid(window.t_start / g, window.t_stop / g, window.samples)

    def _occupied_sectors(self) -> int:
        amplitudes, _ = photon_amplitudes(self._scenario.field_spec)
        top = len(amplitudes) - 1
        return top + 1 if self._scenario.get("internal") == "e" else max(top, 1)

    def _check_sampling(self) -> None:
        """The sample step must resolve the fastest sector frequency Omega_+(N_max)."""
        times = self._times()
        step = times[1] - times[0]
        n_top = self._occupied_sectors()
        omega_plus = eigenfrequencies(self._scenario.params, n_top).omega_plus
        if omega_plus > 0.0 and not step < math.pi / omega_plus:
            raise DomainViolationError(
                f"sample step {step:.4g} does not resolve Omega_+ = {omega_plus:.4g} of sector "
                f"N = {n_top}; need step < pi/Omega_+ = {math.pi / omega_plus:.4g}"
            )

    def _schedule(self) -> list:
        scenario = self._scenario
        params = scenario.params
        if scenario.get("schedule"):
            return parse_protocol_file(scenario.get("schedule"), params.g)
        prepared = protocol_params(
            tunnel_split=params.tunnel_split,
            g=params.g,
            kappa=params.kappa,
            chi=params.chi,
            half_sep=params.half_sep,
        )
        return superposition_schedule(scenario.get("theta"), prepared)

    def validate(self) -> None:
        """
        Check every precondition of the scenario without running it.
        """
        scenario = self._scenario
        for warning in scenario.warnings:
            cc.warning(warning)

        kind = scenario.kind
        if kind == "resonant":
            resonant_rho_LL(scenario.params, 1, 0.0)
        elif kind == "detuned":
            far_detuned_effective(scenario.params, 1)
        elif kind == "collapse_revival":
            if scenario.field_spec.kind != "coherent":
                raise DomainViolationError("collapse_revival needs a coherent field")
            n_mean = scenario.field_spec.mean_photons
            revival = revival_time(scenario.params, n_mean).exact
            duration = (scenario.window.t_stop - scenario.window.t_start) / scenario.params.g
            if duration < 1.5 * revival:
                raise DomainViolationError(
                    f"window of {duration * scenario.params.g:.4g}/g is shorter than 1.5 x the "
                    f"revival time {revival * scenario.params.g:.4g}/g"
                )
        elif kind == "protocol":
            self._schedule()
        elif kind == "grid_validation":
            GridCoupling.from_angles(scenario.get("g"), 0.0, scenario.get("kappa"), scenario.get("chi"), 1.0)
            if not scenario.get("max_step") > 0.0:
                raise DomainViolationError("max_step must be positive")
            self._times()

        if kind in ("resonant", "detuned", "collapse_revival"):
            self._check_sampling()

    def _write_series(self, path: Path, columns: dict, order: list) -> Path:
        frame = pd.DataFrame(columns)[order]
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as handle:
            handle.write(f"# {SERIES_SCHEMA}\n")
            frame.to_csv(handle, index=False, float_format="%.12g", lineterminator="\n")
        return path

    def _write_report(self, results: dict) -> Path:
        path = self._path("report.txt")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(make_report(self._scenario, results).to_yaml())
        return path

    def _trace(self):
        scenario = self._scenario
        with cc.phase(f"Evolving {scenario.field_spec.describe()} on {self._threads} thread(s)..."):
            return trace_series(
                scenario.field_spec,
                scenario.get("well"),
                scenario.get("internal"),
                scenario.params,
                self._times(),
                max_workers=self._threads,
            )

    def _single_sector(self) -> int:
        """Sector of a Fock start |n, well, e>, or None when the start spans several."""
        scenario = self._scenario
        if scenario.field_spec.kind == "fock" and scenario.get("internal") == "e":
            return scenario.field_spec.photons + 1
        return None

    def _run_resonant(self, outputs: list) -> dict:
        params = self._scenario.params
        bundle = self._trace()
        outputs.append(self._write_series(self._path("series.csv"), bundle.columns(), SERIES_COLUMNS))

        n_exc = self._single_sector() or 1
        freqs = eigenfrequencies(params, n_exc)
        results = {
            "sector": n_exc,
            "omega_plus": freqs.omega_plus,
            "omega_minus": freqs.omega_minus,
            "omega_tun": freqs.tunnel,
            "rho_LL_amplitude": params.tunnel_split ** 2 / (params.tunnel_split ** 2 + n_exc * params.g ** 2),
        }
        if self._single_sector() and self._scenario.get("well") == "R":
            closed = resonant_rho_LL(params, n_exc, bundle.times)
            results["max_closed_form_deviation"] = float(np.max(np.abs(closed - bundle.rho_LL.values)))
        return results

    def _run_detuned(self, outputs: list) -> dict:
        params = self._scenario.params
        bundle = self._trace()
        outputs.append(self._write_series(self._path("series.csv"), bundle.columns(), SERIES_COLUMNS))

        n_exc = self._single_sector() or 1
        estimate = far_detuned_effective(params, n_exc)
        freqs = eigenfrequencies(params, n_exc)
        g = params.g
        results = {
            "sector": n_exc,
            "in_regime": estimate.in_regime,
            **asdict(estimate),
            "omega_plus_over_g": freqs.omega_plus / g,
            "omega_minus_over_g": freqs.omega_minus / g,
            "x_mean_frequencies_over_g": sorted(float(omega) / g for omega in dominant_frequencies(bundle.x_mean)),
        }
        well = self._scenario.get("well")
        if well in ("L", "R"):
            start = bundle.rho_LL if well == "L" else bundle.rho_RR
            results["start_well_mean_occupation"] = float(np.mean(start.values))
        if self._single_sector() and well == "-":
            closed = far_detuned_rho_LL(params, n_exc, bundle.times)
            results["max_closed_form_deviation"] = float(np.max(np.abs(closed - bundle.rho_LL.values)))
        return results

    def _run_collapse_revival(self, outputs: list) -> dict:
        bundle = self._trace()
        outputs.append(self._write_series(self._path("series.csv"), bundle.columns(), SERIES_COLUMNS))

        cc.step("Measuring the revival envelope...")
        report = detect_revival(bundle.x_mean)
        g = self._scenario.params.g
        results = {
            "n_mean": self._scenario.field_spec.mean_photons,
            **{key: value * g if key.startswith("t_") else value for key, value in report.as_dict().items()},
        }
        results["revival_relative_error"] = abs(report.t_r_measured - report.t_r_exact) / report.t_r_exact
        return results

    def _run_protocol(self, outputs: list) -> dict:
        scenario = self._scenario
        steps = self._schedule()
        initial = ground_state(scenario.get("well"))
        target = ground_state(scenario.get("target_well"))
        result = run_protocol(steps, initial, target)

        g = scenario.params.g
        clock = 0.0
        rows = {name: [] for name in SERIES_COLUMNS}
        for position, state in enumerate(result.trajectory):
            if position > 0 and isinstance(steps[position - 1], FreeEvolve):
                clock += steps[position - 1].duration
            external = np.real(np.diag(reduce_external(state)))
            rows["gt"].append(clock * g)
            rows["rho_LL"].append(external[0])
            rows["rho_RR"].append(external[1])
            rows["rho_ee"].append(float(np.real(reduce_internal(state)[1, 1])))
            rows["x_mean_over_halfb"].append(external[1] - external[0])
        outputs.append(self._write_series(self._path("series.csv"), rows, SERIES_COLUMNS))

        return {**result.as_dict(), "schedule": [step.describe() for step in steps]}

    def _run_grid_validation(self, outputs: list) -> dict:
        scenario = self._scenario
        g, delta = scenario.get("g"), scenario.get("delta_over_g") * scenario.get("g")
        kappa, chi = scenario.get("kappa"), scenario.get("chi")

        with cc.phase("Solving the double well on the grid..."):
            spectral = solve_double_well(scenario.double_well)
        times = self._times()
        with cc.phase("Propagating the sector wavefunction..."):
            comparison = compare_two_level(
                spectral, g, delta, kappa, chi, times,
                kind=scenario.get("initial_kind"), max_step=scenario.get("max_step"),
            )

        gt = times * g
        analytic_rr = comparison.analytic_rho_RR.values
        outputs.append(self._write_series(self._path("series.csv"), {
            "gt": gt,
            "rho_LL": 1.0 - analytic_rr,
            "rho_RR": analytic_rr,
            "rho_ee": comparison.analytic_rho_ee.values,
            "x_mean_over_halfb": 2.0 * analytic_rr - 1.0,
        }, SERIES_COLUMNS))
        grid = comparison.grid
        outputs.append(self._write_series(self._path("grid_series.csv"), {
            "gt": gt,
            "rho_LL": grid.rho_LL.values,
            "rho_RR": grid.rho_RR.values,
            "rho_ee": grid.rho_ee.values,
            "x_mean_over_halfb": grid.x_mean.values / (0.5 * spectral.separation),
            "rho_RR_raw": grid.rho_RR_raw.values,
            "doublet_residual": grid.doublet_residual.values,
        }, GRID_COLUMNS))

        coupling = GridCoupling.from_angles(g, delta, kappa, chi, spectral.separation)
        results = {
            "spectral": spectral.as_dict(),
            "tunnel_split_over_g": spectral.tunnel_split / g,
            "doublet_validity_ratio": doublet_validity_ratio(spectral, g, delta),
            "wkb_splitting": wkb_splitting(spectral.spec, spectral.energies[0]),
            "wavenumber": coupling.wavenumber,
            "mode_offset": coupling.offset,
            "comparison": comparison.as_dict(),
            "verdict": comparison.verdict(),
        }
        if not comparison.analytic_within():
            cc.warning(results["verdict"])
        if scenario.get("compare_gaussian"):
            with cc.phase("Repeating with a gaussian right-well start..."):
                alternative = compare_two_level(
                    spectral, g, delta, kappa, chi, times,
                    kind="gaussian", max_step=scenario.get("max_step"),
                )
            results["gaussian_start"] = {
                **alternative.as_dict(),
                "max_rho_RR_shift": float(np.max(np.abs(alternative.grid.rho_RR.values - grid.rho_RR.values))),
            }
        return results

    def _run_spectrum(self, outputs: list) -> dict:
        spec = self._scenario.double_well
        with cc.phase("Solving the double well on the grid..."):
            spectral = solve_double_well(spec)
        outputs.append(self._write_series(self._path("spectrum.csv"), {
            "index": np.arange(spectral.energies.size),
            "energy": spectral.energies,
        }, ["index", "energy"]))
        return {
            "spectral": spectral.as_dict(),
            "wkb_splitting": wkb_splitting(spec, spectral.energies[0]),
            "wkb_splitting_harmonic": wkb_splitting(spec),
            "harmonic_ground_energy": harmonic_ground_energy(spec),
            "omega_osc": spec.omega_osc,
            "well_minimum": spec.minimum,
        }

    def run(self) -> RunOutcome:
        """
        Run the scenario and write its series and report.

        Returns:
            RunOutcome with the written paths and the report results
        """
        scenario = self._scenario
        cc.step(f"Validating {scenario.kind} scenario {scenario.source}...")
        self.validate()

        runner = getattr(self, f"_run_{scenario.kind}")
        outputs = []
        results = runner(outputs)

        cc.step("Writing report...")
        report_path = self._write_report(results)
        return RunOutcome(report_path=report_path, outputs=outputs + [report_path], results=results)
