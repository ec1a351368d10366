"""
Collapse and revival of tunneling oscillations in a coherent field.

Predictions come in two flavours: the asymptotic large-<n> expansions and
the exact defining conditions evaluated with Omega_tun(m) at N = m + 1.
Measurements use the analytic-signal envelope of the simulated <x>(t).
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import fft
from scipy.ndimage import uniform_filter1d
from scipy.signal import find_peaks, get_window, hilbert

from .exceptions import DomainViolationError, NoRevivalDetected, ParameterError
from .model import SystemParams
from .observables import TimeSeries
from .sector_dynamics import tunnel_frequency

log = logging.getLogger(__name__)

COLLAPSE_FRACTION = 0.2
COVERAGE_FACTOR = 1.5
NOISE_FLOOR = 1e-8


@dataclass(frozen=True)
class CollapseEstimate:
    formula: float
    exact: float


@dataclass(frozen=True)
class RevivalEstimate:
    formula: float
    exact: float


def _tunnel_at_photons(params: SystemParams, photons):
    return tunnel_frequency(params, np.asarray(photons, dtype=float) + 1.0)


def _check_mean(n_mean: float) -> None:
    if not n_mean >= 1.0:
        raise DomainViolationError(f"mean photon number must be >= 1, got {n_mean}")


def collapse_time(params: SystemParams, n_mean: float) -> CollapseEstimate:
    """
    t_c ~ (1/g)(1 + ((D/g)^2 + 3/4)/(2 <n>)), and the exact solution of
    (Omega_tun(<n> + sqrt<n>) - Omega_tun(<n> - sqrt<n>)) t_c = 1.
    """
    _check_mean(n_mean)
    g = params.g
    ratio2 = (params.tunnel_split / g) ** 2
    formula = (1.0 + (ratio2 + 0.75) / (2.0 * n_mean)) / g
    spread = math.sqrt(n_mean)
    upper, lower = _tunnel_at_photons(params, [n_mean + spread, n_mean - spread])
    return CollapseEstimate(formula=formula, exact=1.0 / (upper - lower))


def revival_time(params: SystemParams, n_mean: float) -> RevivalEstimate:
    """
    t_r ~ 4 pi sqrt<n>/g (1 + ((D/g)^2 + 1/2)/(2 <n>)), and the exact solution
    of (Omega_tun(<n>) - Omega_tun(<n> - 1)) t_r = 2 pi.
    """
    _check_mean(n_mean)
    g = params.g
    ratio2 = (params.tunnel_split / g) ** 2
    formula = 4.0 * math.pi * math.sqrt(n_mean) / g * (1.0 + (ratio2 + 0.5) / (2.0 * n_mean))
    upper, lower = _tunnel_at_photons(params, [n_mean, n_mean - 1.0])
    return RevivalEstimate(formula=formula, exact=2.0 * math.pi / (upper - lower))


@dataclass(frozen=True, eq=False)
class RevivalReport:
    t_c_formula: float
    t_c_exact: float
    t_r_formula: float
    t_r_exact: float
    t_r_measured: float
    collapsed: bool
    collapse_ratio: float
    envelope: TimeSeries

    def as_dict(self) -> dict:
        return {
            "t_c_formula": self.t_c_formula,
            "t_c_exact": self.t_c_exact,
            "t_r_formula": self.t_r_formula,
            "t_r_exact": self.t_r_exact,
            "t_r_measured": self.t_r_measured,
            "collapsed": self.collapsed,
            "collapse_ratio": self.collapse_ratio,
        }


def smoothed_envelope(values: np.ndarray, window: int) -> np.ndarray:
    """Analytic-signal magnitude of values - mean, boxcar-smoothed over `window` samples."""
    analytic = hilbert(values - np.mean(values))
    return uniform_filter1d(np.abs(analytic), size=max(1, int(window)), mode="nearest")


def detect_revival(series: TimeSeries) -> RevivalReport:
    """
    Measure the revival time of an oscillating trace, normally <x>(t) for a
    coherent field.

    The envelope is smoothed over one tunnel period 2 pi / Omega_tun(<n>);
    the revival is the highest local maximum of the envelope after 3 t_c,
    and the oscillations count as collapsed when the envelope before the
    revival drops below 20% of its initial level (the mean over the first
    tunnel period).

    Raises:
        DomainViolationError: series without parameters or field, <n> < 1,
            or shorter than 1.5 times the exact revival time
        NoRevivalDetected: no envelope above the noise floor
    """
    if series.params is None or series.field is None:
        raise DomainViolationError("revival detection needs a series carrying its params and field")
    params = series.params
    n_mean = series.field.mean_photons
    collapse = collapse_time(params, n_mean)
    revival = revival_time(params, n_mean)

    if series.duration < COVERAGE_FACTOR * revival.exact:
        raise DomainViolationError(
            f"series covers {series.duration:.4g} but revival detection needs at least "
            f"{COVERAGE_FACTOR} x t_r = {COVERAGE_FACTOR * revival.exact:.4g}"
        )

    times, values = series.times, series.values
    period = 2.0 * math.pi / _tunnel_at_photons(params, n_mean)
    window = max(1, int(round(period / series.step)))
    envelope = smoothed_envelope(values, window)

    floor = NOISE_FLOOR * max(float(np.max(np.abs(values))), np.finfo(float).tiny)
    search = np.nonzero(times > 3.0 * collapse.formula)[0]
    if search.size == 0 or float(np.max(envelope)) <= floor:
        raise NoRevivalDetected(f"no envelope above the noise floor in '{series.label}'")
    # the envelope is still decaying at 3 t_c; prefer interior maxima
    maxima, _ = find_peaks(envelope[search])
    candidates = search[maxima] if maxima.size else search
    peak = candidates[np.argmax(envelope[candidates])]
    if envelope[peak] <= floor:
        raise NoRevivalDetected(f"no revival above the noise floor in '{series.label}'")

    initial = float(np.mean(envelope[:window]))
    lowest = float(np.min(envelope[: peak + 1]))
    ratio = lowest / initial if initial > 0.0 else 1.0
    log.debug(
        "revival in '%s': peak at %.4g (exact %.4g), collapse ratio %.3f",
        series.label, times[peak], revival.exact, ratio,
    )
    return RevivalReport(
        t_c_formula=collapse.formula,
        t_c_exact=collapse.exact,
        t_r_formula=revival.formula,
        t_r_exact=revival.exact,
        t_r_measured=float(times[peak]),
        collapsed=ratio < COLLAPSE_FRACTION,
        collapse_ratio=ratio,
        envelope=TimeSeries(
            times=times, values=envelope, label=f"{series.label}_envelope",
            params=params, field=series.field,
        ),
    )


def power_spectrum(series: TimeSeries, window: str = None) -> tuple:
    """
    One-sided power spectrum of the mean-removed series.

    Without a window the powers sum to the variance of the series (Parseval).
    A named scipy window is normalized by its mean square, which keeps the sum
    close to the variance.

    Returns:
        (angular frequencies, powers)
    """
    if len(series) < 2:
        raise ParameterError("power spectrum needs at least two samples")
    values = series.values - np.mean(series.values)
    size = values.size
    if window is not None:
        taper = get_window(window, size)
        values = values * taper / math.sqrt(np.mean(taper ** 2))

    power = np.abs(fft.rfft(values)) ** 2 / size ** 2
    power[1:] *= 2.0
    if size % 2 == 0:
        power[-1] /= 2.0
    omega = 2.0 * math.pi * fft.rfftfreq(size, d=series.step)
    return omega, power


def dominant_frequencies(series: TimeSeries, threshold: float = 0.01) -> np.ndarray:
    """
    Angular frequencies of the spectral peaks holding at least `threshold` of
    the strongest peak's power, from a Hann-windowed spectrum, refined by
    parabolic interpolation of the log power.
    """
    omega, power = power_spectrum(series, window="hann")
    if not np.any(power > 0.0):
        return np.array([])
    peaks, _ = find_peaks(power, height=threshold * np.max(power))
    bin_width = omega[1] - omega[0]
    refined = []
    for index in peaks:
        left, centre, right = np.log(power[index - 1: index + 2] + np.finfo(float).tiny)
        curvature = left - 2.0 * centre + right
        shift = 0.5 * (left - right) / curvature if curvature < 0.0 else 0.0
        refined.append(omega[index] + shift * bin_width)
    return np.array(refined)
