"""Closed-form mean-offspring predictions for the step rules.

Under the normal approximation, a genotype of fitness f keeps n-k-1 of its
locus contributions when one locus flips, so the offspring fitness mean is
an affine blend (1-c)f + c*E(X) with c = (k+1)/n and X the refreshed part:
X ~ N(0.5, sigma) with sigma = 1/sqrt(12(k+1)) for a blind flip, the max
of n such draws for greedy climbing, an acceptance-weighted variant for
annealing, and max(f, draws) for neutral climbing.  The blend coefficient
1 - (k+1)/n is also the offspring-parent fitness correlation.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad
from scipy.special import ndtr

from .cloud import CloudSummary
from .errors import DataError, ParameterError, QuadratureError

# Integration window half-width, in units of the contribution std; the
# truncated tail mass is below 1e-14, far under the advertised tolerance.
_SPAN_SIGMAS = 8.0
_QUAD_TOL = 1e-4
_EPSABS = 1e-8


def _check_nk(n: int, k: int) -> None:
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if not 0 <= k <= n - 1:
        raise ParameterError(f"k must satisfy 0 <= k <= n-1, got k={k} for n={n}")


def _check_f(f: float) -> None:
    if not 0.0 <= f <= 1.0:
        raise ParameterError(f"fitness {f} outside [0, 1]")


def sigma_k(k: int) -> float:
    """Std of one refreshed fitness share: mean of k+1 uniforms on [0, 1)."""
    if k < 0:
        raise ParameterError(f"k must be >= 0, got {k}")
    return 1.0 / math.sqrt(12.0 * (k + 1))


def correlation_coefficient(n: int, k: int) -> float:
    """Offspring-parent fitness correlation under one random flip."""
    _check_nk(n, k)
    return 1.0 - (k + 1) / n


def hamming_mean(f: float, n: int, k: int) -> float:
    """Mean offspring fitness after one blind flip of a parent at f."""
    _check_nk(n, k)
    _check_f(f)
    c = (k + 1) / n
    return (1.0 - c) * f + c * 0.5


def _quad(fn, lo: float, hi: float) -> float:
    if hi <= lo:
        return 0.0
    value, err = quad(fn, lo, hi, epsabs=_EPSABS, limit=200)
    if err > _QUAD_TOL:
        raise QuadratureError(f"integration error estimate {err} exceeds {_QUAD_TOL}")
    return value


def expected_max_normals(n: int, k: int) -> float:
    """E[max of n i.i.d. N(0.5, sigma_k)] via the tail-probability identity."""
    _check_nk(n, k)
    s = sigma_k(k)
    span = _SPAN_SIGMAS * s

    def upper(x: float) -> float:
        return 1.0 - ndtr((x - 0.5) / s) ** n

    def lower(x: float) -> float:
        return ndtr((x - 0.5) / s) ** n

    return 0.5 + _quad(upper, 0.5, 0.5 + span) - _quad(lower, 0.5 - span, 0.5)


def mhc_mean(f: float, n: int, k: int) -> float:
    """Mean offspring fitness when the fittest of the n one-flip neighbors
    is always taken; affine in f with the blend coefficient as slope."""
    _check_nk(n, k)
    _check_f(f)
    c = (k + 1) / n
    return (1.0 - c) * f + c * expected_max_normals(n, k)


def sa_expected_offspring(f: float, n: int, k: int, temperature: float,
                          literal_form: bool = False) -> float:
    """Mean offspring fitness for one Metropolis step at the given temperature.

    The default form weights the refreshed share X by the acceptance rule:
    improving draws contribute x, deleterious draws contribute
    x*e^{(x-f)/T} + f*(1 - e^{(x-f)/T}) since a rejected proposal leaves
    the share at f.  ``literal_form`` switches to an unnormalized textbook
    shorthand (survival probability plus a density-weighted tail integral)
    kept for comparison; it is not a proper expectation.
    """
    _check_nk(n, k)
    _check_f(f)
    if temperature <= 0.0:
        raise ParameterError(f"temperature must be > 0, got {temperature}")
    s = sigma_k(k)
    c = (k + 1) / n
    lo, hi = 0.5 - _SPAN_SIGMAS * s, 0.5 + _SPAN_SIGMAS * s
    if literal_form:
        improving = 1.0 - ndtr((f - 0.5) / s)

        def tail(x: float) -> float:
            z = (x - f) / s
            return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi) * math.exp((x - f) / temperature)

        e_x = float(improving) + _quad(tail, f - _SPAN_SIGMAS * s, f)
        return (1.0 - c) * f + c * e_x

    def pdf(x: float) -> float:
        z = (x - 0.5) / s
        return math.exp(-0.5 * z * z) / (s * math.sqrt(2.0 * math.pi))

    def improving_part(x: float) -> float:
        return x * pdf(x)

    def deleterious_part(x: float) -> float:
        a = math.exp((x - f) / temperature)
        return (x * a + f * (1.0 - a)) * pdf(x)

    e_x = _quad(improving_part, max(f, lo), hi) + _quad(deleterious_part, lo, min(f, hi))
    return (1.0 - c) * f + c * e_x


def nhc_expected_offspring(f: float, n: int, k: int) -> float:
    """Mean offspring fitness for a greedy-if-improving step: the refreshed
    share behaves like max(f, best of n draws), since a non-improving step
    is replaced by a neutral move that keeps fitness."""
    _check_nk(n, k)
    _check_f(f)
    s = sigma_k(k)
    c = (k + 1) / n
    lo, hi = 0.5 - _SPAN_SIGMAS * s, 0.5 + _SPAN_SIGMAS * s
    stay = f * ndtr((f - 0.5) / s) ** n

    def upper(x: float) -> float:
        z = (x - 0.5) / s
        dens = math.exp(-0.5 * z * z) / (s * math.sqrt(2.0 * math.pi))
        return x * n * dens * ndtr(z) ** (n - 1)

    e_max = float(stay) + _quad(upper, max(f, lo), hi)
    return (1.0 - c) * f + c * e_max


def fit_cloud_line(fc: CloudSummary):
    """Count-weighted least-squares line through a cloud's mean curve.

    Returns (slope, intercept, residual_rms).  Low-occupancy bins are
    excluded and at least two bins must remain.
    """
    usable = fc.usable_bins()
    if len(usable) < 2:
        raise DataError("fewer than two usable bins; cannot fit a line")
    x = np.array([b.center for b in usable])
    y = np.array([b.f_mean for b in usable])
    w = np.sqrt(np.array([b.count for b in usable], dtype=np.float64))
    slope, intercept = np.polyfit(x, y, 1, w=w)
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.sum((w * resid) ** 2) / np.sum(w ** 2)))
    return float(slope), float(intercept), rms
