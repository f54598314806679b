"""
Invariant suite behind ``manage.py invariants``.

Every check returns a CheckResult with the measured quantity and the
threshold it was held against. A check that raises is reported as failed
with the error text; it never stops the suite.
"""
import cmath
import enum
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from fronts.decomposition import (
    band_segments,
    band_tail_estimates,
    front_jumps,
    gauss_validity,
    phase_matching_velocity,
    pole_contribution,
    saddle_gauss,
)
from fronts.dispersion import DispersionModel, Kind, SourceSpec, front_velocity, traversal_time
from fronts.exceptions import FrontwavesError
from fronts.oracle import (
    QuadratureSettings,
    band_quadrature,
    contour_quadrature,
    exact_nonrel_sharp,
    schrodinger_residual,
)
from fronts.phase import Branch, detect_crossing_time, saddle_residual
from phasemaps.grid import Window, build_grid, extract_contours, real_axis_crossings

from .runner import band_options, tail_options, versions
from .serializers import RunRecord

logger = logging.getLogger(__name__)

NONREL = DispersionModel(Kind.NONRELATIVISTIC, mass=1.0)
REL = DispersionModel(Kind.RELATIVISTIC, mass=1.0, light_speed=1.0)
TIGHT = QuadratureSettings(rel_tol=1e-10, abs_tol=1e-15)

GAUSS_VALIDITIES = (3.0, 10.0, 30.0, 100.0)
GAUSS_NONREL_SETS = ((-2.0, 0.55), (-1.0, 0.6), (-4.0, 0.6), (-0.5, 0.65), (-3.0, 0.58))
GAUSS_RAPIDITIES = (0.6, 0.7, 0.85, 1.0, 1.2)

CHECK_COLUMNS = ["name", "passed", "measured", "threshold", "detail"]


class Profile(str, enum.Enum):
    QUICK = "quick"
    FULL = "full"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float | None
    threshold: float | None
    detail: str = ""


def _at_most(name, measured, threshold, detail=""):
    return CheckResult(name, bool(measured <= threshold), float(measured), threshold, detail)


def _sharp(carrier):
    return SourceSpec(amplitude=1.0, carrier=carrier)


def boundary_identity(profile):
    """ψ(0, t) reproduces the source signal for both source types."""
    count = 50 if profile is Profile.FULL else 8
    worst = 0.0
    for t in np.linspace(0.1, 5.0, count):
        for omega0 in (2.0, -2.0):
            psi = exact_nonrel_sharp(NONREL, _sharp(omega0), 0.0, t).psi
            worst = max(worst, abs(psi - cmath.exp(-1j * omega0 * t)))
    band = SourceSpec(amplitude=1.0, carrier=-2.0, band=0.5)
    for t in np.linspace(-3.0, 5.0, count // 2):
        psi = band_quadrature(NONREL, band, 0.0, t, TIGHT).psi
        expected = cmath.exp(2j * t) * (0.5 + special.sici(0.5 * t)[0] / math.pi)
        worst = max(worst, abs(psi - expected))
    return _at_most("boundary_identity", worst, 1e-8)


def causality(profile):
    """The relativistic field vanishes outside the light cone."""
    rng = np.random.default_rng(20)
    count = 100 if profile is Profile.FULL else 10
    worst = 0.0
    for _ in range(count):
        t = float(rng.uniform(0.1, 5.0))
        x = t * float(rng.uniform(1.01, 3.0))
        omega0 = float(rng.choice([0.6, -0.4, 1.25, -2.0]))
        worst = max(worst, abs(contour_quadrature(REL, _sharp(omega0), x, t).psi))
    return _at_most("causality", worst, 1e-6)


def cross_oracle(profile):
    """Closed form and contour quadrature agree for the sharp non-relativistic source."""
    if profile is Profile.FULL:
        xs, ts = np.linspace(0.5, 2.0, 10), np.linspace(0.3, 2.5, 10)
    else:
        xs, ts = (0.5, 1.0, 2.0), (0.5, 2.5)
    points = [(omega0, x, t) for omega0 in (-2.0, 1.5) for x in xs for t in ts]
    # Exactly on the front of the propagating carrier.
    points.append((0.5, 2.0, 2.0))
    worst = 0.0
    for omega0, x, t in points:
        exact = exact_nonrel_sharp(NONREL, _sharp(omega0), x, t).psi
        contour = contour_quadrature(NONREL, _sharp(omega0), x, t, TIGHT).psi
        scale = max(abs(exact), math.exp(-x ** 2 / t))
        worst = max(worst, abs(contour - exact) / scale)
    return _at_most("cross_oracle", worst, 1e-8)


def front_velocity_consistency(profile):
    """v_m from its formula, from phase matching and from the detected crossing time."""
    cases = [(NONREL, -2.0), (NONREL, 3.0), (REL, 0.6), (REL, -0.25), (REL, 1.25), (REL, -4.0)]
    if profile is Profile.FULL:
        cases += [(NONREL, w) for w in np.linspace(-10.0, -0.1, 20)]
        cases += [(NONREL, w) for w in np.linspace(0.1, 10.0, 20)]
        cases += [(REL, w) for w in np.linspace(-0.95, 0.95, 20)]
        above = np.linspace(1.05, 20.0, 10)
        cases += [(REL, w) for w in np.concatenate([above, -above])]
    worst = 0.0
    fastest = 0.0
    for model, omega0 in cases:
        omega0 = float(omega0)
        v_m = front_velocity(model, omega0)
        worst = max(worst, abs(phase_matching_velocity(model, omega0) / v_m - 1.0))
        tau = traversal_time(model, omega0, 1.0)
        worst = max(worst, abs(detect_crossing_time(model, omega0, 1.0) / tau - 1.0))
        if model.is_relativistic:
            fastest = max(fastest, v_m / model.light_speed)
    if fastest >= 1.0:
        return CheckResult("front_velocity_consistency", False, worst, 1e-8, f"v_m/c reached {fastest!r}")
    return _at_most("front_velocity_consistency", worst, 1e-8, detail=f"{len(cases)} carriers")


def saddle_stationarity(profile):
    """dφ/dΩ vanishes at Ω_s and φ″ matches φ_s″ over random (x, t)."""
    rng = np.random.default_rng(5)
    count = 100 if profile is Profile.FULL else 10
    slope = curvature = 0.0
    for _ in range(count):
        residual = saddle_residual(NONREL, float(rng.uniform(0.1, 5.0)), float(rng.uniform(0.2, 5.0)))
        slope, curvature = max(slope, residual.slope), max(curvature, residual.curvature)
        t = float(rng.uniform(0.2, 5.0))
        x = t * float(rng.uniform(0.2, 0.9))
        for branch in Branch:
            residual = saddle_residual(REL, x, t, branch)
            slope, curvature = max(slope, residual.slope), max(curvature, residual.curvature)
    if curvature > 1e-6:
        return CheckResult("saddle_stationarity", False, slope, 1e-8, f"curvature mismatch {curvature:.3g}")
    return _at_most("saddle_stationarity", slope, 1e-8, detail=f"curvature mismatch {curvature:.3g}")


def jump_compensation(profile):
    """The pole jump at x = v_m t is cancelled by the forerunner jump."""
    cases = [
        (NONREL, 2.0, 1.0), (NONREL, 0.7, 2.5), (NONREL, -2.0, 1.0), (NONREL, -3.1, 0.6),
        (REL, 1.25, 3.0), (REL, -1.6, 1.0), (REL, 0.6, 0.8), (REL, -0.3, 2.0),
    ]
    worst = 0.0
    for model, omega0, x in cases:
        jumps = front_jumps(model, _sharp(omega0), x)
        worst = max(worst, jumps.residual / max(abs(jumps.pole_jump), 1.0))
    return _at_most("jump_compensation", worst, 1e-10)


def continuity(profile):
    """
    The exact field is continuous across a propagating and an evanescent
    front: the symmetric difference shrinks linearly with the step over three
    decades.
    """
    steps = [1e-2, 1e-3, 1e-4, 1e-5]
    slopes = []
    for omega0 in (2.0, -2.0):
        source = _sharp(omega0)
        tau = traversal_time(NONREL, omega0, 2.0)
        differences = [
            abs(exact_nonrel_sharp(NONREL, source, 2.0, tau + h).psi - exact_nonrel_sharp(NONREL, source, 2.0, tau - h).psi)
            for h in steps
        ]
        slopes += [math.log10(a / b) for a, b in zip(differences, differences[1:])]
    worst = max(abs(slope - 1.0) for slope in slopes)
    return _at_most("continuity", worst, 0.1, detail=" ".join(f"{slope:.4f}" for slope in slopes))


def schrodinger(profile):
    worst = max(
        schrodinger_residual(NONREL, _sharp(omega0), x, t)
        for omega0, x, t in ((2.0, 1.0, 0.8), (-2.0, 0.7, 1.5), (0.5, 2.0, 3.0))
    )
    return _at_most("schrodinger_residual", worst, 1e-4)


def evanescent_hierarchy(profile):
    """
    Just after τ the evanescent pole part is smaller than the forerunner by
    e^{−m v_m x/ℏ}, up to a factor of order one (here within a decade).
    """
    omega0 = -2.0
    v_m = front_velocity(NONREL, omega0)
    factors = []
    for x in (1.5, 2.5, 4.0):
        t = traversal_time(NONREL, omega0, x) * (1 + 1e-9)
        psi_p = pole_contribution(NONREL, _sharp(omega0), x, t)
        forerunner = exact_nonrel_sharp(NONREL, _sharp(omega0), x, t).psi - psi_p
        factors.append(abs(psi_p) / abs(forerunner) / math.exp(-NONREL.mass * v_m * x))
    worst = max(abs(math.log10(factor)) for factor in factors)
    return _at_most("evanescent_hierarchy", worst, 1.0, detail=" ".join(f"{factor:.3f}" for factor in factors))


def _nonrel_gauss_errors(omega0, r):
    # Ahead of the front (r > ½) the closed form is all forerunner.
    errors = []
    for validity in GAUSS_VALIDITIES:
        alpha = 2.0 * r ** 2 * validity
        t = alpha * (1.0 - r) / (r * abs(omega0))
        x = math.sqrt(2.0 * alpha * t)
        exact = exact_nonrel_sharp(NONREL, _sharp(omega0), x, t).psi
        plus, _ = saddle_gauss(NONREL, _sharp(omega0), x, t)
        errors.append(abs(plus - exact) / abs(exact))
    return errors


def _rel_gauss_errors(rapidity):
    # x = c tanh θ at t = 1 and Ω₀ = mc²e^{−θ}/ℏ make φ_s = φ_s″(Ω_s − Ω₀)² = V.
    errors = []
    for validity in GAUSS_VALIDITIES:
        model = DispersionModel(Kind.RELATIVISTIC, mass=validity * math.cosh(rapidity), light_speed=1.0)
        x = math.tanh(rapidity)
        omega0 = model.mass * math.exp(-rapidity)
        if abs(gauss_validity(model, omega0, x, 1.0) / validity - 1.0) > 1e-8:
            raise ArithmeticError(f"validity drifted from {validity!r} at rapidity {rapidity!r}")
        result = contour_quadrature(model, _sharp(omega0), x, 1.0, TIGHT)
        (path,) = [p for p in result.path_metadata["paths"] if p["branch"] == Branch.PLUS.value]
        plus, _ = saddle_gauss(model, _sharp(omega0), x, 1.0)
        errors.append(abs(plus - path["value"]) / abs(path["value"]))
    return errors


def gauss_convergence(profile):
    """
    Relative error of the Gauss forerunner falls monotonically as the validity
    parameter V grows through 3, 10, 30 and 100, and stays below 0.25 from
    V = 10 on. Non-relativistic against the closed form, relativistic
    against the + stph path of the contour quadrature.
    """
    series = [(f"nonrel {omega0} {r}", _nonrel_gauss_errors(omega0, r)) for omega0, r in GAUSS_NONREL_SETS]
    series += [(f"rel {rapidity}", _rel_gauss_errors(rapidity)) for rapidity in GAUSS_RAPIDITIES]
    worst = max(max(errors[1:]) for _, errors in series)
    for label, errors in series:
        if errors != sorted(errors, reverse=True):
            detail = f"{label}: errors not decreasing " + " ".join(f"{e:.3g}" for e in errors)
            return CheckResult("gauss_convergence", False, worst, 0.25, detail)
    return _at_most("gauss_convergence", worst, 0.25, detail=f"{len(series)} sets")


def band_suppression(profile):
    """Every band segment carries the e^{−m x²/t} suppression; edge factors match the quoted ones within 2."""
    source = SourceSpec(amplitude=1.0, carrier=-2.0, band=0.2)
    worst = 0.0
    for x in np.linspace(0.8, 1.2, 5):
        t = traversal_time(NONREL, -2.0, x)
        segments = band_segments(NONREL, source, x, t, **band_options())
        scale = math.exp(-x ** 2 / t)
        for value in (segments.psi_minus_seg, segments.psi_plus_seg, segments.psi_stph_seg):
            worst = max(worst, abs(value) / scale)
        for computed, quoted in (
            (segments.edge_factor_plus, segments.quoted_edge_factor_plus),
            (segments.edge_factor_minus, segments.quoted_edge_factor_minus),
        ):
            if abs(math.log(computed / quoted)) > math.log(2.0):
                return CheckResult("band_suppression", False, worst, 1.0, "edge factor off by more than 2")
    return CheckResult("band_suppression", worst < 1.0, worst, 1.0)


def band_exponent(profile):
    """
    At t = τ the band-limited field decays as e^{−m x²/(ℏτ)} = e^{−m v_m x/ℏ}:
    the slope of log|ψ| against m x²/(ℏt) is −1, not −½. The band oracle and
    the segment sum must both land within 0.1 of −1 and agree within a factor 2.
    """
    omega0 = -2.0
    source = SourceSpec(amplitude=1.0, carrier=omega0, band=0.05)
    exponents, oracle_logs, segment_logs = [], [], []
    ratio = 1.0
    for x in np.linspace(2.5, 5.0, 6):
        t = traversal_time(NONREL, omega0, x)
        oracle = band_quadrature(NONREL, source, x, t, TIGHT).psi
        segments = band_segments(NONREL, source, x, t, **band_options()).total
        exponents.append(NONREL.mass * x ** 2 / t)
        oracle_logs.append(math.log(abs(oracle)))
        segment_logs.append(math.log(abs(segments)))
        ratio = max(ratio, abs(segments) / abs(oracle), abs(oracle) / abs(segments))
    oracle_slope = np.polyfit(exponents, oracle_logs, 1)[0]
    segment_slope = np.polyfit(exponents, segment_logs, 1)[0]
    detail = f"slopes oracle {oracle_slope:.4f} segments {segment_slope:.4f}, magnitude ratio {ratio:.3f}"
    if ratio > 2.0:
        return CheckResult("band_exponent", False, float(abs(oracle_slope + 1.0)), 0.1, detail)
    worst = max(abs(oracle_slope + 1.0), abs(segment_slope + 1.0))
    return _at_most("band_exponent", worst, 0.1, detail)


def band_crossover(profile):
    """
    For Δω/|Ω₀| ≤ 0.1 and m v_m x/ℏ ≤ 5, just after τ the pole part outweighs
    the summed segment magnitudes and is within a decade of the oracle's
    forerunner.
    """
    omega0 = -2.0
    source = SourceSpec(amplitude=1.0, carrier=omega0, band=0.2)
    worst = 0.0
    lowest = math.inf
    for x in (1.0, 1.5, 2.0, 2.5):
        t = traversal_time(NONREL, omega0, x) * (1 + 1e-6)
        psi_p = pole_contribution(NONREL, source, x, t)
        segments = band_segments(NONREL, source, x, t, **band_options())
        summed = abs(segments.psi_minus_seg) + abs(segments.psi_stph_seg) + abs(segments.psi_plus_seg)
        lowest = min(lowest, abs(psi_p) / summed)
        forerunner = band_quadrature(NONREL, source, x, t, TIGHT).psi - psi_p
        worst = max(worst, abs(math.log10(abs(psi_p) / abs(forerunner))))
    if lowest <= 1.0:
        return CheckResult("band_crossover", False, worst, 1.0, f"|ψ_p|/Σ|segments| fell to {lowest:.3f}")
    return _at_most("band_crossover", worst, 1.0, detail=f"min |ψ_p|/Σ|segments| {lowest:.3f}")


def band_tails(profile):
    """
    Well before and well after τ the band forerunner exponent is large and
    negative, and it matches its short- and long-time asymptotic forms.
    """
    source = SourceSpec(amplitude=1.0, carrier=-2.0, band=0.2)
    worst = 0.0
    largest = -math.inf
    for x in (1.0, 2.0):
        tau = traversal_time(NONREL, -2.0, x)
        for t, regime in ((0.1 * tau, "short"), (10.0 * tau, "long")):
            tail = band_tail_estimates(NONREL, source, x, t, **tail_options())
            if tail.regime != regime:
                return CheckResult("band_tails", False, None, 1e-2, f"t/τ = {t / tau:.3g} classed {tail.regime}")
            worst = max(worst, abs(tail.exponent / tail.asymptotic_exponent - 1.0))
            largest = max(largest, tail.exponent)
    if largest > -1.0:
        return CheckResult("band_tails", False, worst, 1e-2, f"exponent {largest:.3g} is not small")
    return _at_most("band_tails", worst, 1e-2, detail=f"largest exponent {largest:.3g}")


def crossing_product(profile):
    """Relativistic stph crossings multiply to (mc²/ℏ)²."""
    grid = build_grid(REL, 0.8, 1.0, Window(-2.5, 2.5, -2.0, 1.0), (251, 151))
    crossings = real_axis_crossings(REL, 0.8, 1.0, grid, extract_contours(grid, [1.0]), 1.0)
    if len(crossings) != 2:
        return CheckResult("crossing_product", False, None, 1e-6, f"found {len(crossings)} crossings")
    return _at_most("crossing_product", abs(crossings[0] * crossings[1] - 1.0), 1e-6)


QUICK_CHECKS = [
    boundary_identity,
    causality,
    cross_oracle,
    front_velocity_consistency,
    saddle_stationarity,
    jump_compensation,
    continuity,
    schrodinger,
    evanescent_hierarchy,
    band_tails,
]
FULL_CHECKS = QUICK_CHECKS + [gauss_convergence, band_suppression, band_exponent, band_crossover, crossing_product]


def run_checks(profile=Profile.QUICK):
    profile = Profile(profile)
    checks = FULL_CHECKS if profile is Profile.FULL else QUICK_CHECKS
    results = []
    for check in checks:
        try:
            result = check(profile)
        except (FrontwavesError, ArithmeticError, ValueError) as exc:
            result = CheckResult(check.__name__, False, None, None, f"{type(exc).__name__}: {exc}")
        logger.info("check %s: %s (%r)", result.name, "pass" if result.passed else "FAIL", result.measured)
        results.append(result)
    return results


def check_record(results, profile):
    rows = [
        {
            "name": result.name,
            "passed": result.passed,
            "measured": result.measured,
            "threshold": result.threshold,
            "detail": result.detail,
        }
        for result in results
    ]
    return RunRecord("invariants", None, list(CHECK_COLUMNS), rows, versions(), extra={"profile": Profile(profile).value})
