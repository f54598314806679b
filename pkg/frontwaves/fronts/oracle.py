"""
Reference evaluations of the exact field

    ψ(x, t) = (iA/2π) e^{−iVt/ℏ} ∫ e^{−iφ(Ω)} / (Ω − Ω₀ + i0) dΩ

used to check every analytic approximation. Three methods, in order of
preference: the closed form for a sharp non-relativistic source, principal
value quadrature over the band of a band-limited source, and quadrature along
the stph lines for everything else.
"""
import cmath
import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings
from scipy import integrate, special

from .dispersion import Sheet, outgoing_wavenumber, wavenumber
from .exceptions import CausalRegionError, ConvergenceError, DomainError, SheetTrackingError
from .phase import StphPath, saddle

logger = logging.getLogger(__name__)

CIRCLE_NODES = 128


class Method(str, enum.Enum):
    CLOSED_FORM_NONREL = "ClosedFormNonRel"
    BAND_QUADRATURE = "BandQuadrature"
    CONTOUR_QUADRATURE = "ContourQuadrature"


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-14
    max_subdivisions: int = 400
    pv_window: float = 0.05

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive.")
        if not self.abs_tol >= 0:
            raise DomainError("abs_tol must be non-negative.")
        if self.max_subdivisions < 64:
            raise DomainError("max_subdivisions must be at least 64.")
        if not self.pv_window > 0:
            raise DomainError("pv_window must be positive.")

    @classmethod
    def from_settings(cls, **overrides):
        """Defaults from ``settings.FRONTWAVES``, optionally overridden."""
        conf = settings.FRONTWAVES
        values = {
            "rel_tol": conf["REL_TOL"],
            "abs_tol": conf["ABS_TOL"],
            "max_subdivisions": conf["MAX_SUBDIVISIONS"],
            "pv_window": conf["PV_WINDOW"],
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


@dataclass(frozen=True)
class OracleResult:
    psi: complex
    est_error: float
    method: Method
    path_metadata: dict = field(default_factory=dict)


def _settings(quadrature):
    return quadrature if quadrature is not None else QuadratureSettings.from_settings()


def _complex_quad(func, a, b, quadrature, **kwargs):
    """quad on the real and imaginary parts of ``func``; returns (value, error)."""
    value = 0j
    error = 0.0
    for part, unit in ((np.real, 1.0), (np.imag, 1j)):
        out = integrate.quad(
            lambda s: float(part(func(s))),
            a,
            b,
            epsabs=quadrature.abs_tol,
            epsrel=0.5 * quadrature.rel_tol,
            limit=quadrature.max_subdivisions,
            full_output=1,
            **kwargs,
        )
        if len(out) > 3:
            raise ConvergenceError(f"Quadrature on [{a!r}, {b!r}] did not converge: {out[3]}")
        value += unit * out[0]
        error += out[1]
    return value, error


def exact_nonrel_sharp(model, source, x, t):
    """
    Closed-form solution for a sharp-onset source in the non-relativistic
    model, ½A e^{−iω₀t}[e^{ik₀x} erfc(z₋) + e^{−ik₀x} erfc(z₊)], evaluated
    through the scaled function w(iz) = e^{z²} erfc(z).
    """
    model = model.natural()
    if model.is_relativistic:
        raise DomainError("The closed form covers the non-relativistic model only.")
    if source.is_band_limited:
        raise DomainError("The closed form covers sharp-onset sources only.")
    if t == 0:
        raise DomainError("The closed form is undefined at t = 0.")
    if x < 0:
        raise DomainError("x must be non-negative.")
    if t < 0:
        return OracleResult(0j, 0.0, Method.CLOSED_FORM_NONREL)
    omega0 = source.kinetic_carrier(model)
    m = model.mass
    k0 = outgoing_wavenumber(model, omega0)
    spread = cmath.exp(0.25j * math.pi) * math.sqrt(t / (2.0 * m))
    kappa = -1j * k0
    z_minus = x / (2.0 * spread) - kappa * spread
    z_plus = x / (2.0 * spread) + kappa * spread
    chirp = cmath.exp(-1j * model.potential * t + 0.5j * m * x ** 2 / t)
    psi = 0.5 * source.amplitude * chirp * (special.wofz(1j * z_minus) + special.wofz(1j * z_plus))
    return OracleResult(complex(psi), 4e-15 * abs(source.amplitude), Method.CLOSED_FORM_NONREL)


def band_quadrature(model, source, x, t, quadrature=None):
    """
    Band-limited source: principal value integral over [Ω₀ − Δω, Ω₀ + Δω]
    plus the −iπ f(Ω₀) half residue. Valid for any t, including t < 0.
    """
    model = model.natural()
    quadrature = _settings(quadrature)
    if not source.is_band_limited:
        raise DomainError("Band quadrature needs a band-limited source.")
    if x < 0:
        raise DomainError("x must be non-negative.")
    source.check_band(model)
    omega0 = source.kinetic_carrier(model)

    def f(omega):
        return cmath.exp(-1j * (omega * t - outgoing_wavenumber(model, omega) * x))

    low, high = omega0 - source.band, omega0 + source.band
    principal, error = _complex_quad(f, low, high, quadrature, weight="cauchy", wvar=omega0)
    prefactor = 1j * source.amplitude / (2.0 * math.pi) * cmath.exp(-1j * model.potential * t)
    psi = prefactor * (principal - 1j * math.pi * f(omega0))
    logger.debug("band quadrature at x=%r t=%r: %r (err %.2e)", x, t, psi, abs(prefactor) * error)
    return OracleResult(
        complex(psi),
        abs(prefactor) * error,
        Method.BAND_QUADRATURE,
        {"band": [low, high], "principal_value_at": omega0},
    )


def _branch_points(model):
    if model.is_relativistic:
        mu = model.rest_frequency
        return (-mu, mu)
    return (0.0,)


def _on_cut(model, omega0):
    if model.is_relativistic:
        return abs(omega0) > model.rest_frequency
    return omega0 > 0


def _humps(paths):
    # Real intervals over which the stph lines run above the real axis.
    humps = []
    for path in paths:
        ends = sorted(float(np.real(path.omega(s))) for s in path.crossings)
        humps.append(tuple(ends))
    return humps


def pole_swept(paths, omega0):
    """
    True when deforming onto ``paths`` carries the contour across Ω₀.

    Ω₀ on the upper end of a hump counts as inside, the same side that
    ``_log_increment`` takes for a crossing exactly at Ω₀, so the field stays
    continuous at t = x/v_m.
    """
    return not any(low < omega0 <= high for low, high in _humps(paths))


def _circle_residue(model, omega0, x, t, radius):
    """Trapezoidal mean of e^{−iφ} on a circle around Ω₀ (spectrally accurate)."""
    angles = 2.0 * math.pi * (np.arange(CIRCLE_NODES) + 0.5) / CIRCLE_NODES
    nodes = omega0 + radius * np.exp(1j * angles)
    below = nodes.imag < 0
    k = np.asarray(wavenumber(model, nodes, Sheet.UPPER))
    if _on_cut(model, omega0):
        k = np.where(below, np.asarray(wavenumber(model, nodes, Sheet.LOWER)), k)
    values = np.exp(-1j * (nodes * t - k * x))
    fine = values.mean()
    coarse = values[::2].mean()
    return complex(fine), float(abs(fine - coarse))


def _check_sheets(path):
    for s in path.crossings:
        omega = complex(path.omega(s))
        tracked = complex(path.wavenumber(s))
        expected = outgoing_wavenumber(path.model, omega.real)
        if abs(tracked - expected) > 1e-8 * max(abs(expected), 1.0):
            raise SheetTrackingError(
                f"k = {tracked!r} on the {path.info.branch.value} path at Ω = {omega.real!r}, "
                f"expected the outgoing {expected!r}."
            )


def _log_increment(path, omega0, low, high):
    """∫ dΩ/(Ω − Ω₀) along the path, with the argument followed continuously."""
    start = complex(path.omega(low)) - omega0
    end = complex(path.omega(high)) - omega0
    increment = cmath.log(end) - cmath.log(start)
    for s in path.crossings:
        if float(np.real(path.omega(s))) < omega0:
            upward = float(np.imag(path.d_omega(s))) > 0
            increment += -2j * math.pi if upward else 2j * math.pi
    return increment


def _path_integral(path, omega0, quadrature, decay, subtract):
    """∫ e^{−iφ}/(Ω − Ω₀) dΩ along one stph path, truncated where Im φ < −decay."""
    low, high = path.parameter_range(decay)
    x, t = path.x, path.t
    points = sorted(s for s in path.crossings if low < s < high)
    h0 = 0j
    if subtract:
        h0 = cmath.exp(-1j * (omega0 * t - outgoing_wavenumber(path.model, omega0) * x))

    def integrand(s):
        omega = path.omega(s)
        return (np.exp(-1j * path.phase(s)) - h0) * path.d_omega(s) / (omega - omega0)

    value, error = _complex_quad(integrand, low, high, quadrature, points=points)
    if subtract:
        value += h0 * _log_increment(path, omega0, low, high)
    return value, error, (low, high)


def contour_quadrature(model, source, x, t, quadrature=None, include_pole=True):
    """
    Integrate along the stph line(s) through the saddle(s), adding the pole
    residue on a small circle when the deformation sweeps across Ω₀.
    ``include_pole=False`` drops the circle, which isolates the pole part.
    """
    model = model.natural()
    quadrature = _settings(quadrature)
    if source.is_band_limited:
        raise DomainError("Contour quadrature covers sharp-onset sources; use band quadrature.")
    if not x > 0:
        raise DomainError("Contour quadrature needs x > 0.")
    if t <= 0:
        return OracleResult(0j, 0.0, Method.CONTOUR_QUADRATURE, {"paths": [], "reason": "t <= 0"})
    try:
        saddles = saddle(model, x, t)
    except CausalRegionError:
        return OracleResult(
            0j, 0.0, Method.CONTOUR_QUADRATURE, {"paths": [], "reason": "outside light cone"}
        )
    omega0 = source.kinetic_carrier(model)
    prefactor = 1j * source.amplitude / (2.0 * math.pi) * cmath.exp(-1j * model.potential * t)
    tail_target = quadrature.abs_tol * 1e-3 / max(abs(prefactor), 1e-300)
    decay = max(-math.log(tail_target), 40.0)

    paths = [StphPath(model, x, t, info) for info in saddles]
    crossings = [float(np.real(p.omega(s))) for p in paths for s in p.crossings]
    nearest = min(crossings, key=lambda c: abs(c - omega0))
    window = quadrature.pv_window * abs(nearest)

    total = 0j
    error = 0.0
    metadata = {"paths": [], "decay": decay}
    for path in paths:
        _check_sheets(path)
        path_crossings = [float(np.real(path.omega(s))) for s in path.crossings]
        subtract = any(abs(c - omega0) < window for c in path_crossings)
        value, path_error, span = _path_integral(path, omega0, quadrature, decay, subtract)
        total += value
        error += path_error
        metadata["paths"].append({
            "branch": path.info.branch.value,
            "parameter_range": list(span),
            "crossings": path_crossings,
            "pole_subtracted": subtract,
            "value": complex(prefactor * value),
        })
    psi = prefactor * total
    error = abs(prefactor) * (error + 2.0 * math.exp(-decay))

    swept = pole_swept(paths, omega0)
    metadata["pole_swept"] = swept
    if swept and include_pole:
        distances = [0.1 * abs(nearest - omega0), 0.01 * abs(omega0)]
        distances += [0.5 * abs(omega0 - b) for b in _branch_points(model)]
        radius = min(d for d in distances if d > 0)
        residue, residue_error = _circle_residue(model, omega0, x, t, radius)
        amplitude = source.amplitude * cmath.exp(-1j * model.potential * t)
        psi += amplitude * residue
        error += abs(amplitude) * residue_error
        metadata["circle_radius"] = radius
    if error > quadrature.rel_tol * abs(psi) + quadrature.abs_tol:
        logger.warning("contour quadrature at x=%r t=%r: error %.2e above tolerance", x, t, error)
    logger.debug("contour quadrature at x=%r t=%r: %r", x, t, psi)
    return OracleResult(complex(psi), error, Method.CONTOUR_QUADRATURE, metadata)


def best_oracle(model, source, x, t, quadrature=None):
    """Most analytically constrained oracle available for the given case."""
    natural = model.natural()
    if source.is_band_limited:
        return band_quadrature(natural, source, x, t, quadrature)
    if not natural.is_relativistic:
        if t == 0:
            return OracleResult(0j, 0.0, Method.CLOSED_FORM_NONREL)
        return exact_nonrel_sharp(natural, source, x, t)
    return contour_quadrature(natural, source, x, t, quadrature)


def schrodinger_residual(model, source, x, t, step=1e-3):
    """
    Finite-difference residual |i∂ψ/∂t + (1/2m)∂²ψ/∂x² − Vψ| / |A| of the
    closed-form solution, in natural units. Central differences of order two.
    """
    model = model.natural()
    if not (x > step and t > step):
        raise DomainError("The residual needs interior points (x, t > step).")

    def psi(xx, tt):
        return exact_nonrel_sharp(model, source, xx, tt).psi

    centre = psi(x, t)
    d_t = (psi(x, t + step) - psi(x, t - step)) / (2.0 * step)
    d_xx = (psi(x + step, t) - 2.0 * centre + psi(x - step, t)) / step ** 2
    residual = 1j * d_t + d_xx / (2.0 * model.mass) - model.potential * centre
    return abs(residual) / abs(source.amplitude)

