"""
Analytic decomposition of ψ(x, t) into the monochromatic pole part ψ_p and the
forerunner (saddle) parts ψ_s±.

All formulas are written in natural units; the model is rescaled on entry.
"""
import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .dispersion import WaveKind, classify, front_velocity, outgoing_wavenumber
from .exceptions import CausalRegionError, DomainError, RegimeError, WindowError
from .phase import Branch, relevant_crossing, saddle, saddle_for


class MiddleFormula(str, enum.Enum):
    SINH = "sinh"
    ARCTAN = "arctan"


@dataclass(frozen=True)
class BandSegments:
    """
    The three pieces of the band-limited forerunner: along the constant-Im φ
    line through Ω₋, along the stph line, and along the line through Ω₊.
    """

    psi_minus_seg: complex
    psi_stph_seg: complex
    psi_plus_seg: complex
    u_plus: float
    u_minus: float
    w0: float
    alpha: float
    middle_formula: MiddleFormula
    middle_alternative: complex | None
    edge_factor_plus: float
    edge_factor_minus: float
    quoted_edge_factor_plus: float
    quoted_edge_factor_minus: float

    @property
    def total(self):
        return self.psi_minus_seg + self.psi_stph_seg + self.psi_plus_seg


@dataclass(frozen=True)
class WaveDecomposition:
    psi_p: complex
    psi_s_plus: complex
    psi_s_minus: complex
    gauss_validity: float
    near_front: bool
    front_active: bool
    causal: bool = True
    gauss_validity_minus: float | None = None
    band: BandSegments | None = None

    @property
    def psi_total(self):
        return self.psi_p + self.psi_s_plus + self.psi_s_minus


@dataclass(frozen=True)
class FrontJump:
    pole_jump: complex
    saddle_jump: complex

    @property
    def residual(self):
        return abs(self.pole_jump + self.saddle_jump)


@dataclass(frozen=True)
class TailEstimate:
    regime: str
    exponent: float
    asymptotic_exponent: float


def _carrier(model, source):
    return source.kinetic_carrier(model)


def front_active(model, omega0, x, t):
    """Θ(v_m t − x), with the front itself on the inactive side."""
    return front_velocity(model, omega0) * t > x


def pole_contribution(model, source, x, t):
    """ψ_p = A e^{−i(V/ℏ + Ω₀)t} e^{ik(Ω₀)x} Θ(v_m t − x)."""
    model = model.natural()
    omega0 = _carrier(model, source)
    if not front_active(model, omega0, x, t):
        return 0j
    k0 = outgoing_wavenumber(model, omega0)
    return source.amplitude * cmath.exp(-1j * (model.potential + omega0) * t) * cmath.exp(1j * k0 * x)


def gauss_validity(model, omega0, x, t, branch=Branch.PLUS):
    """φ_s″(Ω_s ∓ Ω₀)²: squared pole–saddle distance in saddle widths."""
    info = saddle_for(model, x, t, branch)
    return abs(info.curvature) * (info.omega_s - omega0) ** 2


def _gauss_term(model, source, omega0, info, t):
    prefactor = 1j * source.amplitude / (2.0 * math.pi)
    width = cmath.sqrt(-2j * math.pi / info.curvature)
    phase = cmath.exp(-1j * (model.potential * t + info.phi_s))
    return prefactor * width * phase / (info.omega_s - omega0)


def saddle_gauss(model, source, x, t):
    """
    Forerunner in Gauss approximation, one value per branch (ψ_s+, ψ_s−).

    The − value is zero for the non-relativistic model; both vanish outside
    the light cone.
    """
    model = model.natural()
    if source.is_band_limited:
        raise DomainError("The Gauss forerunner applies to sharp-onset sources; use band_segments.")
    omega0 = _carrier(model, source)
    try:
        saddles = saddle(model, x, t)
    except CausalRegionError:
        return 0j, 0j
    terms = [_gauss_term(model, source, omega0, info, t) for info in saddles]
    if len(terms) == 1:
        terms.append(0j)
    return terms[0], terms[1]


def _branch_for(model, omega0):
    if model.is_relativistic and omega0 < 0:
        return Branch.MINUS
    return Branch.PLUS


def _slope_at(model, omega, x, t):
    # |dφ/dΩ| at a real evanescent frequency.
    k = outgoing_wavenumber(model, omega)
    if model.is_relativistic:
        dk = omega / (model.light_speed ** 2 * k)
    else:
        dk = model.mass / k
    return abs(t - x * dk)


def front_proximity(model, omega0, x, t):
    """
    How far the pole is from its stph crossing, in units of the local scale of
    the integrand: φ_s″(Ω_s − Ω₀)² for propagating carriers (a saddle
    crossing) and |dφ/dΩ|·|Ω_c − Ω₀| at the non-saddle crossing Ω_c for
    evanescent ones. Values below one mark the near-front window.
    """
    model = model.natural()
    if classify(model, omega0) is WaveKind.PROPAGATING:
        return gauss_validity(model, omega0, x, t, _branch_for(model, omega0))
    crossing = relevant_crossing(model, x, t, omega0)
    return _slope_at(model, crossing, x, t) * abs(crossing - omega0)


def near_front_limit(model, source, x, t):
    """
    Saddle contribution in the immediate neighbourhood of x = v_m t:
    −(A/2) e^{−iVt/ℏ} e^{−iφ_s} sign(v_m t − x), times e^{−(m/ℏ)x²/t} for an
    evanescent carrier. Its jump cancels the jump of ψ_p.
    """
    model = model.natural()
    omega0 = _carrier(model, source)
    try:
        proximity = front_proximity(model, omega0, x, t)
    except CausalRegionError as exc:
        raise WindowError("Point lies outside the light cone, far from any front.") from exc
    if not proximity < 1.0:
        raise WindowError(f"Point is not near the front (proximity {proximity:.3g} ≥ 1).")
    info = saddle_for(model, x, t, _branch_for(model, omega0))
    side = float(np.sign(front_velocity(model, omega0) * t - x))
    value = -0.5 * source.amplitude * cmath.exp(-1j * (model.potential * t + info.phi_s)) * side
    if classify(model, omega0) is WaveKind.EVANESCENT:
        value *= math.exp(-model.mass * x ** 2 / t)
    return value


def front_jumps(model, source, x, epsilon=1e-12):
    """Measure the jumps of ψ_p and of the near-front ψ_s across t = x/v_m."""
    model = model.natural()
    tau = x / front_velocity(model, _carrier(model, source))
    before, after = tau * (1.0 - epsilon), tau * (1.0 + epsilon)
    pole_jump = pole_contribution(model, source, x, after) - pole_contribution(model, source, x, before)
    saddle_jump = near_front_limit(model, source, x, after) - near_front_limit(model, source, x, before)
    return FrontJump(pole_jump, saddle_jump)


def phase_matching_residual(model, omega0, x, t):
    """
    Mismatch between the real phases of ψ_p and ψ_s at (x, t); it vanishes
    at x = v_m t.
    """
    model = model.natural()
    kind = classify(model, omega0)
    k0 = abs(outgoing_wavenumber(model, omega0))
    if model.is_relativistic:
        c = model.light_speed
        if x > c * t:
            raise DomainError("Phase matching is only defined inside the light cone.")
        forerunner = model.rest_frequency * math.sqrt(max(t ** 2 - (x / c) ** 2, 0.0))
    else:
        forerunner = -model.mass * x ** 2 / (2.0 * t)
    if kind is WaveKind.PROPAGATING:
        return abs(omega0) * t - k0 * x - forerunner
    if model.is_relativistic:
        return abs(omega0) * t - forerunner
    return -abs(omega0) * t - forerunner


def _matching_slope(model, omega0, v):
    k0 = abs(outgoing_wavenumber(model, omega0))
    if model.is_relativistic:
        c = model.light_speed
        return -k0 + model.rest_frequency * v / (c ** 2 * math.sqrt(1.0 - (v / c) ** 2))
    return -k0 + model.mass * v


def phase_matching_velocity(model, omega0):
    """
    Front velocity re-derived from phase matching at t = 1. Evanescent
    carriers give a simple root; propagating ones a double root, located
    through the vanishing slope.
    """
    model = model.natural()
    kind = classify(model, omega0)
    if model.is_relativistic:
        upper = model.light_speed * (1.0 - 1e-12)
    else:
        upper = 1.0
        while phase_matching_residual(model, omega0, upper, 1.0) <= 0 or _matching_slope(model, omega0, upper) <= 0:
            upper *= 2.0
    if kind is WaveKind.EVANESCENT:
        return optimize.brentq(lambda v: phase_matching_residual(model, omega0, v, 1.0), 0.0, upper, xtol=1e-300, rtol=1e-15)
    return optimize.brentq(lambda v: _matching_slope(model, omega0, v), 0.0, upper, xtol=1e-300, rtol=1e-15)


def decompose(model, source, x, t, **band_options):
    """
    Full analytic decomposition at one point. Band-limited sources report
    their forerunner as the sum of the band segments in ``psi_s_plus``.
    """
    model = model.natural()
    omega0 = _carrier(model, source)
    psi_p = pole_contribution(model, source, x, t)
    active = front_active(model, omega0, x, t)
    if t <= 0 and not source.is_band_limited:
        return WaveDecomposition(
            psi_p=0j, psi_s_plus=0j, psi_s_minus=0j, gauss_validity=0.0,
            near_front=False, front_active=False,
        )
    try:
        saddles = saddle(model, x, t)
    except CausalRegionError:
        return WaveDecomposition(
            psi_p=psi_p, psi_s_plus=0j, psi_s_minus=0j, gauss_validity=0.0,
            near_front=False, front_active=active, causal=False,
        )
    validities = [abs(info.curvature) * (info.omega_s - omega0) ** 2 for info in saddles]
    near = front_proximity(model, omega0, x, t) < 1.0
    minus_validity = validities[1] if len(validities) > 1 else None
    if source.is_band_limited:
        band = band_segments(model, source, x, t, **band_options)
        return WaveDecomposition(
            psi_p=psi_p, psi_s_plus=band.total, psi_s_minus=0j, gauss_validity=validities[0],
            near_front=near, front_active=active, band=band,
        )
    plus, minus = saddle_gauss(model, source, x, t)
    if near and classify(model, omega0) is WaveKind.PROPAGATING:
        jump = near_front_limit(model, source, x, t)
        if _branch_for(model, omega0) is Branch.MINUS:
            minus = jump
        else:
            plus = jump
    return WaveDecomposition(
        psi_p=psi_p, psi_s_plus=plus, psi_s_minus=minus, gauss_validity=validities[0],
        near_front=near, front_active=active, gauss_validity_minus=minus_validity,
    )


def _check_band_regime(model, source, omega0, x, ratio_limit, tau_limit):
    if model.is_relativistic:
        raise DomainError("Band-limited analysis covers the non-relativistic model only.")
    if not source.is_band_limited:
        raise DomainError("Band segments need a band-limited source.")
    source.check_band(model)
    if classify(model, omega0) is not WaveKind.EVANESCENT:
        raise RegimeError("Band segments describe an evanescent carrier.")
    ratio = source.band / abs(omega0)
    if ratio > ratio_limit:
        raise RegimeError(f"Δω/|Ω₀| = {ratio:.3g} exceeds {ratio_limit:.3g}.")
    tau = x / front_velocity(model, omega0)
    if source.band * tau < tau_limit:
        raise RegimeError(f"Δω·τ = {source.band * tau:.3g} is below {tau_limit:.3g}.")


def band_segments(model, source, x, t, ratio_limit=0.5, tau_limit=0.05, switch_band=3.0):
    """
    Linearized three-segment forerunner of a band-limited source around the
    time at which −Ω_s passes the pole.
    """
    model = model.natural()
    omega0 = _carrier(model, source)
    _check_band_regime(model, source, omega0, x, ratio_limit, tau_limit)
    info = saddle_for(model, x, t)
    band = source.band
    amplitude = source.amplitude
    m = model.mass
    omega_s = info.omega_s
    alpha = omega_s * t
    w0 = (abs(omega0) - omega_s) / omega_s
    u_plus = -w0 + band / omega_s
    u_minus = -w0 - band / omega_s

    common = (
        cmath.exp(-1j * (model.potential * t - m * x ** 2 / (2.0 * t)))
        * math.exp(-m * x ** 2 / t)
    )
    prefactor = (1 + 1j) * amplitude / (2.0 * math.pi)

    def edge(u):
        return (
            prefactor / (band * t) * common
            * cmath.exp((1.0 - 0.5j) * alpha * u) * math.sin(alpha * u / 2.0)
        )

    detuning = omega_s - abs(omega0)

    def sinh_middle():
        d = detuning * t
        return prefactor / d * common * math.exp(d) * math.sinh(band * t)

    def arctan_middle():
        angle = math.pi / 2.0 if detuning == 0 else math.atan(band / detuning)
        return amplitude / math.pi * common * math.exp(band * t) * angle

    switch = band / abs(omega0)
    formula = MiddleFormula.SINH if abs(w0) > switch else MiddleFormula.ARCTAN
    middle = sinh_middle() if formula is MiddleFormula.SINH else arctan_middle()
    alternative = None
    if detuning != 0 and switch / switch_band <= abs(w0) <= switch * switch_band:
        alternative = arctan_middle() if formula is MiddleFormula.SINH else sinh_middle()

    quoted = m * front_velocity(model, omega0) * x * band / abs(omega0)
    return BandSegments(
        psi_minus_seg=edge(u_minus),
        psi_stph_seg=middle,
        psi_plus_seg=edge(u_plus),
        u_plus=u_plus,
        u_minus=u_minus,
        w0=w0,
        alpha=alpha,
        middle_formula=formula,
        middle_alternative=alternative,
        edge_factor_plus=math.exp(alpha * u_plus),
        edge_factor_minus=math.exp(alpha * u_minus),
        quoted_edge_factor_plus=math.exp(quoted),
        quoted_edge_factor_minus=math.exp(-quoted),
    )


def band_tail_estimates(model, source, x, t, short_ratio=0.2, long_ratio=5.0):
    """
    Governing exponent of the band-limited forerunner well before or well
    after τ: −½Ω_s t·|1 − (Ω₊/Ω_s)²|, with its short-time (−½Ω_s t) and
    long-time (−½Ω₊²t/Ω_s ∝ −t³) forms.
    """
    model = model.natural()
    omega0 = _carrier(model, source)
    if model.is_relativistic or not source.is_band_limited:
        raise DomainError("Tail estimates need a non-relativistic band-limited source.")
    source.check_band(model)
    tau = x / front_velocity(model, omega0)
    omega_s = saddle_for(model, x, t).omega_s
    top = omega0 + source.band
    exponent = -0.5 * omega_s * t * abs(1.0 - (top / omega_s) ** 2)
    ratio = t / tau
    if ratio <= short_ratio:
        return TailEstimate("short", exponent, -0.5 * omega_s * t)
    if ratio >= long_ratio:
        return TailEstimate("long", exponent, -0.5 * top ** 2 * t / omega_s)
    raise RegimeError(f"t/τ = {ratio:.3g} lies in the window around τ.")
