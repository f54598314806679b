"""
The complex phase φ(Ω; x, t) = Ωt − k(Ω)x on its two sheets, its saddle
points and the lines of stationary phase (stph) through them.

The stph lines are also available as smooth parameterized paths
(``StphPath``), which is what the contour oracle integrates along:

* non-relativistic: Ω = Ω_s(1 + (1 − i)u − iu²/2), so Ω_r = Ω_s(1 + u) and
  φ = φ_s − iΩ_s t u²/2 exactly;
* relativistic: Ω = (mc²/ℏ)cosh θ with θ = θ_s + a − i·gd(a) on the + line,
  so φ = φ_s − i(mc²ϑ/ℏ)·sinh(a)tanh(a) exactly. The − line is its image under
  Ω ↦ −Ω*.

Along a path the wavenumber is the analytic continuation of the physical
branch, so the sheet bookkeeping of the paths is implicit.
"""
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .dispersion import Sheet, front_velocity, wavenumber
from .exceptions import CausalRegionError, ConvergenceError, DomainError


class Branch(str, enum.Enum):
    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class PhasePoint:
    omega: complex
    sheet: Sheet
    value: complex


@dataclass(frozen=True)
class SaddleInfo:
    """
    Saddle data for one branch.

    ``omega_s`` and ``k_s`` are signed locations: the − branch of the
    relativistic model sits at −Ω_s with wavenumber −k_s, phase −φ_s and
    curvature −φ_s″. ``theta`` is ϑ = √(t² − x²/c²) (relativistic only).
    """

    omega_s: float
    k_s: float
    phi_s: float
    curvature: float
    theta: float | None = None
    branch: Branch = Branch.PLUS

    @property
    def alpha(self):
        """|φ_s|: the decay scale of e^{−iφ} along the stph line."""
        return abs(self.phi_s)


def phase(model, omega, sheet, x, t):
    """φ = Ωt − k(Ω)x; accepts scalars or arrays of Ω."""
    return omega * t - wavenumber(model, omega, sheet) * x


def phase_point(model, omega, sheet, x, t):
    sheet = Sheet(sheet) if sheet is not None else Sheet.UPPER
    return PhasePoint(complex(omega), sheet, complex(phase(model, omega, sheet, x, t)))


def _check_point(x, t):
    if not (x > 0 and t > 0):
        raise DomainError(f"Saddle data need x > 0 and t > 0, got x={x!r}, t={t!r}.")


def saddle(model, x, t):
    """
    Saddle points of e^{−iφ}: one for the non-relativistic model, the pair
    (+Ω_s, −Ω_s) for the relativistic one.
    """
    model = model.natural()
    _check_point(x, t)
    m = model.mass
    if not model.is_relativistic:
        omega_s = m * x ** 2 / (2.0 * t ** 2)
        return (
            SaddleInfo(
                omega_s=omega_s,
                k_s=m * x / t,
                phi_s=-m * x ** 2 / (2.0 * t),
                curvature=t ** 3 / (m * x ** 2),
            ),
        )
    c = model.light_speed
    if x >= c * t:
        raise CausalRegionError(f"No saddle outside the light cone (x={x!r} ≥ ct={c * t!r}).")
    mu = model.rest_frequency
    theta = math.sqrt(t ** 2 - (x / c) ** 2)
    plus = SaddleInfo(
        omega_s=mu * t / theta,
        k_s=m * x / theta,
        phi_s=mu * theta,
        curvature=theta ** 3 / (m * x ** 2),
        theta=theta,
        branch=Branch.PLUS,
    )
    minus = SaddleInfo(
        omega_s=-plus.omega_s,
        k_s=-plus.k_s,
        phi_s=-plus.phi_s,
        curvature=-plus.curvature,
        theta=theta,
        branch=Branch.MINUS,
    )
    return plus, minus


def saddle_for(model, x, t, branch=Branch.PLUS):
    saddles = saddle(model, x, t)
    branch = Branch(branch)
    for info in saddles:
        if info.branch is branch:
            return info
    raise DomainError(f"The {model.kind.value} model has no {branch.value} saddle.")


@dataclass(frozen=True)
class SaddleResidual:
    slope: float
    curvature: float


def saddle_residual(model, x, t, branch=Branch.PLUS, step=1e-2):
    """
    Finite-difference check of a saddle on the real axis (upper-sheet limit).

    ``slope`` is |dφ/dΩ| relative to |φ_s″Ω_s| and ``curvature`` the relative
    mismatch of φ″ against φ_s″. Both derivatives are Richardson-extrapolated
    central differences with h = step·Ω_s (non-rel) or step·(|Ω_s| − mc²/ℏ).
    """
    model = model.natural()
    info = saddle_for(model, x, t, branch)
    omega_s = info.omega_s
    if model.is_relativistic:
        h = step * (abs(omega_s) - model.rest_frequency)
    else:
        h = step * omega_s

    def f(omega):
        return phase(model, omega, Sheet.UPPER, x, t).real

    def first(h):
        return (f(omega_s + h) - f(omega_s - h)) / (2.0 * h)

    def second(h):
        return (f(omega_s + h) - 2.0 * f(omega_s) + f(omega_s - h)) / h ** 2

    slope = (4.0 * first(0.5 * h) - first(h)) / 3.0
    curvature = (4.0 * second(0.5 * h) - second(h)) / 3.0
    return SaddleResidual(
        slope=abs(slope) / abs(info.curvature * omega_s),
        curvature=abs(curvature / info.curvature - 1.0),
    )


@dataclass(frozen=True)
class StphSupport:
    """Real Ω_r interval on which an stph line is a graph, and its axis crossings."""

    lower: float
    upper: float
    saddle_crossing: float
    other_crossing: float


def stph_support(model, x, t, branch=Branch.PLUS):
    model = model.natural()
    info = saddle_for(model, x, t, branch)
    if not model.is_relativistic:
        return StphSupport(-math.inf, math.inf, info.omega_s, -info.omega_s)
    mu = model.rest_frequency
    omega_s = abs(info.omega_s)
    spread = math.sqrt(omega_s ** 2 - mu ** 2)
    if info.branch is Branch.PLUS:
        return StphSupport(omega_s - spread, omega_s + spread, omega_s, mu ** 2 / omega_s)
    return StphSupport(-omega_s - spread, -omega_s + spread, -omega_s, -mu ** 2 / omega_s)


def stph_line(model, x, t, omega_r, branch=Branch.PLUS):
    """
    Ω_i on the stph line through the saddle of ``branch`` at abscissa Ω_r.

    Non-rel: the parabola Ω_i/Ω_s = ½[1 − (Ω_r/Ω_s)²]. Rel:
    Ω_i = −(Ω_r − Ω_s)(Ω_rΩ_s − μ²)/√((Ω_s² − μ²)(2Ω_rΩ_s − Ω_r² − μ²)), μ = mc²/ℏ,
    real only strictly between its two asymptotes.
    """
    model = model.natural()
    info = saddle_for(model, x, t, branch)
    omega_r = np.asarray(omega_r, dtype=float)
    if not model.is_relativistic:
        omega_s = info.omega_s
        result = 0.5 * omega_s * (1.0 - (omega_r / omega_s) ** 2)
    else:
        mu = model.rest_frequency
        omega_s = abs(info.omega_s)
        w = omega_r if info.branch is Branch.PLUS else -omega_r
        radicand = (omega_s ** 2 - mu ** 2) * (-(w ** 2) + 2.0 * w * omega_s - mu ** 2)
        if np.any(radicand <= 0):
            support = stph_support(model, x, t, branch)
            raise DomainError(
                f"Ω_r outside the stph support ({support.lower!r}, {support.upper!r})."
            )
        result = -(w - omega_s) * (w * omega_s - mu ** 2) / np.sqrt(radicand)
    if result.ndim == 0:
        return float(result)
    return result


def _lower_sheet_mask(info, omega_r, omega_i):
    # Beyond the saddle the line has passed through the cut onto the lower sheet.
    beyond = omega_r > info.omega_s if info.omega_s > 0 else omega_r < info.omega_s
    return beyond & (omega_i < 0)


def phase_on_stph(model, x, t, omega_r, branch=Branch.PLUS):
    """
    φ on the stph line. Closed form for the non-relativistic model,
    numerical evaluation on the correct sheet for the relativistic one.
    """
    model = model.natural()
    info = saddle_for(model, x, t, branch)
    omega_r = np.asarray(omega_r, dtype=float)
    if not model.is_relativistic:
        result = info.phi_s * (1.0 + 0.5j * (1.0 - omega_r / info.omega_s) ** 2)
    else:
        omega_i = np.asarray(stph_line(model, x, t, omega_r, branch))
        omega = omega_r + 1j * omega_i
        k = np.asarray(wavenumber(model, omega, Sheet.UPPER))
        k = np.where(_lower_sheet_mask(info, omega_r, omega_i), -k, k)
        result = omega * t - k * x
    if np.ndim(result) == 0:
        return complex(result)
    return result


def _gd(a):
    return np.arctan(np.sinh(a))


@dataclass(frozen=True)
class StphPath:
    """
    Smooth parameterization s ↦ Ω(s) of one stph line, left to right.

    ``crossings`` holds the parameter values at which the path meets the real
    Ω axis: the saddle first, then the other crossing.
    """

    model: object
    x: float
    t: float
    info: SaddleInfo

    @classmethod
    def through(cls, model, x, t, branch=Branch.PLUS):
        model = model.natural()
        return cls(model, x, t, saddle_for(model, x, t, branch))

    @property
    def _theta_s(self):
        return math.atanh(self.x / (self.model.light_speed * self.t))

    @property
    def crossings(self):
        if not self.model.is_relativistic:
            return (0.0, -2.0)
        if self.info.branch is Branch.PLUS:
            return (0.0, -self._theta_s)
        return (0.0, self._theta_s)

    def _rapidity(self, s):
        s = np.asarray(s, dtype=float)
        if self.info.branch is Branch.PLUS:
            return self._theta_s + s - 1j * _gd(s), 1.0 - 1j / np.cosh(s)
        return self._theta_s - s - 1j * _gd(s) + 1j * math.pi, -1.0 - 1j / np.cosh(s)

    def omega(self, s):
        if not self.model.is_relativistic:
            u = np.asarray(s, dtype=float)
            return self.info.omega_s * (1.0 + (1.0 - 1j) * u - 0.5j * u ** 2)
        theta, _ = self._rapidity(s)
        return self.model.rest_frequency * np.cosh(theta)

    def d_omega(self, s):
        if not self.model.is_relativistic:
            u = np.asarray(s, dtype=float)
            return self.info.omega_s * (1.0 - 1j - 1j * u)
        theta, d_theta = self._rapidity(s)
        return self.model.rest_frequency * np.sinh(theta) * d_theta

    def wavenumber(self, s):
        if not self.model.is_relativistic:
            u = np.asarray(s, dtype=float)
            return self.info.k_s * (1.0 + 0.5 * (1.0 - 1j) * u)
        theta, _ = self._rapidity(s)
        return self.model.rest_frequency * np.sinh(theta) / self.model.light_speed

    def phase(self, s):
        """φ along the path; Re φ = φ_s identically."""
        s = np.asarray(s, dtype=float)
        if not self.model.is_relativistic:
            return self.info.phi_s - 0.5j * self.info.alpha * s ** 2
        return self.info.phi_s - 1j * self.info.alpha * np.sinh(s) * np.tanh(s)

    def parameter_range(self, decay):
        """
        Interval of s outside which Im φ < −decay, widened to contain both
        real-axis crossings with one unit of margin.
        """
        if not self.model.is_relativistic:
            reach = math.sqrt(2.0 * decay / self.info.alpha)
        else:
            target = decay / self.info.alpha
            reach = math.acosh(0.5 * (target + math.sqrt(target ** 2 + 4.0)))
        low = min(self.crossings) - 1.0
        high = max(self.crossings) + 1.0
        return min(-reach, low), max(reach, high)


def relevant_crossing(model, x, t, omega0):
    """
    The real-axis crossing of the stph lines that can meet the pole Ω₀ at
    time t: ±Ω_s (propagating), −Ω_s (non-rel evanescent), ±(mc²/ℏ)²/Ω_s (rel
    evanescent). Sign follows Ω₀.
    """
    model = model.natural()
    info = saddle_for(model, x, t, Branch.PLUS)
    sign = 1.0 if omega0 > 0 else -1.0
    if not model.is_relativistic:
        return sign * info.omega_s
    mu = model.rest_frequency
    if abs(omega0) > mu:
        return sign * info.omega_s
    return sign * mu ** 2 / info.omega_s


def pole_crossing_time(model, omega0, x):
    """t at which the stph crossing reaches the pole: x / v_m."""
    return x / front_velocity(model, omega0)


def detect_crossing_time(model, omega0, x, rtol=1e-14):
    """Locate the pole crossing time numerically from ``relevant_crossing``."""
    model = model.natural()
    front_velocity(model, omega0)
    if x == 0:
        return 0.0

    def gap(t):
        return abs(relevant_crossing(model, x, t, omega0)) - abs(omega0)

    if model.is_relativistic:
        start = x / model.light_speed * (1.0 + 1e-12)
    else:
        start = x * 1e-6
    early = start
    late = 2.0 * start
    for _ in range(200):
        if np.sign(gap(early)) != np.sign(gap(late)):
            break
        early, late = late, 2.0 * late
    else:
        raise ConvergenceError("Could not bracket the pole crossing time.")
    return optimize.brentq(gap, early, late, xtol=1e-300, rtol=rtol)
