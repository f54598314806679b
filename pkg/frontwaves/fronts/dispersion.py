"""
Dispersion relations of the two particle models and the quantities derived
from them: outgoing-wave branch, wave classification, front and group
velocities, traversal times.

Kernels work in natural units (ℏ = 1). A model given in physical units is
rescaled on entry by ``DispersionModel.natural()``, which maps m ↦ m/ℏ and
V ↦ V/ℏ; lengths, times and frequencies keep their units.
"""
import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import BranchCutError, DomainError, ThresholdError


class Kind(str, enum.Enum):
    NONRELATIVISTIC = "nonrelativistic"
    RELATIVISTIC = "relativistic"


class Sheet(str, enum.Enum):
    UPPER = "upper"
    LOWER = "lower"


class WaveKind(str, enum.Enum):
    PROPAGATING = "propagating"
    EVANESCENT = "evanescent"


@dataclass(frozen=True)
class DispersionModel:
    """
    Medium parameters and dispersion kind.

    ``light_speed`` is only used by the relativistic model.
    """

    kind: Kind
    mass: float
    potential: float = 0.0
    light_speed: float | None = None
    hbar: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if not self.mass > 0:
            raise DomainError("mass must be positive.")
        if not self.hbar > 0:
            raise DomainError("hbar must be positive.")
        if self.kind is Kind.RELATIVISTIC:
            if self.light_speed is None or not self.light_speed > 0:
                raise DomainError("light_speed must be positive for the relativistic model.")

    @property
    def is_relativistic(self):
        return self.kind is Kind.RELATIVISTIC

    @property
    def rest_frequency(self):
        """mc²/ℏ, the relativistic threshold frequency."""
        if not self.is_relativistic:
            return None
        return self.mass * self.light_speed ** 2 / self.hbar

    def natural(self):
        """Return the same medium expressed with ℏ = 1."""
        if self.hbar == 1.0:
            return self
        return replace(
            self,
            mass=self.mass / self.hbar,
            potential=self.potential / self.hbar,
            hbar=1.0,
        )


@dataclass(frozen=True)
class SourceSpec:
    """
    Source at x = 0: amplitude A, carrier ω₀ and, for a band-limited source,
    the half-width Δω of the transmitted band. No band means a sharp onset.
    """

    amplitude: complex
    carrier: float
    band: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "amplitude", complex(self.amplitude))
        if self.amplitude == 0:
            raise DomainError("Source amplitude must be nonzero.")
        if self.band is not None and not self.band > 0:
            raise DomainError("Band half-width must be positive.")

    @property
    def is_band_limited(self):
        return self.band is not None

    def kinetic_carrier(self, model):
        return kinetic_frequency(model, self.carrier)

    def check_band(self, model):
        """Raise unless Δω < |Ω₀| (the whole band on one side of Ω = 0)."""
        if self.band is None:
            return
        omega0 = self.kinetic_carrier(model)
        if not self.band < abs(omega0):
            raise DomainError(
                f"Band half-width {self.band!r} must be smaller than |Ω₀| = {abs(omega0)!r}."
            )


def kinetic_frequency(model, omega):
    """Ω = ω − V/ℏ."""
    model = model.natural()
    return omega - model.potential


def _upper_wavenumber(model, omega):
    # Principal square roots put the cuts exactly on Ω ∈ [0, ∞) (non-rel)
    # and |Ω| ≥ mc²/ℏ (rel); Im k ≥ 0 everywhere on this sheet.
    if model.is_relativistic:
        mu = model.rest_frequency
        return 1j * np.sqrt(mu ** 2 - omega ** 2) / model.light_speed
    return 1j * np.sqrt(-2.0 * model.mass * omega)


def _on_cut(model, omega):
    real_axis = omega.imag == 0
    if model.is_relativistic:
        return real_axis & (np.abs(omega.real) >= model.rest_frequency)
    return real_axis & (omega.real >= 0)


def _boundary_value(model, omega_r):
    """Value on a cut approached from above: the outgoing propagating root."""
    if model.is_relativistic:
        mu = model.rest_frequency
        return np.sign(omega_r) * np.sqrt(np.abs(omega_r ** 2 - mu ** 2)) / model.light_speed
    return np.sqrt(2.0 * model.mass * np.abs(omega_r))


def wavenumber(model, omega, sheet=None):
    """
    Wavenumber k(Ω) on the requested sheet.

    Off the cuts ``sheet=None`` means the upper (physical) sheet. On a cut the
    sheet must be given; the upper sheet then returns the limit from above,
    which is the outgoing root. The lower sheet carries
    k_lower(Ω) = conj(k_upper(Ω*)) = −k_upper(Ω).
    Accepts scalars or arrays.
    """
    model = model.natural()
    z = np.asarray(omega, dtype=complex)
    k = _upper_wavenumber(model, z)
    cut = _on_cut(model, z)
    if np.any(cut):
        if sheet is None:
            raise BranchCutError(f"Ω = {omega!r} lies on a branch cut; specify a sheet.")
        k = np.where(cut, _boundary_value(model, z.real), k)
    if sheet is not None and Sheet(sheet) is Sheet.LOWER:
        k = -k
    if k.ndim == 0:
        return complex(k)
    return k


def outgoing_wavenumber(model, omega):
    """k(Ω) for real Ω obeying the outgoing-wave boundary condition."""
    return wavenumber(model, np.real(omega), Sheet.UPPER)


def _check_threshold(model, omega):
    if model.is_relativistic:
        if math.isclose(abs(omega), model.rest_frequency, rel_tol=1e-15):
            raise ThresholdError(f"|Ω| = {abs(omega)!r} sits on the threshold mc²/ℏ.")
    elif omega == 0:
        raise ThresholdError("Ω = 0 is the branch point of the non-relativistic model.")


def classify(model, omega):
    model = model.natural()
    _check_threshold(model, omega)
    if model.is_relativistic:
        propagating = abs(omega) > model.rest_frequency
    else:
        propagating = omega > 0
    return WaveKind.PROPAGATING if propagating else WaveKind.EVANESCENT


def front_velocity(model, omega0):
    """
    Velocity v_m of the monochromatic front.

    Non-rel: √(2ℏ|Ω₀|/m). Rel: c√(1 − (mc²/ℏΩ₀)²) above threshold and
    c√(1 − (ℏΩ₀/mc²)²) below it.
    """
    model = model.natural()
    _check_threshold(model, omega0)
    if not model.is_relativistic:
        return math.sqrt(2.0 * abs(omega0) / model.mass)
    if omega0 == 0:
        raise DomainError("The relativistic front velocity needs Ω₀ ≠ 0.")
    mu = model.rest_frequency
    c = model.light_speed
    if abs(omega0) > mu:
        return c * math.sqrt(1.0 - (mu / omega0) ** 2)
    return c * math.sqrt(1.0 - (omega0 / mu) ** 2)


def traversal_time(model, omega0, x):
    """τ = x / v_m."""
    return x / front_velocity(model, omega0)


def group_velocity(model, omega0):
    """v_g = dω/dk in the propagating range."""
    model = model.natural()
    if classify(model, omega0) is WaveKind.EVANESCENT:
        raise DomainError(f"Ω₀ = {omega0!r} is evanescent; the group velocity is undefined.")
    k = outgoing_wavenumber(model, omega0).real
    if model.is_relativistic:
        return model.light_speed ** 2 * k / omega0
    return k / model.mass
