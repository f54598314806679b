"""
Phase maps: φ(Ω; x, t) sampled on a rectangle of the complex Ω plane, one
sheet at a time, and the level lines of its normalized real and imaginary
parts.

Level lines are traced with contourpy's marching squares. Nodes next to a
branch cut are masked, so lines stop at the cut instead of running onto the
other sheet; a two-sheet picture is the overlay of two maps.
"""
import enum
import logging
import math
from dataclasses import dataclass

import numpy as np
from contourpy import LineType, contour_generator
from scipy import optimize

from fronts.dispersion import Sheet, wavenumber
from fronts.exceptions import CausalRegionError, DomainError
from fronts.phase import phase_point, saddle

logger = logging.getLogger(__name__)


class Quantity(str, enum.Enum):
    RE_NORMALIZED = "re"
    IM_NORMALIZED = "im"


@dataclass(frozen=True)
class Window:
    omega_r_min: float
    omega_r_max: float
    omega_i_min: float
    omega_i_max: float

    def __post_init__(self):
        if not (self.omega_r_min < self.omega_r_max and self.omega_i_min < self.omega_i_max):
            raise DomainError(f"Degenerate phase-map window {self!r}.")

    def as_list(self):
        return [self.omega_r_min, self.omega_r_max, self.omega_i_min, self.omega_i_max]


@dataclass(frozen=True)
class PhaseGrid:
    """
    φ on the nodes of ``window``; ``values[j, i]`` sits at
    (omega_r[i], omega_i[j]). ``normalized`` divides by ``normalization``.
    """

    window: Window
    sheet: Sheet
    omega_r: np.ndarray
    omega_i: np.ndarray
    values: np.ndarray
    cut_mask: np.ndarray
    normalization: float

    @property
    def resolution(self):
        return len(self.omega_r), len(self.omega_i)

    @property
    def spacing(self):
        return self.omega_r[1] - self.omega_r[0], self.omega_i[1] - self.omega_i[0]

    @property
    def normalized(self):
        return self.values / self.normalization

    def quantity(self, quantity):
        quantity = Quantity(quantity)
        if quantity is Quantity.RE_NORMALIZED:
            return self.normalized.real
        return self.normalized.imag


@dataclass(frozen=True)
class ContourPolyline:
    level: float
    quantity: Quantity
    sheet: Sheet
    segment_id: int
    points: np.ndarray


def normalization(model, x, t):
    """
    Level unit of the map: φ_s for the non-relativistic model and
    (mc/ℏ)√|c²t² − x²| for the relativistic one.
    """
    model = model.natural()
    if not model.is_relativistic:
        return saddle(model, x, t)[0].phi_s
    c = model.light_speed
    scale = model.rest_frequency * math.sqrt(abs(t ** 2 - (x / c) ** 2))
    if scale == 0:
        raise DomainError("The relativistic map is undefined on the light cone x = ct.")
    return scale


def _cut_mask(model, omega_r, omega_i, dy):
    near_axis = np.abs(omega_i)[:, None] < dy
    if model.is_relativistic:
        on_cut = np.abs(omega_r) >= model.rest_frequency
    else:
        on_cut = omega_r >= 0
    return near_axis & on_cut[None, :]


def build_grid(model, x, t, window, resolution, sheet=Sheet.UPPER):
    model = model.natural()
    if not isinstance(window, Window):
        window = Window(*window)
    nx, ny = resolution
    if nx < 2 or ny < 2:
        raise DomainError("A phase map needs at least 2×2 nodes.")
    sheet = Sheet(sheet)
    omega_r = np.linspace(window.omega_r_min, window.omega_r_max, nx)
    omega_i = np.linspace(window.omega_i_min, window.omega_i_max, ny)
    nodes = omega_r[None, :] + 1j * omega_i[:, None]
    values = nodes * t - np.asarray(wavenumber(model, nodes, sheet)) * x
    grid = PhaseGrid(
        window=window,
        sheet=sheet,
        omega_r=omega_r,
        omega_i=omega_i,
        values=values,
        cut_mask=_cut_mask(model, omega_r, omega_i, omega_i[1] - omega_i[0]),
        normalization=normalization(model, x, t),
    )
    logger.debug("phase map %dx%d on the %s sheet, %d nodes masked", nx, ny, sheet.value, grid.cut_mask.sum())
    return grid


def default_window(model, x, t, omega0=None, margin=0.5):
    """Window holding the saddle(s), their real-axis crossings and, if given, the pole."""
    model = model.natural()
    points = []
    try:
        for info in saddle(model, x, t):
            points.append(info.omega_s)
            if model.is_relativistic:
                points.append(model.rest_frequency ** 2 / info.omega_s)
            else:
                points.append(-info.omega_s)
    except CausalRegionError:
        mu = model.rest_frequency
        points.extend([-2.0 * mu, 2.0 * mu])
    if omega0 is not None:
        points.append(omega0)
    low, high = min(points), max(points)
    pad = margin * max(high - low, abs(high), abs(low))
    height = 0.75 * (high - low + 2.0 * pad)
    return Window(low - pad, high + pad, -height, 0.5 * height)


def extract_contours(grid, levels, quantity=Quantity.RE_NORMALIZED):
    """Polylines of the requested levels; a level absent from the window yields nothing."""
    quantity = Quantity(quantity)
    z = grid.quantity(quantity)
    z = np.ma.masked_array(z, mask=grid.cut_mask | ~np.isfinite(z))
    generator = contour_generator(grid.omega_r, grid.omega_i, z, line_type=LineType.Separate)
    polylines = []
    for level in levels:
        for points in generator.lines(level):
            if len(points) < 2:
                continue
            polylines.append(
                ContourPolyline(float(level), quantity, grid.sheet, len(polylines), np.asarray(points))
            )
    return polylines


def _axis_value(model, x, t, sheet, norm, quantity):
    def value(omega_r):
        phi = omega_r * t - wavenumber(model, complex(omega_r), sheet) * x
        phi /= norm
        return phi.real if quantity is Quantity.RE_NORMALIZED else phi.imag

    return value


def real_axis_crossings(model, x, t, grid, polylines, level, tol=1e-7):
    """
    Where the polylines of ``level`` meet the real Ω axis, polished on the
    axis itself (limit from above). Simple crossings are bracketed with
    brentq; a tangential crossing, such as a saddle on the axis, is found as
    the minimum of |level residual|.
    """
    model = model.natural()
    dx, dy = grid.spacing
    seeds = []
    for line in polylines:
        if line.level != level:
            continue
        near = line.points[np.abs(line.points[:, 1]) <= 2.5 * dy]
        seeds.extend(near[:, 0].tolist())
    if not seeds:
        return []
    seeds.sort()
    clusters = [[seeds[0]]]
    for value in seeds[1:]:
        if value - clusters[-1][-1] > 3.0 * dx:
            clusters.append([value])
        else:
            clusters[-1].append(value)

    quantity = polylines[0].quantity
    residual = _axis_value(model, x, t, grid.sheet, grid.normalization, quantity)

    def g(omega_r):
        return residual(omega_r) - level

    roots = []
    for cluster in clusters:
        centre = float(np.mean(cluster))
        low = max(centre - 4.0 * dx, grid.window.omega_r_min)
        high = min(centre + 4.0 * dx, grid.window.omega_r_max)
        if np.sign(g(low)) != np.sign(g(high)):
            root = optimize.brentq(g, low, high, xtol=1e-14 * max(abs(centre), 1.0))
        else:
            found = optimize.minimize_scalar(
                lambda w: abs(g(w)), bounds=(low, high), method="bounded",
                options={"xatol": 1e-12 * max(abs(centre), 1.0)},
            )
            if abs(found.fun) > tol:
                continue
            root = float(found.x)
        if not any(abs(root - other) < dx for other in roots):
            roots.append(root)
    return sorted(roots)


def saddle_points(model, x, t):
    """Saddle locations inside the map, empty outside the light cone."""
    try:
        return [info.omega_s for info in saddle(model, x, t)]
    except CausalRegionError:
        return []


def saddle_phases(model, x, t):
    """Upper-sheet phase points at the saddles, empty outside the light cone."""
    return [phase_point(model, omega, Sheet.UPPER, x, t) for omega in saddle_points(model, x, t)]


def polyline_rows(polylines):
    """Flat rows (quantity, level, sheet, Ω_r, Ω_i, segment_id) for CSV output."""
    for line in polylines:
        for omega_r, omega_i in line.points:
            yield [line.quantity.value, line.level, line.sheet.value, float(omega_r), float(omega_i), line.segment_id]

