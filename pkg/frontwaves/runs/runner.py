"""
Grid evaluation behind the management commands.

Each grid point is evaluated independently, optionally on a process pool;
results always come back in grid order (x outer, t inner). A point that
fails keeps its row, with the error text in the ``error`` column.
"""
import logging
import math
import multiprocessing
import time
from functools import partial

import contourpy
import django
import numpy as np
import scipy
from django.conf import settings

import frontwaves
from fronts.decomposition import band_tail_estimates, decompose, phase_matching_velocity
from fronts.dispersion import Sheet, classify, front_velocity
from fronts.exceptions import ConvergenceError, FrontwavesError, RegimeError, ThresholdError
from fronts.oracle import best_oracle, contour_quadrature
from phasemaps.grid import (
    Quantity,
    build_grid,
    extract_contours,
    normalization,
    polyline_rows,
    real_axis_crossings,
    saddle_phases,
    saddle_points,
)

from .serializers import RunMethod, RunRecord

logger = logging.getLogger(__name__)

SIMULATE_COLUMNS = ["x", "t", "method", "psi_re", "psi_im", "est_error", "causal"]
CROSS_CHECK_COLUMNS = ["analytic_re", "analytic_im", "analytic_error", "discrepancy"]
DECOMPOSE_COLUMNS = [
    "x", "t", "method",
    "psi_p_re", "psi_p_im",
    "psi_s_plus_re", "psi_s_plus_im",
    "psi_s_minus_re", "psi_s_minus_im",
    "psi_total_re", "psi_total_im",
    "gauss_validity", "gauss_validity_minus",
    "near_front", "front_active", "causal",
]
BAND_COLUMNS = [
    "u_plus", "u_minus", "w0", "alpha", "middle_formula",
    "psi_minus_seg_re", "psi_minus_seg_im",
    "psi_stph_seg_re", "psi_stph_seg_im",
    "psi_plus_seg_re", "psi_plus_seg_im",
    "middle_alternative_re", "middle_alternative_im",
    "edge_factor_plus", "edge_factor_minus",
    "quoted_edge_factor_plus", "quoted_edge_factor_minus",
    "tail_regime", "tail_exponent",
]
FRONT_COLUMNS = ["energy", "omega0", "regime", "v_m", "v_m_over_c", "v_m_matching", "tau", "flagged", "error"]
PHASEMAP_COLUMNS = ["quantity", "level", "sheet", "omega_r", "omega_i", "segment_id"]


def versions():
    return {
        "frontwaves": frontwaves.__version__,
        "django": django.get_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "contourpy": contourpy.__version__,
    }


def band_options():
    conf = settings.FRONTWAVES
    return {
        "ratio_limit": conf["BAND_RATIO_LIMIT"],
        "tau_limit": conf["BAND_TAU_LIMIT"],
        "switch_band": conf["BAND_SWITCH_BAND"],
    }


def tail_options():
    conf = settings.FRONTWAVES
    return {"short_ratio": conf["TAIL_SHORT_RATIO"], "long_ratio": conf["TAIL_LONG_RATIO"]}


def _put_complex(row, name, value):
    if value is None:
        row[f"{name}_re"] = row[f"{name}_im"] = None
        return
    value = complex(value)
    row[f"{name}_re"] = value.real
    row[f"{name}_im"] = value.imag


def _is_causal(model, x, t):
    model = model.natural()
    return not (model.is_relativistic and x > model.light_speed * t)


def _record_error(row, exc):
    message = f"{type(exc).__name__}: {exc}"
    row["error"] = message if not row.get("error") else f"{row['error']}; {message}"
    row["_exit_code"] = max(row.get("_exit_code", 0), exc.exit_code)


def _cross_discrepancy(config, x, t, psi):
    """Closed form against contour quadrature, relative to the field scale."""
    model = config.model.natural()
    if model.is_relativistic or config.source.is_band_limited or not (x > 0 and t > 0):
        return None
    contour = contour_quadrature(model, config.source, x, t, config.settings).psi
    amplitude = abs(config.source.amplitude)
    scale = max(abs(psi), amplitude * math.exp(-model.mass * x ** 2 / t))
    return abs(contour - psi) / scale


def simulate_point(config, x, t, options):
    row = {"x": x, "t": t, "causal": _is_causal(config.model, x, t), "error": None}
    oracle = None
    if config.method in (RunMethod.ORACLE, RunMethod.BOTH):
        try:
            result = best_oracle(config.model, config.source, x, t, config.settings)
            oracle = result.psi
            row["method"] = result.method.value
            row["est_error"] = result.est_error
            _put_complex(row, "psi", oracle)
        except FrontwavesError as exc:
            _record_error(row, exc)
    if config.method is RunMethod.ANALYTIC:
        row["method"] = RunMethod.ANALYTIC.value
        try:
            _put_complex(row, "psi", decompose(config.model, config.source, x, t, **options).psi_total)
        except FrontwavesError as exc:
            _record_error(row, exc)
    if config.method is RunMethod.BOTH:
        try:
            analytic = decompose(config.model, config.source, x, t, **options).psi_total
            _put_complex(row, "analytic", analytic)
            if oracle is not None:
                row["analytic_error"] = abs(analytic - oracle)
        except FrontwavesError as exc:
            _record_error(row, exc)
        if oracle is not None:
            try:
                row["discrepancy"] = _cross_discrepancy(config, x, t, oracle)
            except FrontwavesError as exc:
                _record_error(row, exc)
    return row


def _put_tail(row, config, x, t, tails):
    try:
        tail = band_tail_estimates(config.model, config.source, x, t, **tails)
    except RegimeError:
        row["tail_regime"], row["tail_exponent"] = "window", None
        return
    row["tail_regime"], row["tail_exponent"] = tail.regime, tail.exponent


def decompose_point(config, x, t, options, tails=None):
    row = {"x": x, "t": t, "method": RunMethod.ANALYTIC.value, "causal": _is_causal(config.model, x, t), "error": None}
    try:
        result = decompose(config.model, config.source, x, t, **options)
    except FrontwavesError as exc:
        _record_error(row, exc)
        return row
    _put_complex(row, "psi_p", result.psi_p)
    _put_complex(row, "psi_s_plus", result.psi_s_plus)
    _put_complex(row, "psi_s_minus", result.psi_s_minus)
    _put_complex(row, "psi_total", result.psi_total)
    row["gauss_validity"] = result.gauss_validity
    row["gauss_validity_minus"] = result.gauss_validity_minus
    row["near_front"] = result.near_front
    row["front_active"] = result.front_active
    row["causal"] = result.causal
    band = result.band
    if band is not None:
        for name in ("u_plus", "u_minus", "w0", "alpha", "edge_factor_plus", "edge_factor_minus",
                     "quoted_edge_factor_plus", "quoted_edge_factor_minus"):
            row[name] = getattr(band, name)
        row["middle_formula"] = band.middle_formula.value
        _put_complex(row, "psi_minus_seg", band.psi_minus_seg)
        _put_complex(row, "psi_stph_seg", band.psi_stph_seg)
        _put_complex(row, "psi_plus_seg", band.psi_plus_seg)
        _put_complex(row, "middle_alternative", band.middle_alternative)
        _put_tail(row, config, x, t, tails or {})
    return row


def evaluate_grid(point_function, config, jobs=1, **kwargs):
    """Rows for every grid point, in grid order whatever the pool does."""
    points = config.grid.points()
    worker = partial(point_function, config, **kwargs)
    if jobs > 1 and len(points) > 1:
        with multiprocessing.Pool(processes=min(jobs, len(points)), initializer=django.setup) as pool:
            return pool.starmap(worker, points)
    return [worker(x, t) for x, t in points]


def _timed(command, build):
    start = time.perf_counter()
    record = build()
    record.timing = time.perf_counter() - start
    logger.info("%s: %d rows in %.3f s, %d failed", command, len(record.rows), record.timing, len(record.failures))
    return record


def simulate(config, jobs=1):
    columns = list(SIMULATE_COLUMNS)
    if config.method is RunMethod.BOTH:
        columns += CROSS_CHECK_COLUMNS
    columns.append("error")

    def build():
        rows = evaluate_grid(simulate_point, config, jobs, options=band_options())
        return RunRecord("simulate", config, columns, rows, versions())

    return _timed("simulate", build)


def run_decomposition(config, jobs=1):
    columns = list(DECOMPOSE_COLUMNS)
    if config.source.is_band_limited:
        columns += BAND_COLUMNS
    columns.append("error")

    def build():
        rows = evaluate_grid(decompose_point, config, jobs, options=band_options(), tails=tail_options())
        return RunRecord("decompose", config, columns, rows, versions())

    return _timed("decompose", build)


def front_row(model, energy, x=1.0):
    """One row of the front-velocity table; ``energy`` is the kinetic ℏΩ₀."""
    natural = model.natural()
    omega0 = energy / model.hbar
    row = {"energy": energy, "omega0": omega0, "flagged": False, "error": None}
    try:
        regime = classify(natural, omega0)
        v_m = front_velocity(natural, omega0)
    except FrontwavesError as exc:
        regime = "threshold" if isinstance(exc, ThresholdError) else "undefined"
        row.update(regime=regime, v_m=0.0, flagged=True, error=f"{type(exc).__name__}: {exc}")
        if natural.is_relativistic:
            row["v_m_over_c"] = 0.0
        return row
    row["regime"] = regime.value
    row["v_m"] = v_m
    row["tau"] = x / v_m
    if natural.is_relativistic:
        row["v_m_over_c"] = v_m / natural.light_speed
    try:
        row["v_m_matching"] = phase_matching_velocity(natural, omega0)
    except (FrontwavesError, ValueError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def front_sweep(model, energies, x=1.0):
    def build():
        rows = [front_row(model, energy, x) for energy in energies]
        return RunRecord("front", None, list(FRONT_COLUMNS), rows, versions(), extra={
            "model": {
                "kind": model.kind.value,
                "mass": model.mass,
                "potential": model.potential,
                "light_speed": model.light_speed,
                "hbar": model.hbar,
            },
            "x": x,
        })

    return _timed("front", build)


def phase_map(model, x, t, window, resolution, levels, quantity=Quantity.RE_NORMALIZED, sheets=(Sheet.UPPER,)):
    """Level polylines of the normalized phase on each requested sheet, with axis crossings."""
    quantity = Quantity(quantity)

    def build():
        rows = []
        crossings = []
        for sheet in sheets:
            grid = build_grid(model, x, t, window, resolution, sheet)
            polylines = extract_contours(grid, levels, quantity)
            for values in polyline_rows(polylines):
                rows.append(dict(zip(PHASEMAP_COLUMNS, values)))
            for level in levels:
                found = real_axis_crossings(model, x, t, grid, polylines, float(level))
                crossings.append({"sheet": Sheet(sheet).value, "level": float(level), "omega_r": found})
        extra = {
            "x": x,
            "t": t,
            "window": window.as_list(),
            "resolution": list(resolution),
            "quantity": quantity.value,
            "normalization": normalization(model, x, t),
            "saddles": saddle_points(model, x, t),
            "saddle_phases": [[p.value.real, p.value.imag] for p in saddle_phases(model, x, t)],
            "crossings": crossings,
        }
        return RunRecord("phasemap", None, list(PHASEMAP_COLUMNS), rows, versions(), extra=extra)

    return _timed("phasemap", build)


def exit_code(record):
    """
    2 when any row hit a numerical failure. Domain and regime errors of single
    points are data: they stay in the error column and the run still succeeds.
    """
    failed = any(row.get("_exit_code", 0) >= ConvergenceError.exit_code for row in record.rows)
    return ConvergenceError.exit_code if failed else 0

