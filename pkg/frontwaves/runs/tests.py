import json
import math
import os
import tempfile
from io import StringIO
from unittest import mock

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings
from rest_framework import serializers

from fronts.dispersion import DispersionModel, Kind

from . import checks
from .runner import exit_code, front_sweep, run_decomposition, simulate
from .serializers import (
    OutputFormat,
    RunConfigSerializer,
    RunMethod,
    config_payload,
    flatten_errors,
    parse_config,
)
from .writers import render_csv, render_json

TIGHT = {"rel_tol": 1e-10, "abs_tol": 1e-15}


def config_data(**overrides):
    data = {
        "model": {"kind": "nonrelativistic", "mass": 1.0},
        "source": {"amplitude": 1.0, "carrier": -2.0},
        "grid": {"x": [0.5, 1.0, 2.0], "t": [0.5, 1.0, 2.5]},
        "method": "oracle",
        "settings": dict(TIGHT),
    }
    data.update(overrides)
    return data


class ConfigTests(SimpleTestCase):
    def test_parse_and_round_trip(self):
        config = parse_config(config_data(method="both"))
        self.assertIs(config.method, RunMethod.BOTH)
        self.assertEqual(config.grid.points()[:2], [(0.5, 0.5), (0.5, 1.0)])
        self.assertEqual(config.settings.rel_tol, 1e-10)
        self.assertIs(config.output.format, OutputFormat.CSV)
        again = parse_config(json.loads(json.dumps(config_payload(config))))
        self.assertEqual(again, config)

    def test_complex_amplitude(self):
        config = parse_config(config_data(source={"amplitude": [0.0, 2.0], "carrier": 1.0}))
        self.assertEqual(config.source.amplitude, 2j)
        self.assertEqual(config_payload(config)["source"]["amplitude"], [0.0, 2.0])
        serializer = RunConfigSerializer(data=config_data(source={"amplitude": [1, 2, 3], "carrier": 1.0}))
        self.assertFalse(serializer.is_valid())
        self.assertIn("amplitude", serializer.errors["source"])

    def test_physical_units_are_kept_in_the_config(self):
        config = parse_config(config_data(model={"kind": "nonrelativistic", "mass": 2.0, "hbar": 2.0}))
        self.assertEqual(config.model.hbar, 2.0)
        self.assertEqual(config.model.natural().mass, 1.0)

    def test_field_errors(self):
        cases = [
            (config_data(grid={"x": [], "t": [1.0]}), "grid"),
            (config_data(model={"kind": "nonrelativistic", "mass": -1.0}), "model"),
            (config_data(model={"kind": "relativistic", "mass": 1.0}), "model"),
            (config_data(source={"carrier": -2.0, "band": 3.0}), "source"),
            (config_data(grid={"x": [-1.0], "t": [1.0]}), "grid"),
            (config_data(method="exact"), "method"),
        ]
        for data, field in cases:
            with self.subTest(field=field):
                serializer = RunConfigSerializer(data=data)
                self.assertFalse(serializer.is_valid())
                self.assertIn(field, serializer.errors)

    def test_relativistic_band_needs_the_oracle(self):
        data = config_data(
            model={"kind": "relativistic", "mass": 1.0, "light_speed": 1.0},
            source={"carrier": 0.6, "band": 0.1},
            method="analytic",
        )
        serializer = RunConfigSerializer(data=data)
        self.assertFalse(serializer.is_valid())
        self.assertIn("method", serializer.errors)
        data["method"] = "oracle"
        self.assertTrue(RunConfigSerializer(data=data).is_valid())

    def test_empty_config(self):
        with self.assertRaises(serializers.ValidationError):
            parse_config({})

    def test_error_paths(self):
        serializer = RunConfigSerializer(data=config_data(model={"kind": "relativistic", "mass": 1.0}))
        serializer.is_valid()
        lines = flatten_errors(serializer.errors)
        self.assertTrue(any(line.startswith("model.light_speed:") for line in lines))


class RunnerTests(SimpleTestCase):
    def test_simulate_both_methods_agree(self):
        config = parse_config(config_data(method="both"))
        record = simulate(config)
        self.assertEqual(len(record.rows), 9)
        self.assertEqual([(row["x"], row["t"]) for row in record.rows], config.grid.points())
        for row in record.rows:
            self.assertEqual(row["method"], "ClosedFormNonRel")
            self.assertLessEqual(row["discrepancy"], 1e-8)
            self.assertIn("analytic_error", row)
        self.assertIn("discrepancy", record.columns)

    def test_sharp_source_is_silent_before_switch_on(self):
        record = simulate(parse_config(config_data(grid={"x": [0.5, 1.0], "t": [-2.0, -0.5, -0.1]})))
        for row in record.rows:
            self.assertEqual((row["psi_re"], row["psi_im"]), (0.0, 0.0))
            self.assertIsNone(row["error"])
        self.assertEqual(exit_code(record), 0)

    def test_relativistic_points_outside_light_cone(self):
        config = parse_config(config_data(
            model={"kind": "relativistic", "mass": 1.0, "light_speed": 1.0},
            source={"carrier": 0.6},
            grid={"x": [0.5, 3.0], "t": [1.0]},
        ))
        inside, outside = simulate(config).rows
        self.assertTrue(inside["causal"])
        self.assertEqual(inside["method"], "ContourQuadrature")
        self.assertFalse(outside["causal"])
        self.assertEqual((outside["psi_re"], outside["psi_im"]), (0.0, 0.0))

    def test_pool_keeps_grid_order(self):
        config = parse_config(config_data(grid={"x": [0.5, 1.0, 1.5], "t": [0.4, 0.9]}))
        self.assertEqual(simulate(config, jobs=2).rows, simulate(config, jobs=1).rows)

    def test_failed_points_are_recorded(self):
        config = parse_config(config_data(method="analytic", grid={"x": [0.0, 1.0], "t": [1.0]}))
        at_source, inside = simulate(config).rows
        self.assertIn("DomainError", at_source["error"])
        self.assertIsNone(inside["error"])
        self.assertEqual(inside["method"], "analytic")

    def test_decompose_rows(self):
        config = parse_config(config_data(grid={"x": [1.0], "t": [0.3, 1.0]}))
        before, after = run_decomposition(config).rows
        self.assertEqual((before["psi_p_re"], before["psi_p_im"]), (0.0, 0.0))
        self.assertFalse(before["front_active"])
        self.assertTrue(after["front_active"])
        self.assertAlmostEqual(math.hypot(after["psi_p_re"], after["psi_p_im"]), math.exp(-2.0))

    def test_decompose_band_rows(self):
        config = parse_config(config_data(
            source={"carrier": -2.0, "band": 0.2},
            grid={"x": [1.0], "t": [0.5]},
        ))
        record = run_decomposition(config)
        self.assertIn("u_plus", record.columns)
        (row,) = record.rows
        self.assertAlmostEqual(row["u_plus"], 0.1)
        self.assertAlmostEqual(row["u_minus"], -0.1)
        self.assertEqual(row["middle_formula"], "arctan")
        self.assertEqual(row["tail_regime"], "window")
        self.assertIsNone(row["tail_exponent"])

    def test_decompose_band_tails(self):
        config = parse_config(config_data(
            source={"carrier": -2.0, "band": 0.2},
            grid={"x": [1.0], "t": [0.05, 5.0]},
        ))
        early, late = run_decomposition(config).rows
        self.assertEqual(early["tail_regime"], "short")
        self.assertEqual(late["tail_regime"], "long")
        self.assertLess(early["tail_exponent"], -4.0)
        self.assertLess(late["tail_exponent"], early["tail_exponent"])

    @override_settings(FRONTWAVES={**settings.FRONTWAVES, "TAIL_SHORT_RATIO": 0.05})
    def test_tail_thresholds_come_from_settings(self):
        config = parse_config(config_data(
            source={"carrier": -2.0, "band": 0.2},
            grid={"x": [1.0], "t": [0.05]},
        ))
        (row,) = run_decomposition(config).rows
        self.assertEqual(row["tail_regime"], "window")

    def test_front_table(self):
        model = DispersionModel(Kind.RELATIVISTIC, mass=1.0, light_speed=1.0)
        below, threshold, above = front_sweep(model, [0.6, 1.0, 1.25]).rows
        self.assertAlmostEqual(below["v_m_over_c"], 0.8)
        self.assertEqual(below["regime"], "evanescent")
        self.assertEqual(threshold["v_m_over_c"], 0.0)
        self.assertTrue(threshold["flagged"])
        self.assertEqual(threshold["regime"], "threshold")
        self.assertAlmostEqual(above["v_m_over_c"], 0.6)
        self.assertAlmostEqual(above["v_m_matching"], 0.6, places=7)
        self.assertAlmostEqual(above["tau"], 1.0 / 0.6)

    def test_front_velocity_approaches_light_speed(self):
        model = DispersionModel(Kind.RELATIVISTIC, mass=1.0, light_speed=1.0)
        low, high = front_sweep(model, [1e-3, 1e3]).rows
        self.assertAlmostEqual(low["v_m_over_c"], 1.0, places=3)
        self.assertAlmostEqual(high["v_m_over_c"], 1.0, places=3)

    def test_relativistic_front_table_shape(self):
        model = DispersionModel(Kind.RELATIVISTIC, mass=1.0, light_speed=1.0)
        below = [row["v_m_over_c"] for row in front_sweep(model, [1e-4, 0.2, 0.5, 0.8, 0.95, 0.999]).rows]
        above = [row["v_m_over_c"] for row in front_sweep(model, [1.001, 1.05, 1.5, 3.0, 10.0, 1e4]).rows]
        self.assertEqual(below, sorted(below, reverse=True))
        self.assertEqual(above, sorted(above))
        self.assertAlmostEqual(below[0], 1.0, places=3)
        self.assertAlmostEqual(above[-1], 1.0, places=3)
        self.assertLess(max(below[-1], above[0]), 0.05)
        self.assertTrue(all(0.0 < speed < 1.0 for speed in below + above))

    def test_nonrelativistic_sweep_is_monotone(self):
        model = DispersionModel(Kind.NONRELATIVISTIC, mass=1.0)
        rows = front_sweep(model, [0.5, 1.0, 2.0, 4.0]).rows
        speeds = [row["v_m"] for row in rows]
        self.assertEqual(speeds, sorted(speeds))
        self.assertAlmostEqual(speeds[2], 2.0)


class WriterTests(SimpleTestCase):
    def setUp(self):
        self.record = simulate(parse_config(config_data(grid={"x": [0.5], "t": [0.5, 1.0]})))

    def test_csv_layout(self):
        text = render_csv(self.record)
        lines = text.splitlines()
        self.assertEqual(lines[0], "# frontwaves-csv v1 command=simulate")
        self.assertTrue(lines[1].startswith("# config="))
        header = [line for line in lines if not line.startswith("#")][0]
        self.assertEqual(header.split(","), self.record.columns)
        first = lines[lines.index(header) + 1].split(",")
        self.assertEqual(float(first[3]), self.record.rows[0]["psi_re"])
        self.assertEqual(first[6], "true")
        self.assertEqual(text, render_csv(self.record))

    def test_json_layout(self):
        payload = json.loads(render_json(self.record))
        self.assertEqual(payload["command"], "simulate")
        self.assertEqual(len(payload["rows"]), 2)
        self.assertEqual(parse_config(payload["config"]), self.record.config)
        self.assertNotIn("timing", payload)


class CommandTests(SimpleTestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)

    def write_config(self, data, name="run.json"):
        path = os.path.join(self.directory.name, name)
        with open(path, "w", encoding="utf-8") as handle:
            if isinstance(data, str):
                handle.write(data)
            else:
                json.dump(data, handle)
        return path

    def run_command(self, *args):
        out = StringIO()
        call_command(*args, stdout=out, stderr=StringIO())
        return out.getvalue()

    def test_simulate_writes_csv(self):
        path = self.write_config(config_data())
        output = self.run_command("simulate", "--config", path)
        rows = [line for line in output.splitlines() if not line.startswith("#")]
        self.assertEqual(len(rows), 10)

    def test_simulate_is_deterministic(self):
        path = self.write_config(config_data(method="both"))
        first = self.run_command("simulate", "--config", path, "--format", "json")
        second = self.run_command("simulate", "--config", path, "--format", "json", "--jobs", "2")
        self.assertEqual(first, second)

    def test_simulate_to_file(self):
        path = self.write_config(config_data())
        target = os.path.join(self.directory.name, "out.json")
        self.run_command("simulate", "--config", path, "--format", "json", "--output", target)
        with open(target, encoding="utf-8") as handle:
            payload = json.load(handle)
        self.assertEqual(len(payload["rows"]), 9)

    def test_tolerance_flag(self):
        path = self.write_config(config_data())
        target = os.path.join(self.directory.name, "out.json")
        self.run_command("simulate", "--config", path, "--format", "json", "--output", target, "--tol", "1e-7")
        with open(target, encoding="utf-8") as handle:
            self.assertEqual(json.load(handle)["config"]["settings"]["rel_tol"], 1e-7)

    def test_invalid_input_exits_with_one(self):
        broken = self.write_config('{"model": {"kind": "nonrelativistic",\n "mass": }', "broken.json")
        invalid = self.write_config(config_data(model={"kind": "nonrelativistic", "mass": 0.0}), "invalid.json")
        empty = self.write_config({}, "empty.json")
        for args, text in (
            (("simulate", "--config", broken), "line 2"),
            (("simulate", "--config", invalid), "model.mass"),
            (("simulate", "--config", empty), "empty"),
            (("simulate",), "--config"),
        ):
            with self.subTest(args=args):
                with self.assertRaises(CommandError) as raised:
                    self.run_command(*args)
                self.assertEqual(raised.exception.returncode, 1)
                self.assertIn(text, str(raised.exception))

    def test_decompose_command(self):
        path = self.write_config(config_data(source={"carrier": -2.0, "band": 0.2}, grid={"x": [1.0], "t": [0.5]}))
        payload = json.loads(self.run_command("decompose", "--config", path, "--format", "json"))
        (row,) = payload["rows"]
        self.assertAlmostEqual(row["u_plus"], 0.1)

    def test_front_command(self):
        output = self.run_command(
            "front", "--kind", "relativistic", "--mass", "1", "--light-speed", "1",
            "--values", "0.6", "1.0", "1.25", "--format", "json",
        )
        rows = json.loads(output)["rows"]
        self.assertAlmostEqual(rows[0]["v_m_over_c"], 0.8)
        self.assertTrue(rows[1]["flagged"])
        self.assertAlmostEqual(rows[2]["v_m_over_c"], 0.6)

    def test_front_sweep_command(self):
        output = self.run_command(
            "front", "--kind", "nonrelativistic", "--mass", "1", "--start", "-4", "--stop", "-0.5", "--num", "8",
            "--format", "json",
        )
        speeds = [row["v_m"] for row in json.loads(output)["rows"]]
        self.assertEqual(len(speeds), 8)
        self.assertEqual(speeds, sorted(speeds, reverse=True))

    def test_front_needs_a_model(self):
        with self.assertRaises(CommandError) as raised:
            self.run_command("front", "--values", "1.0")
        self.assertEqual(raised.exception.returncode, 1)

    def test_phasemap_nonrelativistic_parabola(self):
        output = self.run_command(
            "phasemap", "--kind", "nonrelativistic", "--mass", "1", "--x", "2", "--t", "1",
            "--window", "-4", "4", "-3", "1.5", "--resolution", "161", "91", "--format", "json",
        )
        payload = json.loads(output)
        self.assertTrue(payload["rows"])
        (crossings,) = payload["crossings"]
        self.assertEqual(len(crossings["omega_r"]), 2)
        self.assertAlmostEqual(crossings["omega_r"][0], -2.0, places=6)
        self.assertAlmostEqual(crossings["omega_r"][1], 2.0, places=5)
        self.assertEqual(payload["saddles"], [2.0])
        ((phi_r, phi_i),) = payload["saddle_phases"]
        self.assertAlmostEqual(phi_r, -2.0)
        self.assertAlmostEqual(phi_i, 0.0)

    def test_phasemap_outside_light_cone(self):
        output = self.run_command(
            "phasemap", "--kind", "relativistic", "--mass", "1", "--light-speed", "1",
            "--x", "1", "--t", "0.75", "--format", "json",
        )
        payload = json.loads(output)
        self.assertEqual(payload["saddles"], [])
        self.assertEqual(payload["saddle_phases"], [])
        self.assertAlmostEqual(payload["normalization"], math.sqrt(1.0 - 0.75 ** 2))

    def test_phasemap_inside_light_cone(self):
        output = self.run_command(
            "phasemap", "--kind", "relativistic", "--mass", "1", "--light-speed", "1",
            "--x", "0.8", "--t", "1", "--levels", "1", "-1",
            "--window", "-2.5", "2.5", "-2", "1", "--resolution", "251", "151", "--format", "json",
        )
        payload = json.loads(output)
        levels = {row["level"] for row in payload["rows"]}
        self.assertEqual(levels, {1.0, -1.0})
        plus, minus = payload["crossings"]
        self.assertAlmostEqual(plus["omega_r"][0] * plus["omega_r"][1], 1.0, places=6)
        self.assertAlmostEqual(minus["omega_r"][0] * minus["omega_r"][1], 1.0, places=6)

    def test_phasemap_csv_columns(self):
        output = self.run_command(
            "phasemap", "--kind", "nonrelativistic", "--mass", "1", "--x", "2", "--t", "1",
            "--resolution", "41", "24",
        )
        header = [line for line in output.splitlines() if not line.startswith("#")][0]
        self.assertEqual(header, "quantity,level,sheet,omega_r,omega_i,segment_id")

    def test_quick_invariants(self):
        payload = json.loads(self.run_command("invariants", "--profile", "quick", "--format", "json"))
        failed = [row for row in payload["rows"] if not row["passed"]]
        self.assertEqual(failed, [])
        self.assertEqual(payload["profile"], "quick")


class CheckTests(SimpleTestCase):
    def assertPasses(self, result):
        self.assertTrue(result.passed, f"{result.name}: {result.measured!r} vs {result.threshold!r} {result.detail}")

    def test_evanescent_pole_part_is_exponentially_below_forerunner(self):
        result = checks.evanescent_hierarchy(checks.Profile.QUICK)
        self.assertPasses(result)
        factors = [float(value) for value in result.detail.split()]
        self.assertEqual(len(factors), 3)
        for factor in factors:
            self.assertGreater(factor, 1.0)
            self.assertLess(factor, 10.0)

    def test_gauss_convergence_sweep(self):
        self.assertPasses(checks.gauss_convergence(checks.Profile.FULL))

    def test_band_field_decays_with_full_exponent(self):
        result = checks.band_exponent(checks.Profile.FULL)
        self.assertPasses(result)
        self.assertLess(result.measured, 0.25)

    def test_band_crossover_after_traversal(self):
        self.assertPasses(checks.band_crossover(checks.Profile.FULL))

    def test_band_tails(self):
        self.assertPasses(checks.band_tails(checks.Profile.QUICK))

    def test_saddle_stationarity(self):
        self.assertPasses(checks.saddle_stationarity(checks.Profile.FULL))

    def test_front_velocity_over_both_regimes(self):
        result = checks.front_velocity_consistency(checks.Profile.FULL)
        self.assertPasses(result)
        self.assertEqual(result.detail, "86 carriers")

    def test_continuity_at_both_fronts(self):
        result = checks.continuity(checks.Profile.QUICK)
        self.assertPasses(result)
        self.assertEqual(len(result.detail.split()), 6)

    def test_cross_oracle_includes_the_front(self):
        self.assertPasses(checks.cross_oracle(checks.Profile.QUICK))

    def test_failing_check_is_reported_not_raised(self):
        def broken(profile):
            raise ArithmeticError("no convergence")

        broken.__name__ = "broken"
        with mock.patch.object(checks, "QUICK_CHECKS", [broken]):
            results = checks.run_checks(checks.Profile.QUICK)
        self.assertEqual(len(results), 1)
        self.assertFalse(results[0].passed)
        self.assertIn("ArithmeticError", results[0].detail)
