import json
import logging
from dataclasses import replace

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from fronts.exceptions import FrontwavesError

from ..serializers import (
    DispersionModelSerializer,
    OutputFormat,
    flatten_errors,
    parse_config,
)
from ..writers import write_record

LOG_LEVELS = {2: logging.INFO, 3: logging.DEBUG}
LOGGER_NAMES = ("fronts", "phasemaps", "runs")


class RunCommand(BaseCommand):
    """
    Shared plumbing of the frontwaves commands: output flags, verbosity to
    log level, config loading and exit codes.

    Exit codes: 1 for invalid input, 2 for numerical failures, 3 for failed
    invariants.
    """

    uses_config = True
    uses_jobs = False

    def add_arguments(self, parser):
        if self.uses_config:
            parser.add_argument("--config", help="Run configuration (JSON).")
        parser.add_argument("--output", help="Write results to this file instead of stdout.")
        parser.add_argument("--format", choices=[f.value for f in OutputFormat], help="Output format (default csv).")
        if self.uses_jobs:
            parser.add_argument("--jobs", type=int, default=None, help="Worker processes for the grid.")
            parser.add_argument("--tol", type=float, default=None, help="Relative quadrature tolerance.")

    def execute(self, *args, **options):
        level = LOG_LEVELS.get(options.get("verbosity", 1))
        if level is not None:
            for name in LOGGER_NAMES:
                logging.getLogger(name).setLevel(level)
        return super().execute(*args, **options)

    def read_json(self, path):
        try:
            with open(path, encoding="utf-8") as handle:
                return json.load(handle)
        except json.JSONDecodeError as exc:
            raise CommandError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}", returncode=1)
        except OSError as exc:
            raise CommandError(f"Cannot read {path}: {exc.strerror}", returncode=1)

    def validation_error(self, exc):
        lines = flatten_errors(exc.detail)
        return CommandError("Invalid configuration:\n  " + "\n  ".join(lines), returncode=1)

    def load_run_config(self, options):
        path = options.get("config")
        if not path:
            raise CommandError("--config is required.", returncode=1)
        data = self.read_json(path)
        try:
            config = parse_config(data)
        except serializers.ValidationError as exc:
            raise self.validation_error(exc)
        except FrontwavesError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code)
        if options.get("tol") is not None:
            try:
                config = replace(config, settings=replace(config.settings, rel_tol=options["tol"]))
            except FrontwavesError as exc:
                raise CommandError(str(exc), returncode=exc.exit_code)
        output = config.output
        if options.get("format"):
            output = replace(output, format=OutputFormat(options["format"]))
        if options.get("output"):
            output = replace(output, path=options["output"])
        return replace(config, output=output)

    def add_model_arguments(self, parser):
        parser.add_argument("--kind", choices=["nonrelativistic", "relativistic"], help="Dispersion model.")
        parser.add_argument("--mass", type=float, help="Particle mass m.")
        parser.add_argument("--potential", type=float, help="Potential V of the medium.")
        parser.add_argument("--light-speed", type=float, dest="light_speed", help="c, relativistic model only.")
        parser.add_argument("--hbar", type=float, help="ℏ in the units of the other parameters (default 1).")

    def config_data(self, options):
        """Raw JSON of --config, or an empty mapping when none was given."""
        path = options.get("config")
        if not path:
            return {}
        data = self.read_json(path)
        if not isinstance(data, dict):
            raise CommandError(f"{path}: expected a JSON object.", returncode=1)
        return data

    def model_from_options(self, options, data):
        """Model block of the config, overridden by any model flags given."""
        block = dict(data.get("model") or {})
        for name in ("kind", "mass", "potential", "light_speed", "hbar"):
            if options.get(name) is not None:
                block[name] = options[name]
        if not block:
            raise CommandError("Give the model with --kind/--mass or through --config.", returncode=1)
        return self.build_model(block)

    def build_model(self, data):
        serializer = DispersionModelSerializer(data=data)
        try:
            serializer.is_valid(raise_exception=True)
        except serializers.ValidationError as exc:
            raise self.validation_error(serializers.ValidationError({"model": exc.detail}))
        return serializer.save()

    def jobs(self, options):
        jobs = options.get("jobs") or settings.FRONTWAVES["DEFAULT_JOBS"]
        if jobs < 1:
            raise CommandError("--jobs must be at least 1.", returncode=1)
        return jobs

    def emit(self, record, fmt, path=None):
        write_record(record, fmt, path, self.stdout)
        if path:
            self.stderr.write(f"wrote {len(record.rows)} rows to {path}")
