import numpy as np
from django.core.management.base import CommandError

from ...runner import front_sweep
from ...serializers import OutputFormat
from ..base import RunCommand


class Command(RunCommand):
    help = (
        "Tabulate the front velocity v_m and traversal time over a sweep of kinetic "
        "energies ℏΩ₀. Threshold energies are kept and flagged."
    )

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_model_arguments(parser)
        parser.add_argument("--values", type=float, nargs="+", help="Explicit ℏΩ₀ values.")
        parser.add_argument("--start", type=float, help="First ℏΩ₀ of an evenly spaced sweep.")
        parser.add_argument("--stop", type=float, help="Last ℏΩ₀ of the sweep.")
        parser.add_argument("--num", type=int, default=41, help="Number of sweep points (default 41).")
        parser.add_argument("--x", type=float, default=1.0, help="Distance used for τ (default 1).")

    def handle(self, *args, **options):
        data = self.config_data(options)
        model = self.model_from_options(options, data)
        if options["values"]:
            energies = list(options["values"])
        elif options["start"] is not None and options["stop"] is not None:
            if options["num"] < 2:
                raise CommandError("--num must be at least 2.", returncode=1)
            energies = np.linspace(options["start"], options["stop"], options["num"]).tolist()
        else:
            raise CommandError("Give --values or --start/--stop.", returncode=1)
        if not options["x"] > 0:
            raise CommandError("--x must be positive.", returncode=1)
        record = front_sweep(model, energies, options["x"])
        fmt = options["format"] or data.get("output", {}).get("format") or OutputFormat.CSV.value
        self.emit(record, fmt, options["output"])
