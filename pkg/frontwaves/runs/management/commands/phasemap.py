from django.core.management.base import CommandError

from fronts.dispersion import Sheet, kinetic_frequency
from fronts.exceptions import FrontwavesError
from phasemaps.grid import Quantity, Window, default_window

from ...runner import phase_map
from ...serializers import OutputFormat
from ..base import RunCommand


class Command(RunCommand):
    help = (
        "Sample the phase φ(Ω; x, t) over a window of the complex Ω plane and write "
        "the level polylines of its normalized real (or imaginary) part."
    )

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_model_arguments(parser)
        parser.add_argument("--x", type=float, help="Position x.")
        parser.add_argument("--t", type=float, help="Time t.")
        parser.add_argument(
            "--window", type=float, nargs=4, metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"),
            help="Window in the Ω plane; by default it holds the saddles and the pole.",
        )
        parser.add_argument("--resolution", type=int, nargs=2, default=[201, 121], metavar=("NX", "NY"))
        parser.add_argument("--levels", type=float, nargs="+", default=[1.0], help="Levels of the normalized phase.")
        parser.add_argument("--quantity", choices=[q.value for q in Quantity], default=Quantity.RE_NORMALIZED.value)
        parser.add_argument("--sheet", choices=["upper", "lower", "both"], default="upper")
        parser.add_argument("--omega0", type=float, help="Pole to keep inside the default window.")

    def handle(self, *args, **options):
        data = self.config_data(options)
        model = self.model_from_options(options, data)
        grid = data.get("grid") or {}
        x = options["x"] if options["x"] is not None else (grid.get("x") or [None])[0]
        t = options["t"] if options["t"] is not None else (grid.get("t") or [None])[0]
        if x is None or t is None:
            raise CommandError("Give --x and --t, or a config with a grid.", returncode=1)
        omega0 = options["omega0"]
        if omega0 is None and data.get("source"):
            omega0 = kinetic_frequency(model, float(data["source"]["carrier"]))
        sheets = [Sheet.UPPER, Sheet.LOWER] if options["sheet"] == "both" else [Sheet(options["sheet"])]
        try:
            if options["window"]:
                window = Window(*options["window"])
            else:
                window = default_window(model, x, t, omega0)
            record = phase_map(
                model, x, t, window, tuple(options["resolution"]), options["levels"],
                options["quantity"], sheets,
            )
        except FrontwavesError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code)
        fmt = options["format"] or data.get("output", {}).get("format") or OutputFormat.CSV.value
        self.emit(record, fmt, options["output"])
