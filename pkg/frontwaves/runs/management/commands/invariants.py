from django.core.management.base import CommandError

from ...checks import Profile, check_record, run_checks
from ..base import RunCommand


class Command(RunCommand):
    help = "Run the invariant suite and report every check with its measured value."

    uses_config = False

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--profile", choices=[p.value for p in Profile], default=Profile.QUICK.value)

    def handle(self, *args, **options):
        results = run_checks(options["profile"])
        record = check_record(results, options["profile"])
        self.emit(record, options["format"] or "csv", options["output"])
        failed = [result.name for result in results if not result.passed]
        if failed:
            raise CommandError(f"Failed invariants: {', '.join(failed)}", returncode=3)
