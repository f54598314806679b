from django.core.management.base import CommandError

from ...runner import exit_code, simulate
from ..base import RunCommand


class Command(RunCommand):
    help = "Evaluate ψ(x, t) on the configured grid with the oracle, the analytic decomposition, or both."

    uses_jobs = True

    def handle(self, *args, **options):
        config = self.load_run_config(options)
        record = simulate(config, jobs=self.jobs(options))
        self.emit(record, config.output.format, config.output.path)
        code = exit_code(record)
        if code:
            raise CommandError(f"{len(record.failures)} grid points failed.", returncode=code)
