from django.core.management.base import CommandError

from ...runner import exit_code, run_decomposition
from ..base import RunCommand


class Command(RunCommand):
    help = "Split ψ(x, t) into the monochromatic front and the forerunner(s) on the configured grid."

    uses_jobs = True

    def handle(self, *args, **options):
        config = self.load_run_config(options)
        if config.source.is_band_limited and config.model.is_relativistic:
            raise CommandError(
                "The analytic decomposition does not cover relativistic band-limited sources.", returncode=1
            )
        record = run_decomposition(config, jobs=self.jobs(options))
        self.emit(record, config.output.format, config.output.path)
        code = exit_code(record)
        if code:
            raise CommandError(f"{len(record.failures)} grid points failed.", returncode=code)
