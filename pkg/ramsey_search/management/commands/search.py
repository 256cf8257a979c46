from django.core.management.base import BaseCommand, CommandError

from ramsey_search.exceptions import RamseyError
from ramsey_search.runconfig import load_run_config, override_keys
from ramsey_search.services import SearchRunner


class Command(BaseCommand):
    help = (
        "Search for a critical coloring of K_n with the cross-entropy method. "
        "Exit 0 with a certificate, 2 when the batch budget runs out, 1 on config errors."
    )

    def add_arguments(self, parser):
        parser.add_argument('config', help="Run file of 'key = value' lines")
        parser.add_argument('--out', help="Prefix for the .cert, .stats.csv and .ckpt.json files")
        parser.add_argument('--workers', type=int, help="Parallel rollout workers")
        for key in override_keys():
            parser.add_argument(f'--{key}', dest=f'override_{key}', metavar='VALUE',
                                help=f"Override '{key}' from the run file")

    def handle(self, *args, **options):
        overrides = {key: options.get(f'override_{key}') for key in override_keys()}
        try:
            run_config = load_run_config(options['config'], overrides)
            runner = SearchRunner(workers=options['workers'])
        except RamseyError as e:
            raise CommandError(str(e), returncode=1)

        try:
            report = runner.search(run_config, out=options['out'])
        except RamseyError as e:
            raise CommandError(f"search failed: {e}", returncode=1)

        outcome = report.outcome
        if report.found:
            self.stdout.write(self.style.SUCCESS(report.implied_bound))
            self.stdout.write(f"certificate: {report.paths.cert}")
            self.stdout.write(f"restart {report.restart}, {outcome.batches_run} batches")
            return
        self.stdout.write(f"best reward {outcome.best_reward} after {report.restarts_run} run(s)")
        self.stdout.write(f"checkpoint: {report.paths.checkpoint}")
        raise CommandError("batch budget exhausted without a critical coloring", returncode=2)
