from django.core.management.base import BaseCommand, CommandError

from ramsey_search.exceptions import RamseyError
from ramsey_search.services import SearchRunner


class Command(BaseCommand):
    help = "Continue a search from its checkpoint; exit codes as for search."

    def add_arguments(self, parser):
        parser.add_argument('checkpoint', help="A <out>.ckpt.json file")
        parser.add_argument('--max_batches', type=int, help="New batch budget of the resumed run")
        parser.add_argument('--workers', type=int, help="Parallel rollout workers")

    def handle(self, *args, **options):
        try:
            runner = SearchRunner(workers=options['workers'])
            report = runner.resume(options['checkpoint'], max_batches=options['max_batches'])
        except RamseyError as e:
            raise CommandError(str(e), returncode=1)

        outcome = report.outcome
        if report.found:
            self.stdout.write(self.style.SUCCESS(report.implied_bound))
            self.stdout.write(f"certificate: {report.paths.cert}")
            return
        self.stdout.write(f"best reward {outcome.best_reward} after {outcome.batches_run} batches")
        raise CommandError("batch budget exhausted without a critical coloring", returncode=2)
