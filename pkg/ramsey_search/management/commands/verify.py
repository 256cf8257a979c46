from django.core.management.base import BaseCommand, CommandError

from ramsey_search.certify import deletion_closure_report, load_fixture, read_coloring_source, verify_critical
from ramsey_search.exceptions import RamseyError
from ramsey_search.matrices import FIXTURES
from ramsey_search.patterns import parse_pattern_spec


class Command(BaseCommand):
    help = (
        "Recount a coloring against one forbidden pattern per color. "
        "Exit 0 if critical, 3 if not, 1 on parse errors."
    )

    def add_arguments(self, parser):
        parser.add_argument('source', nargs='?', help="Matrix file, certificate file or fixture name")
        parser.add_argument('--fixture', choices=sorted(FIXTURES), help="Verify a built-in coloring")
        parser.add_argument('--patterns', nargs='+', metavar='SPEC',
                            help="Pattern per color, e.g. W5 W7; required for bare matrices")
        parser.add_argument('--deletion-closure', action='store_true',
                            help="Also check every single-vertex deletion stays critical")

    def handle(self, *args, **options):
        try:
            certificate = verify_critical(*self._load(options))
        except RamseyError as e:
            raise CommandError(str(e), returncode=1)

        self.stdout.write(f"verdict: {certificate.verdict}")
        for color, (pattern, count) in enumerate(zip(certificate.patterns, certificate.report.per_color)):
            self.stdout.write(f"color {color} {pattern.spec}: {count}")

        if not certificate.is_critical:
            witness = certificate.witness
            vertices = ' '.join(str(v) for v in witness.vertices)
            self.stdout.write(f"witness: color {witness.color} {certificate.patterns[witness.color].spec} on {vertices}")
            raise CommandError("coloring is not critical", returncode=3)

        self.stdout.write(self.style.SUCCESS(certificate.implied_bound))
        if options['deletion_closure']:
            results = deletion_closure_report(certificate)
            for vertex, ok in results:
                self.stdout.write(f"delete {vertex}: {'critical' if ok else 'not-critical'}")
            if not all(ok for _, ok in results):
                raise CommandError("deletion closure failed", returncode=3)
            self.stdout.write(f"deletion closure: {len(results)} colorings critical")

    def _load(self, options):
        if options['fixture'] and options['source']:
            raise CommandError("give a source or --fixture, not both", returncode=1)
        specs = options['patterns']
        patterns = tuple(parse_pattern_spec(spec) for spec in specs) if specs else None
        if options['fixture']:
            coloring, stored = load_fixture(options['fixture'])
        elif options['source']:
            coloring, stored = read_coloring_source(options['source'], m=len(patterns) if patterns else 2)
        else:
            raise CommandError("nothing to verify: give a source or --fixture", returncode=1)
        patterns = patterns or stored
        if patterns is None:
            raise CommandError("a bare matrix needs --patterns, one per color", returncode=1)
        return coloring, patterns
