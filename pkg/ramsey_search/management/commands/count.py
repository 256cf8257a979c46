from django.core.management.base import BaseCommand, CommandError

from ramsey_search.certify import read_coloring_source
from ramsey_search.coloring import monochrome_graph
from ramsey_search.exceptions import RamseyError
from ramsey_search.patterns import count_copies, parse_pattern_spec


class Command(BaseCommand):
    help = "Print the number of copies of a pattern in one color class of a coloring."

    def add_arguments(self, parser):
        parser.add_argument('source', help="Matrix file, certificate file or fixture name")
        parser.add_argument('pattern',
                            help="Pattern spec, e.g. B3, W7, K2,5, K4, explicit:<file> or graph:<n>:<bits>")
        parser.add_argument('color', type=int, help="Color class to search")
        parser.add_argument('--colors', type=int, default=2, help="Colors in a bare matrix file")

    def handle(self, *args, **options):
        try:
            coloring, _ = read_coloring_source(options['source'], m=options['colors'])
            pattern = parse_pattern_spec(options['pattern'])
            count = count_copies(monochrome_graph(coloring, options['color']), pattern)
        except RamseyError as e:
            raise CommandError(str(e), returncode=1)
        self.stdout.write(str(count))
