from django.core.management.base import CommandError

from xy_gibbs.api.exporters import render_csv, render_json, write_output
from xy_gibbs.api.serializers import DegeneracyProfileSerializer
from xy_gibbs.management.base import XYGibbsCommand
from xy_gibbs.models import OutputFormat
from xy_gibbs.utils import exactsolver

DEGENERACY_COLUMNS = ('N', 'n', 'degree', 'count')


class Command(XYGibbsCommand):
    help = 'Count the 4^j-fold degenerate levels of the n-fermion sector and check the C(N, n) sum rule'

    def add_arguments(self, parser):
        parser.add_argument('-N', '--sites', dest='n_sites', type=int, required=True,
                            help='Number of sites (even)')
        group = parser.add_mutually_exclusive_group()
        group.add_argument('-n', '--fermions', dest='n_fermions', type=int, help='Fermion number (even)')
        group.add_argument('--all', action='store_true', help='Every even fermion number 0..N')
        self.add_output_arguments(parser)

    def handle(self, *args, **options):
        n_sites = options['n_sites']
        if options['all']:
            fermion_numbers = range(0, n_sites + 1, 2)
        elif options['n_fermions'] is not None:
            fermion_numbers = [options['n_fermions']]
        else:
            raise CommandError('give -n/--fermions or --all', returncode=2)

        profiles = [exactsolver.degeneracy_profile(n_sites, n) for n in fermion_numbers]

        fmt = options['format']
        if fmt == OutputFormat.JSON:
            text = render_json(DegeneracyProfileSerializer(profiles, many=True).data)
        elif fmt == OutputFormat.CSV:
            rows = [
                {'N': p.n_sites, 'n': p.n_fermions, 'degree': degree, 'count': count}
                for p in profiles for degree, count in sorted(p.counts.items())
            ]
            text = render_csv(rows, DEGENERACY_COLUMNS)
        else:
            for profile in profiles:
                self.stdout.write(self._describe(profile))
            return
        write_output(text, options['output'], self.stdout)

    def _describe(self, profile):
        """One line, e.g. 'N=4 n=2: 1-fold: 2, 4-fold: 1, total 6 = C(4,2)'."""
        parts = ', '.join(f'{degree}-fold: {count}' for degree, count in sorted(profile.counts.items()))
        total, expected = profile.total_levels, profile.expected_total
        relation = '=' if total == expected else '!='
        line = (
            f'N={profile.n_sites} n={profile.n_fermions}: {parts}, '
            f'total {total} {relation} C({profile.n_sites},{profile.n_fermions})'
        )
        return self.style.SUCCESS(line) if total == expected else self.style.ERROR(line)
