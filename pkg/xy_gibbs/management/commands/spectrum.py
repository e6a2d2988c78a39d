import logging

from xy_gibbs.api.exporters import render_csv, render_json, write_output
from xy_gibbs.api.serializers import ModelParamsSerializer, SectorSpectrumSerializer
from xy_gibbs.config import solver_config
from xy_gibbs.management.base import XYGibbsCommand
from xy_gibbs.models import OutputFormat, Parity
from xy_gibbs.utils import exactsolver

logger = logging.getLogger(__name__)

SPECTRUM_COLUMNS = ('parity', 'occupation', 'energy')


class Command(XYGibbsCommand):
    help = 'Print the parity-sector spectra of the XY chain and check them against dense diagonalization'

    def add_arguments(self, parser):
        self.add_model_arguments(parser)
        parser.add_argument(
            '--parity',
            choices=Parity.values + ['both'],
            default='both',
            help='Sector to print (default: both)',
        )
        self.add_output_arguments(parser)

    def handle(self, *args, **options):
        params = self.validated(ModelParamsSerializer, {
            'n_sites': options['n_sites'], 'gamma': options['gamma'], 'h': options['field_h'],
        })
        parities = Parity.values if options['parity'] == 'both' else [options['parity']]
        spectra = [exactsolver.sector_spectrum(parity, params) for parity in parities]
        residual = self._residual(params)

        fmt = options['format']
        if fmt == OutputFormat.JSON:
            text = render_json({
                'model': ModelParamsSerializer(params).data,
                'sectors': SectorSpectrumSerializer(spectra, many=True).data,
                'dense_residual': residual,
            })
        elif fmt == OutputFormat.CSV:
            rows = [
                {'parity': spectrum.parity, 'occupation': level.occupation_mask, 'energy': level.energy}
                for spectrum in spectra for level in spectrum.levels
            ]
            text = render_csv(rows, SPECTRUM_COLUMNS)
        else:
            self._print_table(params, spectra, residual)
            return
        write_output(text, options['output'], self.stdout)

    def _residual(self, params):
        """Max |analytic - dense|, or None when N is beyond the dense cap."""
        if params.n_sites > solver_config.DENSE_SITE_CAP:
            logger.warning(f"N={params.n_sites} exceeds the dense cap; skipping the cross-check")
            return None
        return exactsolver.spectrum_residual(params)

    def _print_table(self, params, spectra, residual):
        n = params.n_sites
        self.stdout.write(f'XY chain N={n}, gamma={params.gamma}, h={params.field_h}')
        for spectrum in spectra:
            self.stdout.write(self.style.SUCCESS(
                f'\n{spectrum.parity} sector: {len(spectrum.levels)} levels, ground energy {spectrum.ground_energy:.12f}'
            ))
            momenta = ', '.join(f'{k:.6f}' for k in spectrum.momenta)
            self.stdout.write(f'  momenta (bit 0 first): {momenta}')
            for level in spectrum.levels:
                bits = format(level.occupation_mask, f'0{n}b')[::-1]
                self.stdout.write(f'  {spectrum.parity:<9} {bits}  {level.energy: .12f}')
        if residual is None:
            self.stdout.write(self.style.WARNING('\nDense cross-check skipped (N above the dense cap)'))
        elif residual < 1e-9:
            self.stdout.write(self.style.SUCCESS(f'\nDense cross-check residual: {residual:.3e}'))
        else:
            self.stdout.write(self.style.ERROR(f'\nDense cross-check residual: {residual:.3e}'))
