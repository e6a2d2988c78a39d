import json
import math
import re

from django.core.management.base import CommandError

from xy_gibbs.api.exporters import render_json, write_output
from xy_gibbs.api.serializers import (
    DistributionSerializer, GRAnglesSerializer, ModelParamsSerializer, ReducedFitReportSerializer,
)
from xy_gibbs.management.base import XYGibbsCommand
from xy_gibbs.models import OutputFormat
from xy_gibbs.utils import ansatz, exactsolver


class Command(XYGibbsCommand):
    help = 'Grover-Rudolph angles of a distribution file or of an exact Boltzmann distribution'
    formats = (OutputFormat.TABLE, OutputFormat.JSON)

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument('--distribution', metavar='FILE',
                            help='JSON list / {"probabilities": [...]} or whitespace/comma separated numbers')
        source.add_argument('--model', nargs=4, metavar=('N', 'GAMMA', 'H', 'BETA'),
                            help='Exact Boltzmann distribution of the XY chain')
        parser.add_argument('--tolerance', type=float, default=1e-9,
                            help='Residual below which an identity counts as holding (default: 1e-9)')
        parser.add_argument('--diagram', action='store_true', help='Also print the circuit diagram')
        self.add_output_arguments(parser)

    def handle(self, *args, **options):
        tolerance = options['tolerance']
        report = None
        if options['model']:
            params, beta = self._model(options['model'])
            if params.n_sites == ansatz.REDUCED_N_SITES:
                report = ansatz.fit_check_reduced(params, beta)
                angles = report.angles
            else:
                angles = ansatz.angles_from_distribution(exactsolver.boltzmann_distribution(params, beta))
        else:
            angles = ansatz.angles_from_distribution(self._read_distribution(options['distribution']))

        if options['format'] == OutputFormat.JSON:
            if report is not None:
                data = ReducedFitReportSerializer(report, context={'tolerance': tolerance}).data
            else:
                data = {'angles': GRAnglesSerializer(angles).data}
            if options['diagram']:
                data['diagram'] = ansatz.circuit_diagram(ansatz.gr_circuit(angles)).splitlines()
            write_output(render_json(data), options['output'], self.stdout)
            return

        for i, theta in enumerate(angles.thetas):
            self.stdout.write(f'theta_{i:<3d} {theta: .15f}  ({theta / math.pi:.12f} pi)')
        if report is not None:
            self._print_identities(report, tolerance)
        if options['diagram']:
            self.stdout.write('\n' + ansatz.circuit_diagram(ansatz.gr_circuit(angles)))

    def _model(self, values):
        """Parse the four --model values; N must be an integer."""
        n_text, gamma, field_h, beta = values
        try:
            n_sites = int(n_text)
            gamma, field_h, beta = float(gamma), float(field_h), float(beta)
        except ValueError:
            raise CommandError(f'--model expects N GAMMA H BETA, got {" ".join(values)}', returncode=2)
        params = self.validated(ModelParamsSerializer, {'n_sites': n_sites, 'gamma': gamma, 'h': field_h})
        return params, beta

    def _read_distribution(self, path):
        try:
            with open(path, encoding='utf-8') as handle:
                text = handle.read()
        except OSError as e:
            raise CommandError(f'cannot read distribution file {path}: {e}', returncode=2)
        try:
            payload = json.loads(text)
        except json.JSONDecodeError:
            payload = [token for token in re.split(r'[\s,]+', text.strip()) if token]
        if isinstance(payload, dict):
            payload = payload.get('probabilities', [])
        serializer = DistributionSerializer(data={'probabilities': payload})
        serializer.is_valid(raise_exception=True)
        return serializer.validated_data['probabilities']

    def _print_identities(self, report, tolerance):
        self.stdout.write('\nReduced-ansatz identities:')
        for name, holds in report.holds(tolerance).items():
            line = f'  {name:<9} residual {report.residuals[name]:.3e}  {"holds" if holds else "FAILS"}'
            self.stdout.write(self.style.SUCCESS(line) if holds else self.style.ERROR(line))
        self.stdout.write(f'  reconstruction error of the 7-parameter expansion: {report.reconstruction_error:.3e}')
