import logging

from django.core.management.base import CommandError

from xy_gibbs.api.exporters import render_json, write_output
from xy_gibbs.api.serializers import VqaConfigSerializer, VqaResultSerializer
from xy_gibbs.config import vqa_defaults
from xy_gibbs.exceptions import OptimizationFailedError
from xy_gibbs.management.base import XYGibbsCommand
from xy_gibbs.models import OutputFormat, SelectionRule
from xy_gibbs.utils.vqa import GibbsVqa

logger = logging.getLogger(__name__)


class Command(XYGibbsCommand):
    help = 'Prepare the Gibbs state of one XY chain with the variational circuit and report its fidelity'
    formats = (OutputFormat.JSON,)

    def add_arguments(self, parser):
        self.add_model_arguments(parser, with_beta=True)
        self.add_run_arguments(parser)
        parser.add_argument('--threshold', type=float, default=None,
                            help=f'Exit 1 below this fidelity (default: {vqa_defaults.FIDELITY_THRESHOLD})')
        parser.add_argument('--select', choices=SelectionRule.values, default=SelectionRule.FIDELITY,
                            help='Restart whose fidelity decides the exit code (default: fidelity)')
        self.add_output_arguments(parser, default=OutputFormat.JSON)

    def handle(self, *args, **options):
        config = self.validated(VqaConfigSerializer, {
            'model': {'n_sites': options['n_sites'], 'gamma': options['gamma'], 'h': options['field_h']},
            'beta': options['beta'],
            **self.run_options(options),
        })
        if options['jobs'] < 1:
            raise CommandError('--jobs must be >= 1', returncode=2)
        threshold = vqa_defaults.FIDELITY_THRESHOLD if options['threshold'] is None else options['threshold']

        try:
            result = GibbsVqa(config).optimize(jobs=options['jobs'])
        except OptimizationFailedError as e:
            for record in e.restart_log:
                self.stderr.write(f'  restart {record.index}: {record.message}')
            raise

        write_output(render_json(VqaResultSerializer(result).data), options['output'], self.stdout)

        fidelity = result.selected_fidelity(options['select'])
        summary = (
            f'fidelity {fidelity:.6f} ({options["select"]} rule), F = {result.best_free_energy:.10f}, '
            f'exact F = {result.exact_free_energy:.10f}, {result.converged_restarts}/{config.restarts} converged, '
            f'{result.wall_time:.1f} s'
        )
        if fidelity < threshold:
            raise CommandError(f'{summary}; below threshold {threshold}', returncode=1)
        self.stderr.write(self.style.SUCCESS(summary))
