from xy_gibbs.api.exporters import render_json, write_output
from xy_gibbs.api.serializers import GibbsTargetSerializer, ModelParamsSerializer
from xy_gibbs.management.base import XYGibbsCommand
from xy_gibbs.models import OutputFormat
from xy_gibbs.utils import exactsolver


class Command(XYGibbsCommand):
    help = 'Dump the exact Gibbs state exp(-beta H)/Z of the XY chain'
    formats = (OutputFormat.JSON, OutputFormat.TABLE)

    def add_arguments(self, parser):
        self.add_model_arguments(parser, with_beta=True)
        self.add_output_arguments(parser, default=OutputFormat.JSON)

    def handle(self, *args, **options):
        params = self.validated(ModelParamsSerializer, {
            'n_sites': options['n_sites'], 'gamma': options['gamma'], 'h': options['field_h'],
        })
        target = exactsolver.gibbs_target(params, options['beta'])

        if options['format'] == OutputFormat.JSON:
            write_output(render_json(GibbsTargetSerializer(target).data), options['output'], self.stdout)
            return

        self.stdout.write(f'N={params.n_sites} gamma={params.gamma} h={params.field_h} beta={target.beta}')
        self.stdout.write(f'  log Z        {target.log_partition_function: .15f}')
        if target.beta > 0:
            self.stdout.write(f'  free energy  {target.free_energy: .15f}')
        self.stdout.write(f'  <H>          {target.energy: .15f}')
        self.stdout.write(f'  entropy      {target.entropy: .15f}')
        self.stdout.write('  level  energy               probability')
        for i, (energy, p) in enumerate(zip(target.energies, target.probabilities)):
            self.stdout.write(f'  {i:5d}  {energy: .15f}  {p:.15e}')
