import logging

from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from xy_gibbs.config import vqa_defaults
from xy_gibbs.exceptions import XYGibbsError
from xy_gibbs.models import AncillaMode, OptimizerKind, OutputFormat

VERBOSITY_LEVELS = {0: logging.ERROR, 1: logging.WARNING, 2: logging.INFO, 3: logging.DEBUG}


class XYGibbsCommand(BaseCommand):
    """
    Base for the xy-gibbs subcommands.

    ``-h`` is taken by the transverse field, so help is only ``--help``.
    Library errors leave the command as CommandError carrying the exit code
    of the exception; serializer validation failures are usage errors (2).
    """
    requires_system_checks = []
    formats = (OutputFormat.TABLE, OutputFormat.JSON, OutputFormat.CSV)

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, add_help=False, **kwargs)
        parser.add_argument('--help', action='help', help='Show this help message and exit')
        return parser

    def add_model_arguments(self, parser, with_beta=False):
        parser.add_argument('-N', '--sites', dest='n_sites', type=int, required=True,
                            help='Number of sites (even, >= 2)')
        parser.add_argument('-g', '--gamma', type=float, required=True, help='Anisotropy gamma')
        parser.add_argument('-h', '--field', dest='field_h', type=float, required=True,
                            help='Transverse field h')
        if with_beta:
            parser.add_argument('-b', '--beta', type=float, required=True, help='Inverse temperature')

    def add_output_arguments(self, parser, default=OutputFormat.TABLE):
        parser.add_argument('--format', choices=[str(f) for f in self.formats], default=str(default),
                            help=f'Output format (default: {default})')
        parser.add_argument('--output', '-o', default=None, help='Write to this file instead of stdout')

    def add_run_arguments(self, parser):
        """Flags mirroring VqaConfig."""
        parser.add_argument('--mode', dest='ancilla_mode', choices=AncillaMode.values,
                            default=AncillaMode.FULL_GR, help='Ancilla ansatz (default: full_gr)')
        parser.add_argument('--layers', dest='system_layers', type=int, default=None,
                            help=f'Brick-wall layers on the system (default: {vqa_defaults.SYSTEM_LAYERS})')
        parser.add_argument('--ancilla-layers', type=int, default=None,
                            help=f'Grover-Rudolph blocks on the ancillas (default: {vqa_defaults.ANCILLA_LAYERS})')
        parser.add_argument('--restarts', type=int, default=None,
                            help=f'Independent restarts (default: {vqa_defaults.RESTARTS})')
        parser.add_argument('--optimizer', choices=OptimizerKind.values, default=OptimizerKind.QUASI_NEWTON,
                            help='quasi-newton (BFGS) or direct-search (Nelder-Mead)')
        parser.add_argument('--max-iterations', type=int, default=None,
                            help=f'Iteration cap per restart (default: {vqa_defaults.MAX_ITERATIONS})')
        parser.add_argument('--gradient-step', type=float, default=None,
                            help=f'Finite-difference step (default: {vqa_defaults.GRADIENT_STEP})')
        parser.add_argument('--seed', type=int, default=0, help='Seed of the restart RNG streams')
        parser.add_argument('--jobs', type=int, default=1, help='Worker processes')

    def run_options(self, options):
        names = (
            'ancilla_mode', 'system_layers', 'ancilla_layers', 'restarts', 'optimizer',
            'max_iterations', 'gradient_step', 'seed',
        )
        return {name: options[name] for name in names if options.get(name) is not None}

    def validated(self, serializer_class, data, **kwargs):
        """Run a serializer over command input and return the object it builds."""
        serializer = serializer_class(data=data, **kwargs)
        serializer.is_valid(raise_exception=True)
        return serializer.save()

    def execute(self, *args, **options):
        logging.getLogger('xy_gibbs').setLevel(VERBOSITY_LEVELS.get(options.get('verbosity', 1), logging.DEBUG))
        try:
            return super().execute(*args, **options)
        except ValidationError as e:
            raise CommandError(f"invalid arguments: {self._flatten(e.detail)}", returncode=2)
        except XYGibbsError as e:
            raise CommandError(str(e), returncode=e.exit_code)

    def _flatten(self, detail, prefix=''):
        """Turn nested serializer errors into 'field: message' text."""
        if isinstance(detail, dict):
            return '; '.join(self._flatten(value, f"{prefix}{key}.") for key, value in detail.items())
        if isinstance(detail, list):
            return '; '.join(self._flatten(value, prefix) for value in detail)
        return f"{prefix.rstrip('.')}: {detail}" if prefix else str(detail)
