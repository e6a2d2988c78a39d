"""
Console entry point ``xy-gibbs``.

Each subcommand is a Django management command of this app; the bundled
settings module is used unless DJANGO_SETTINGS_MODULE points elsewhere.
"""
import os
import sys

COMMAND_ALIASES = {
    'gr-angles': 'gr_angles',
    'gibbs-exact': 'gibbs_exact',
}


def main(argv=None):
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'xy_gibbs.settings')
    argv = list(sys.argv if argv is None else argv)
    argv[0] = 'xy-gibbs'
    if len(argv) > 1:
        argv[1] = COMMAND_ALIASES.get(argv[1], argv[1])

    from django.core.management import execute_from_command_line
    execute_from_command_line(argv)


if __name__ == '__main__':
    main()
