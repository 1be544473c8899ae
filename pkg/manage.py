#!/usr/bin/env python
"""rigfit command line.

    python manage.py generate --character ada --vertices 1000
    python manage.py fit --rig runs/rig.txt --frames runs/noisy.txt --method CD_QUARTIC
    python manage.py eval --rig runs/rig.txt --weights runs/fitted.txt --clean runs/clean.txt

Run without arguments to list the fitting commands.
"""
import os
import sys

FITTING_COMMANDS = ('generate', 'fit', 'eval', 'sweep', 'compare_orderings', 'noise_study', 'benchmark')


def main(argv=None):
    argv = list(sys.argv if argv is None else argv)
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'rigfit.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError('rigfit needs Django; install requirements.txt first') from exc
    if len(argv) < 2:
        print(__doc__.strip())
        print('\ncommands: ' + ', '.join(FITTING_COMMANDS))
        return
    execute_from_command_line(argv)


if __name__ == '__main__':
    main()
