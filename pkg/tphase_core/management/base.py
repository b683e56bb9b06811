import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from django.test.utils import override_settings

from ..exceptions import FormatError, RankOutOfRange, TPhaseError
from ..fileformats import dumps_json, write_json_atomic
from ..forms import RunConfigForm

VERBOSITY_LEVELS = {0: logging.ERROR, 1: logging.WARNING, 2: logging.INFO, 3: logging.DEBUG}


class TPhaseCommand(BaseCommand):
    """
    Shared plumbing for the analysis commands.

    Options named in ``config_options`` are validated by RunConfigForm;
    ``--tol KEY=VALUE`` overrides TPHASE settings for the run. Format and
    validation problems exit with status 2, analysis failures with 1.
    """
    subcommand = None
    config_options = ()

    def add_arguments(self, parser):
        parser.add_argument(
            '--tol', action='append', default=[], metavar='KEY=VALUE',
            help='Override a TPHASE setting for this run, e.g. PD_TOL=1e-8',
        )

    def add_output_argument(self, parser, help_text='Write the JSON report here instead of stdout'):
        parser.add_argument('--output', '-o', help=help_text)

    def handle(self, *args, **options):
        logging.getLogger('tphase_core').setLevel(VERBOSITY_LEVELS.get(options['verbosity'], logging.DEBUG))
        config = self.build_config(options)
        overrides = {**getattr(settings, 'TPHASE', {}), **config.tol}
        try:
            with override_settings(TPHASE=overrides):
                self.run(config, options)
        except (FormatError, RankOutOfRange) as exc:
            raise CommandError(str(exc), returncode=2) from exc
        except TPhaseError as exc:
            raise CommandError(f'{type(exc).__name__}: {exc}', returncode=1) from exc

    def build_config(self, options):
        data = {'subcommand': self.subcommand}
        for name in self.config_options + ('tol',):
            value = options.get(name)
            if value not in (None, '', []):
                data[name] = value
        form = RunConfigForm(data)
        if not form.is_valid():
            raise CommandError(form.errors_as_text(), returncode=2)
        return form.to_config()

    def run(self, config, options):
        raise NotImplementedError('subclasses of TPhaseCommand must provide a run() method')

    def emit(self, payload, path=None):
        """Write a JSON report to ``path`` or stdout"""
        if path:
            write_json_atomic(payload, path)
            self.summary(f'Wrote {path}', self.style.SUCCESS)
        else:
            self.stdout.write(dumps_json(payload), ending='')

    def summary(self, message, style=None):
        """Human-readable progress on stderr; stdout carries only JSON"""
        self.stderr.write(message, style_func=style or (lambda text: text))


def fail(message):
    """Usage error raised from inside a run()"""
    return CommandError(message, returncode=2)


def output_paths(config, suffix):
    """Tensor output and JSON sidecar; defaults sit next to the input"""
    source = Path(config.inputs[0])
    output = Path(config.output) if config.output else source.with_name(f'{source.stem}_{suffix}.ttj')
    sidecar = config.sidecar or output.with_suffix('.json')
    return str(output), str(sidecar)
