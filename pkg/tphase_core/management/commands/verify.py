from pathlib import Path

from django.core.management.base import CommandError

from tphase_core.management.base import TPhaseCommand
from tphase_core.verification import SUITE_CHOICES, run_suite


class Command(TPhaseCommand):
    help = 'Run the seeded invariant batteries (or the phase Lidskii probe with --suite conjecture)'
    subcommand = 'verify'
    config_options = ('suite', 'seed', 'trials', 'output')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--suite', default='all', help=f"One of: {', '.join(SUITE_CHOICES)}")
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--trials', type=int, help='Trials per suite (default: per-suite count)')
        self.add_output_argument(parser)

    def run(self, config, options):
        output_dir = None
        if config.output and config.suite == 'conjecture':
            output_dir = str(Path(config.output).parent)
        reports = run_suite(config.suite or 'all', config.seed or 0, config.trials, output_dir)
        payload = {
            'suite': config.suite,
            'seed': config.seed or 0,
            'passed': all(r.passed for r in reports),
            'reports': [r.to_dict() for r in reports],
        }
        self.emit(payload, config.output)
        for report in reports:
            line = f'{report.suite}: {report.checks} checks, {len(report.failures)} failures, {report.skipped} skipped'
            self.summary(line, self.style.SUCCESS if report.passed else self.style.ERROR)
        if not payload['passed']:
            raise CommandError(f'{sum(len(r.failures) for r in reports)} invariant checks failed', returncode=1)
