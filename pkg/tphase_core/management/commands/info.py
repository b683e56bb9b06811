from dataclasses import asdict

from tphase_core.approx import t_singular_values
from tphase_core.exceptions import TPhaseError
from tphase_core.fileformats import read_ttj
from tphase_core.management.base import TPhaseCommand
from tphase_core.phase import canonical_phases, count_nonzero_phases, sector_of
from tphase_core.tensor import sectoriality_margin


class Command(TPhaseCommand):
    help = 'Report dimensions, sectoriality, canonical T-phases, T-phase rank and T-singular values of a .ttj tensor'
    subcommand = 'info'
    config_options = ('inputs', 'output')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('inputs', metavar='tensor.ttj')
        self.add_output_argument(parser)

    def run(self, config, options):
        A = read_ttj(config.inputs[0])
        report = {
            'path': config.inputs[0],
            'shape': list(A.shape),
            'real': A.is_real(),
            'fro_norm': A.fro_norm(),
            'singular_values': t_singular_values(A),
        }
        if not A.is_frontal_square:
            report['sectorial'] = False
            report['reason'] = 'not frontal-square'
            self.emit(report, config.output)
            return

        margin = sectoriality_margin(A)
        report['sectoriality'] = asdict(margin)
        try:
            phases = canonical_phases(A)
        except TPhaseError as exc:
            report['sectorial'] = False
            report['reason'] = f'{type(exc).__name__}: {exc}'
            self.emit(report, config.output)
            return

        report.update({
            'sectorial': True,
            'phases': phases.to_dict(),
            'sector': sector_of(phases).to_dict(),
            'tprank': count_nonzero_phases(phases.values),
        })
        self.emit(report, config.output)
