from tphase_core.fileformats import read_ttj, write_ttj
from tphase_core.geomean import check_phase_majorization, riccati_residual, t_geomean
from tphase_core.management.base import TPhaseCommand, output_paths
from tphase_core.phase import canonical_phases


class Command(TPhaseCommand):
    help = 'Geometric mean A # B of two accretive tensors with its Riccati residual and phase majorization report'
    subcommand = 'geomean'
    config_options = ('inputs', 'output', 'sidecar')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('inputs', nargs=2, metavar='tensor.ttj')
        parser.add_argument('--output', '-o', help='Where to write A # B (default: <a>_geomean.ttj)')
        parser.add_argument('--sidecar', help='Where to write the JSON report (default: next to the output)')

    def run(self, config, options):
        A, B = (read_ttj(path) for path in config.inputs)
        output, sidecar = output_paths(config, 'geomean')

        mean = t_geomean(A, B)
        report = check_phase_majorization(A, B)
        payload = {
            'inputs': config.inputs,
            'output': output,
            'riccati_residual': riccati_residual(mean, A, B),
            'phases': {
                'A': canonical_phases(A).to_dict(),
                'B': canonical_phases(B).to_dict(),
                'mean': canonical_phases(mean).to_dict(),
            },
            'majorization': report.to_dict(),
        }
        write_ttj(mean, output)
        self.emit(payload, sidecar)
        if report.holds:
            self.summary('phase majorization holds', self.style.SUCCESS)
        else:
            self.summary('phase majorization check failed', self.style.WARNING)
