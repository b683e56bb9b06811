from tphase_core.approx import truncate_rank
from tphase_core.fileformats import read_ttj, write_ttj
from tphase_core.management.base import TPhaseCommand, output_paths
from tphase_core.phase import GaugeSpec


class Command(TPhaseCommand):
    help = 'Truncated T-SVD: keep the r largest T-singular values and report the Schmidt-Mirsky value'
    subcommand = 'tsvd'
    config_options = ('inputs', 'r', 'gauge', 'output', 'sidecar')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('inputs', metavar='tensor.ttj')
        parser.add_argument('--r', type=int, required=True, help='Number of T-singular values to keep')
        parser.add_argument('--gauge', default='fro', help='Symmetric gauge of the discarded singular values')
        parser.add_argument('--output', '-o', help='Where to write the truncation (default: <input>_tsvd.ttj)')
        parser.add_argument('--sidecar', help='Where to write the JSON sidecar (default: next to the output)')

    def run(self, config, options):
        A = read_ttj(config.inputs[0])
        psi = config.psi or GaugeSpec.lp(2)
        output, sidecar = output_paths(config, 'tsvd')

        result = truncate_rank(A, config.r, psi)
        payload = {**result.sidecar(), 'source': config.inputs[0], 'output': output}
        write_ttj(result.E, output)
        self.emit(payload, sidecar)
        self.summary(f'r={config.r} {psi}: value {result.optimal_value:.12g}')
