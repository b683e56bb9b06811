from tphase_core.approx import half_phase_truncate, optimal_tprank_value
from tphase_core.fileformats import read_ttj, write_ttj
from tphase_core.management.base import TPhaseCommand, output_paths
from tphase_core.phase import GaugeSpec, canonical_phases, gauge_eval, tprank


class Command(TPhaseCommand):
    help = (
        'Low T-phase-rank approximation: write E with tprank(E) <= r and a JSON '
        'sidecar with the optimal gauge value of E^-1 * A * E^-1'
    )
    subcommand = 'truncate'
    config_options = ('inputs', 'r', 'gauge', 'output', 'sidecar')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('inputs', metavar='tensor.ttj')
        parser.add_argument('--r', type=int, required=True, help='Number of phases to cancel')
        parser.add_argument('--gauge', default='fro', help='Symmetric gauge: kyfan:k, lp:x, linf, l1, fro, weighted:w1,w2,...')
        parser.add_argument('--output', '-o', help='Where to write E (default: <input>_E.ttj)')
        parser.add_argument('--sidecar', help='Where to write the JSON sidecar (default: next to E)')

    def run(self, config, options):
        A = read_ttj(config.inputs[0])
        psi = config.psi or GaugeSpec.lp(2)
        output, sidecar = output_paths(config, 'E')

        result = half_phase_truncate(A, config.r)
        value = optimal_tprank_value(A, config.r, psi)
        payload = result.sidecar(psi, value)
        payload['attained_value'] = gauge_eval(psi, canonical_phases(result.W).values)
        payload['tprank_E'] = tprank(result.E)
        payload['source'] = config.inputs[0]
        payload['E'] = output

        write_ttj(result.E, output)
        self.emit(payload, sidecar)
        self.summary(f'r={config.r} {psi}: optimal value {value:.12g}')
