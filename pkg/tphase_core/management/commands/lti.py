from pathlib import Path

import numpy as np

from tphase_core.fileformats import read_tlj
from tphase_core.lti import (
    bode_export, feedback_stable, frequency_grid, hinf_peak, in_phase_class, small_gain_certificate,
    small_phase_certificate,
)
from tphase_core.management.base import TPhaseCommand, fail


class Command(TPhaseCommand):
    help = (
        'Frequency sweep of a tensor LTI system: Bode/phase CSV, H-infinity norm, '
        'phase envelope and, with --with, a small-gain or small-phase certificate'
    )
    subcommand = 'lti'
    config_options = ('inputs', 'grid_points', 'freq_min', 'freq_max', 'with_system', 'certify', 'csv', 'output')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('inputs', metavar='system.tlj')
        parser.add_argument('--grid-points', type=int, help='Log-spaced sweep points (default: TPHASE FREQ_POINTS)')
        parser.add_argument('--freq-min', type=float, help='Lowest sweep frequency in rad/s')
        parser.add_argument('--freq-max', type=float, help='Highest sweep frequency in rad/s')
        parser.add_argument('--with', dest='with_system', metavar='h.tlj', help='Feedback system H for the loop G, H')
        parser.add_argument('--certify', choices=['none', 'gain', 'phase'], default='none')
        parser.add_argument('--csv', help='Bode CSV path (default: <input>_bode.csv)')
        parser.add_argument('--output', '-o', help='Write the JSON report here instead of stdout')

    def run(self, config, options):
        if config.certify not in (None, 'none') and not config.with_system:
            raise fail('--certify needs a feedback system given with --with')
        G = read_tlj(config.inputs[0])
        grid = frequency_grid(config.grid_points, config.freq_min, config.freq_max)
        source = Path(config.inputs[0])
        csv_path = config.csv or str(source.with_name(f'{source.stem}_bode.csv'))

        envelope = bode_export(G, csv_path, grid)
        report = {
            'system': config.inputs[0],
            'csv': csv_path,
            'grid': {'points': int(grid.size), 'freq_min': float(grid[1]), 'freq_max': float(grid[-2])},
            'stable': G.is_stable,
            'envelope': envelope.to_dict(),
            'phi_infinity': envelope.phi_infinity,
            'in_phase_class_pi': in_phase_class(envelope, np.pi),
        }
        if G.is_stable:
            hinf, peak = hinf_peak(G, grid)
            report['hinf'] = {'value': hinf, 'frequency': peak}

        if config.with_system:
            H = read_tlj(config.with_system)
            report['with'] = config.with_system
            report['feedback'] = feedback_stable(G, H).to_dict()
            if config.certify == 'gain':
                report['certificate'] = small_gain_certificate(G, H, grid).to_dict()
            elif config.certify == 'phase':
                report['certificate'] = small_phase_certificate(G, H, grid).to_dict()

        self.emit(report, config.output)
        self.summary(
            f'phase envelope [{envelope.lower_bound_deg:.2f}, {envelope.upper_bound_deg:.2f}] deg, '
            f'spread {envelope.spread_deg:.2f} deg'
        )
