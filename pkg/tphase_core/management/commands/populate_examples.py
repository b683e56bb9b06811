from pathlib import Path

from django.core.management.base import BaseCommand

from tphase_core.fileformats import write_tlj, write_ttj
from tphase_core.lti import RationalSliceTF, StaticGain
from tphase_core.sampling import diagonal_phase_tensor
from tphase_core.tensor import ComplexTensor3, identity

# Fourier slices diag(e^{0.6i}, e^{0.2i}), diag(e^{0.4i}, e^{0.1i}), diag(e^{0.3i}, e^{0.05i})
HALF_PHASE_SLICE_PHASES = [[0.6, 0.2], [0.4, 0.1], [0.3, 0.05]]

LTI_DENOMINATOR = [1.0, 2.0, 2.0]
LTI_NUMERATORS = [
    [[[2.0, 3.0, 4.0], [0.5, 1.0, 1.0]],
     [[0.5, 1.0, 1.0], [1.5, 2.0, 3.0]]],
    [[[0.8, 1.0, 1.0], [0.2, 0.5, 0.2]],
     [[0.2, 0.5, 0.2], [0.9, 1.2, 1.0]]],
]


def half_phase_example():
    return diagonal_phase_tensor(HALF_PHASE_SLICE_PHASES)


def lti_example():
    """2 x 2 x 2 rational system, every entry over s^2 + 2s + 2"""
    return RationalSliceTF([
        [[(num, LTI_DENOMINATOR) for num in row] for row in frontal]
        for frontal in LTI_NUMERATORS
    ])


class Command(BaseCommand):
    help = 'Write the worked-example tensors and systems used in the documentation and tests'

    def add_arguments(self, parser):
        parser.add_argument('--directory', '-d', default='sample_data', help='Target directory (created if missing)')

    def handle(self, *args, **options):
        directory = Path(options['directory'])
        self.stdout.write(f'Writing example inputs to {directory}...')

        files = {
            'halfphase_example.ttj': (write_ttj, half_phase_example()),
            'identity.ttj': (write_ttj, identity(2, 3)),
            'lti_example.tlj': (write_tlj, lti_example()),
            'h_static.tlj': (write_tlj, StaticGain(identity(2, 2) * 0.1)),
            'h_zero.tlj': (write_tlj, StaticGain(ComplexTensor3.zeros(2, 2, 2))),
        }
        for name, (writer, obj) in files.items():
            writer(obj, directory / name)
            self.stdout.write(f'Created {name}')

        self.stdout.write(self.style.SUCCESS('Successfully wrote example inputs!'))
        self.stdout.write(f"Try: python manage.py info {directory / 'halfphase_example.ttj'}")
