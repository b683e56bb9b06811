"""
Readers and writers for the on-disk formats.

``.ttj``  tensor: {"m", "n", "p", "data": [slice][row][col] = [re, im]}
``.tlj``  system: {"kind": "ss", "A": ttj, "B": ttj, "C": ttj, "D": ttj}
          or {"kind": "rational", "slices": [slice][row][col] = {"num", "den"}}
          or {"kind": "static", "D": ttj}

Tensor numbers are written with 17 significant digits. Every writer goes
through a temporary file in the target directory and an atomic rename.
"""

import csv
import io
import json
import math
import numbers
import os
import tempfile
from pathlib import Path

import numpy as np
from django.core.serializers.json import DjangoJSONEncoder

from .exceptions import FormatError
from .tensor import ComplexTensor3


class TPhaseJSONEncoder(DjangoJSONEncoder):
    """DjangoJSONEncoder that also understands numpy values and report objects"""

    def default(self, o):
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, complex):
            return [o.real, o.imag]
        if hasattr(o, 'to_dict'):
            return o.to_dict()
        return super().default(o)


def fmt(x):
    return format(float(x), '.17g')


# --- atomic writes ------------------------------------------------------------

def write_text_atomic(text, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def dumps_json(payload):
    return json.dumps(payload, cls=TPhaseJSONEncoder, indent=2, allow_nan=True) + '\n'


def write_json_atomic(payload, path):
    return write_text_atomic(dumps_json(payload), path)


def write_csv_atomic(header, rows, path):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    return write_text_atomic(buffer.getvalue(), path)


# --- tensors ------------------------------------------------------------------

def _load_json(path):
    try:
        with open(path, encoding='utf-8') as handle:
            return json.load(handle)
    except OSError as exc:
        raise FormatError(f'cannot read {path}: {exc.strerror or exc}') from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f'{path}: invalid JSON ({exc.msg} at line {exc.lineno})') from exc


def _is_number(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def _dimension(payload, key):
    value = payload.get(key)
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise FormatError(f"'{key}' must be a positive integer")
    return value


def tensor_from_dict(payload):
    if not isinstance(payload, dict):
        raise FormatError('tensor must be a JSON object')
    missing = {'m', 'n', 'p', 'data'} - set(payload)
    if missing:
        raise FormatError(f"tensor is missing keys: {', '.join(sorted(missing))}")
    m, n, p = (_dimension(payload, key) for key in ('m', 'n', 'p'))
    data = payload['data']

    values = np.empty((m, n, p), dtype=complex)
    if not isinstance(data, list) or len(data) != p:
        raise FormatError(f"'data' must hold {p} slices")
    for k, frontal in enumerate(data):
        if not isinstance(frontal, list) or len(frontal) != m:
            raise FormatError(f'slice {k} must hold {m} rows')
        for i, row in enumerate(frontal):
            if not isinstance(row, list) or len(row) != n:
                raise FormatError(f'slice {k} row {i} must hold {n} entries')
            for j, entry in enumerate(row):
                if not (isinstance(entry, list) and len(entry) == 2 and all(_is_number(v) for v in entry)):
                    raise FormatError(f'entry ({k}, {i}, {j}) must be a [re, im] pair')
                if not all(math.isfinite(v) for v in entry):
                    raise FormatError(f'entry ({k}, {i}, {j}) is not finite')
                values[i, j, k] = complex(entry[0], entry[1])
    return ComplexTensor3(values)


def tensor_to_json(A):
    """17-significant-digit JSON text for a tensor"""
    slices = []
    for k in range(A.p):
        rows = []
        for i in range(A.m):
            entries = ', '.join(f'[{fmt(z.real)}, {fmt(z.imag)}]' for z in A.data[i, :, k])
            rows.append(f'      [{entries}]')
        slices.append('    [\n' + ',\n'.join(rows) + '\n    ]')
    return (
        '{\n'
        f'  "m": {A.m},\n  "n": {A.n},\n  "p": {A.p},\n'
        '  "data": [\n' + ',\n'.join(slices) + '\n  ]\n}'
    )


def tensor_to_dict(A):
    return json.loads(tensor_to_json(A))


def read_ttj(path):
    return tensor_from_dict(_load_json(path))


def write_ttj(A, path):
    return write_text_atomic(tensor_to_json(A) + '\n', path)


# --- systems ------------------------------------------------------------------

def _coefficients(value, what):
    if not isinstance(value, list) or not value or not all(_is_number(v) for v in value):
        raise FormatError(f'{what} must be a non-empty list of real numbers')
    return [float(v) for v in value]


def system_from_dict(payload):
    from .lti import RationalSliceTF, StateSpaceTensor, StaticGain

    if not isinstance(payload, dict) or 'kind' not in payload:
        raise FormatError("system must be a JSON object with a 'kind'")
    kind = payload['kind']
    if kind == 'ss':
        missing = {'A', 'B', 'C', 'D'} - set(payload)
        if missing:
            raise FormatError(f"state-space system is missing {', '.join(sorted(missing))}")
        tensors = {key: tensor_from_dict(payload[key]) for key in ('A', 'B', 'C', 'D')}
        try:
            return StateSpaceTensor(**tensors)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    if kind == 'rational':
        slices = payload.get('slices')
        if not isinstance(slices, list) or not slices:
            raise FormatError("rational system needs a non-empty 'slices' list")
        parsed = []
        for k, frontal in enumerate(slices):
            if not isinstance(frontal, list):
                raise FormatError(f'slice {k} must be a list of rows')
            rows = []
            for i, row in enumerate(frontal):
                if not isinstance(row, list):
                    raise FormatError(f'slice {k} row {i} must be a list')
                entries = []
                for j, entry in enumerate(row):
                    if not isinstance(entry, dict):
                        raise FormatError(f'entry ({k}, {i}, {j}) must be an object with num and den')
                    where = f'entry ({k}, {i}, {j})'
                    entries.append((_coefficients(entry.get('num'), f'{where} num'),
                                    _coefficients(entry.get('den'), f'{where} den')))
                rows.append(entries)
            parsed.append(rows)
        try:
            return RationalSliceTF(parsed)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    if kind == 'static':
        if 'D' not in payload:
            raise FormatError('static system is missing D')
        return StaticGain(tensor_from_dict(payload['D']))
    raise FormatError(f"unknown system kind '{kind}'")


def system_to_dict(system):
    from .lti import StateSpaceTensor, StaticGain

    if isinstance(system, StaticGain):
        return {'kind': 'static', 'D': tensor_to_dict(system.D)}
    if isinstance(system, StateSpaceTensor):
        return {
            'kind': 'ss',
            **{key: tensor_to_dict(getattr(system, key)) for key in ('A', 'B', 'C', 'D')},
        }
    return {
        'kind': 'rational',
        'slices': [
            [[{'num': list(num), 'den': list(den)} for num, den in row] for row in frontal]
            for frontal in system.slices
        ],
    }


def read_tlj(path):
    return system_from_dict(_load_json(path))


def write_tlj(system, path):
    return write_json_atomic(system_to_dict(system), path)
