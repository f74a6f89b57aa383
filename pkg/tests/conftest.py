import json
import sys

import numpy as np
import pytest

THREE_QUBIT_AMPS = [0.6, 0.5, 0.2, 0.2, 0.3, 0.3, 0.2, 0.3]
THREE_QUBIT_PROBS = [0.36, 0.25, 0.04, 0.04, 0.09, 0.09, 0.04, 0.09]

ENTANGLED_AMPS = [0.9, -0.3, 0.1, 0.3]
ENTANGLED_MATRIX = np.array([
    [0.81, -0.27, 0.09, 0.27],
    [-0.27, 0.09, -0.03, -0.09],
    [0.09, -0.03, 0.01, 0.03],
    [0.27, -0.09, 0.03, 0.09],
])
ENTANGLED_FIRST = np.array([[0.9, 0.0], [0.0, 0.1]])
ENTANGLED_SECOND = np.array([[0.82, -0.24], [-0.24, 0.18]])

RHO_X = np.array([[0.6, 0.3], [0.3, 0.4]])
RHO_Y = np.array([[0.7, 0.1], [0.1, 0.3]])
PRODUCT_MATRIX = np.array([
    [0.42, 0.06, 0.21, 0.03],
    [0.06, 0.18, 0.03, 0.09],
    [0.21, 0.03, 0.28, 0.04],
    [0.03, 0.09, 0.04, 0.12],
])
PRODUCT_PROBS = [0.42, 0.18, 0.28, 0.12]

BELL_PROBS = [0.5, 0.0, 0.0, 0.5]


def pure_file_data(amps):
    n = int(np.log2(len(amps)))
    return {"kind": "pure", "qubits": n,
            "amplitudes": [[float(np.real(a)), float(np.imag(a))] for a in amps]}


def density_file_data(matrix):
    matrix = np.asarray(matrix, dtype=complex)
    n = int(np.log2(matrix.shape[0]))
    return {"kind": "density", "qubits": n,
            "matrix": [[[z.real, z.imag] for z in row] for row in matrix]}


@pytest.fixture
def write_json(tmp_path):
    counter = iter(range(10**6))

    def write(data, name=None):
        path = tmp_path / (name or f"input{next(counter)}.json")
        path.write_text(json.dumps(data))
        return str(path)

    return write


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
