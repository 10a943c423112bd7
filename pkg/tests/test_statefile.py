import json

import numpy as np
import pytest

from conftest import random_mixed, random_pure
from qsteer.errors import NumericalIntegrityError, StateFileError
from qsteer.statefile import dumps, fmt17, loads, read_state, state_to_dict, write_state
from qsteer.tensor import DensityMatrix, PureState, ghz_state, maximally_mixed


def test_fmt17_round_trips_floats(rng):
    for x in rng.normal(size=200):
        assert float(fmt17(x)) == x
    assert fmt17(0.1) == "0.10000000000000001"
    assert fmt17(3.0) == "3"


def test_pure_round_trip_is_exact(rng, tmp_path):
    psi = random_pure(rng)
    write_state(tmp_path / "s.json", psi)
    back = read_state(tmp_path / "s.json")
    assert isinstance(back, PureState)
    assert np.array_equal(back.amplitudes, psi.amplitudes)


def test_mixed_round_trip_is_exact(rng, tmp_path):
    rho = random_mixed(rng, 3)
    write_state(tmp_path / "m.json", rho)
    back = read_state(tmp_path / "m.json")
    assert isinstance(back, DensityMatrix)
    assert np.array_equal(back.entries, rho.entries)


def test_dumps_is_valid_json():
    text = dumps(state_to_dict(ghz_state()))
    assert json.loads(text)["kind"] == "pure"


def test_mixed_num_qubits_optional():
    d = state_to_dict(maximally_mixed(2))
    del d["num_qubits"]
    assert loads(json.dumps(d)).num_qubits == 2


def test_syntax_error_reports_line():
    with pytest.raises(StateFileError) as err:
        loads('{\n  "kind": "pure",\n  "num_qubits": 1\n  "amplitudes": []\n}')
    assert err.value.line == 4
    assert "line 4" in str(err.value)


@pytest.mark.parametrize("doc, field", [
    ({"kind": "ket"}, "kind"),
    ({"kind": "pure", "amplitudes": [[1, 0], [0, 0]]}, "num_qubits"),
    ({"kind": "pure", "num_qubits": 4, "amplitudes": []}, "num_qubits"),
    ({"kind": "pure", "num_qubits": 1, "amplitudes": [[1, 0]]}, "amplitudes"),
    ({"kind": "pure", "num_qubits": 1, "amplitudes": [[1, 0], [0]]}, "amplitudes[1]"),
    ({"kind": "pure", "num_qubits": 1, "amplitudes": [[1, 0], ["x", 0]]}, "amplitudes[1]"),
    ({"kind": "pure", "num_qubits": 1, "amplitudes": [[1, 0], [1, 0]]}, "amplitudes"),
    ({"kind": "mixed", "entries": [[[1, 0], [0, 0]], [[0, 0]]]}, "entries[1]"),
    ({"kind": "mixed", "num_qubits": 2, "entries": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]}, "entries"),
])
def test_field_errors(doc, field):
    with pytest.raises(StateFileError) as err:
        loads(json.dumps(doc))
    assert err.value.field == field


def test_top_level_must_be_object():
    with pytest.raises(StateFileError):
        loads("[1, 2]")


def test_non_psd_matrix_is_integrity_error():
    doc = {"kind": "mixed", "entries": [[[1.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]]}
    with pytest.raises(NumericalIntegrityError):
        loads(json.dumps(doc))
