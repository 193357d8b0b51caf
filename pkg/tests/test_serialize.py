import json

import numpy as np
import pytest

from nclp import serialize as ser
from nclp.algebra import make_algebra, random_faithful_state
from nclp.errors import ShapeMismatch
from nclp.isometry import build_isometry, classify
from nclp.lp import LpMap
from nclp.samples import random_isometry_data, random_lp_vector, rng_for


def test_algebra_roundtrip():
    alg = make_algebra([2, 3])
    obj = ser.algebra_to_json(alg, trace_weights=[1.0, 2.0])
    assert obj == {"blocks": [2, 3], "trace_weights": [1.0, 2.0]}
    assert ser.algebra_from_json(obj) == alg


def test_element_json_convention():
    alg = make_algebra([2])
    h = random_lp_vector(alg, 3.0, rng_for(1))
    obj = ser.lp_vector_to_json(h)
    # row-major [re, im] pairs
    assert obj["p"] == 3.0
    assert obj["blocks"][0][0][1] == [float(h.data[0][0, 1].real), float(h.data[0][0, 1].imag)]
    back = ser.lp_vector_from_json(json.loads(json.dumps(obj)))
    assert (back - h).frobenius() < 1e-15
    assert back.p == 3.0


def test_state_roundtrip():
    alg = make_algebra([2, 2])
    phi = random_faithful_state(alg, 5)
    back = ser.state_from_json(json.loads(json.dumps(ser.state_to_json(phi))))
    assert (back.density - phi.density).frobenius() < 1e-15
    assert back.faithful


def test_lp_map_roundtrip():
    alg = make_algebra([2])
    rng = rng_for(7)
    T = LpMap(alg, alg, 2.5, rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    back = ser.lp_map_from_json(json.loads(json.dumps(ser.lp_map_to_json(T))))
    assert np.array_equal(back.matrix, T.matrix)
    assert back.p == 2.5


def test_vector_without_exponent_rejected():
    alg = make_algebra([2])
    obj = ser.element_to_json(random_lp_vector(alg, 3.0, rng_for(2)))
    with pytest.raises(ShapeMismatch):
        ser.lp_vector_from_json(obj)


def test_isometry_data_roundtrip_classifies():
    data = random_isometry_data(5)
    obj = json.loads(json.dumps(ser.isometry_data_to_json(data)))
    back = ser.isometry_data_from_json(obj)
    T = build_isometry(back, 3.0)
    report = classify(T, back.reference_state, 3.0)
    assert report.accepted


def test_subalgebra_roundtrip():
    data = random_isometry_data(1)
    A = data.expectation.subalgebra
    back = ser.subalgebra_from_json(json.loads(json.dumps(ser.subalgebra_to_json(A))))
    assert back.parent == A.parent
    assert len(back.basis) == len(A.basis)
    for a, b in zip(back.basis, A.basis):
        assert (a - b).frobenius() < 1e-15
