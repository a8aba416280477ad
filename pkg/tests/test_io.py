import json

import numpy as np
import pytest

from conftest import cgauss
from ncmaj.errors import InvalidInputError
from ncmaj.io import dumps, matrix_from_json, matrix_to_json, tensor_from_json, tensor_to_json
from ncmaj.linalg import Tensor4


def test_matrix_roundtrip():
    A = cgauss(np.random.default_rng(0), (3, 3))
    back = matrix_from_json(json.loads(json.dumps(matrix_to_json(A))))
    np.testing.assert_array_equal(back, A)
    np.testing.assert_array_equal(matrix_from_json([[1, 2], [3, 4]]), [[1, 2], [3, 4]])
    with pytest.raises(InvalidInputError):
        matrix_from_json([[1, 2], [3]])


def test_tensor_roundtrip_and_inference():
    gen = np.random.default_rng(1)
    T = Tensor4.from_factors([cgauss(gen, (2, 2)) for _ in range(2)])
    back = tensor_from_json(tensor_to_json(T))
    np.testing.assert_allclose(back.matrix, T.matrix)
    assert len(back.factors) == 2
    assert tensor_from_json({"matrix": matrix_to_json(np.eye(9))}).n == 3
    assert tensor_from_json({"factors": [matrix_to_json(np.eye(2))]}).n == 2
    with pytest.raises(InvalidInputError):
        tensor_from_json({"factors": []})
    with pytest.raises(InvalidInputError):
        tensor_from_json({})


def test_canonical_dumps():
    assert dumps({"b": 1, "a": [1.5]}) == '{\n  "a": [\n    1.5\n  ],\n  "b": 1\n}\n'
    with pytest.raises(ValueError):
        dumps({"x": float("nan")})
