"""JSON encoding of every artifact type.

Complex scalars are [re, im] pairs.  An element is {"blocks": [...]} with each
block a row-major matrix of pairs; vectorization order in map matrices is the
same: blocks in order, rows before columns.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .algebra import Algebra, AlgebraElement, AlgebraMap, State
from .errors import ShapeMismatch
from .expectation import ConditionalExpectation, Subalgebra
from .isometry import ClassificationReport, IsometryData
from .lp import LpMap, LpVector


def _c(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _matrix_to_json(mat: np.ndarray) -> list:
    return [[_c(v) for v in row] for row in np.asarray(mat, dtype=complex)]


def _matrix_from_json(rows: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def algebra_to_json(algebra: Algebra, trace_weights=None) -> dict:
    out: dict[str, Any] = {"blocks": list(algebra.blocks)}
    if trace_weights is not None:
        out["trace_weights"] = [float(t) for t in trace_weights]
    return out


def algebra_from_json(obj: dict) -> Algebra:
    return Algebra(tuple(int(n) for n in obj["blocks"]))


def element_to_json(x: AlgebraElement) -> dict:
    return {"blocks": [_matrix_to_json(b) for b in x.data]}


def element_from_json(obj: dict, algebra: Algebra | None = None) -> AlgebraElement:
    blocks = [_matrix_from_json(b) for b in obj["blocks"]]
    if algebra is None:
        algebra = Algebra(tuple(b.shape[0] for b in blocks))
    return AlgebraElement(algebra, blocks)


def lp_vector_to_json(h: LpVector) -> dict:
    out = element_to_json(h)
    out["p"] = float(h.p)
    return out


def lp_vector_from_json(obj: dict, algebra: Algebra | None = None, p: float | None = None) -> LpVector:
    x = element_from_json(obj, algebra)
    exponent = obj.get("p", p)
    if exponent is None:
        raise ShapeMismatch("vector file carries no exponent and none was given")
    return LpVector.from_element(x, float(exponent))


def state_to_json(state: State) -> dict:
    out = element_to_json(state.density)
    out["faithful"] = bool(state.faithful)
    return out


def state_from_json(obj: dict, algebra: Algebra | None = None) -> State:
    x = element_from_json(obj, algebra)
    return State(x.algebra, list(x.data))


def algebra_map_to_json(F: AlgebraMap) -> dict:
    return {
        "source": algebra_to_json(F.source),
        "target": algebra_to_json(F.target),
        "matrix": _matrix_to_json(F.matrix),
    }


def algebra_map_from_json(obj: dict) -> AlgebraMap:
    return AlgebraMap(
        algebra_from_json(obj["source"]),
        algebra_from_json(obj["target"]),
        _matrix_from_json(obj["matrix"]),
    )


def lp_map_to_json(T: LpMap) -> dict:
    return {
        "p": float(T.p),
        "source": algebra_to_json(T.source),
        "target": algebra_to_json(T.target),
        "matrix": _matrix_to_json(T.matrix),
    }


def lp_map_from_json(obj: dict) -> LpMap:
    return LpMap(
        algebra_from_json(obj["source"]),
        algebra_from_json(obj["target"]),
        float(obj["p"]),
        _matrix_from_json(obj["matrix"]),
    )


def subalgebra_to_json(A: Subalgebra) -> dict:
    return {
        "parent": algebra_to_json(A.parent),
        "basis": [element_to_json(a) for a in A.basis],
    }


def subalgebra_from_json(obj: dict) -> Subalgebra:
    parent = algebra_from_json(obj["parent"])
    basis = [element_from_json(b, parent) for b in obj["basis"]]
    return Subalgebra(parent, basis)


def isometry_data_to_json(data: IsometryData) -> dict:
    return {
        "source": algebra_to_json(data.source),
        "target": algebra_to_json(data.target),
        "pi": algebra_map_to_json(data.pi),
        "w": element_to_json(data.w),
        "expectation": {
            "map": algebra_map_to_json(data.expectation.map),
            "state": state_to_json(data.expectation.state),
            "subalgebra": subalgebra_to_json(data.expectation.subalgebra),
        },
        "reference_state": state_to_json(data.reference_state),
    }


def isometry_data_from_json(obj: dict) -> IsometryData:
    source = algebra_from_json(obj["source"])
    target = algebra_from_json(obj["target"])
    pi = algebra_map_from_json(obj["pi"])
    w = element_from_json(obj["w"], target)
    exp_obj = obj["expectation"]
    expectation = ConditionalExpectation(
        map=algebra_map_from_json(exp_obj["map"]),
        state=state_from_json(exp_obj["state"], target),
        subalgebra=subalgebra_from_json(exp_obj["subalgebra"]),
    )
    return IsometryData(
        source=source,
        target=target,
        pi=pi,
        w=w,
        expectation=expectation,
        reference_state=state_from_json(obj["reference_state"], source),
    )


def classification_report_to_json(report: ClassificationReport) -> dict:
    out: dict[str, Any] = {
        "verdict": report.verdict,
        "defects": {k: float(v) for k, v in report.defects.items()},
        "failing_stage": report.failing_stage,
        "warnings": list(report.warnings),
    }
    if report.data is not None:
        out["data"] = isometry_data_to_json(report.data)
    return out


def dump(obj: dict, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")


def load(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)
