"""JSON input schemas.

A form::

    {"dim": 3, "matrix": [[1, 0, 0], [0, 2, 0], [0, 0, 3]]}

A tensor sum (coefficients are absorbed into the forms on load)::

    {"dim": 3, "terms": [{"coefficient": 1, "form": [[...], ...]}, ...]}
"""

from __future__ import annotations

import json
import sys

from .curvature import CanonicalTensor, TensorSum, normalize_sum
from .errors import CurvatureError
from .linalg import SymmetricForm


class InputError(CurvatureError):
    pass


def read_document(path: str) -> dict:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path!r}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path!r}: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError("input must be a JSON object")
    return doc


def _dim(doc: dict) -> int:
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InputError('"dim" must be a positive integer')
    return dim


def _matrix(rows, dim: int, where: str) -> SymmetricForm:
    if not isinstance(rows, list) or len(rows) != dim or any(
        not isinstance(r, list) or len(r) != dim for r in rows
    ):
        raise InputError(f"{where} must be a {dim}x{dim} list of lists")
    for r in rows:
        for v in r:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise InputError(f"{where} has a non-numeric entry {v!r}")
    return SymmetricForm.from_matrix(rows)


def parse_form(doc: dict) -> SymmetricForm:
    dim = _dim(doc)
    if "matrix" not in doc:
        raise InputError('form input needs a "matrix" key')
    return _matrix(doc["matrix"], dim, '"matrix"')


def parse_sum(doc: dict) -> TensorSum:
    """Parse a tensor sum; terms with zero coefficient are dropped."""
    dim = _dim(doc)
    terms = doc.get("terms")
    if not isinstance(terms, list) or not terms:
        raise InputError('"terms" must be a non-empty list')
    coeffs = []
    for k, term in enumerate(terms):
        if not isinstance(term, dict) or "coefficient" not in term or "form" not in term:
            raise InputError(f'term {k} needs "coefficient" and "form"')
        alpha = term["coefficient"]
        if isinstance(alpha, bool) or not isinstance(alpha, (int, float)):
            raise InputError(f"term {k} coefficient must be a number")
        phi = _matrix(term["form"], dim, f"term {k} form")
        if alpha != 0:
            coeffs.append((alpha, phi))
    if not coeffs:
        raise InputError("every term has a zero coefficient")
    return normalize_sum(coeffs)


def parse_tensor(doc: dict):
    """A ``CanonicalTensor`` for form input, a ``TensorSum`` for sum input."""
    if "terms" in doc:
        return parse_sum(doc)
    return CanonicalTensor(parse_form(doc))


def form_document(phi: SymmetricForm) -> dict:
    return {"dim": phi.dim, "matrix": phi.matrix.tolist()}


def sum_document(t: TensorSum) -> dict:
    return {
        "dim": t.dim,
        "terms": [{"coefficient": float(sign), "form": phi.matrix.tolist()} for sign, phi in t.terms],
    }
