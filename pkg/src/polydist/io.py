"""Instance and report serialization.

Instances are JSON documents: {"n": ..., "k": ..., "coefficients": [...]} with
k+1 coefficient matrices, each an n x n array whose entries are [re, im] pairs
(emitted form) or bare reals (accepted shorthand).  Python's float repr makes
the round trip exact for every stored digit.
"""

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .polynomials import MatrixPolynomial

__all__ = ["InstanceFormatError", "read_instance", "write_instance",
           "instance_to_dict", "instance_from_dict", "DistanceReport"]


class InstanceFormatError(ValueError):
    """The instance document is malformed or inconsistent."""


def _entry_to_complex(entry) -> complex:
    if isinstance(entry, (int, float)):
        return complex(entry, 0.0)
    if isinstance(entry, (list, tuple)) and len(entry) == 2 \
            and all(isinstance(x, (int, float)) for x in entry):
        return complex(entry[0], entry[1])
    raise InstanceFormatError(f"matrix entry must be a real or an [re, im] pair, got {entry!r}")


def instance_from_dict(doc: dict) -> tuple[MatrixPolynomial, dict]:
    """Parse a loaded instance document into a polynomial plus its metadata."""
    if not isinstance(doc, dict):
        raise InstanceFormatError("instance document must be a JSON object")
    try:
        n = int(doc["n"])
        k = int(doc["k"])
        raw = doc["coefficients"]
    except KeyError as exc:
        raise InstanceFormatError(f"missing required field {exc}") from exc
    if n < 1 or k < 1:
        raise InstanceFormatError("n and k must be positive")
    if not isinstance(raw, list) or len(raw) != k + 1:
        raise InstanceFormatError(f"expected {k + 1} coefficient matrices")
    coeffs = np.zeros((k + 1, n, n), dtype=complex)
    for i, mat in enumerate(raw):
        if not isinstance(mat, list) or len(mat) != n \
                or any(not isinstance(row, list) or len(row) != n for row in mat):
            raise InstanceFormatError(f"coefficient {i} is not an {n} x {n} array")
        for a in range(n):
            for b in range(n):
                coeffs[i, a, b] = _entry_to_complex(mat[a][b])
    meta = {key: doc[key] for key in ("name", "source") if key in doc}
    try:
        poly = MatrixPolynomial(coeffs)
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from exc
    return poly, meta


def instance_to_dict(p: MatrixPolynomial, name: str | None = None,
                     source: str | None = None) -> dict:
    """Emit the canonical document: every entry as an explicit [re, im] pair."""
    doc = {}
    if name:
        doc["name"] = name
    if source:
        doc["source"] = source
    doc["n"] = p.n
    doc["k"] = p.k
    doc["coefficients"] = [
        [[[float(z.real), float(z.imag)] for z in row] for row in mat]
        for mat in p.coeffs
    ]
    return doc


def read_instance(path) -> tuple[MatrixPolynomial, dict]:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"not valid JSON: {exc}") from exc
    return instance_from_dict(doc)


def write_instance(path, p: MatrixPolynomial, name: str | None = None,
                   source: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(instance_to_dict(p, name, source), handle, indent=1)
        handle.write("\n")


@dataclass
class DistanceReport:
    """Self-contained record of one distance computation (mirrors the CLI output)."""

    lambda0: list                      # [re, im]
    r_plus_1: int
    norm: str
    lower_bound_sigma: float | None = None
    lower_bound_scaling: float | None = None
    distance: float | None = None
    upper_bound: float | None = None
    perturbation: dict | None = None   # instance-shaped dP
    verification: dict | None = None
    singular: bool = False
    preexisting_multiplicity: bool = False
    seed: int = 0
    starts: int = 0
    budget: int = 0
    evaluations: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_json(self) -> str:
        def clean(x):
            if isinstance(x, float) and not np.isfinite(x):
                return None if np.isnan(x) else ("inf" if x > 0 else "-inf")
            return x
        doc = asdict(self)

        def walk(obj):
            if isinstance(obj, dict):
                return {key: walk(val) for key, val in obj.items()}
            if isinstance(obj, list):
                return [walk(val) for val in obj]
            return clean(obj)
        return json.dumps(walk(doc), indent=1)
