"""Signal constellations: points, bit labels and priors.

A constellation is an immutable set of ``M`` points in ``n`` dimensions. Bit
labels are optional (without them BER is undefined); priors default to
uniform. Coded systems enter as user-supplied extended constellations whose
points are the codewords.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

POINT_ATOL = 1e-9
PRIOR_ATOL = 1e-12
ENERGY_ATOL = 1e-9

FAMILIES = ("bpsk", "pam", "psk", "qam")
MAPPINGS = ("gray", "binary")


class ConstellationError(ValueError):
    """Raised for malformed or unsupported constellations."""


def _gray(m: int) -> int:
    return m ^ (m >> 1)


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True, eq=False)
class Constellation:
    """``M`` points in ``n``-dimensional signal space.

    Parameters
    ----------
    points : array_like, shape (M, n)
    labels : sequence of str, optional
        Bit strings, most significant bit first. All of length ``log2(M)``.
    priors : array_like, shape (M,), optional
        Transmission probabilities; uniform when omitted.
    name : str
        Free-form identifier carried into reports.
    """

    points: np.ndarray
    labels: tuple[str, ...] | None = None
    priors: np.ndarray | None = None
    name: str = "custom"
    normalized: bool = field(init=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] < 1:
            raise ConstellationError("points must be an (M, n) array with M >= 2")
        if not np.all(np.isfinite(pts)):
            raise ConstellationError("points must be finite")
        M = pts.shape[0]
        diff = np.abs(pts[:, None, :] - pts[None, :, :]).max(axis=2)
        np.fill_diagonal(diff, np.inf)
        if np.any(diff <= POINT_ATOL):
            i, j = np.argwhere(diff <= POINT_ATOL)[0]
            raise ConstellationError(f"duplicate points at indices {i} and {j}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != M:
                raise ConstellationError(f"expected {M} labels, got {len(labels)}")
            if not _is_power_of_two(M):
                raise ConstellationError(f"labels require M to be a power of two, got M={M}")
            k = int(math.log2(M))
            for s in labels:
                if len(s) != k or set(s) - {"0", "1"}:
                    raise ConstellationError(f"label {s!r} is not a {k}-bit string")
            if len(set(labels)) != M:
                raise ConstellationError("labels must be distinct")
            object.__setattr__(self, "labels", labels)

        if self.priors is None:
            pri = np.full(M, 1.0 / M)
        else:
            pri = np.array(self.priors, dtype=float).ravel()
            if pri.shape != (M,):
                raise ConstellationError(f"expected {M} priors, got {pri.size}")
            if np.any(pri < 0) or not np.all(np.isfinite(pri)):
                raise ConstellationError("priors must be nonnegative")
            if abs(pri.sum() - 1.0) > PRIOR_ATOL:
                raise ConstellationError(f"priors sum to {pri.sum()!r}, not 1")
        pri.setflags(write=False)
        object.__setattr__(self, "priors", pri)
        object.__setattr__(self, "normalized", abs(self.average_energy - 1.0) <= ENERGY_ATOL)

    @property
    def M(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def bits_per_symbol(self) -> int:
        if self.labels is None:
            raise ConstellationError(f"constellation {self.name!r} has no bit labels")
        return int(math.log2(self.M))

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    @property
    def average_energy(self) -> float:
        """Unweighted mean squared norm ``(1/M) sum |s_i|^2``."""
        return float(np.mean(np.sum(self.points**2, axis=1)))

    def normalize(self) -> "Constellation":
        """Return a copy rescaled to unit average energy."""
        return self.scaled(1.0 / math.sqrt(self.average_energy))

    def scaled(self, factor: float) -> "Constellation":
        return Constellation(self.points * factor, self.labels, self.priors, self.name)

    def permuted(self, perm: Sequence[int]) -> "Constellation":
        perm = list(perm)
        labels = None if self.labels is None else tuple(self.labels[p] for p in perm)
        return Constellation(self.points[perm], labels, self.priors[perm], self.name)

    def with_priors(self, priors) -> "Constellation":
        return Constellation(self.points, self.labels, priors, self.name)

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "name": self.name,
            "dimension": self.n,
            "points": self.points.tolist(),
        }
        if self.labels is not None:
            doc["labels"] = list(self.labels)
        doc["priors"] = self.priors.tolist()
        doc["normalized"] = self.normalized
        return doc


def hamming_matrix(c: Constellation) -> np.ndarray:
    """Pairwise Hamming distances between the bit labels of ``c``."""
    if c.labels is None:
        raise ConstellationError(f"constellation {c.name!r} has no bit labels")
    bits = np.array([[ch == "1" for ch in s] for s in c.labels], dtype=np.int64)
    return np.sum(bits[:, None, :] != bits[None, :, :], axis=2)


def _pam_levels(M: int) -> np.ndarray:
    return np.arange(M, dtype=float) * 2 - (M - 1)


def _label(value: int, k: int) -> str:
    return format(value, f"0{k}b") if k else ""


def make_standard(family: str, M: int, mapping: str = "gray") -> Constellation:
    """Build a unit-energy constellation from a standard family.

    PAM and BPSK are one-dimensional, PSK and QAM two-dimensional. Points are
    ordered by level (PAM), by phase (PSK) or row-major over the in-phase and
    quadrature levels (QAM).

    Examples
    --------
    >>> make_standard("pam", 4).points.ravel() * math.sqrt(5)
    array([-3., -1.,  1.,  3.])
    """
    family = family.lower()
    mapping = mapping.lower()
    if family not in FAMILIES:
        raise ConstellationError(f"unknown family {family!r}; choose from {FAMILIES}")
    if mapping not in MAPPINGS:
        raise ConstellationError(f"unknown mapping {mapping!r}; choose from {MAPPINGS}")
    if not isinstance(M, (int, np.integer)) or M < 2 or not _is_power_of_two(int(M)):
        raise ConstellationError(f"M must be a power of two >= 2, got {M!r}")
    M = int(M)
    k = int(math.log2(M))
    code = _gray if mapping == "gray" else (lambda m: m)

    if family == "bpsk":
        if M != 2:
            raise ConstellationError(f"BPSK has M = 2, got {M}")
        return Constellation(np.array([[1.0], [-1.0]]), ("0", "1"), name=f"bpsk:2:{mapping}")

    if family == "pam":
        points = _pam_levels(M)[:, None]
        labels = tuple(_label(code(m), k) for m in range(M))

    elif family == "psk":
        # offset pi/M puts QPSK on the diagonals (+-1/sqrt2, +-1/sqrt2)
        phase = 2 * np.pi * np.arange(M) / M + np.pi / M
        points = np.column_stack([np.cos(phase), np.sin(phase)])
        points = np.where(np.abs(points) < 1e-15, 0.0, points)
        labels = tuple(_label(code(m), k) for m in range(M))

    else:
        L = math.isqrt(M)
        if L * L != M:
            raise ConstellationError(f"QAM needs M to be a perfect square, got {M}")
        h = k // 2
        levels = _pam_levels(L)
        rows = []
        labels_list = []
        for a in range(L):
            for b in range(L):
                rows.append((levels[a], levels[b]))
                labels_list.append(_label(code(a), h) + _label(code(b), h))
        points = np.array(rows)
        labels = tuple(labels_list)

    c = Constellation(points, labels, name=f"{family}:{M}:{mapping}")
    return c.normalize()


def from_dict(doc: dict[str, Any], name: str = "custom") -> Constellation:
    """Build a constellation from a parsed constellation-file document.

    Recognised keys: ``dimension``, ``points``, optional ``labels``,
    ``priors`` and ``normalize``.
    """
    if not isinstance(doc, dict):
        raise ConstellationError("constellation document must be a JSON object")
    if "points" not in doc:
        raise ConstellationError("constellation document lacks 'points'")
    try:
        points = np.array(doc["points"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConstellationError(f"malformed points: {exc}") from None
    if points.ndim != 2:
        raise ConstellationError("points must be an array of equal-length coordinate arrays")
    if "dimension" in doc and int(doc["dimension"]) != points.shape[1]:
        raise ConstellationError(
            f"dimension {doc['dimension']} does not match point length {points.shape[1]}"
        )
    labels = doc.get("labels")
    if labels is not None and not all(isinstance(s, str) for s in labels):
        raise ConstellationError("labels must be bit strings")
    c = Constellation(points, labels, doc.get("priors"), name=doc.get("name", name))
    if doc.get("normalize", False):
        c = c.normalize()
    return c


def load(source: str | Path | dict[str, Any]) -> Constellation:
    """Load a constellation from a JSON file path or an already-parsed document."""
    if isinstance(source, dict):
        return from_dict(source)
    path = Path(source)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConstellationError(f"{path}: invalid JSON ({exc})") from None
    return from_dict(doc, name=path.stem)


def parse_constellation(text: str) -> Constellation:
    """Resolve ``name[:M[:mapping]]`` or ``file:PATH``.

    >>> parse_constellation("psk:4:gray").M
    4
    """
    if text.startswith("file:"):
        return load(text[5:])
    family, *rest = text.lower().split(":")
    M = None
    mapping = "gray"
    for token in rest:
        if token.isdigit():
            M = int(token)
        elif token:
            mapping = token
    if family == "qpsk":
        family, M = "psk", M or 4
    elif family == "bpsk":
        M = M or 2
    if M is None:
        raise ConstellationError(f"constellation {text!r} needs an order, e.g. {family}:4:gray")
    return make_standard(family, M, mapping)
