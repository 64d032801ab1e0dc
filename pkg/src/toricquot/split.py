"""Split detection for torus weight matrices, with exact integer certificates.

A torus action is split when every rotated coordinate plane has its own
circle subgroup: a primitive ``c`` in Z^k with ``c @ W`` supported exactly on
that plane.  Everything here is integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .actions import TorusAction
from .errors import FixedColumn
from .lattice import IntMatrix, determinant, rank, rational_kernel


@dataclass(frozen=True)
class FixedPlane:
    kind = "fixed"

    def to_dict(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class Circle:
    """Circle subgroup ``c`` rotating one plane at ``speed = (c @ W)[i]`` and fixing the others."""

    c: tuple[int, ...]
    speed: int
    kind = "circle"

    def to_dict(self):
        return {"kind": self.kind, "c": list(self.c), "speed": self.speed}


@dataclass(frozen=True)
class NoCircle:
    kind = "no_circle"

    def to_dict(self):
        return {"kind": self.kind}


PlaneCertificate = Union[FixedPlane, Circle, NoCircle]


@dataclass(frozen=True)
class SplitVerdict:
    is_split: bool
    per_plane: tuple[PlaneCertificate, ...]

    @property
    def failing_planes(self) -> list[int]:
        return [i for i, p in enumerate(self.per_plane) if isinstance(p, NoCircle)]

    def to_dict(self) -> dict:
        return {"is_split": self.is_split, "per_plane": [p.to_dict() for p in self.per_plane]}


@dataclass(frozen=True)
class NonSplitWitness:
    plane: int

    def to_dict(self):
        return {"kind": "non_split", "plane": self.plane}


@dataclass(frozen=True)
class CanonicalSplitForm:
    """Rows of ``U`` are the circle certificates of the rotated planes, in plane order.

    ``U @ W`` has one nonzero entry per row, in distinct columns.  ``U`` is
    nonsingular over Q; ``index = |det U|`` is 1 exactly when the torus is the
    direct product of those circles.
    """

    U: IntMatrix
    UW: IntMatrix
    planes: tuple[int, ...]

    @property
    def index(self) -> int:
        return abs(determinant(self.U))

    @property
    def is_unimodular(self) -> bool:
        return self.index == 1

    def to_dict(self):
        return {"U": self.U.tolist(), "UW": self.UW.tolist(), "planes": list(self.planes),
                "index": self.index}


def _as_weights(W) -> IntMatrix:
    if isinstance(W, TorusAction):
        return W.W
    if isinstance(W, IntMatrix):
        return W
    return IntMatrix.from_rows(W)


def circle_for_plane(W, i: int) -> Circle | NoCircle:
    """Find the circle subgroup rotating plane ``i`` alone, or report that none exists."""
    W = _as_weights(W)
    col = W.column(i)
    if not any(col):
        raise FixedColumn(f"column {i} of W is zero; plane {i} is fixed")
    others = W.select_columns([j for j in range(W.cols) if j != i])
    for c in rational_kernel(others):
        speed = sum(a * b for a, b in zip(c, col))
        if speed:
            return Circle(tuple(c), speed)
    return NoCircle()


def is_split(action) -> SplitVerdict:
    """Per-plane certificates for a ``TorusAction`` (or a bare weight matrix)."""
    W = _as_weights(action)
    per_plane: list[PlaneCertificate] = []
    for i in range(W.cols):
        if not any(W.column(i)):
            per_plane.append(FixedPlane())
        else:
            per_plane.append(circle_for_plane(W, i))
    verdict = not any(isinstance(p, NoCircle) for p in per_plane)
    return SplitVerdict(verdict, tuple(per_plane))


def is_split_by_rank(action) -> bool:
    """Independent split test: every nonzero column must raise the rank of the others.

    Kept separate from ``is_split`` so the two can be cross-checked.
    """
    W = _as_weights(action)
    nonzero = [i for i in range(W.cols) if any(W.column(i))]
    if len(nonzero) != rank(W):
        return False
    full = rank(W)
    for i in nonzero:
        rest = [j for j in range(W.cols) if j != i]
        if rank(W.select_columns(rest)) == full:
            return False
    return True


def canonical_split_form(action) -> CanonicalSplitForm | NonSplitWitness:
    W = _as_weights(action)
    verdict = is_split(W)
    if not verdict.is_split:
        return NonSplitWitness(verdict.failing_planes[0])
    planes = tuple(i for i, p in enumerate(verdict.per_plane) if isinstance(p, Circle))
    U = IntMatrix.from_rows([verdict.per_plane[i].c for i in planes], W.rows)
    return CanonicalSplitForm(U, U @ W, planes)


def verify_certificate(W, i: int, cert: Circle) -> bool:
    """Re-check a circle certificate with integer arithmetic."""
    W = _as_weights(W)
    image = W.vecmul(cert.c)
    return image[i] == cert.speed != 0 and all(v == 0 for j, v in enumerate(image) if j != i)
