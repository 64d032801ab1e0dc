"""Orbit-type strata of a coordinate torus action, orbifold classification, reductions.

A stratum is indexed by the set ``N`` of planes whose components vanish.  The
isotropy there is ``{theta : theta @ W_j in Z for j not in N}``; its identity
component is the subtorus with lattice ``ker(W_A)`` (``A`` the active planes),
and its component group is read off the Smith form of ``W_A``.  A point is an
orbifold point exactly when that identity component, acting on the planes in
``N``, is split.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .actions import FiniteOrthGroup, TorusAction, close_group, rotation
from .errors import NotSplit, TooManyPlanes
from .lattice import IntMatrix, rational_kernel, smith_normal_form
from .split import Circle, SplitVerdict, canonical_split_form, is_split

DEFAULT_MAX_PLANES = 12


@dataclass(frozen=True)
class IsotropyDescriptor:
    dim: int
    invariant_factors: tuple[int, ...]
    slice_weight_matrix: IntMatrix

    @property
    def finite_order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def to_dict(self):
        return {
            "dim": self.dim,
            "invariant_factors": list(self.invariant_factors),
            "finite_order": self.finite_order,
            "slice_weight_matrix": self.slice_weight_matrix.tolist(),
        }


@dataclass(frozen=True)
class Stratum:
    pattern: tuple[int, ...]
    dim_in_total: int
    isotropy: IsotropyDescriptor
    dim_in_quotient: int

    @property
    def is_principal(self) -> bool:
        return not self.pattern

    def to_dict(self):
        return {
            "pattern": list(self.pattern),
            "dim_in_total": self.dim_in_total,
            "dim_in_quotient": self.dim_in_quotient,
            "isotropy": self.isotropy.to_dict(),
        }


@dataclass(frozen=True)
class Orbifold:
    kind = "orbifold"

    def to_dict(self):
        return {"verdict": self.kind}


@dataclass(frozen=True)
class NonOrbifold:
    """``plane`` is the original index of a slice plane with no decoupling circle."""

    plane: int
    slice_verdict: SplitVerdict
    kind = "non_orbifold"

    def to_dict(self):
        return {"verdict": self.kind, "witness_plane": self.plane, "slice_split": self.slice_verdict.to_dict()}


def isotropy(action: TorusAction, pattern) -> IsotropyDescriptor:
    W = action.effective_W
    pattern = tuple(sorted(pattern))
    active = [j for j in range(action.n) if j not in pattern]
    W_A = W.select_columns(active)
    snf = smith_normal_form(W_A)
    kernel = rational_kernel(W_A)
    K = IntMatrix.from_rows(kernel, action.k)
    slice_W = K @ W.select_columns(list(pattern))
    return IsotropyDescriptor(len(kernel), snf.torsion, slice_W)


def enumerate_strata(action: TorusAction, max_planes: int = DEFAULT_MAX_PLANES) -> list[Stratum]:
    """One stratum per subset of planes, ordered by size then lexicographically."""
    if action.n > max_planes:
        raise TooManyPlanes(f"n = {action.n} planes exceeds the bound {max_planes} (2^n strata)")
    out = []
    for size in range(action.n + 1):
        for pattern in itertools.combinations(range(action.n), size):
            iso = isotropy(action, pattern)
            dim_total = action.m - 2 * size
            out.append(Stratum(pattern, dim_total, iso, dim_total - (action.k - iso.dim)))
    return out


def classify_stratum(action: TorusAction, stratum: Stratum) -> Orbifold | NonOrbifold:
    S = stratum.isotropy.slice_weight_matrix
    if stratum.isotropy.dim == 0:
        return Orbifold()
    verdict = is_split(S)
    if verdict.is_split:
        return Orbifold()
    local = verdict.failing_planes[0]
    return NonOrbifold(stratum.pattern[local], verdict)


@dataclass(frozen=True)
class SingularSetDimension:
    dim_B: int | None
    bound: int
    satisfied: bool

    @property
    def sharp(self) -> bool:
        return self.dim_B is not None and self.dim_B == self.bound

    def to_dict(self):
        return {"dim_B": self.dim_B, "bound": self.bound, "satisfied": self.satisfied, "sharp": self.sharp}


def singular_set_dimension(action: TorusAction, strata=None, max_planes: int = DEFAULT_MAX_PLANES) -> SingularSetDimension:
    """Dimension of the non-orbifold locus B in the quotient against ``min(m - 4, dim(R^m/T) - 3)``.

    B is a finite union of stratum images, so its dimension is the largest
    ``dim_in_quotient`` among non-orbifold strata.
    """
    if strata is None:
        strata = enumerate_strata(action, max_planes)
    bad = [s.dim_in_quotient for s in strata if isinstance(classify_stratum(action, s), NonOrbifold)]
    dim_B = max(bad) if bad else None
    bound = min(action.m - 4, (action.m - action.k) - 3)
    return SingularSetDimension(dim_B, bound, dim_B is None or dim_B <= bound)


# --- local Riemannian reduction ---------------------------------------------


@dataclass(frozen=True)
class ReductionPair:
    """Subspace ``S`` (orthonormal columns) and finite group ``gamma`` with ``S/gamma`` isometric to ``R^m/T``."""

    subspace_basis: np.ndarray
    gamma: FiniteOrthGroup
    rotated_planes: tuple[int, ...]

    def to_dict(self):
        return {
            "subspace_basis": self.subspace_basis.T.tolist(),
            "rotated_planes": list(self.rotated_planes),
            "gamma_order": self.gamma.order,
            "gamma": self.gamma.elements.tolist(),
        }

    def restricts(self, tol: float = 1e-9) -> bool:
        """Every element of gamma maps span(S) into itself."""
        B = self.subspace_basis
        proj = B @ B.T
        return all(np.linalg.norm(g @ B - proj @ g @ B) < tol for g in self.gamma)


def local_reduction(action: TorusAction) -> ReductionPair:
    """``S = {y_i = 0 on rotated planes}`` with gamma generated by the half-turns of those planes.

    Each half-turn is a genuine torus element: the circle certificate of plane
    ``i`` run for time ``pi / speed``.
    """
    form = canonical_split_form(action)
    if not hasattr(form, "U"):
        raise NotSplit(f"action is not split (plane {form.plane} has no decoupling circle)")
    verdict = is_split(action)
    m = action.m
    axes = []
    gens = []
    for i, cert in enumerate(verdict.per_plane):
        axes.append(2 * i)
        if isinstance(cert, Circle):
            theta = np.pi * np.asarray(cert.c, dtype=float) / cert.speed
            gens.append(rotation(action, theta))
        else:
            axes.append(2 * i + 1)
    axes.extend(range(2 * action.n, m))
    basis = np.eye(m)[:, sorted(axes)]
    gamma = close_group(gens or [np.eye(m)])
    return ReductionPair(basis, gamma, form.planes)


# --- quotient distances -----------------------------------------------------


def quotient_distance_finite(group: FiniteOrthGroup, x, y) -> float:
    """``min_g |x - g y|`` over the explicit element list."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    images = group.elements @ y
    return float(np.min(np.linalg.norm(images - x[None], axis=1)))
