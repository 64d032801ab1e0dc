"""Orthogonal torus actions and finite orthogonal groups on R^m.

Coordinates are ordered ``(x_1, y_1, ..., x_n, y_n, z_1, ..., z_f)``.  Circle
factor ``a`` of the torus rotates the plane ``V_i = span(x_i, y_i)`` at speed
``W[a, i]``; the ``z`` coordinates are fixed by everything.  Angles are in
radians with period 2*pi.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidAction, NotClosed, SpecInvalid
from .lattice import IntMatrix, hermite_normal_form, inverse_unimodular, rank, smith_normal_form

DEFAULT_GROUP_TOL = 1e-9

# rotation generator of a single plane, (x, y) -> (-y, x)
_J = np.array([[0.0, -1.0], [1.0, 0.0]])


@dataclass(frozen=True)
class TorusAction:
    """A torus ``T^k`` acting on ``R^(2n+f)`` through the integer weight matrix ``W`` (k x n).

    The constructor rejects weight matrices of rank below ``k`` and zero rows.
    A finite acting kernel is allowed; it is reported through
    ``kernel_factors`` and ``effective_W`` gives a faithful weight matrix for
    the same image torus.
    """

    W: IntMatrix
    f: int = 0
    effective_W: IntMatrix = field(init=False, repr=False, compare=False)
    kernel_factors: tuple[int, ...] = field(init=False, compare=False)

    def __post_init__(self):
        W = self.W
        if not isinstance(W, IntMatrix):
            W = IntMatrix.from_rows(W)
            object.__setattr__(self, "W", W)
        if self.f < 0:
            raise InvalidAction("number of fixed coordinates must be nonnegative")
        for a, row in enumerate(W.entries):
            if not any(row):
                raise InvalidAction(f"row {a} of W is zero: circle factor {a} acts trivially")
        if rank(W) != W.rows:
            raise InvalidAction(f"W has rank {rank(W)} < k = {W.rows}; the torus does not embed")
        snf = smith_normal_form(W)
        object.__setattr__(self, "kernel_factors", snf.torsion)
        if snf.torsion:
            # rows of V^-1 spanning the row space give the saturated weight lattice
            Vinv = inverse_unimodular(snf.V)
            eff, _ = hermite_normal_form(Vinv.select_rows(range(W.rows)))
            object.__setattr__(self, "effective_W", eff)
        else:
            object.__setattr__(self, "effective_W", W)

    @classmethod
    def from_weights(cls, W, f: int = 0, n: int | None = None) -> "TorusAction":
        if isinstance(W, IntMatrix):
            return cls(W, f)
        rows = [list(r) for r in W]
        return cls(IntMatrix.from_rows(rows, n), f)

    @property
    def k(self) -> int:
        return self.W.rows

    @property
    def n(self) -> int:
        return self.W.cols

    @property
    def m(self) -> int:
        return 2 * self.n + self.f

    @property
    def is_faithful(self) -> bool:
        return not self.kernel_factors

    @property
    def weights(self) -> np.ndarray:
        return np.array(self.W.tolist(), dtype=float).reshape(self.k, self.n)

    def plane_slice(self, i: int) -> slice:
        return slice(2 * i, 2 * i + 2)

    def plane_components(self, x) -> np.ndarray:
        """Return the n x 2 array of plane components of ``x``."""
        x = np.asarray(x, dtype=float)
        return x[: 2 * self.n].reshape(self.n, 2)

    def generators(self) -> np.ndarray:
        """Skew generators ``S_a`` (shape k x m x m), one per circle factor."""
        return np.array([_skew_for_speeds(row, self.n, self.f) for row in self.weights]).reshape(
            self.k, self.m, self.m
        )

    def skew(self, c) -> np.ndarray:
        """Skew generator of the Lie algebra element ``c``."""
        c = np.asarray(c, dtype=float).reshape(self.k)
        return _skew_for_speeds(c @ self.weights if self.k else np.zeros(self.n), self.n, self.f)

    def to_dict(self) -> dict:
        return {"k": self.k, "n": self.n, "f": self.f, "W": self.W.tolist()}


def _skew_for_speeds(speeds, n: int, f: int) -> np.ndarray:
    m = 2 * n + f
    S = np.zeros((m, m))
    for i, s in enumerate(speeds):
        S[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = s * _J
    return S


def block_rotation(angles: Sequence[float], f: int = 0) -> np.ndarray:
    """Rotate plane i by ``angles[i]``; fixed coordinates untouched."""
    n = len(angles)
    R = np.eye(2 * n + f)
    for i, t in enumerate(angles):
        c, s = np.cos(t), np.sin(t)
        R[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = [[c, -s], [s, c]]
    return R


def plane_angles(action: TorusAction, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float).reshape(action.k)
    if action.k == 0:
        return np.zeros(action.n)
    return theta @ action.weights


def rotation(action: TorusAction, theta) -> np.ndarray:
    """Orthogonal matrix of the torus element ``theta``: plane i turns by ``(theta @ W)[i]``."""
    return block_rotation(plane_angles(action, theta), action.f)


def killing_field(action: TorusAction, c, x) -> np.ndarray:
    """Killing field of the Lie algebra element ``c`` evaluated at ``x``."""
    return action.skew(c) @ np.asarray(x, dtype=float)


def killing_matrix(action: TorusAction, x) -> np.ndarray:
    """m x k matrix whose columns are the Killing fields of the basis circles at ``x``."""
    x = np.asarray(x, dtype=float)
    if action.k == 0:
        return np.zeros((action.m, 0))
    return np.einsum("aij,j->ia", action.generators(), x)


def _rank_tol(x) -> float:
    return 1e-10 * max(1.0, float(np.linalg.norm(x)))


def vertical_space(action: TorusAction, x, tol: float | None = None) -> np.ndarray:
    """Orthonormal basis (as columns) of the tangent space to the orbit through ``x``."""
    K = killing_matrix(action, x)
    if K.shape[1] == 0:
        return np.zeros((action.m, 0))
    U, s, _ = np.linalg.svd(K, full_matrices=False)
    tol = _rank_tol(x) if tol is None else tol
    r = int(np.sum(s > tol))
    return U[:, :r]


def horizontal_space(action: TorusAction, x, tol: float | None = None) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``vertical_space``."""
    V = vertical_space(action, x, tol)
    m = action.m
    if V.shape[1] == 0:
        return np.eye(m)
    # complete to an orthonormal basis; the trailing columns span the complement
    Q, _ = np.linalg.qr(np.hstack([V, np.eye(m)]))
    H = Q[:, V.shape[1] : m]
    return H - V @ (V.T @ H)


def in_torus_image(action: TorusAction, M, tol: float = 1e-8) -> bool:
    """Whether the orthogonal matrix ``M`` is (within ``tol``) an element of the torus image."""
    M = np.asarray(M, dtype=float)
    m, n = action.m, action.n
    if M.shape != (m, m):
        return False
    mask = np.zeros((m, m), dtype=bool)
    for i in range(n):
        mask[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = True
    if np.max(np.abs(M[~mask] - np.eye(m)[~mask]), initial=0.0) > tol:
        return False
    phis = []
    for i in range(n):
        B = M[2 * i : 2 * i + 2, 2 * i : 2 * i + 2]
        if abs(B[0, 0] - B[1, 1]) > tol or abs(B[0, 1] + B[1, 0]) > tol:
            return False  # orientation reversing, or not a rotation
        phis.append(np.arctan2(B[1, 0], B[0, 0]) / (2 * np.pi))
    if action.k == 0:
        return all(_dist_to_int(p) <= tol for p in phis)
    # phi is in the image iff phi @ V has integral trailing coordinates, where U W V = D
    snf = smith_normal_form(action.W)
    V = np.array(snf.V.tolist(), dtype=float)
    psi = np.asarray(phis) @ V
    return all(_dist_to_int(p) <= tol * max(1.0, np.abs(V).sum()) for p in psi[snf.rank :])


def _dist_to_int(t: float) -> float:
    return abs(t - round(t))


class FiniteOrthGroup:
    """A finite subgroup of O(m) stored as an explicit element list.

    The identity is always element 0.  Elements are compared by Frobenius
    distance against ``tol``.
    """

    def __init__(self, elements, tol: float = DEFAULT_GROUP_TOL, *, validate: bool = True):
        elements = np.asarray(elements, dtype=float)
        if elements.ndim != 3 or elements.shape[1] != elements.shape[2]:
            raise SpecInvalid(f"group elements must be square matrices, got shape {elements.shape}")
        self.elements = elements
        self.tol = tol
        if validate:
            problems = self.check()
            if problems:
                raise SpecInvalid("; ".join(problems))

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return self.order

    def __iter__(self):
        return iter(self.elements)

    def index(self, g) -> int | None:
        d = np.linalg.norm(self.elements - np.asarray(g)[None], axis=(1, 2))
        i = int(np.argmin(d))
        return i if d[i] < self.tol else None

    def __contains__(self, g) -> bool:
        return self.index(g) is not None

    def check(self) -> list[str]:
        """List of violated group invariants (empty when valid)."""
        problems = []
        I = np.eye(self.dim)
        for i, g in enumerate(self.elements):
            if np.linalg.norm(g.T @ g - I) > self.tol:
                problems.append(f"element {i} is not orthogonal")
        if not np.allclose(self.elements[0], I, atol=self.tol):
            problems.append("element 0 is not the identity")
        if problems:
            return problems
        for i, g in enumerate(self.elements):
            if g.T not in self:
                problems.append(f"inverse of element {i} missing")
            for j, h in enumerate(self.elements):
                if g @ h not in self:
                    problems.append(f"product of elements {i} and {j} missing")
                    return problems
        return problems

    def multiplication_table(self) -> np.ndarray:
        n = self.order
        table = np.empty((n, n), dtype=int)
        for i, g in enumerate(self.elements):
            for j, h in enumerate(self.elements):
                table[i, j] = self.index(g @ h)
        return table

    def conjugate(self, Q) -> "FiniteOrthGroup":
        """The group ``Q G Q^T`` (``Q`` orthogonal)."""
        Q = np.asarray(Q, dtype=float)
        return FiniteOrthGroup(np.einsum("ij,njk,lk->nil", Q, self.elements, Q), self.tol, validate=False)

    @classmethod
    def trivial(cls, dim: int) -> "FiniteOrthGroup":
        return cls(np.eye(dim)[None], validate=False)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "order": self.order, "elements": self.elements.tolist()}


def close_group(generators, tol: float = DEFAULT_GROUP_TOL, max_order: int = 1000) -> FiniteOrthGroup:
    """Enumerate the group generated by ``generators``.

    Raises ``NotClosed`` once more than ``max_order`` distinct elements
    appear, which is what happens for an irrational rotation.
    """
    gens = [np.asarray(g, dtype=float) for g in generators]
    if not gens:
        raise SpecInvalid("close_group needs at least one generator (pass the identity for the trivial group)")
    dim = gens[0].shape[0]
    I = np.eye(dim)
    for i, g in enumerate(gens):
        if g.shape != (dim, dim):
            raise SpecInvalid(f"generator {i} has shape {g.shape}, expected {(dim, dim)}")
        if np.linalg.norm(g.T @ g - I) > tol:
            raise SpecInvalid(f"generator {i} is not orthogonal within tol={tol:g}")
    stack = np.empty((max_order + 1, dim, dim))
    stack[0] = I
    count = 1
    head = 0
    while head < count:
        e = stack[head]
        head += 1
        for g in gens:
            p = g @ e
            if np.min(np.linalg.norm(stack[:count] - p[None], axis=(1, 2))) < tol:
                continue
            if count >= max_order:
                raise NotClosed(f"closure exceeded max_order={max_order}")
            stack[count] = p
            count += 1
    return FiniteOrthGroup(stack[:count].copy(), tol, validate=False)


@dataclass(frozen=True)
class ExtendedAction:
    """A torus action together with a finite group normalizing its image."""

    torus: TorusAction
    finite_part: FiniteOrthGroup

    def __post_init__(self):
        if self.finite_part.dim != self.torus.m:
            raise SpecInvalid(
                f"finite part acts on R^{self.finite_part.dim}, torus on R^{self.torus.m}"
            )

    def check_normalizes(self, samples: int = 8, seed: int = 0, tol: float = 1e-8) -> list[int]:
        """Indices of finite elements that fail to normalize the torus image on sampled angles."""
        rng = np.random.default_rng(seed)
        bad = []
        thetas = rng.uniform(0, 2 * np.pi, size=(samples, self.torus.k))
        for idx, g in enumerate(self.finite_part.elements):
            for th in thetas:
                if not in_torus_image(self.torus, g @ rotation(self.torus, th) @ g.T, tol):
                    bad.append(idx)
                    break
        return bad

    @classmethod
    def build(cls, torus: TorusAction, generators=None, tol: float = DEFAULT_GROUP_TOL,
              max_order: int = 1000, seed: int = 0) -> "ExtendedAction":
        if generators:
            group = close_group(generators, tol, max_order)
        else:
            group = FiniteOrthGroup.trivial(torus.m)
        ext = cls(torus, group)
        bad = ext.check_normalizes(seed=seed)
        if bad:
            raise SpecInvalid(f"finite elements {bad} do not normalize the torus image")
        return ext
