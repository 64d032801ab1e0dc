"""Reflection subgroups, chambers, chamber-map extension, conjugacy of finite orthogonal groups."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, nnls

from .actions import ExtendedAction, FiniteOrthGroup, close_group
from .errors import DegenerateArrangement, SpecInvalid
from .strata import NonOrbifold, Orbifold, classify_stratum, enumerate_strata

EIG_TOL = 1e-8
CHAMBER_MARGIN = 1e-6


def _canonical_sign(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    for e in v:
        if abs(e) > tol:
            return v if e > 0 else -v
    return v


@dataclass(frozen=True)
class Reflection:
    index: int
    matrix: np.ndarray
    normal: np.ndarray

    def to_dict(self):
        return {"index": self.index, "normal": self.normal.tolist()}


def find_reflections(group: FiniteOrthGroup, tol: float = EIG_TOL) -> list[Reflection]:
    """Elements whose symmetric part has spectrum ``{-1, +1 (m-1 times)}``."""
    out = []
    m = group.dim
    for idx, g in enumerate(group.elements):
        w, V = np.linalg.eigh(0.5 * (g + g.T))
        if abs(w[0] + 1) < tol and (m == 1 or abs(w[1] - 1) < tol) and np.all(np.abs(w[1:] - 1) < tol):
            out.append(Reflection(idx, g, _canonical_sign(V[:, 0])))
    return out


def fixed_subspace(g: np.ndarray, tol: float = EIG_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of ``ker(g - I)``."""
    m = g.shape[0]
    _, s, Vt = np.linalg.svd(g - np.eye(m))
    return Vt[s < tol].T


def _meets_open_cone(basis: np.ndarray, normals: np.ndarray, signs: np.ndarray) -> bool:
    """Whether span(basis) meets ``{x : signs_j <n_j, x> > 0 for all j}``."""
    if len(normals) == 0:
        return True
    if basis.shape[1] == 0:
        return False
    A = -(signs[:, None] * normals) @ basis
    res = linprog(np.zeros(basis.shape[1]), A_ub=A, b_ub=-np.ones(len(normals)),
                  bounds=[(None, None)] * basis.shape[1], method="highs")
    return res.status == 0


@dataclass
class ChamberComplex:
    group: FiniteOrthGroup
    reflections: list[Reflection]
    reflection_subgroup: FiniteOrthGroup
    mirror_normals: np.ndarray
    chamber_rep: np.ndarray
    chamber_count: int
    codim2_count: int
    normal_subgroup: bool

    @property
    def quotient_order(self) -> int:
        """|group / reflection subgroup|."""
        return self.group.order // self.reflection_subgroup.order

    def signs(self, x) -> np.ndarray:
        if len(self.mirror_normals) == 0:
            return np.zeros(0)
        return np.sign(self.mirror_normals @ np.asarray(x, float))

    def to_dict(self) -> dict:
        return {
            "dim": self.group.dim,
            "order": self.group.order,
            "reflection_count": len(self.reflections),
            "reflection_subgroup_order": self.reflection_subgroup.order,
            "reflection_subgroup_normal": self.normal_subgroup,
            "mirror_normals": self.mirror_normals.tolist(),
            "chamber_rep": self.chamber_rep.tolist(),
            "chamber_count": self.chamber_count,
            "codim2_count": self.codim2_count,
            "quotient_order": self.quotient_order,
        }


def generic_point(normals: np.ndarray, dim: int, rng: np.random.Generator,
                  margin: float = CHAMBER_MARGIN, retries: int = 100) -> np.ndarray:
    for _ in range(retries):
        p = rng.standard_normal(dim)
        p /= np.linalg.norm(p)
        if len(normals) == 0 or np.min(np.abs(normals @ p)) > margin:
            return p
    raise DegenerateArrangement(f"no point at distance > {margin:g} from every mirror after {retries} tries")


def reflection_subgroup(group: FiniteOrthGroup, reflections=None) -> FiniteOrthGroup:
    if reflections is None:
        reflections = find_reflections(group)
    if not reflections:
        return FiniteOrthGroup.trivial(group.dim)
    return close_group([r.matrix for r in reflections], group.tol, max_order=group.order + 1)


def is_normal_subgroup(group: FiniteOrthGroup, sub: FiniteOrthGroup) -> bool:
    return all(g @ h @ g.T in sub for g in group.elements for h in sub.elements)


def chamber_complex(group: FiniteOrthGroup, seed: int = 0, margin: float = CHAMBER_MARGIN) -> ChamberComplex:
    refl = find_reflections(group)
    R = reflection_subgroup(group, refl)
    normal = is_normal_subgroup(group, R)
    normals = np.array([r.normal for r in refl]).reshape(len(refl), group.dim)
    rng = np.random.default_rng(seed)
    p = generic_point(normals, group.dim, rng, margin)
    chambers = {tuple(np.sign(normals @ (r @ p)).astype(int)) for r in R.elements}
    signs = np.sign(normals @ p)

    seen: list[np.ndarray] = []
    codim2 = 0
    reflection_idx = {r.index for r in refl}
    for idx, g in enumerate(group.elements):
        if idx == 0 or idx in reflection_idx:
            continue
        F = fixed_subspace(g)
        if F.shape[1] != group.dim - 2:
            continue
        proj = F @ F.T
        if any(np.linalg.norm(proj - q) < 1e-8 for q in seen):
            continue
        seen.append(proj)
        if _meets_open_cone(F, normals, signs):
            codim2 += 1
    return ChamberComplex(group, refl, R, normals, p, len(chambers), codim2, normal)


def wall_reflections(reflections: list[Reflection], point) -> list[Reflection]:
    """Reflections in the walls of the chamber containing ``point`` (the simple roots)."""
    if not reflections:
        return []
    p = np.asarray(point, float)
    roots = np.array([r.normal * np.sign(r.normal @ p) for r in reflections])
    walls = []
    for i, r in enumerate(reflections):
        others = np.delete(roots, i, axis=0)
        if len(others) == 0:
            walls.append(r)
            continue
        _, resid = nnls(others.T, roots[i])
        if resid > 1e-9:
            walls.append(r)
    return walls


# --- chamber-map extension --------------------------------------------------


@dataclass(frozen=True)
class ChamberMap:
    A: np.ndarray
    b: np.ndarray
    table: tuple[tuple[int, int], ...]
    valid = True

    def apply(self, x) -> np.ndarray:
        return self.A @ np.asarray(x, float) + self.b

    def to_dict(self):
        return {"valid": True, "A": self.A.tolist(), "b": self.b.tolist(), "table": [list(t) for t in self.table]}


@dataclass(frozen=True)
class Invalid:
    reason: str  # WallMismatch | BNotFixed | NotIsomorphism
    detail: str = ""
    valid = False

    def to_dict(self):
        return {"valid": False, "reason": self.reason, "detail": self.detail}


def extend_chamber_map(A, b, R1: FiniteOrthGroup, R2: FiniteOrthGroup, chamber_point=None,
                       tol: float = 1e-8, seed: int = 0) -> ChamberMap | Invalid:
    """Check that ``x -> A x + b`` on a chamber of ``R1`` extends equivariantly, and build ``r -> A r A^-1``.

    ``chamber_point`` picks the chamber of ``R1`` (default: a seeded generic
    point).  The walls of its image chamber must be the conjugated walls, and
    every wall reflection of the image chamber must fix ``b``.
    """
    A = np.asarray(A, float)
    b = np.asarray(b, float)
    m = R1.dim
    if A.shape != (m, m) or R2.dim != m or b.shape != (m,):
        raise SpecInvalid("dimension mismatch in extend_chamber_map")
    if np.linalg.norm(A.T @ A - np.eye(m)) > tol:
        raise SpecInvalid("A is not orthogonal within tol")
    refl1 = find_reflections(R1)
    refl2 = find_reflections(R2)
    normals1 = np.array([r.normal for r in refl1]).reshape(len(refl1), m)
    normals2 = np.array([r.normal for r in refl2]).reshape(len(refl2), m)
    if chamber_point is None:
        chamber_point = generic_point(normals1, m, np.random.default_rng(seed))
    p1 = np.asarray(chamber_point, float)
    p2 = A @ p1
    if len(normals2) and np.min(np.abs(normals2 @ p2)) < CHAMBER_MARGIN:
        return Invalid("WallMismatch", "A maps the chamber point onto a mirror of R2")
    walls1 = wall_reflections(refl1, p1)
    walls2 = wall_reflections(refl2, p2)
    wall2_mats = [r.matrix for r in walls2]
    for r in walls1:
        img = A @ r.matrix @ A.T
        if not any(np.linalg.norm(img - w) < tol for w in wall2_mats):
            return Invalid("WallMismatch", f"wall reflection {r.index} of R1 is not carried to a wall of R2")
    if len(walls1) != len(walls2):
        return Invalid("WallMismatch", f"{len(walls1)} walls map into {len(walls2)}")
    for r in walls2:
        if np.linalg.norm(r.matrix @ b - b) > tol * max(1.0, float(np.linalg.norm(b))):
            return Invalid("BNotFixed", f"wall reflection {r.index} of R2 moves b")
    if R1.order != R2.order:
        return Invalid("NotIsomorphism", f"|R1| = {R1.order} but |R2| = {R2.order}")
    table = []
    hit = set()
    for i, r in enumerate(R1.elements):
        j = R2.index(A @ r @ A.T)
        if j is None or j in hit:
            return Invalid("NotIsomorphism", f"element {i} of R1 has no distinct image in R2")
        hit.add(j)
        table.append((i, j))
    return ChamberMap(A, b, tuple(table))


# --- conjugacy --------------------------------------------------------------


def _element_order(g: np.ndarray, tol: float, limit: int = 10_000) -> int:
    I = np.eye(g.shape[0])
    p = g.copy()
    for k in range(1, limit + 1):
        if np.linalg.norm(p - I) < tol:
            return k
        p = p @ g
    raise SpecInvalid("element of infinite (or huge) order")


def _invariant_key(g: np.ndarray, tol: float) -> tuple:
    coeffs = np.real(np.poly(g))
    return (_element_order(g, 1e-6), tuple(np.round(coeffs, 6) + 0.0))


@dataclass(frozen=True)
class Conjugate:
    A: np.ndarray
    residual: float
    pairing: tuple[int, ...]
    pairings_tried: int
    status = "conjugate"

    def to_dict(self):
        return {"status": self.status, "A": self.A.tolist(), "residual": self.residual,
                "pairing": list(self.pairing), "pairings_tried": self.pairings_tried}


@dataclass(frozen=True)
class NotConjugate:
    reason: str
    pairings_tried: int = 0
    status = "not_conjugate"

    def to_dict(self):
        return {"status": self.status, "reason": self.reason, "pairings_tried": self.pairings_tried}


@dataclass(frozen=True)
class Inconclusive:
    pairings_tried: int
    status = "inconclusive"

    def to_dict(self):
        return {"status": self.status, "pairings_tried": self.pairings_tried}


def generating_set(group: FiniteOrthGroup) -> list[int]:
    """Greedy small generating set: take elements of largest order first."""
    orders = [_element_order(g, 1e-6) for g in group.elements]
    candidates = sorted(range(group.order), key=lambda i: (-orders[i], i))
    chosen: list[int] = []
    size = 1
    for i in candidates:
        if size == group.order:
            break
        if chosen and group.elements[i] in close_group([group.elements[j] for j in chosen], group.tol, group.order + 1):
            continue
        chosen.append(i)
        size = close_group([group.elements[j] for j in chosen], group.tol, group.order + 1).order
    return chosen


def _intertwiner_space(gs, hs, tol: float = 1e-9) -> np.ndarray:
    """Basis of ``{X : X g_i = h_i X}``, each element flattened row-major."""
    m = gs[0].shape[0]
    I = np.eye(m)
    # row-major vec: vec(X g) = (I kron g^T) vec X,  vec(h X) = (h kron I) vec X
    blocks = [np.kron(I, g.T) - np.kron(h, I) for g, h in zip(gs, hs)]
    M = np.vstack(blocks)
    _, s, Vt = np.linalg.svd(M)
    null = Vt[np.concatenate([s, np.zeros(Vt.shape[0] - len(s))]) < tol * max(1.0, s[0] if len(s) else 1.0)]
    return null


def conjugation_residual(A, G1: FiniteOrthGroup, G2: FiniteOrthGroup) -> tuple[float, tuple[int, ...]]:
    """``max_g min_h |A g A^T - h|`` and the induced pairing of element indices."""
    worst = 0.0
    pairing = []
    for g in G1.elements:
        d = np.linalg.norm(G2.elements - (A @ g @ A.T)[None], axis=(1, 2))
        j = int(np.argmin(d))
        worst = max(worst, float(d[j]))
        pairing.append(j)
    return worst, tuple(pairing)


def conjugacy_test(G1: FiniteOrthGroup, G2: FiniteOrthGroup, budget: int = 10**6, tol: float = 1e-8,
                   seed: int = 0) -> Conjugate | NotConjugate | Inconclusive:
    """Search for an orthogonal ``A`` with ``A G1 A^-1 = G2``.

    Cheap invariants (order, element orders, characteristic polynomials)
    reject most non-conjugate pairs.  Otherwise generator images are drawn
    from invariant-matching elements of ``G2`` in lexicographic order; for
    each assignment the space of intertwiners is solved linearly and a
    generic member is orthogonalized by its polar factor.
    """
    if G1.dim != G2.dim:
        raise SpecInvalid("groups act on different dimensions")
    if G1.order != G2.order:
        return NotConjugate(f"orders differ: {G1.order} vs {G2.order}")
    keys1 = [_invariant_key(g, tol) for g in G1.elements]
    keys2 = [_invariant_key(h, tol) for h in G2.elements]
    if sorted(keys1) != sorted(keys2):
        tr1 = sorted(round(float(np.trace(g)), 6) + 0.0 for g in G1.elements)
        tr2 = sorted(round(float(np.trace(h)), 6) + 0.0 for h in G2.elements)
        if tr1 != tr2:
            return NotConjugate(f"trace multisets differ: {tr1} vs {tr2}")
        return NotConjugate("element order / characteristic polynomial multisets differ")
    gens = generating_set(G1)
    gmats = [G1.elements[i] for i in gens]
    candidates = [[j for j, key in enumerate(keys2) if key == keys1[i]] for i in gens]
    pair_keys = {
        (a, b): _invariant_key(gmats[a] @ gmats[b], tol) for a, b in itertools.combinations(range(len(gens)), 2)
    }
    rng = np.random.default_rng(seed)
    tried = 0
    for choice in itertools.product(*candidates):
        if tried >= budget:
            return Inconclusive(tried)
        tried += 1
        hmats = [G2.elements[j] for j in choice]
        if any(_invariant_key(hmats[a] @ hmats[b], tol) != key for (a, b), key in pair_keys.items()):
            continue
        null = _intertwiner_space(gmats, hmats)
        if len(null) == 0:
            continue
        m = G1.dim
        for _ in range(3):
            X = (rng.standard_normal(len(null)) @ null).reshape(m, m)
            U, s, Vt = np.linalg.svd(X)
            if s[-1] > 1e-6 * s[0]:
                break
        else:
            continue
        A = U @ Vt
        resid, pairing = conjugation_residual(A, G1, G2)
        if resid < tol and len(set(pairing)) == G1.order:
            return Conjugate(A, resid, pairing, tried)
    return NotConjugate("no generator assignment admits an orthogonal intertwiner", tried)


# --- finite extensions of torus actions ---------------------------------------


def finite_extension_classify(ext: ExtendedAction) -> Orbifold | NonOrbifold:
    """Orbifold exactly when the torus part is orbifold at the origin.

    A normalizing finite group neither creates nor removes non-orbifold
    points, so only the torus part is inspected.
    """
    torus = ext.torus
    if torus.k == 0:
        return Orbifold()
    origin = next(s for s in enumerate_strata(torus, max_planes=max(torus.n, 12))
                  if len(s.pattern) == torus.n)
    return classify_stratum(torus, origin)
