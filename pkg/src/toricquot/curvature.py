"""Sectional curvature of the principal stratum of (flat R^m) / T^k.

The quotient curvature comes from O'Neill's formula for a Riemannian
submersion out of flat space::

    sec(v, w) = 3/4 * |p_V [v~, w~]|^2 / (|v|^2 |w|^2 - <v, w>^2)

with ``v~(y) = (I - P_V(y)) v`` the horizontal projection extension.  The
projector derivatives are computed in closed form; ``finite_difference_oracle``
is an independent check that never touches them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .actions import TorusAction, horizontal_space, killing_matrix
from .errors import DegeneratePlane, IsSplit, SingularGram, StepTooLarge
from .split import NoCircle, is_split

GRAM_RTOL = 1e-8
HORIZONTAL_RTOL = 1e-8


@dataclass(frozen=True)
class ProjectorField:
    """Vertical projector ``P_V(x) = K (K^T K)^-1 K^T`` together with what its derivative needs."""

    action: TorusAction
    x: np.ndarray
    K: np.ndarray
    G_inv: np.ndarray
    P: np.ndarray

    def derivative(self, u) -> np.ndarray:
        """Directional derivative ``dP_V(x)[u]``.  The Killing matrix is linear, so ``dK[u] = K(u)``."""
        dK = killing_matrix(self.action, u)
        A = dK @ self.G_inv @ self.K.T
        dG = dK.T @ self.K + self.K.T @ dK
        return A + A.T - self.K @ self.G_inv @ dG @ self.G_inv @ self.K.T


def _check_principal(action: TorusAction, K: np.ndarray, x) -> None:
    if action.k == 0:
        return
    s = np.linalg.svd(K, compute_uv=False)
    scale = max(float(np.linalg.norm(x)), 1e-300)
    if s[-1] <= GRAM_RTOL * scale * max(1.0, float(np.abs(action.weights).max())):
        raise SingularGram(f"Killing fields are dependent at x (smallest singular value {s[-1]:.3g})")


def vertical_projection_field(action: TorusAction, x) -> ProjectorField:
    x = np.asarray(x, dtype=float)
    K = killing_matrix(action, x)
    _check_principal(action, K, x)
    G_inv = np.linalg.inv(K.T @ K) if action.k else np.zeros((0, 0))
    P = K @ G_inv @ K.T if action.k else np.zeros((action.m, action.m))
    return ProjectorField(action, x, K, G_inv, P)


def _plane_gram(v, w) -> float:
    return float(v @ v * (w @ w) - (v @ w) ** 2)


def oneill_bracket(field_: ProjectorField, v, w) -> np.ndarray:
    """Bracket ``[v~, w~](x)`` of the horizontal projection extensions of ``v`` and ``w``."""
    return field_.derivative(w) @ v - field_.derivative(v) @ w


def sec_quotient(action: TorusAction, x, v, w) -> float:
    """Quotient sectional curvature of the plane spanned by horizontal ``v, w`` at principal ``x``."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    pf = vertical_projection_field(action, x)
    for name, u in (("v", v), ("w", w)):
        if np.linalg.norm(pf.P @ u) > HORIZONTAL_RTOL * max(1.0, float(np.linalg.norm(u))):
            raise ValueError(f"{name} is not horizontal at x")
    gram = _plane_gram(v, w)
    if gram <= 1e-24 * (v @ v) * (w @ w) or gram == 0.0:
        raise DegeneratePlane("v and w are parallel")
    A = pf.P @ oneill_bracket(pf, v, w)
    return 0.75 * float(A @ A) / gram


def random_horizontal_plane(action: TorusAction, x, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    H = horizontal_space(action, x)
    if H.shape[1] < 2:
        raise DegeneratePlane("horizontal space has dimension < 2")
    a = rng.standard_normal(H.shape[1])
    b = rng.standard_normal(H.shape[1])
    v = H @ a
    v /= np.linalg.norm(v)
    w = H @ b
    w -= (w @ v) * v
    w /= np.linalg.norm(w)
    return v, w


# --- the explicit witness construction for non-split actions ----------------


@dataclass(frozen=True)
class BracketWitness:
    """A principal point and horizontal vectors with nonvanishing vertical bracket.

    ``value`` is ``|p_V [v, w]|`` for the Killing-difference extensions
    ``v = vbar - vbar_T`` and ``w = wbar - wbar_max``; ``tensor_value`` is the
    same quantity for the horizontal projection extensions used by
    ``sec_quotient``.  Both are reported so that any gap between the two
    extension schemes stays visible.
    """

    point: np.ndarray
    v: np.ndarray
    w: np.ndarray
    value: float
    plane: int
    partner: int
    variant: str
    lambdas: tuple[float, float]
    inner_closed_form: float
    inner_direct: float
    tensor_value: float
    sec: float
    alternatives: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "point": self.point.tolist(),
            "v": self.v.tolist(),
            "w": self.w.tolist(),
            "value": self.value,
            "plane": self.plane,
            "partner": self.partner,
            "variant": self.variant,
            "lambda_plane": self.lambdas[0],
            "lambda_partner": self.lambdas[1],
            "inner_closed_form": self.inner_closed_form,
            "inner_direct": self.inner_direct,
            "tensor_value": self.tensor_value,
            "sec": self.sec,
            "alternatives": self.alternatives,
        }


def _plane_rotation_generator(m: int, i: int) -> np.ndarray:
    J = np.zeros((m, m))
    J[2 * i, 2 * i + 1] = -1.0
    J[2 * i + 1, 2 * i] = 1.0
    return J


def _mixing_generator(m: int, i: int, j: int, coord: int) -> np.ndarray:
    """Linear field ``(.., -q_j at q_i, .., q_i at q_j, ..)`` for q = x (coord 0) or y (coord 1)."""
    B = np.zeros((m, m))
    a, b = 2 * i + coord, 2 * j + coord
    B[a, b] = -1.0
    B[b, a] = 1.0
    return B


def _witness_points(action: TorusAction, plane: int, seed: int = 0):
    n = action.n
    x = np.zeros(action.m)
    for p in range(n):
        x[2 * p] = 1.0
        x[2 * p + 1] = 2.0 ** -(p + 1)
    yield x
    rng = np.random.default_rng(seed)
    while True:
        x = np.zeros(action.m)
        comps = rng.uniform(0.5, 1.5, size=(n, 2)) * rng.choice([-1.0, 1.0], size=(n, 2))
        x[: 2 * n] = comps.ravel()
        yield x


def _witness_at(action: TorusAction, x: np.ndarray, i: int):
    m = action.m
    pf = vertical_projection_field(action, x)
    Ji = _plane_rotation_generator(m, i)
    vbar = Ji @ x
    # Lie algebra element whose Killing field at x is the vertical projection of vbar
    c_star = pf.G_inv @ pf.K.T @ vbar
    lam = c_star @ action.weights
    lam_i = float(lam[i])
    others = [j for j in range(action.n) if j != i]
    j = max(others, key=lambda q: (abs(lam[q]), -q))
    A = Ji - action.skew(c_star)
    full = TorusAction.from_weights(np.eye(action.n, dtype=int).tolist(), action.f)
    pf_max = vertical_projection_field(full, x)
    xi, yi = x[2 * i], x[2 * i + 1]
    xj, yj = x[2 * j], x[2 * j + 1]
    lj = float(lam[j])
    vT = action.skew(c_star) @ x
    results = {}
    for variant, coord in (("w", 0), ("w_y", 1)):
        B = _mixing_generator(m, i, j, coord)
        v = A @ x
        wbar = B @ x
        w = wbar - pf_max.P @ wbar
        bracket = (B @ A - A @ B) @ x
        pv = pf.P @ bracket
        if variant == "w":
            closed = yi * yj * (lam_i * lj + lj * (1 - lam_i)) + xi * xj * (lj**2 + lam_i * (1 - lam_i))
        else:
            closed = xi * xj * (lam_i * lj + lj * (1 - lam_i)) + yi * yj * (lj**2 + lam_i * (1 - lam_i))
        tensor = pf.P @ oneill_bracket(pf, v, w)
        results[variant] = {
            "v": v,
            "w": w,
            "value": float(np.linalg.norm(pv)),
            "inner_direct": float(bracket @ vT),
            "inner_closed_form": float(closed),
            "tensor_value": float(np.linalg.norm(tensor)),
        }
    return results, (lam_i, lj), j


def bracket_witness(action: TorusAction, seed: int = 0, attempts: int = 32) -> BracketWitness:
    """Reproduce the explicit non-split construction at a generic principal point.

    The failing plane ``i`` is the first ``NoCircle`` plane.  ``vbar`` rotates
    plane ``i`` alone; its vertical projection is the Killing field of some
    Lie algebra element with plane speeds ``lambda``.  With ``wbar`` mixing the
    x (or y) coordinates of planes ``i`` and ``j``, at least one of the two
    brackets has a nonzero vertical part whenever ``x_i x_j != y_i y_j``.
    """
    verdict = is_split(action)
    if verdict.is_split:
        raise IsSplit("bracket_witness needs a non-split action")
    i = next(p for p, cert in enumerate(verdict.per_plane) if isinstance(cert, NoCircle))
    for _, x in zip(range(attempts), _witness_points(action, i, seed)):
        if np.any(np.abs(action.plane_components(x)) < 1e-3):
            continue
        results, lams, j = _witness_at(action, x, i)
        if abs(x[2 * i] * x[2 * j] - x[2 * i + 1] * x[2 * j + 1]) < 1e-3:
            continue
        variant = max(results, key=lambda k: results[k]["value"])
        best = results[variant]
        if best["value"] <= 1e-10:
            continue
        v, w = best["v"], best["w"]
        try:
            sec = sec_quotient(action, x, v, w)
        except DegeneratePlane:
            continue
        alternatives = {
            k: {kk: vv for kk, vv in r.items() if kk not in ("v", "w")} for k, r in results.items()
        }
        return BracketWitness(
            point=x,
            v=v,
            w=w,
            value=best["value"],
            plane=i,
            partner=j,
            variant=variant,
            lambdas=lams,
            inner_closed_form=best["inner_closed_form"],
            inner_direct=best["inner_direct"],
            tensor_value=best["tensor_value"],
            sec=sec,
            alternatives=alternatives,
        )
    raise SingularGram("no witness point found; every candidate was degenerate")


# --- radial scans -----------------------------------------------------------


@dataclass(frozen=True)
class CurvatureSample:
    point: np.ndarray
    plane: tuple[np.ndarray, np.ndarray]
    sec: float
    radius: float
    radius_index: int
    plane_index: int

    @property
    def sec_times_r2(self) -> float:
        return self.sec * self.radius**2


def ray_scan(action: TorusAction, direction, radii, planes_per_point: int = 4, seed: int = 0,
             planes=None) -> list[CurvatureSample]:
    """Sectional curvature along the ray ``r * direction`` on fixed horizontal planes.

    The horizontal space is constant along a ray through the origin, so the
    same seeded planes are reused at every radius.  Extra planes can be
    appended through ``planes``.  Samples are ordered by (radius, plane).
    """
    d = np.asarray(direction, dtype=float)
    norm = float(np.linalg.norm(d))
    if not np.isfinite(norm) or norm == 0:
        raise SingularGram("scan direction is zero or not finite")
    d = d / norm
    vertical_projection_field(action, d)  # raises SingularGram off the principal stratum
    rng = np.random.default_rng(seed)
    chosen = [random_horizontal_plane(action, d, rng) for _ in range(planes_per_point)]
    if planes:
        chosen.extend((np.asarray(v, float), np.asarray(w, float)) for v, w in planes)
    out = []
    for ri, r in enumerate(radii):
        x = r * d
        for pi, (v, w) in enumerate(chosen):
            out.append(CurvatureSample(x, (v, w), sec_quotient(action, x, v, w), float(r), ri, pi))
    return out


def fitted_exponent(samples, floor: float = 1e-6) -> float | None:
    """Least-squares slope of log max|sec| against log r; ``None`` when the scan is flat."""
    by_radius: dict[float, float] = {}
    for s in samples:
        by_radius[s.radius] = max(by_radius.get(s.radius, 0.0), abs(s.sec))
    radii = sorted(by_radius)
    peaks = np.array([by_radius[r] for r in radii])
    if len(radii) < 2 or np.any(peaks < floor):
        return None
    slope, _ = np.polyfit(np.log(radii), np.log(peaks), 1)
    return float(slope)


# --- finite-difference oracle -----------------------------------------------


def _metric_derivatives(metric, d: int, h: float):
    g0 = metric(np.zeros(d))
    dg = np.zeros((d, d, d))  # dg[c] = d_c g
    ddg = np.zeros((d, d, d, d))  # ddg[c, e] = d_c d_e g
    E = np.eye(d)
    cache = {}

    def g(u):
        key = tuple(np.round(u / h * 4).astype(int))
        if key not in cache:
            cache[key] = metric(u)
        return cache[key]

    for c in range(d):
        gp, gm = g(h * E[c]), g(-h * E[c])
        dg[c] = (gp - gm) / (2 * h)
        ddg[c, c] = (gp - 2 * g0 + gm) / h**2
    for c, e in itertools.combinations(range(d), 2):
        val = (g(h * (E[c] + E[e])) - g(h * (E[c] - E[e])) - g(h * (E[e] - E[c])) + g(-h * (E[c] + E[e]))) / (4 * h**2)
        ddg[c, e] = ddg[e, c] = val
    return g0, dg, ddg


def riemann_from_metric(metric, d: int, step: float = 1e-4, richardson: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """All-lower Riemann tensor at ``u = 0`` of the metric field ``metric(u)`` (d x d) by central differences.

    Sign convention: ``R[a, b, b, a] / (g_aa g_bb - g_ab^2)`` is the sectional
    curvature, positive on round spheres.
    """
    g0, dg, ddg = _metric_derivatives(metric, d, step)
    if richardson:
        _, dg2, ddg2 = _metric_derivatives(metric, d, step / 2)
        dg = (4 * dg2 - dg) / 3
        ddg = (4 * ddg2 - ddg) / 3
    g_inv = np.linalg.inv(g0)
    # first-kind Christoffel symbols: Gam1[a, b, c] = 1/2 (d_b g_ac + d_c g_ab - d_a g_bc)
    Gam1 = 0.5 * (np.einsum("bac->abc", dg) + np.einsum("cab->abc", dg) - dg)
    Gam2 = np.einsum("ea,abc->ebc", g_inv, Gam1)
    # R_abcd = 1/2 (g_ad,bc + g_bc,ad - g_ac,bd - g_bd,ac) + g_ef (G^e_bc G^f_ad - G^e_bd G^f_ac)
    second = 0.5 * (
        np.einsum("bcad->abcd", ddg)
        + np.einsum("adbc->abcd", ddg)
        - np.einsum("bdac->abcd", ddg)
        - np.einsum("acbd->abcd", ddg)
    )
    quad = np.einsum("ef,ebc,fad->abcd", g0, Gam2, Gam2) - np.einsum("ef,ebd,fac->abcd", g0, Gam2, Gam2)
    return -(second + quad), g0


@dataclass(frozen=True)
class OracleCurvature:
    """Riemann tensor of the quotient metric in transversal coordinates ``x + E u``."""

    point: np.ndarray
    basis: np.ndarray
    riemann: np.ndarray
    metric: np.ndarray

    def sectional(self, v, w) -> float:
        a = self.basis.T @ np.asarray(v, float)
        b = self.basis.T @ np.asarray(w, float)
        g = self.metric
        num = np.einsum("abcd,a,b,c,d->", self.riemann, a, b, b, a)
        den = (a @ g @ a) * (b @ g @ b) - (a @ g @ b) ** 2
        if den <= 0:
            raise DegeneratePlane("v and w are parallel")
        return float(num / den)


def finite_difference_oracle(action: TorusAction, x, step: float = 1e-4, richardson: bool = True) -> OracleCurvature:
    """Curvature of the metric ``h(u, v) = <p_H u, p_H v>`` induced on the horizontal transversal at ``x``.

    Only the orbit tangent (from Killing fields) is used; no projector
    derivative from this module enters.  Test oracle only.
    """
    x = np.asarray(x, dtype=float)
    K = killing_matrix(action, x)
    _check_principal(action, K, x)
    E = horizontal_space(action, x)
    d = E.shape[1]
    m = action.m

    def projector(y):
        Ky = killing_matrix(action, y)
        if action.k == 0:
            return np.eye(m)
        s = np.linalg.svd(Ky, compute_uv=False)
        if s[-1] <= 1e-6 * s[0]:
            raise StepTooLarge("finite-difference stencil left the principal stratum")
        Q, _ = np.linalg.qr(Ky)
        return np.eye(m) - Q @ Q.T

    def metric(u):
        PH = projector(x + E @ u)
        return E.T @ PH @ E

    R, g0 = riemann_from_metric(metric, d, step, richardson)
    return OracleCurvature(x, E, R, g0)
