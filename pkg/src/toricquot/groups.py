"""Generators of some standard finite subgroups of O(2) and O(3)."""

from __future__ import annotations

import numpy as np

from .actions import FiniteOrthGroup, close_group


def rot2(t: float) -> np.ndarray:
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, -s], [s, c]])


def reflection_matrix(normal) -> np.ndarray:
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    return np.eye(len(n)) - 2.0 * np.outer(n, n)


def cyclic(n: int) -> FiniteOrthGroup:
    return close_group([rot2(2 * np.pi / n)])


def dihedral(n: int) -> FiniteOrthGroup:
    """Symmetries of the regular n-gon, order 2n."""
    return close_group([reflection_matrix([0.0, 1.0]), reflection_matrix([-np.sin(np.pi / n), np.cos(np.pi / n)])])


def _rot3(axis, t: float) -> np.ndarray:
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    K = np.array([[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]])
    return np.eye(3) + np.sin(t) * K + (1 - np.cos(t)) * K @ K


def _embed2(g: np.ndarray, last: float = 1.0) -> np.ndarray:
    out = np.eye(3)
    out[:2, :2] = g
    out[2, 2] = last
    return out


def point_group_generators(name: str, n: int = 2) -> list[np.ndarray]:
    """Generators in O(3).  ``n`` is the principal axis order where relevant.

    Names: C (cyclic), Cv, Ch, S (rotoreflection of order 2n), D, Dh, Dd,
    T, Td, Th, O, Oh, I (chiral icosahedral), Ci (inversion only).
    """
    z = [0.0, 0.0, 1.0]
    rz = _rot3(z, 2 * np.pi / n)
    flip = _rot3([1.0, 0.0, 0.0], np.pi)
    mirror_v = reflection_matrix([0.0, 1.0, 0.0])
    mirror_h = reflection_matrix(z)
    inv = -np.eye(3)
    t_gens = [_rot3([1, 1, 1], 2 * np.pi / 3), _rot3(z, np.pi)]
    o_gens = [_rot3([1, 1, 1], 2 * np.pi / 3), _rot3(z, np.pi / 2)]
    phi = (1 + 5**0.5) / 2
    table = {
        "C": [rz],
        "Cv": [rz, mirror_v],
        "Ch": [rz, mirror_h],
        "S": [mirror_h @ _rot3(z, np.pi / n)],
        "D": [rz, flip],
        "Dh": [rz, flip, mirror_h],
        "Dd": [rz, flip, reflection_matrix([-np.sin(np.pi / (2 * n)), np.cos(np.pi / (2 * n)), 0.0])],
        "T": t_gens,
        "Td": t_gens + [reflection_matrix([1.0, -1.0, 0.0])],
        "Th": t_gens + [inv],
        "O": o_gens,
        "Oh": o_gens + [inv],
        "I": [_rot3([0.0, 1.0, phi], 2 * np.pi / 5), _rot3([1.0, 1.0, 1.0], 2 * np.pi / 3)],
        "Ci": [inv],
    }
    if name not in table:
        raise KeyError(f"unknown point group {name!r}")
    return table[name]


def point_group(name: str, n: int = 2) -> FiniteOrthGroup:
    return close_group(point_group_generators(name, n))


def random_orthogonal(m: int, rng: np.random.Generator) -> np.ndarray:
    Q, R = np.linalg.qr(rng.standard_normal((m, m)))
    return Q * np.sign(np.diag(R))
