import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from toricquot.actions import ExtendedAction, FiniteOrthGroup, TorusAction, close_group
from toricquot.groups import cyclic, dihedral, point_group, random_orthogonal, reflection_matrix, rot2
from toricquot.reflections import (ChamberMap, Conjugate, Inconclusive, Invalid, NotConjugate, chamber_complex,
                                   conjugacy_test, extend_chamber_map, find_reflections,
                                   finite_extension_classify, reflection_subgroup)
from toricquot.strata import NonOrbifold, Orbifold

X_MIRROR = close_group([reflection_matrix([0, 1])])
O3_GROUPS = [("C", 4), ("Cv", 3), ("Ch", 2), ("S", 2), ("D", 3), ("Dh", 4), ("Dd", 2),
             ("T", 2), ("Td", 2), ("Th", 2), ("O", 2), ("Oh", 2), ("Ci", 2)]


def test_find_reflections_examples():
    refl = find_reflections(dihedral(4))
    assert len(refl) == 4
    for r in refl:
        assert np.linalg.norm(r.normal) == pytest.approx(1)
        assert np.allclose(r.matrix @ r.matrix, np.eye(2))
        assert np.allclose(r.matrix @ r.normal, -r.normal)
    assert find_reflections(cyclic(2)) == []
    assert find_reflections(FiniteOrthGroup.trivial(3)) == []


def test_rotoreflection_is_not_a_reflection():
    S4 = point_group("S", 2)  # contains det -1 elements that are not reflections
    assert any(np.linalg.det(g) < 0 for g in S4.elements)
    assert find_reflections(S4) == []


def test_chamber_examples():
    c = chamber_complex(dihedral(4))
    assert c.chamber_count == 8 == c.reflection_subgroup.order
    c = chamber_complex(cyclic(2))
    assert (c.chamber_count, c.codim2_count, c.reflection_subgroup.order) == (1, 1, 1)
    c = chamber_complex(FiniteOrthGroup.trivial(2))
    assert (c.chamber_count, c.codim2_count) == (1, 0)


def test_chamber_rep_is_interior():
    c = chamber_complex(point_group("Oh"))
    assert np.min(np.abs(c.mirror_normals @ c.chamber_rep)) > 1e-6


@pytest.mark.parametrize("name,n", O3_GROUPS)
def test_point_group_chambers(name, n):
    G = point_group(name, n)
    c = chamber_complex(G, seed=2)
    assert c.chamber_count == c.reflection_subgroup.order
    assert c.normal_subgroup
    for r in c.reflections:
        w = np.linalg.eigvalsh(0.5 * (r.matrix + r.matrix.T))
        assert np.sum(np.abs(w + 1) < 1e-8) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 5, 6])
def test_o2_partition(n):
    for G in (cyclic(n), dihedral(n)):
        refl = len(find_reflections(G))
        rots = sum(1 for g in G.elements[1:] if np.linalg.det(g) > 0)
        assert refl + rots + 1 == G.order


def test_extend_chamber_map_examples():
    res = extend_chamber_map(np.eye(2), [3, 0], X_MIRROR, X_MIRROR)
    assert isinstance(res, ChamberMap)
    assert res.table == ((0, 0), (1, 1))
    bad = extend_chamber_map(np.eye(2), [0, 1], X_MIRROR, X_MIRROR)
    assert isinstance(bad, Invalid) and bad.reason == "BNotFixed"
    D = dihedral(3)
    ok = extend_chamber_map(np.eye(2), [0, 0], D, D)
    assert isinstance(ok, ChamberMap)
    assert all(i == j for i, j in ok.table)


def test_extend_chamber_map_rejections():
    y_mirror = close_group([reflection_matrix([1, 0])])
    res = extend_chamber_map(np.eye(2), [0, 0], X_MIRROR, y_mirror)
    assert isinstance(res, Invalid) and res.reason == "WallMismatch"
    res = extend_chamber_map(np.eye(2), [0, 0], dihedral(2), dihedral(4))
    assert isinstance(res, Invalid)


def test_extend_chamber_map_equivariance(rng):
    D = dihedral(4)
    Q = rot2(np.pi / 4)  # maps mirrors of D4 to mirrors of D4
    res = extend_chamber_map(Q, np.zeros(2), D, D, chamber_point=[np.cos(0.3), np.sin(0.3)])
    assert isinstance(res, ChamberMap)
    for _ in range(100):
        i, j = res.table[rng.integers(len(res.table))]
        x = rng.standard_normal(2)
        lhs = res.apply(D.elements[i] @ x)
        rhs = D.elements[j] @ res.apply(x)
        assert np.allclose(lhs, rhs, atol=1e-10)


def test_conjugacy_examples(rng):
    r = conjugacy_test(X_MIRROR, cyclic(2))
    assert isinstance(r, NotConjugate) and "trace" in r.reason
    G = dihedral(4)
    Q = random_orthogonal(2, rng)
    r = conjugacy_test(G, G.conjugate(Q))
    assert isinstance(r, Conjugate) and r.residual < 1e-8


def test_conjugacy_distinguishes_same_traces():
    # C2 x C2 generated by two reflections vs the half-turn plus a reflection in O(3)
    G1 = close_group([reflection_matrix([1, 0, 0]), reflection_matrix([0, 1, 0])])
    G2 = close_group([np.diag([-1.0, -1, 1]), reflection_matrix([0, 0, 1])])
    assert isinstance(conjugacy_test(G1, G2), NotConjugate)


def test_conjugacy_budget_inconclusive(rng):
    G = point_group("Oh")
    r = conjugacy_test(G, G.conjugate(random_orthogonal(3, rng)), budget=0)
    assert isinstance(r, Inconclusive)


@settings(max_examples=15)
@given(st.sampled_from(O3_GROUPS), st.integers(0, 2**32 - 1))
def test_conjugacy_soundness(gn, seed):
    rng = np.random.default_rng(seed)
    G = point_group(*gn)
    H = G.conjugate(random_orthogonal(3, rng))
    r = conjugacy_test(G, H, seed=seed)
    assert isinstance(r, Conjugate)
    assert len(set(r.pairing)) == G.order
    for g in G.elements:
        d = np.min(np.linalg.norm(H.elements - (r.A @ g @ r.A.T)[None], axis=(1, 2)))
        assert d < 1e-8


def test_normality_random_groups(rng):
    for _ in range(5):
        G = point_group(O3_GROUPS[rng.integers(len(O3_GROUPS))][0], 2).conjugate(random_orthogonal(3, rng))
        R = reflection_subgroup(G)
        for g in G.elements:
            for h in R.elements:
                assert g @ h @ g.T in R


def test_finite_extension_classify():
    t = TorusAction.from_weights([[1, 0], [0, 1]])
    swap = np.zeros((4, 4))
    swap[:2, 2:] = np.eye(2)
    swap[2:, :2] = np.eye(2)
    assert isinstance(finite_extension_classify(ExtendedAction.build(t, [swap])), Orbifold)
    teardrop = TorusAction.from_weights([[1, 2]])
    assert isinstance(finite_extension_classify(ExtendedAction.build(teardrop)), NonOrbifold)
    trivial = TorusAction.from_weights([], f=0, n=2)
    quarter_turns = np.kron(np.eye(2), rot2(np.pi / 2))
    assert isinstance(finite_extension_classify(ExtendedAction.build(trivial, [quarter_turns])), Orbifold)


def test_results_serialize():
    import json
    json.dumps(chamber_complex(dihedral(3)).to_dict())
    json.dumps(conjugacy_test(dihedral(3), dihedral(3)).to_dict())
    json.dumps(extend_chamber_map(np.eye(2), [0, 1], X_MIRROR, X_MIRROR).to_dict())
