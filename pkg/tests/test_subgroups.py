"""Subgroup lattice, normality, quotient, and automorphism-search tests."""

from itertools import combinations, permutations

import pytest

from transiso import groups
from transiso.groups import build, isomorphic, validate_group, is_isomorphism
from transiso.subgroups import (
    LatticeUnavailableError,
    Subgroup,
    all_subgroups,
    central_order_p_subgroups,
    complements_of,
    conjugates,
    core,
    find_automorphism_mapping,
    frattini,
    is_normal,
    mask_of,
    maximal_subgroups_pgroup,
    product_is_whole,
    quotient,
    semidirect_complement,
    subgroup_from_elements,
    subgroup_from_gens,
    subgroup_group,
    subgroups_of_order,
    trivial_subgroup,
)


def c2xc4():
    return build({"kind": "direct_product",
                  "factors": [{"kind": "cyclic", "n": 2}, {"kind": "cyclic", "n": 4}]})


def brute_all_subgroup_masks(G):
    """Oracle: every subset containing the identity that is product-closed."""
    n = G.order
    rest = list(range(1, n))
    masks = set()
    for r in range(n):
        for combo in combinations(rest, r):
            elems = (0,) + combo
            if n % len(elems) != 0:
                continue
            s = set(elems)
            if all(G.table[a][b] in s for a in elems for b in elems):
                masks.add(mask_of(elems))
    return masks


def test_c2xc4_order2_subgroups():
    G = c2xc4()
    subs = subgroups_of_order(G, 2)
    assert [H.elements for H in subs] == [(0, 2), (0, 4), (0, 6)]  # <b^2>, <a>, <ab^2>


def test_heisenberg_order3_count():
    G = groups.extraspecial_exp_p(3)
    assert len(subgroups_of_order(G, 3)) == 13  # p^2 + p + 1


def test_whole_group_enumeration():
    G = groups.symmetric(3)
    subs = subgroups_of_order(G, 6)
    assert len(subs) == 1 and subs[0].order == 6


def test_dihedral6_lattice_size():
    G = groups.dihedral(6)
    lat = all_subgroups(G)
    assert len(lat) == 16  # tau(6) cyclic + sigma(6) dihedral-type
    assert brute_all_subgroup_masks(G) == {H.mask for H in lat.all}


def test_prime_cyclic_lattice():
    lat = all_subgroups(groups.cyclic(7))
    assert len(lat) == 2


def test_quaternion_all_normal():
    lat = all_subgroups(groups.quaternion8())
    assert len(lat) == 6
    assert all(is_normal(H) for H in lat.all)


def test_lattice_cap():
    with pytest.raises(LatticeUnavailableError):
        all_subgroups(groups.symmetric(3), max_order=5)


def test_sym4_lattice_has_alternating():
    # join closure must reach A4 even though it sits above V4
    lat = all_subgroups(groups.symmetric(4))
    assert len(lat.of_order(12)) == 1
    assert len(lat) == 30


def test_normality_in_abelian():
    G = c2xc4()
    H = subgroup_from_elements(G, [0, 2])
    assert is_normal(H)


def test_sym3_transposition_core_conjugates():
    G = groups.symmetric(3)
    H = min(subgroups_of_order(G, 2), key=lambda s: s.elements)
    # oracle: brute force over all 6 conjugators
    conj_masks = set()
    for g in range(6):
        ginv = G.inverse[g]
        conj_masks.add(mask_of(G.table[G.table[ginv][x]][g] for x in H.elements))
    assert len(conj_masks) == 3
    assert len(conjugates(H)) == 3
    assert core(H).order == 1
    assert not is_normal(H)


@pytest.mark.parametrize("n", [3, 5, 6, 9])
def test_dihedral_odd_index_conjugacy(n):
    # odd m | 2n: all m subgroups of index m are conjugate to <a^m, b>
    G = groups.dihedral(n)
    for m in range(1, 2 * n + 1):
        if (2 * n) % m or m % 2 == 0 or m == 1:
            continue
        d = 2 * n // m
        subs = subgroups_of_order(G, d)
        assert len(subs) == m
        H = subgroup_from_gens(G, [m % n, n])
        assert H.order == d
        assert {K.mask for K in conjugates(H)} == {K.mask for K in subs}


def test_quotients_of_c2xc4():
    G = c2xc4()
    Hb2 = subgroup_from_elements(G, [0, 2])
    Ha = subgroup_from_elements(G, [0, 4])
    assert isomorphic(quotient(G, Hb2), groups.elementary_abelian(2, 2))
    assert isomorphic(quotient(G, Ha), groups.cyclic(4))
    whole = subgroup_from_elements(G, range(8))
    assert quotient(G, whole).order == 1


def test_quotient_validates():
    G = groups.dihedral(6)
    N = subgroup_from_gens(G, [1])  # rotation subgroup, index 2
    Q = quotient(G, N)
    assert Q.order == 2
    validate_group(Q)
    H = subgroup_from_gens(G, [6])  # a reflection, not normal
    with pytest.raises(ValueError):
        quotient(G, H)


def test_frattini_examples():
    He = groups.extraspecial_exp_p(3)
    ph = frattini(He)
    assert ph.order == 3
    assert set(ph.elements) == set(He.center())
    assert frattini(groups.elementary_abelian(3, 2)).order == 1
    assert frattini(groups.cyclic(8)).order == 4


def test_frattini_pgroup_matches_lattice():
    for spec in ({"kind": "cyclic", "n": 8}, {"kind": "cyclic", "n": 9},
                 {"kind": "dihedral", "n": 4}, {"kind": "quaternion8"},
                 {"kind": "extraspecial_exp_p", "p": 3},
                 {"kind": "elementary_abelian", "p": 2, "rank": 3},
                 {"kind": "direct_product",
                  "factors": [{"kind": "cyclic", "n": 2}, {"kind": "cyclic", "n": 4}]}):
        G = build(spec)
        lat = all_subgroups(G)
        m = (1 << G.order) - 1
        for H in lat.maximal():
            m &= H.mask
        assert frattini(G).mask == m


def test_maximal_pgroup_route_matches_lattice():
    for spec in ({"kind": "quaternion8"}, {"kind": "extraspecial_exp_p", "p": 3},
                 {"kind": "elementary_abelian", "p": 3, "rank": 2}):
        G = build(spec)
        via_hyperplanes = {H.mask for H in maximal_subgroups_pgroup(G)}
        via_lattice = {H.mask for H in all_subgroups(G).maximal()}
        assert via_hyperplanes == via_lattice


def test_central_order_p_matches_lattice_normals():
    for spec in ({"kind": "quaternion8"}, {"kind": "extraspecial_exp_p", "p": 3},
                 {"kind": "elementary_abelian", "p": 2, "rank": 3},
                 {"kind": "direct_product",
                  "factors": [{"kind": "cyclic", "n": 3}, {"kind": "cyclic", "n": 9}]}):
        G = build(spec)
        p = min(k for k in G.element_order if k > 1)
        central = {H.mask for H in central_order_p_subgroups(G, p)}
        lattice_normals = {
            H.mask for H in all_subgroups(G).of_order(p) if is_normal(H)
        }
        assert central == lattice_normals


def test_product_is_whole():
    S4 = groups.symmetric(4)
    A4 = all_subgroups(S4).of_order(12)[0]
    # odd involutions (transpositions) lie outside A4; double transpositions inside
    transposition = next(
        H for H in subgroups_of_order(S4, 2)
        if not all(x in A4 for x in H.elements)
    )
    assert product_is_whole(transposition, A4)
    D = groups.dihedral(6)
    H = subgroup_from_gens(D, [2])
    K = subgroup_from_gens(D, [1])
    assert not product_is_whole(H, K)  # H inside K
    Q8 = groups.quaternion8()
    center = subgroup_from_elements(Q8, [0, 1])
    for K in subgroups_of_order(Q8, 4):
        assert not product_is_whole(center, K)


def test_automorphism_mapping_c2xc4():
    G = c2xc4()
    Ha = subgroup_from_elements(G, [0, 4])
    Hab2 = subgroup_from_elements(G, [0, 6])
    Hb2 = subgroup_from_elements(G, [0, 2])
    phi = find_automorphism_mapping(G, Ha, Hab2)
    assert phi is not None
    assert is_isomorphism(G, G, phi)
    assert {phi[0], phi[4]} == {0, 6}
    # oracle: exhaustive bijection search finds nothing mapping <a> to <b^2>
    assert _brute_constrained_automorphism(G, Ha, Hb2) is None
    assert find_automorphism_mapping(G, Ha, Hb2) is None
    assert find_automorphism_mapping(G, Ha, Ha) == list(range(8))


def _brute_constrained_automorphism(G, H1, H2):
    n = G.order
    for perm in permutations(range(1, n)):
        phi = (0,) + perm
        if mask_of(phi[x] for x in H1.elements) != H2.mask:
            continue
        if all(phi[G.table[i][j]] == G.table[phi[i]][phi[j]] for i in range(n) for j in range(n)):
            return phi
    return None


def test_semidirect_complements():
    He = groups.extraspecial_exp_p(3)
    H = next(H for H in subgroups_of_order(He, 3) if not is_normal(H))
    K = semidirect_complement(He, H)
    assert K is not None and K.order == 9
    assert is_normal(K)
    assert (K.mask & H.mask) == 1
    assert set(He.center()) <= set(K.elements)  # K = <x> Z(G)

    C4 = groups.cyclic(4)
    H = subgroup_from_elements(C4, [0, 2])
    assert semidirect_complement(C4, H) is None

    S3 = groups.symmetric(3)
    H = next(H for H in subgroups_of_order(S3, 2))
    K = semidirect_complement(S3, H)
    assert K is not None and K.order == 3


def test_complements_of():
    S3 = groups.symmetric(3)
    H = subgroups_of_order(S3, 2)[0]
    comp = complements_of(S3, H)
    assert [K.order for K in comp] == [3]
    Q8 = groups.quaternion8()
    center = subgroup_from_elements(Q8, [0, 1])
    assert complements_of(Q8, center) == []


@pytest.mark.parametrize("n", list(range(3, 11)))
def test_dihedral_subgroups_cyclic_or_dihedral(n):
    G = groups.dihedral(n)
    lat = all_subgroups(G)
    for H in lat.all:
        S = subgroup_group(H)
        d = S.order
        ok = isomorphic(S, groups.cyclic(d))
        if not ok and d % 2 == 0:
            ok = isomorphic(S, groups.dihedral(d // 2))
        assert ok, f"subgroup of order {d} in D{2*n} neither cyclic nor dihedral"
    # lemma counts per index m
    for m in sorted({k for k in range(1, 2 * n + 1) if (2 * n) % k == 0}):
        d = 2 * n // m
        count = len(lat.of_order(d))
        if m % 2 == 1:
            assert count == m
        elif n % m:
            assert count == 1
        else:
            assert count == m + 1


def test_core_contained_and_normal():
    for spec in ({"kind": "symmetric", "n": 4}, {"kind": "dihedral", "n": 6}):
        G = build(spec)
        for H in all_subgroups(G).all:
            C = core(H)
            assert C.mask & H.mask == C.mask
            assert is_normal(C)
            assert is_normal(H) == (len(conjugates(H)) == 1)
