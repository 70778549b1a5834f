#!/usr/bin/env python3
"""Regenerate the packaged group fixtures (src/transiso/fixtures/*.json).

Each fixture is a perm-kind group spec: permutation generators of the right
regular representation, plus a comment recording the construction and, where
pinned by checked invariants, the GAP small-group ID. Construction happens
from first principles (semidirect / direct / central products); every fixture
is validated against its expected invariants before being written.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from transiso import groups
from transiso.groups import Group, direct_product, isomorphic, validate_group
from transiso.subgroups import (
    Subgroup,
    central_order_p_subgroups,
    frattini,
    quotient,
    subgroup_from_gens,
)
from transiso.graph import order_p_subgroups

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "transiso" / "fixtures"


def semidirect(A: Group, K: Group, action: dict[int, list[int]], label: str) -> Group:
    """A acting on K: action[a] is the automorphism k -> x_a k x_a^-1 of K.

    Element (a, k) gets index a*|K| + k; the product rule follows from
    x_a1 k1 x_a2 k2 = x_(a1 a2) (x_a2^-1 k1 x_a2) k2.
    """
    na, nk = A.order, K.order
    for a in range(na):
        perm = action[a]
        assert sorted(perm) == list(range(nk)), "action must permute K"
        assert all(
            perm[K.table[i][j]] == K.table[perm[i]][perm[j]]
            for i in range(nk) for j in range(nk)
        ), "action must be an automorphism of K"
    # homomorphism check: action[a1*a2] = action[a2] after action[a1] (conjugation order)
    for a1 in range(na):
        for a2 in range(na):
            composed = [action[a1][action[a2][k]] for k in range(nk)]
            assert composed == action[A.table[a1][a2]], "action must be a homomorphism"
    table = [[0] * (na * nk) for _ in range(na * nk)]
    for a1 in range(na):
        for k1 in range(nk):
            row = table[a1 * nk + k1]
            for a2 in range(na):
                act = action[A.inverse[a2]]
                moved = act[k1]
                base = A.table[a1][a2] * nk
                krow = K.table[moved]
                for k2 in range(nk):
                    row[a2 * nk + k2] = base + krow[k2]
    G = Group(table, label=label)
    validate_group(G, assoc_limit=250)
    return G


def twisted_cyclic_extension(K: Group, alpha: list[int], z: int, label: str) -> Group | None:
    """Extension <x, K> with x k x^-1 = alpha(k) and x^3 = z (central, alpha-fixed).

    Returns None when the data does not define a group (validated by a full
    associativity check); covers the non-split order-3k extensions the plain
    semidirect construction cannot reach.
    """
    nk = K.order
    if alpha[z] != z or z not in K.center():
        return None
    a2 = [alpha[x] for x in alpha]
    if [alpha[x] for x in a2] != list(range(nk)):
        return None
    pows = {0: list(range(nk)), 1: alpha, 2: a2}
    n = 3 * nk
    zpow = {0: 0, 1: z, 2: K.table[z][z]}
    table = [[0] * n for _ in range(n)]
    for t1 in range(3):
        for k1 in range(nk):
            row = table[t1 * nk + k1]
            for t2 in range(3):
                act = pows[(-t2) % 3]
                moved = act[k1]
                t = (t1 + t2) % 3
                carry = zpow[(t1 + t2) // 3]
                left = K.table[carry][moved]
                krow = K.table[left]
                for k2 in range(nk):
                    row[t2 * nk + k2] = t * nk + krow[k2]
    # the cocycle data may simply not define a group: full associativity scan
    for i in range(n):
        ti = table[i]
        for j in range(n):
            tij = table[ti[j]]
            tj = table[j]
            for k in range(n):
                if tij[k] != ti[tj[k]]:
                    return None
    G = Group(table, label=label)
    validate_group(G, assoc_limit=1)  # identity/permutation/inverse checks
    return G


def cyclic_action(m: int, alpha: list[int], K: Group) -> dict[int, list[int]]:
    """Action of C_m generated by the automorphism alpha of K."""
    nk = K.order
    pows = [list(range(nk))]
    for _ in range(m - 1):
        pows.append([alpha[x] for x in pows[-1]])
    assert [alpha[x] for x in pows[-1]] == pows[0], "alpha^m must be the identity"
    return {t: pows[t] for t in range(m)}


def aut_mult(K: Group, unit_map) -> list[int]:
    """Automorphism of K from images of elements (as a callable on indices)."""
    return [unit_map(k) for k in range(K.order)]


def regular_representation(G: Group) -> list[list[int]]:
    gens = groups._generating_sequence(G)
    return [[G.table[t][g] for t in range(G.order)] for g in gens]


def exponent(G: Group) -> int:
    e = 1
    for o in G.element_order:
        e = _lcm(e, o)
    return e


def _lcm(a, b):
    from math import gcd
    return a * b // gcd(a, b)


def is_p_central(G: Group, p: int) -> bool:
    central = {H.mask for H in central_order_p_subgroups(G, p)}
    return all(H.mask in central for H in order_p_subgroups(G, p))


def fixture_spec(G: Group, name: str, comment: str) -> dict:
    return {
        "kind": "perm",
        "degree": G.order,
        "generators": regular_representation(G),
        "label": name,
        "comment": comment,
    }


def write_fixture(G: Group, name: str, comment: str) -> None:
    spec = fixture_spec(G, name, comment)
    path = OUT_DIR / f"{name}.json"
    path.write_text(json.dumps(spec, sort_keys=True) + "\n")
    print(f"wrote {path.name}: order {G.order}, exponent {exponent(G)}")


def build_m27() -> Group:
    C9 = groups.cyclic(9)
    alpha = [(4 * k) % 9 for k in range(9)]
    G = semidirect(groups.cyclic(3), C9, cyclic_action(3, alpha, C9), "M27")
    assert G.order == 27 and not G.is_abelian() and exponent(G) == 9
    return G


def all_automorphisms(K: Group) -> list[tuple[int, ...]]:
    """Every automorphism of K, by propagating generator images."""
    from transiso.groups import TableIsoSearch, _element_invariants, _generating_sequence

    gens = _generating_sequence(K)
    inv = _element_invariants(K)
    by_inv: dict[tuple, list[int]] = {}
    for x in range(K.order):
        by_inv.setdefault(inv[x], []).append(x)
    out: list[tuple[int, ...]] = []

    def rec(search: TableIsoSearch, depth: int):
        if depth == len(gens):
            if len(search.elems) == K.order:
                out.append(tuple(search.phi))
            return
        g = gens[depth]
        for h in by_inv[inv[g]]:
            added = search._assign(g, h)
            if added is None:
                continue
            rec(search, depth + 1)
            search._undo(added)

    rec(TableIsoSearch(K.table, K.table, K.order), 0)
    return out


def order3_automorphism_classes(K: Group) -> list[list[int]]:
    """Order-3 automorphisms of K up to Aut(K)-conjugacy and inversion.

    Conjugate or mutually inverse actions give isomorphic split extensions, so
    one representative per such class suffices.
    """
    auts = all_automorphisms(K)
    n = K.order
    ident = tuple(range(n))
    order3 = []
    for a in auts:
        a2 = tuple(a[x] for x in a)
        if tuple(a[x] for x in a2) == ident and a != ident:
            order3.append((a, a2))
    seen: set[tuple] = set()
    reps = []
    for a, a_inv in order3:
        if a in seen:
            continue
        reps.append(list(a))
        for b in auts:
            binv = [0] * n
            for i, v in enumerate(b):
                binv[v] = i
            for target in (a, a_inv):
                seen.add(tuple(b[target[binv[x]]] for x in range(n)))
    return reps


def build_order81_candidates() -> list[tuple[str, str, Group]]:
    out = []
    He3 = groups.extraspecial_exp_p(3)
    C3, C9, C27 = groups.cyclic(3), groups.cyclic(9), groups.cyclic(27)
    M27 = build_m27()

    out.append(("g81_h27xc3", "Heis(3) x C3, exponent 3",
                direct_product(He3, C3)))
    out.append(("g81_m27xc3", "M27 x C3",
                direct_product(M27, C3)))

    alpha = [(10 * k) % 27 for k in range(27)]
    out.append(("g81_m81", "modular group C27 : C3, a -> a^10",
                semidirect(C3, C27, cyclic_action(3, alpha, C27), "M81")))

    alpha9 = [(4 * k) % 9 for k in range(9)]
    out.append(("g81_c9sdc9", "C9 : C9, a -> a^4 (3-central)",
                semidirect(C9, C9, cyclic_action(9, alpha9, C9), "C9sdC9")))

    # central product Heis(3) * C9 over the shared center
    P = direct_product(He3, C9)
    z_c3inv = 1 * 9 + 6  # (z, c^-3): z = Heis element (0,0,1) at index 1
    N = subgroup_from_gens(P, [z_c3inv])
    assert N.order == 3
    CP = quotient(P, N)
    CP.label = "Heis3*C9"
    out.append(("g81_heis3_cp_c9", "central product Heis(3) * C9", CP))

    # wreath-type maximal class: C3 acting on C3^3 by coordinate shift
    E27 = groups.elementary_abelian(3, 3)
    def shift(k):
        d = [(k // 3 ** i) % 3 for i in range(3)]
        return d[2] + 3 * d[0] + 9 * d[1]
    out.append(("g81_c3wrc3", "C3 wr C3: coordinate shift on C3^3",
                semidirect(C3, E27, cyclic_action(3, aut_mult(E27, shift), E27), "C3wrC3")))

    # C9 acting on C3^2 through its order-3 quotient (shear matrix)
    E9 = groups.elementary_abelian(3, 2)
    def shear(k):
        d0, d1 = k % 3, (k // 3) % 3
        return (d0 + d1) % 3 + 3 * d1
    out.append(("g81_e9sdc9", "C9 acting on C3^2 by a shear through C3",
                semidirect(C9, E9, cyclic_action(9, aut_mult(E9, shear), E9), "E9sdC9")))

    # split extensions C3 : K over every order-27 kernel; order-3 actions up
    # to Aut(K)-conjugacy and inversion cover all such extensions
    kernels = [
        ("c27", C27),
        ("c9xc3", direct_product(C9, C3)),
        ("e27", groups.elementary_abelian(3, 3)),
        ("heis3", He3),
        ("m27", M27),
    ]
    for kname, K in kernels:
        classes = order3_automorphism_classes(K)
        for idx, alpha in enumerate(classes):
            name = f"g81_{kname}_sd_{idx}"
            out.append((name, f"C3 : {kname} via order-3 action class {idx}",
                        semidirect(C3, K, cyclic_action(3, alpha, K), name)))
        # non-split extensions <x, K> with x^3 = z: every maximal subgroup of
        # the one remaining class is C9 x C3 or M27, so these kernels suffice,
        # but sweep all of them for uniformity
        ident = list(range(K.order))
        for idx, alpha in enumerate(classes + [ident]):
            fixed_central = [
                z for z in sorted(K.center())
                if K.element_order[z] == 3 and alpha[z] == z
            ]
            for z in fixed_central:
                name = f"g81_{kname}_tw_{idx}_z{z}"
                G = twisted_cyclic_extension(K, alpha, z, name)
                if G is not None and G.order == 81 and not G.is_abelian():
                    out.append((name, f"<x, {kname}>: x^3 = element {z}, "
                                      f"action class {idx}", G))
    return out


def dedupe(cands):
    kept = []
    for name, comment, G in cands:
        dup = next((k for k in kept if isomorphic(k[2], G)), None)
        if dup is None:
            kept.append((name, comment, G))
        else:
            print(f"  {name} isomorphic to {dup[0]}, skipped")
    return kept


def build_sg243_37() -> Group:
    # C3 acting on C3^4 by I + N with N: e2->e0, e3->e1 (N^2 = 0, rank 2)
    E81 = groups.elementary_abelian(3, 4)
    def mmap(k):
        d = [(k // 3 ** i) % 3 for i in range(4)]
        nd = [(d[0] + d[2]) % 3, (d[1] + d[3]) % 3, d[2], d[3]]
        return sum(nd[i] * 3 ** i for i in range(4))
    C3 = groups.cyclic(3)
    G = semidirect(C3, E81, cyclic_action(3, aut_mult(E81, mmap), E81), "SG(243,37)")
    assert G.order == 243 and not G.is_abelian()
    assert exponent(G) == 3
    Z = sorted(G.center())
    assert len(Z) == 9
    Gp = sorted(G.commutator_subgroup())
    assert Gp == Z, "commutator subgroup must equal the center"
    Ph = frattini(G)
    assert sorted(Ph.elements) == Z, "Frattini subgroup must equal the center"
    assert all(G.element_order[z] in (1, 3) for z in Z)
    assert not is_p_central(G, 3)
    return G


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)

    M27 = build_m27()
    write_fixture(M27, "m27",
                  "non-abelian order 27, exponent 9 (these invariants pin "
                  "SmallGroup(27,4)); built as C9 : C3 with a -> a^4")

    print("order-81 candidates:")
    kept = dedupe(build_order81_candidates())
    noncentral = []
    for name, comment, G in kept:
        assert G.order == 81 and not G.is_abelian()
        pc = is_p_central(G, 3)
        tag = " [3-central]" if pc else ""
        print(f"  keeping {name}{tag}")
        write_fixture(G, name, comment + ("; 3-central" if pc else ""))
        if not pc:
            noncentral.append(name)
    index = {
        "order81_nonabelian_non3central": sorted(noncentral),
        "order81_3central": sorted(n for n, _, g in kept if n not in noncentral),
    }
    (OUT_DIR / "index.json").write_text(json.dumps(index, sort_keys=True, indent=2) + "\n")
    print(f"total distinct non-abelian order-81 fixtures: {len(kept)} "
          f"({len(noncentral)} non-3-central)")

    G243 = build_sg243_37()
    write_fixture(G243, "smallgroup_243_37",
                  "GAP SmallGroup(243,37): C3 : C3^4, exponent 3, "
                  "Phi = G' = Z isomorphic to C3 x C3 (invariants verified)")


if __name__ == "__main__":
    main()
