"""Subgroup enumeration, normality, quotients, and automorphism search.

Subgroups are bitmasks over element indices of an immutable parent Group.
Enumeration works by join-closure: every subgroup is the join of its
prime-power cyclic subgroups, so repeatedly adjoining cyclic seeds to already
found subgroups reaches the full lattice (including perfect subgroups, which
pure prime-index cyclic extension would miss).
"""

from __future__ import annotations

from itertools import product

from .groups import Group, closure_mask, find_isomorphism, is_isomorphism, _generating_sequence

LATTICE_MAX_DEFAULT = 400


class LatticeUnavailableError(ValueError):
    """Raised when an operation needs a full lattice beyond the size cap."""


def mask_of(elems) -> int:
    m = 0
    for e in elems:
        m |= 1 << e
    return m


def elements_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


class Subgroup:
    """A subgroup of ``parent`` stored as an element bitmask."""

    __slots__ = ("parent", "mask", "order", "gens", "_elements", "_normal", "_core")

    def __init__(self, parent: Group, mask: int, gens: list[int] | None = None):
        self.parent = parent
        self.mask = mask
        self.order = mask.bit_count()
        self.gens = gens
        self._elements = None
        self._normal = None
        self._core = None

    @property
    def elements(self) -> tuple[int, ...]:
        if self._elements is None:
            self._elements = elements_of(self.mask)
        return self._elements

    def generators(self) -> list[int]:
        if self.gens is None:
            self.gens = _subgroup_generators(self.parent, self.elements)
        return self.gens

    def __contains__(self, x: int) -> bool:
        return bool(self.mask >> x & 1)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subgroup)
            and other.parent is self.parent
            and other.mask == self.mask
        )

    def __hash__(self) -> int:
        return hash((id(self.parent), self.mask))

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, elements={list(self.elements)})"

    def sort_key(self):
        return (self.order, self.elements)


def _subgroup_generators(G: Group, elems) -> list[int]:
    gens: list[int] = []
    have = {0}
    pool = sorted(elems, key=lambda x: (-G.element_order[x], x))
    target = len(elems)
    for x in pool:
        if x in have:
            continue
        gens.append(x)
        have = set(_closure_elems(G, gens))
        if len(have) == target:
            break
    return gens


def _closure_elems(G: Group, gens) -> tuple[int, ...]:
    return elements_of(closure_mask(G, gens))


def subgroup_from_gens(G: Group, gens) -> Subgroup:
    return Subgroup(G, closure_mask(G, gens), gens=sorted(set(gens)) or None)


def subgroup_from_elements(G: Group, elems) -> Subgroup:
    mask = mask_of(elems) | 1
    if closure_mask(G, list(elems)) != mask:
        raise ValueError(f"{sorted(elems)} is not a subgroup")
    return Subgroup(G, mask)


def trivial_subgroup(G: Group) -> Subgroup:
    return Subgroup(G, 1, gens=[])


def whole_subgroup(G: Group) -> Subgroup:
    return Subgroup(G, (1 << G.order) - 1)


def _prime_power_cyclic_seeds(G: Group, order_divides: int | None = None):
    """Deduplicated cyclic subgroups of prime-power order as (mask, generator)."""
    seeds = []
    seen = set()
    for g in range(1, G.order):
        o = G.element_order[g]
        if not _is_prime_power(o):
            continue
        if order_divides is not None and order_divides % o != 0:
            continue
        m = closure_mask(G, [g])
        if m not in seen:
            seen.add(m)
            seeds.append((m, g))
    return seeds


def _is_prime_power(n: int) -> bool:
    if n < 2:
        return False
    p = 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            return n == 1
        p += 1
    return True  # n is prime


def subgroups_of_order(G: Group, d: int) -> list[Subgroup]:
    """All subgroups of order d, duplicate-free, deterministically sorted.

    Join-closure over prime-power cyclic seeds, pruned to orders dividing d:
    any order-d subgroup is the join of its own cyclic subgroups, and every
    partial join stays inside it, so the pruning loses nothing.
    """
    if d < 1 or G.order % d != 0:
        raise ValueError(f"{d} does not divide the group order {G.order}")
    if d == 1:
        return [trivial_subgroup(G)]
    if d == G.order:
        return [whole_subgroup(G)]
    seeds = _prime_power_cyclic_seeds(G, order_divides=d)
    found: dict[int, list[int]] = {1: []}
    queue = [1]
    for mask in queue:
        gens = found[mask]
        size = mask.bit_count()
        for smask, sgen in seeds:
            if smask & ~mask == 0:
                continue
            if size * smask.bit_count() > d * (smask & mask).bit_count():
                continue  # |<U,C>| >= |UC| > d already
            jmask = closure_mask(G, gens + [sgen], cap=d)
            jsize = jmask.bit_count()
            if jsize > d or d % jsize != 0:
                continue
            if jmask not in found:
                found[jmask] = gens + [sgen]
                queue.append(jmask)
    out = [Subgroup(G, m, gens=g or None) for m, g in found.items() if m.bit_count() == d]
    out.sort(key=Subgroup.sort_key)
    return out


class SubgroupLattice:
    """Complete subgroup inventory of a group, sorted by (order, elements)."""

    def __init__(self, parent: Group, all_subgroups: list[Subgroup]):
        self.parent = parent
        self.all = all_subgroups
        self.by_order: dict[int, list[int]] = {}
        for i, H in enumerate(all_subgroups):
            self.by_order.setdefault(H.order, []).append(i)
        self._maximal = None

    def __len__(self) -> int:
        return len(self.all)

    def of_order(self, d: int) -> list[Subgroup]:
        return [self.all[i] for i in self.by_order.get(d, [])]

    def maximal(self) -> list[Subgroup]:
        """Maximal proper subgroups."""
        if self._maximal is None:
            proper = [H for H in self.all if H.order < self.parent.order]
            out = []
            for H in proper:
                if not any(
                    K.order > H.order and K.mask & H.mask == H.mask and K.mask != H.mask
                    for K in proper
                ):
                    out.append(H)
            self._maximal = out
        return self._maximal


def all_subgroups(G: Group, max_order: int = LATTICE_MAX_DEFAULT) -> SubgroupLattice:
    """Full subgroup lattice; raises LatticeUnavailableError above the cap."""
    if G.order > max_order:
        raise LatticeUnavailableError(
            f"group order {G.order} exceeds lattice maximum {max_order}; "
            "use order-restricted enumeration"
        )
    seeds = _prime_power_cyclic_seeds(G)
    found: dict[int, list[int]] = {1: []}
    queue = [1]
    full = (1 << G.order) - 1
    half = G.order // 2
    for mask in queue:
        gens = found[mask]
        for smask, sgen in seeds:
            if smask & ~mask == 0:
                continue
            jmask = closure_mask(G, gens + [sgen], cap=half)
            if jmask.bit_count() > half:
                jmask = full  # Lagrange: order > |G|/2 forces the whole group
            if jmask not in found:
                found[jmask] = gens + [sgen]
                queue.append(jmask)
    if full not in found:
        found[full] = _generating_sequence(G)
    subs = [Subgroup(G, m, gens=g or None) for m, g in found.items()]
    subs.sort(key=Subgroup.sort_key)
    return SubgroupLattice(G, subs)


# ---------------------------------------------------------------------------
# normality, cores, quotients


def conjugate_mask(H: Subgroup, g: int) -> int:
    """Bitmask of g^-1 H g."""
    G = H.parent
    t, inv = G.table, G.inverse
    ginv = inv[g]
    m = 0
    for x in H.elements:
        m |= 1 << t[t[ginv][x]][g]
    return m


def is_normal(H: Subgroup) -> bool:
    if H._normal is None:
        G = H.parent
        mask = H.mask
        H._normal = all(conjugate_mask(H, g) == mask for g in range(G.order))
    return H._normal


def conjugates(H: Subgroup) -> list[Subgroup]:
    masks = {conjugate_mask(H, g) for g in range(H.parent.order)}
    out = [Subgroup(H.parent, m) for m in sorted(masks)]
    out.sort(key=Subgroup.sort_key)
    return out


def core(H: Subgroup) -> Subgroup:
    """Largest normal subgroup of the parent contained in H."""
    if H._core is None:
        m = H.mask
        for g in range(H.parent.order):
            m &= conjugate_mask(H, g)
            if m == 1:
                break
        H._core = m
    return Subgroup(H.parent, H._core)


def is_corefree(H: Subgroup) -> bool:
    return core(H).mask == 1


def quotient_with_map(G: Group, N: Subgroup) -> tuple[Group, list[int]]:
    """Quotient group on right cosets plus the element -> coset index map."""
    if not is_normal(N):
        raise ValueError("quotient requires a normal subgroup")
    n = G.order
    t = G.table
    coset_of = [-1] * n
    reps = []
    for x in range(n):
        if coset_of[x] >= 0:
            continue
        c = len(reps)
        reps.append(x)
        for h in N.elements:
            coset_of[t[h][x]] = c
    q = len(reps)
    table = [[coset_of[t[reps[i]][reps[j]]] for j in range(q)] for i in range(q)]
    if N.order == 1:
        label = G.label
    else:
        label = f"{G.label}/N{N.order}.{min(e for e in N.elements if e != 0)}"
    return Group(table, label=label), coset_of


def quotient(G: Group, N: Subgroup) -> Group:
    return quotient_with_map(G, N)[0]


def product_is_whole(H: Subgroup, K: Subgroup) -> bool:
    """True iff the set HK covers the parent: |H||K| = |G||H meet K|."""
    G = H.parent
    return H.order * K.order == G.order * (H.mask & K.mask).bit_count()


# ---------------------------------------------------------------------------
# p-group machinery and Frattini subgroup


def _prime_power(n: int) -> tuple[int, int] | None:
    """(p, k) with n = p^k, or None."""
    if n < 2:
        return None
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            return (p, k) if n == 1 else None
        p += 1
    return (n, 1)


def _pth_powers(G: Group, p: int) -> set[int]:
    out = set()
    t = G.table
    for g in range(G.order):
        x = g
        for _ in range(p - 1):
            x = t[x][g]
        out.add(x)
    return out


def maximal_subgroups_pgroup(G: Group) -> list[Subgroup]:
    """Index-p subgroups of a p-group, via hyperplanes of G over G'*{g^p}."""
    pk = _prime_power(G.order)
    if pk is None:
        raise ValueError("not a p-group")
    p, _ = pk
    egens = set(G.commutator_subgroup()) | _pth_powers(G, p)
    emask = closure_mask(G, egens)
    E = Subgroup(G, emask)
    Q, coset_of = quotient_with_map(G, E)
    # coordinates on the elementary abelian quotient
    basis: list[int] = []
    span = {0}
    for x in range(Q.order):
        if x not in span:
            basis.append(x)
            span = set(_closure_elems(Q, basis))
    r = len(basis)
    coord: dict[int, tuple[int, ...]] = {}
    tq = Q.table
    for vec in product(range(p), repeat=r):
        e = 0
        for b, k in zip(basis, vec):
            for _ in range(k):
                e = tq[e][b]
        coord[e] = vec
    out = []
    for lam in _projective_functionals(p, r):
        m = 0
        for g in range(G.order):
            vec = coord[coset_of[g]]
            if sum(a * b for a, b in zip(vec, lam)) % p == 0:
                m |= 1 << g
        out.append(Subgroup(G, m))
    out.sort(key=Subgroup.sort_key)
    return out


def _projective_functionals(p: int, r: int):
    """Nonzero functionals on F_p^r up to scalar (first nonzero entry = 1)."""
    for vec in product(range(p), repeat=r):
        for v in vec:
            if v:
                break
        else:
            continue
        first = next(v for v in vec if v)
        if first == 1:
            yield vec


def frattini(G: Group, max_order: int = LATTICE_MAX_DEFAULT) -> Subgroup:
    """Intersection of all maximal subgroups."""
    if G.order == 1:
        return trivial_subgroup(G)
    if _prime_power(G.order) is not None:
        maximals = maximal_subgroups_pgroup(G)
    elif G.order <= max_order:
        maximals = all_subgroups(G, max_order).maximal()
    else:
        raise LatticeUnavailableError(
            f"frattini needs a p-group or order <= {max_order}, got {G.order}"
        )
    m = (1 << G.order) - 1
    for H in maximals:
        m &= H.mask
    return Subgroup(G, m)


def subgroup_group(H: Subgroup) -> Group:
    """The subgroup as a standalone Group, elements reindexed in ascending order."""
    elems = H.elements
    index = {e: i for i, e in enumerate(elems)}
    t = H.parent.table
    table = [[index[t[a][b]] for b in elems] for a in elems]
    return Group(table, label=f"{H.parent.label}|sub{H.order}")


# ---------------------------------------------------------------------------
# automorphism search and complements


def find_automorphism_mapping(G: Group, H1: Subgroup, H2: Subgroup) -> list[int] | None:
    """An automorphism of G with phi(H1) = H2, or None if none exists.

    Tries conjugation first, then backtracks over generator images with the
    leading generators pinned inside H1 and their images restricted to H2.
    Returned maps are re-verified against the full multiplication table.
    """
    if H1.order != H2.order:
        raise ValueError("subgroups must have equal order")
    n = G.order
    if H1.mask == H2.mask:
        return list(range(n))
    t, inv = G.table, G.inverse
    for g in range(n):
        if conjugate_mask(H1, g) == H2.mask:
            ginv = inv[g]
            phi = [t[t[ginv][x]][g] for x in range(n)]
            return phi
    h_gens = _subgroup_generators(G, H1.elements)
    gens = _generating_sequence(G, seed=list(h_gens))
    pool = [list(H2.elements)] * len(h_gens)
    phi = find_isomorphism(G, G, gens=gens, image_pool=pool)
    if phi is None:
        return None
    if not is_isomorphism(G, G, phi):
        return None
    if mask_of(phi[x] for x in H1.elements) != H2.mask:
        return None
    return phi


def normal_subgroups_of_order(
    G: Group, m: int, lattice: SubgroupLattice | None = None,
    max_order: int = LATTICE_MAX_DEFAULT,
) -> list[Subgroup]:
    if G.order % m != 0:
        return []
    pk = _prime_power(G.order)
    if pk is not None and m == G.order // pk[0]:
        return maximal_subgroups_pgroup(G)  # index-p subgroups of a p-group are normal
    if lattice is None:
        lattice = all_subgroups(G, max_order)
    return [H for H in lattice.of_order(m) if is_normal(H)]


def central_order_p_subgroups(G: Group, p: int) -> list[Subgroup]:
    """Order-p subgroups of the center.

    In a p-group these are exactly the normal subgroups of order p (a normal
    subgroup of order p is centralized by the whole group), which avoids any
    lattice construction at large orders.
    """
    seen = set()
    out = []
    for z in sorted(G.center()):
        if G.element_order[z] != p:
            continue
        m = closure_mask(G, [z])
        if m not in seen:
            seen.add(m)
            out.append(Subgroup(G, m, gens=[z]))
    out.sort(key=Subgroup.sort_key)
    return out


def semidirect_complement(
    G: Group, H: Subgroup, lattice: SubgroupLattice | None = None,
    max_order: int = LATTICE_MAX_DEFAULT,
) -> Subgroup | None:
    """A normal K with H meet K trivial and HK = G, or None."""
    m = G.order // H.order
    for K in normal_subgroups_of_order(G, m, lattice=lattice, max_order=max_order):
        if (K.mask & H.mask) == 1:
            return K
    return None


def complements_of(
    G: Group, H: Subgroup, lattice: SubgroupLattice | None = None,
    max_order: int = LATTICE_MAX_DEFAULT,
) -> list[Subgroup]:
    """All subgroups K (not necessarily normal) with |K| = [G:H] and H meet K = 1.

    These are exactly the transversals of H that happen to be subgroups.
    """
    m = G.order // H.order
    if lattice is not None:
        pool = lattice.of_order(m)
    elif G.order <= max_order:
        pool = all_subgroups(G, max_order).of_order(m)
    else:
        pool = subgroups_of_order(G, m)
    return [K for K in pool if (K.mask & H.mask) == 1]
