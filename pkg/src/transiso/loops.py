"""Normalized right transversals and their induced right loops.

An NRT of H in G picks one element per right coset Hx, including the identity.
The induced operation x . y = the unique element of S in H(xy) makes S a right
quasigroup with two-sided identity. Loop elements are indexed by their coset
(coset 0 contains the identity), so the loop table of reps S is just
``coset_of[S[i] * S[j]]``.
"""

from __future__ import annotations

from itertools import islice, product

import numpy as np

from .groups import Group, TableIsoSearch, closure, closure_mask, from_permutations
from .subgroups import Subgroup, complements_of, is_normal, mask_of

CLASS_CHUNK = 2048
TABLE_MEMO_CAP = 1 << 20


class BudgetExceededError(RuntimeError):
    """NRT count exceeds the enumeration budget."""


class CosetTable:
    """Right-coset decomposition of H in G, cosets ordered by least element."""

    __slots__ = ("group", "subgroup", "coset_of", "members")

    def __init__(self, group: Group, subgroup: Subgroup, coset_of: list[int], members):
        self.group = group
        self.subgroup = subgroup
        self.coset_of = coset_of
        self.members = members

    def __len__(self) -> int:
        return len(self.members)


def coset_decomposition(G: Group, H: Subgroup) -> CosetTable:
    n = G.order
    t = G.table
    coset_of = [-1] * n
    members = []
    for x in range(n):
        if coset_of[x] >= 0:
            continue
        c = len(members)
        mem = sorted(t[h][x] for h in H.elements)
        for y in mem:
            coset_of[y] = c
        members.append(tuple(mem))
    return CosetTable(G, H, coset_of, tuple(members))


class NRT:
    """A normalized right transversal: one representative per right coset."""

    __slots__ = ("cosets", "reps")

    def __init__(self, cosets: CosetTable, reps: tuple[int, ...]):
        self.cosets = cosets
        self.reps = reps

    @property
    def group(self) -> Group:
        return self.cosets.group

    @property
    def subgroup(self) -> Subgroup:
        return self.cosets.subgroup

    def __len__(self) -> int:
        return len(self.reps)

    def __repr__(self) -> str:
        return f"NRT({list(self.reps)})"


def validate_nrt(S: NRT) -> None:
    cos = S.cosets
    if S.reps[0] != 0:
        raise ValueError("NRT must contain the identity as coset-0 representative")
    if len(S.reps) != len(cos.members):
        raise ValueError("one representative per coset required")
    for c, r in enumerate(S.reps):
        if cos.coset_of[r] != c:
            raise ValueError(f"representative {r} is not in coset {c}")


def nrt_from_elements(G: Group, H: Subgroup, elems) -> NRT:
    """Build an NRT from an unordered element collection (one per coset)."""
    cos = coset_decomposition(G, H)
    reps = [-1] * len(cos.members)
    for x in elems:
        c = cos.coset_of[x]
        if reps[c] != -1:
            raise ValueError(f"two representatives for coset {c}")
        reps[c] = x
    if any(r < 0 for r in reps):
        raise ValueError("not all cosets covered")
    S = NRT(cos, tuple(reps))
    validate_nrt(S)
    return S


def nrt_count(G: Group, H: Subgroup) -> int:
    index = G.order // H.order
    return H.order ** (index - 1)


def enumerate_nrts(G: Group, H: Subgroup, budget: int = 2_000_000):
    """Stream all NRTs of H in G, lexicographic in representative choices."""
    if nrt_count(G, H) > budget:
        raise BudgetExceededError(
            f"{nrt_count(G, H)} NRTs exceed budget {budget}"
        )
    cos = coset_decomposition(G, H)
    for tail in product(*cos.members[1:]):
        yield NRT(cos, (0,) + tail)


class RightLoop:
    """Finite magma table with two-sided identity 0 and bijective right translations."""

    __slots__ = ("size", "table", "_fingerprint", "_inv", "_group_flag")

    def __init__(self, table):
        self.size = len(table)
        self.table = tuple(tuple(row) for row in table)
        self._fingerprint = None
        self._inv = None
        self._group_flag = None

    def __repr__(self) -> str:
        return f"RightLoop(size={self.size})"

    def __eq__(self, other) -> bool:
        return isinstance(other, RightLoop) and other.table == self.table

    def __hash__(self) -> int:
        return hash(self.table)

    def right_power_order(self, x: int) -> int:
        """Least k with x^(.k) = 0 under the left-nested power x^(.k) = x^(.k-1) . x."""
        t = self.table
        k, z = 1, x
        while z != 0:
            z = t[z][x]
            k += 1
        return k

    def element_invariants(self) -> list[tuple]:
        """(right-power order, right-translation cycle type, left-image size) per element."""
        if self._inv is None:
            m, t = self.size, self.table
            out = []
            for x in range(m):
                col = [t[i][x] for i in range(m)]
                seen = [False] * m
                ct = []
                for i in range(m):
                    if seen[i]:
                        continue
                    ln, j = 0, i
                    while not seen[j]:
                        seen[j] = True
                        j = col[j]
                        ln += 1
                    ct.append(ln)
                out.append((self.right_power_order(x), tuple(sorted(ct)), len(set(t[x]))))
            self._inv = out
        return self._inv

    def fingerprint(self) -> tuple:
        """Cheap isomorphism invariant; equality is necessary, never sufficient."""
        if self._fingerprint is None:
            self._fingerprint = (self.size, tuple(sorted(self.element_invariants())))
        return self._fingerprint

    def is_associative(self) -> bool:
        if self._group_flag is None:
            m, t = self.size, self.table
            self._group_flag = all(
                t[t[i][j]][k] == t[i][t[j][k]]
                for i in range(m) for j in range(m) for k in range(m)
            )
        return self._group_flag


def validate_right_loop(L: RightLoop) -> None:
    m, t = L.size, L.table
    full = set(range(m))
    for x in range(m):
        if t[x][0] != x or t[0][x] != x:
            raise ValueError("0 is not a two-sided identity")
        if {t[i][x] for i in range(m)} != full:
            raise ValueError(f"right translation by {x} is not a bijection")


def induced_loop(G: Group, H: Subgroup, S: NRT) -> RightLoop:
    """Loop table of the induced operation on S, indexed by coset."""
    t = G.table
    coset_of = S.cosets.coset_of
    reps = S.reps
    return RightLoop([
        [coset_of[t[a][b]] for b in reps] for a in reps
    ])


def is_group_loop(L: RightLoop) -> bool:
    return L.is_associative()


def h_sub_s(G: Group, H: Subgroup, S: NRT) -> Subgroup:
    """Subgroup generated by all x*y*(x . y)^-1 for x, y in S."""
    t, inv = G.table, G.inverse
    coset_of = S.cosets.coset_of
    reps = S.reps
    gens = set()
    for x in reps:
        rowx = t[x]
        for y in reps:
            p = rowx[y]
            s = reps[coset_of[p]]
            gens.add(t[p][inv[s]])
    gens.discard(0)
    return Subgroup(G, closure_mask(G, gens), gens=sorted(gens) or None)


def span_of_nrt(G: Group, S: NRT) -> Subgroup:
    """The subgroup generated by the transversal itself."""
    return Subgroup(G, closure_mask(G, [r for r in S.reps if r != 0]))


def chi_s(G: Group, H: Subgroup, S: NRT, g: int) -> tuple[int, ...]:
    """Permutation of the loop indices induced by right multiplication by g."""
    t = G.table
    coset_of = S.cosets.coset_of
    return tuple(coset_of[t[x][g]] for x in S.reps)


def group_torsion(G: Group, H: Subgroup, S: NRT) -> tuple[tuple[int, ...], ...]:
    """The permutation group chi_S(H_S) on the loop, as a sorted closure."""
    HS = h_sub_s(G, H, S)
    gens = [chi_s(G, H, S, h) for h in HS.generators()]
    m = len(S.reps)
    ident = tuple(range(m))
    elems = {ident}
    frontier = [ident]
    while frontier:
        a = frontier.pop()
        for g in gens:
            b = tuple(g[a[i]] for i in range(m))
            if b not in elems:
                elems.add(b)
                frontier.append(b)
    return tuple(sorted(elems))


def permutation_closure_group(perms, degree: int) -> Group:
    """The permutations as an abstract Group (identity-seeded closure)."""
    gens = [list(p) for p in perms if tuple(p) != tuple(range(degree))]
    if not gens:
        gens = [list(range(degree))]
    return from_permutations(gens)


def find_loop_isomorphism(L1: RightLoop, L2: RightLoop) -> list[int] | None:
    """Identity-preserving bijection with f(x . y) = f(x) . f(y), or None."""
    if L1.size != L2.size:
        return None
    if L1.fingerprint() != L2.fingerprint():
        return None
    m = L1.size
    inv1, inv2 = L1.element_invariants(), L2.element_invariants()
    by_inv: dict[tuple, list[int]] = {}
    for x in range(m):
        by_inv.setdefault(inv2[x], []).append(x)
    order = sorted(range(m), key=lambda x: (len(by_inv[inv1[x]]), inv1[x], x))
    cand_lists = [by_inv[inv1[x]] for x in order]
    phi = TableIsoSearch(L1.table, L2.table, m).search(order, cand_lists)
    if phi is None:
        return None
    t1, t2 = L1.table, L2.table
    assert all(
        phi[t1[i][j]] == t2[phi[i]][phi[j]] for i in range(m) for j in range(m)
    )
    return phi


def loops_isomorphic(L1: RightLoop, L2: RightLoop) -> bool:
    return find_loop_isomorphism(L1, L2) is not None


class LoopClass:
    """An isomorphism class of induced loops, with one witnessing NRT."""

    __slots__ = ("loop", "witness_reps", "count")

    def __init__(self, loop: RightLoop, witness_reps: tuple[int, ...], count: int = 1):
        self.loop = loop
        self.witness_reps = witness_reps
        self.count = count


class LoopClassSet:
    """Pairwise non-isomorphic loop representatives for the NRTs of one subgroup.

    ``exhaustive`` is True only when every NRT was enumerated; sampled sets may
    witness adjacency but never non-adjacency.
    """

    def __init__(self, subgroup: Subgroup, classes: list[LoopClass], exhaustive: bool,
                 total_enumerated: int):
        self.subgroup = subgroup
        self.classes = classes
        self.exhaustive = exhaustive
        self.total_enumerated = total_enumerated

    @property
    def representatives(self) -> list[RightLoop]:
        return [c.loop for c in self.classes]

    def __len__(self) -> int:
        return len(self.classes)


class _ClassRegistry:
    def __init__(self):
        self.classes: list[LoopClass] = []
        self.by_fp: dict[tuple, list[int]] = {}
        self.table_memo: dict[bytes, int] = {}

    def add(self, table_bytes: bytes | None, loop_factory, witness_reps) -> None:
        if table_bytes is not None:
            cid = self.table_memo.get(table_bytes)
            if cid is not None:
                self.classes[cid].count += 1
                return
        loop = loop_factory()
        fp = loop.fingerprint()
        for cid in self.by_fp.get(fp, ()):  # isomorphism decides, never the fingerprint
            if find_loop_isomorphism(self.classes[cid].loop, loop) is not None:
                self.classes[cid].count += 1
                if table_bytes is not None and len(self.table_memo) < TABLE_MEMO_CAP:
                    self.table_memo[table_bytes] = cid
                return
        cid = len(self.classes)
        self.classes.append(LoopClass(loop, tuple(witness_reps)))
        self.by_fp.setdefault(fp, []).append(cid)
        if table_bytes is not None and len(self.table_memo) < TABLE_MEMO_CAP:
            self.table_memo[table_bytes] = cid

    def sorted_classes(self) -> list[LoopClass]:
        return sorted(self.classes, key=lambda c: (c.loop.fingerprint(), c.loop.table))


def loop_class_set(
    G: Group, H: Subgroup, budget: int = 2_000_000, complements=None,
) -> LoopClassSet:
    """All loop-isomorphism classes of NRTs of H, or a documented sample.

    Within budget: exhaustive enumeration, deduplicated through a table memo,
    fingerprint buckets, and pairwise isomorphism tests. Beyond budget: the
    subgroup transversals (complements of H, precomputable by the caller) plus
    the quotient loop when H is normal, flagged non-exhaustive.
    """
    total = nrt_count(G, H)
    cos = coset_decomposition(G, H)
    m = len(cos.members)
    reg = _ClassRegistry()
    if total <= budget:
        tnp = G.np_table
        coset_np = np.asarray(cos.coset_of, dtype=np.int32)
        dtype = np.int8 if m <= 127 else np.int32
        it = product(*cos.members[1:])
        while True:
            block = list(islice(it, CLASS_CHUNK))
            if not block:
                break
            reps_arr = np.empty((len(block), m), dtype=np.int32)
            reps_arr[:, 0] = 0
            if m > 1:
                reps_arr[:, 1:] = block
            tables = coset_np[tnp[reps_arr[:, :, None], reps_arr[:, None, :]]].astype(dtype)
            for k in range(len(block)):
                tb = tables[k]
                reg.add(tb.tobytes(), lambda tb=tb: RightLoop(tb.tolist()), reps_arr[k].tolist())
        return LoopClassSet(H, reg.sorted_classes(), True, total)

    # sampled: subgroup transversals are exactly the complements of H
    if complements is None:
        complements = complements_of(G, H)
    sampled = 0
    for K in complements:
        reps = [-1] * m
        for x in K.elements:
            reps[cos.coset_of[x]] = x
        S = NRT(cos, tuple(reps))
        reg.add(None, lambda S=S: induced_loop(G, H, S), S.reps)
        sampled += 1
    if is_normal(H):
        S = NRT(cos, tuple(mem[0] for mem in cos.members))
        reg.add(None, lambda S=S: induced_loop(G, H, S), S.reps)
        sampled += 1
    return LoopClassSet(H, reg.sorted_classes(), False, sampled)
