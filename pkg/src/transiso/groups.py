"""Finite groups as Cayley tables over element indices 0..n-1, identity at 0."""

from __future__ import annotations

import os
import random
from itertools import product

import numpy as np

DEFAULT_MAX_ORDER = 2000

GROUP_KINDS = (
    "cyclic",
    "dihedral",
    "symmetric",
    "alternating",
    "quaternion8",
    "extraspecial_exp_p",
    "elementary_abelian",
    "direct_product",
    "cayley",
    "perm",
)


class GroupBuildError(ValueError):
    """Invalid group specification or size limit exceeded."""


def max_group_order() -> int:
    env = os.environ.get("TRANSISO_MAX_ORDER")
    if env is not None:
        try:
            value = int(env)
        except ValueError as exc:
            raise GroupBuildError(f"TRANSISO_MAX_ORDER is not an integer: {env!r}") from exc
        if value < 1:
            raise GroupBuildError("TRANSISO_MAX_ORDER must be >= 1")
        return value
    return DEFAULT_MAX_ORDER


class Group:
    """Immutable finite group: n x n multiplication table with identity at index 0.

    ``table[i][j]`` is the index of the product of elements i and j. Inverses and
    element orders are precomputed; everything else (center, commutator subgroup,
    numpy mirror of the table) is cached lazily. Instances are safe to share
    across threads once constructed.
    """

    __slots__ = (
        "order", "table", "inverse", "element_order", "label",
        "_np_table", "_center", "_commutator", "_abelian", "_centralizer_sizes",
    )

    def __init__(self, table: list[list[int]], label: str = ""):
        n = len(table)
        self.order = n
        self.table = table
        self.label = label or f"group{n}"
        inverse = [-1] * n
        for i in range(n):
            row = table[i]
            for j in range(n):
                if row[j] == 0:
                    inverse[i] = j
                    break
            if inverse[i] < 0:
                raise GroupBuildError(f"element {i} has no inverse")
        self.inverse = inverse
        orders = [0] * n
        for i in range(n):
            k, x = 1, i
            while x != 0:
                x = table[x][i]
                k += 1
            orders[i] = k
        self.element_order = orders
        self._np_table = None
        self._center = None
        self._commutator = None
        self._abelian = None
        self._centralizer_sizes = None

    def __repr__(self) -> str:
        return f"Group({self.label}, order={self.order})"

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inv(self, i: int) -> int:
        return self.inverse[i]

    def conj(self, x: int, g: int) -> int:
        """g^-1 * x * g."""
        t = self.table
        return t[t[self.inverse[g]][x]][g]

    @property
    def np_table(self) -> np.ndarray:
        if self._np_table is None:
            self._np_table = np.asarray(self.table, dtype=np.int32)
        return self._np_table

    def is_abelian(self) -> bool:
        if self._abelian is None:
            t = self.table
            self._abelian = all(
                t[i][j] == t[j][i] for i in range(self.order) for j in range(i)
            )
        return self._abelian

    def center(self) -> frozenset[int]:
        """Elements commuting with everything."""
        if self._center is None:
            t = self.table
            n = self.order
            self._center = frozenset(
                z for z in range(n) if all(t[z][g] == t[g][z] for g in range(n))
            )
        return self._center

    def commutator_subgroup(self) -> frozenset[int]:
        """Closure of all g^-1 h^-1 g h."""
        if self._commutator is None:
            t, inv, n = self.table, self.inverse, self.order
            comms = {t[t[t[inv[g]][inv[h]]][g]][h] for g in range(n) for h in range(n)}
            self._commutator = frozenset(closure(self, comms))
        return self._commutator

    def centralizer_sizes(self) -> list[int]:
        if self._centralizer_sizes is None:
            t, n = self.table, self.order
            self._centralizer_sizes = [
                sum(1 for g in range(n) if t[x][g] == t[g][x]) for x in range(n)
            ]
        return self._centralizer_sizes


def multiply(G: Group, i: int, j: int) -> int:
    if not (0 <= i < G.order and 0 <= j < G.order):
        raise IndexError(f"element index out of range for group of order {G.order}")
    return G.table[i][j]


def closure(G: Group, gens, cap: int | None = None) -> list[int]:
    """Sorted element list of the subgroup generated by ``gens``.

    If ``cap`` is given and the closure grows beyond it, returns the partial
    (oversized) list; callers use ``len(result) > cap`` as the overflow signal.
    """
    table = G.table
    mask = 1
    count = 1
    frontier = [0]
    gen_list = sorted(set(gens))
    out = [0]
    while frontier:
        x = frontier.pop()
        row = table[x]
        for g in gen_list:
            y = row[g]
            b = 1 << y
            if not mask & b:
                mask |= b
                count += 1
                out.append(y)
                frontier.append(y)
                if cap is not None and count > cap:
                    return out
    out.sort()
    return out


def closure_mask(G: Group, gens, cap: int | None = None) -> int:
    """Bitmask variant of :func:`closure`; may exceed ``cap`` by the overflow bit."""
    table = G.table
    mask = 1
    count = 1
    frontier = [0]
    for x in frontier:
        row = table[x]
        for g in gens:
            y = row[g]
            b = 1 << y
            if not mask & b:
                mask |= b
                count += 1
                frontier.append(y)
                if cap is not None and count > cap:
                    return mask
    return mask


def validate_group(G: Group, rng: random.Random | None = None, assoc_limit: int = 200) -> None:
    """Check the Group invariants, raising GroupBuildError on violation.

    Associativity is checked over all triples for n <= assoc_limit and over
    randomized triples above that.
    """
    n, t = G.order, G.table
    if n < 1:
        raise GroupBuildError("empty table")
    for i in range(n):
        if len(t[i]) != n:
            raise GroupBuildError("table is not square")
        if t[0][i] != i or t[i][0] != i:
            raise GroupBuildError("index 0 is not a two-sided identity")
    full = set(range(n))
    for i in range(n):
        if set(t[i]) != full:
            raise GroupBuildError(f"row {i} is not a permutation")
        if {t[j][i] for j in range(n)} != full:
            raise GroupBuildError(f"column {i} is not a permutation")
    if n <= assoc_limit:
        triples = product(range(n), repeat=3)
    else:
        rng = rng or random.Random(0)
        triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(20000))
    for i, j, k in triples:
        if t[t[i][j]][k] != t[i][t[j][k]]:
            raise GroupBuildError(f"associativity fails at ({i},{j},{k})")
    for i in range(n):
        if t[i][G.inverse[i]] != 0:
            raise GroupBuildError(f"bad inverse for element {i}")


# ---------------------------------------------------------------------------
# constructors


def cyclic(n: int) -> Group:
    if n < 1:
        raise GroupBuildError("cyclic group order must be >= 1")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return Group(table, label=f"C{n}")


def dihedral(n: int) -> Group:
    """Dihedral group of order 2n: rotations a^i at 0..n-1, reflections b*a^i at n..2n-1."""
    if n < 1:
        raise GroupBuildError("dihedral parameter must be >= 1")
    m = 2 * n
    table = [[0] * m for _ in range(m)]
    for i in range(n):
        for j in range(n):
            table[i][j] = (i + j) % n                # a^i a^j
            table[i][n + j] = n + (j - i) % n        # a^i (b a^j) = b a^(j-i)
            table[n + i][j] = n + (i + j) % n        # (b a^i) a^j
            table[n + i][n + j] = (j - i) % n        # (b a^i)(b a^j) = a^(j-i)
    return Group(table, label=f"D{m}")


def _perm_mul(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    # apply p first, then q
    return tuple(q[p[t]] for t in range(len(p)))


def from_permutations(generators, label: str = "", max_order: int | None = None) -> Group:
    """Group generated by permutations (images of 0..deg-1), indexed in BFS order."""
    if not generators:
        raise GroupBuildError("perm kind requires at least one generator")
    deg = len(generators[0])
    gens = []
    for g in generators:
        tg = tuple(int(x) for x in g)
        if len(tg) != deg:
            raise GroupBuildError("perm generators must have equal degree")
        if sorted(tg) != list(range(deg)):
            raise GroupBuildError(f"not a permutation of 0..{deg - 1}: {g}")
        gens.append(tg)
    limit = max_order if max_order is not None else max_group_order()
    ident = tuple(range(deg))
    elems = [ident]
    index = {ident: 0}
    for x in elems:
        for g in gens:
            y = _perm_mul(x, g)
            if y not in index:
                index[y] = len(elems)
                elems.append(y)
                if len(elems) > limit:
                    raise GroupBuildError(
                        f"permutation closure exceeds maximum order {limit}"
                    )
    n = len(elems)
    if deg <= 64:
        table = [[index[_perm_mul(a, b)] for b in elems] for a in elems]
    else:
        # batch with numpy: row i holds the images of element i composed with all others
        pm = np.array(elems, dtype=np.int32)
        table = []
        for i in range(n):
            prods = pm[:, pm[i]]  # prods[j] = elems[i] then elems[j]
            table.append([index[tuple(row)] for row in prods.tolist()])
    return Group(table, label=label or f"perm{n}")


def symmetric(n: int) -> Group:
    if n < 0:
        raise GroupBuildError("symmetric degree must be >= 0")
    if n <= 1:
        return Group([[0]], label=f"S{n}")
    gens = [[1, 0] + list(range(2, n)), list(range(1, n)) + [0]]
    if n == 2:
        gens = gens[:1]
    return from_permutations(gens, label=f"S{n}")


def alternating(n: int) -> Group:
    if n < 0:
        raise GroupBuildError("alternating degree must be >= 0")
    if n <= 2:
        return Group([[0]], label=f"A{n}")
    three = [1, 2, 0] + list(range(3, n))
    if n == 3:
        gens = [three]
    elif n % 2 == 1:
        gens = [three, list(range(1, n)) + [0]]
    else:
        gens = [three, [0] + list(range(2, n)) + [1]]
    return from_permutations(gens, label=f"A{n}")


def quaternion8() -> Group:
    """Q8 with elements 1,-1,i,-i,j,-j,k,-k at indices 0..7."""
    # (sign, axis), axis 0=e 1=i 2=j 3=k
    def decode(x):
        return x & 1, x >> 1

    def encode(s, a):
        return (a << 1) | s

    axis_mul = {  # (a,b) -> (sign, axis) for a*b with a,b in {i,j,k}
        (1, 1): (1, 0), (2, 2): (1, 0), (3, 3): (1, 0),
        (1, 2): (0, 3), (2, 1): (1, 3),
        (2, 3): (0, 1), (3, 2): (1, 1),
        (3, 1): (0, 2), (1, 3): (1, 2),
    }
    table = [[0] * 8 for _ in range(8)]
    for x in range(8):
        sx, ax = decode(x)
        for y in range(8):
            sy, ay = decode(y)
            if ax == 0:
                s, a = 0, ay
            elif ay == 0:
                s, a = 0, ax
            else:
                s, a = axis_mul[(ax, ay)]
            table[x][y] = encode((s + sx + sy) % 2, a)
    return Group(table, label="Q8")


def extraspecial_exp_p(p: int) -> Group:
    """Heisenberg group of order p^3: unitriangular 3x3 matrices over F_p."""
    if not _is_prime(p) or p == 2:
        raise GroupBuildError("extraspecial_exp_p requires an odd prime p")
    n = p ** 3

    def idx(a, b, c):
        return (a * p + b) * p + c

    table = [[0] * n for _ in range(n)]
    for a1 in range(p):
        for b1 in range(p):
            for c1 in range(p):
                i = idx(a1, b1, c1)
                row = table[i]
                for a2 in range(p):
                    for b2 in range(p):
                        for c2 in range(p):
                            row[idx(a2, b2, c2)] = idx(
                                (a1 + a2) % p, (b1 + b2) % p, (c1 + c2 + a1 * b2) % p
                            )
                table[i] = row
    return Group(table, label=f"Heis{p}")


def elementary_abelian(p: int, rank: int) -> Group:
    if not _is_prime(p):
        raise GroupBuildError("elementary_abelian requires a prime p")
    if rank < 0:
        raise GroupBuildError("rank must be >= 0")
    n = p ** rank
    if rank == 0:
        return Group([[0]], label=f"E{p}^0")
    digits = [tuple((x // p ** k) % p for k in range(rank)) for x in range(n)]
    table = [
        [sum(((a[k] + b[k]) % p) * p ** k for k in range(rank)) for b in digits]
        for a in digits
    ]
    return Group(table, label=f"E{n}")


def direct_product(A: Group, B: Group) -> Group:
    """Componentwise product; pair (i, j) gets index i*|B| + j, identity (0,0) -> 0."""
    n = A.order * B.order
    if n > max_group_order():
        raise GroupBuildError(f"direct product order {n} exceeds maximum {max_group_order()}")
    ta, tb, nb = A.table, B.table, B.order
    table = [[0] * n for _ in range(n)]
    for i1 in range(A.order):
        for j1 in range(nb):
            x = i1 * nb + j1
            rowa, rowb = ta[i1], tb[j1]
            row = table[x]
            for i2 in range(A.order):
                ra = rowa[i2] * nb
                base = i2 * nb
                for j2 in range(nb):
                    row[base + j2] = ra + rowb[j2]
    return Group(table, label=f"{A.label}x{B.label}")


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def build(spec: dict, max_order: int | None = None) -> Group:
    """Build a Group from a specification dict (see GROUP_KINDS)."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise GroupBuildError("group spec must be a dict with a 'kind' field")
    kind = spec["kind"]
    limit = max_order if max_order is not None else max_group_order()

    def check_size(n):
        if n > limit:
            raise GroupBuildError(f"group order {n} exceeds maximum {limit}")

    if kind == "cyclic":
        n = _int_param(spec, "n", 1)
        check_size(n)
        G = cyclic(n)
    elif kind == "dihedral":
        n = _int_param(spec, "n", 1)
        check_size(2 * n)
        G = dihedral(n)
    elif kind == "symmetric":
        n = _int_param(spec, "n", 0)
        order = 1
        for k in range(2, n + 1):
            order *= k
        check_size(order)
        G = symmetric(n)
    elif kind == "alternating":
        n = _int_param(spec, "n", 0)
        order = 1
        for k in range(2, n + 1):
            order *= k
        check_size(max(order // 2, 1))
        G = alternating(n)
    elif kind == "quaternion8":
        G = quaternion8()
    elif kind == "extraspecial_exp_p":
        p = _int_param(spec, "p", 3)
        check_size(p ** 3)
        G = extraspecial_exp_p(p)
    elif kind == "elementary_abelian":
        p = _int_param(spec, "p", 2)
        rank = _int_param(spec, "rank", 0)
        check_size(p ** rank)
        G = elementary_abelian(p, rank)
    elif kind == "direct_product":
        factors = spec.get("factors")
        if not isinstance(factors, list) or not factors:
            raise GroupBuildError("direct_product requires a non-empty 'factors' list")
        parts = [build(f, max_order=limit) for f in factors]
        G = parts[0]
        for part in parts[1:]:
            G = direct_product(G, part)
    elif kind == "cayley":
        table = spec.get("table")
        if not isinstance(table, list) or not table:
            raise GroupBuildError("cayley requires a 'table' field")
        check_size(len(table))
        G = Group([[int(x) for x in row] for row in table], label=spec.get("label", ""))
        validate_group(G)
    elif kind == "perm":
        gens = spec.get("generators")
        if not isinstance(gens, list) or not gens:
            raise GroupBuildError("perm requires a 'generators' list")
        degree = spec.get("degree")
        if degree is not None and any(len(g) != degree for g in gens):
            raise GroupBuildError("generator degree does not match 'degree' field")
        G = from_permutations(gens, label=spec.get("label", ""), max_order=limit)
    else:
        raise GroupBuildError(f"unknown group kind {kind!r}")
    if "label" in spec and spec["label"]:
        G.label = str(spec["label"])
    return G


def _int_param(spec: dict, name: str, minimum: int) -> int:
    if name not in spec:
        raise GroupBuildError(f"{spec.get('kind')} spec requires parameter {name!r}")
    value = spec[name]
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise GroupBuildError(f"parameter {name!r} must be an integer >= {minimum}")
    return value


# ---------------------------------------------------------------------------
# isomorphism


def _element_invariants(G: Group) -> list[tuple[int, int]]:
    cz = G.centralizer_sizes()
    return [(G.element_order[x], cz[x]) for x in range(G.order)]


def _generating_sequence(G: Group, seed: list[int] | None = None) -> list[int]:
    """Small generating sequence, optionally starting with the given elements."""
    gens = list(seed or [])
    present = set(closure(G, gens)) if gens else {0}
    while len(present) < G.order:
        # prefer high-order elements: fewer are needed
        best = max(
            (x for x in range(G.order) if x not in present),
            key=lambda x: (G.element_order[x], -x),
        )
        gens.append(best)
        present = set(closure(G, gens))
    return gens


class TableIsoSearch:
    """Backtracking search for a table-preserving bijection between two magmas.

    Generator images are chosen from invariant-compatible candidates; each
    assignment propagates all forced images f(x*y) = f(x)*f(y) over already
    mapped pairs, which simultaneously verifies the homomorphism property on
    every pair it covers. Sound for groups and for loop tables alike (forced
    propagation never assumes associativity).
    """

    def __init__(self, table_a, table_b, n: int):
        self.ta, self.tb, self.n = table_a, table_b, n
        self.phi = [-1] * n
        self.used = [False] * n
        self.elems: list[int] = []
        self._assign(0, 0)

    def _assign(self, g: int, h: int) -> list[int] | None:
        """Extend the map with g -> h and propagate; returns an undo list or None."""
        phi, used = self.phi, self.used
        ta, tb = self.ta, self.tb
        if phi[g] != -1:
            return [] if phi[g] == h else None
        if used[h]:
            return None
        phi[g] = h
        used[h] = True
        self.elems.append(g)
        added = [g]
        queue = [g]
        qi = 0
        while qi < len(queue):
            x = queue[qi]
            qi += 1
            fx = phi[x]
            for y in self.elems:
                for p, q in ((ta[x][y], tb[fx][phi[y]]), (ta[y][x], tb[phi[y]][fx])):
                    fp = phi[p]
                    if fp == -1:
                        if self.used[q]:
                            self._undo(added)
                            return None
                        phi[p] = q
                        self.used[q] = True
                        self.elems.append(p)
                        added.append(p)
                        queue.append(p)
                    elif fp != q:
                        self._undo(added)
                        return None
        return added

    def _undo(self, added: list[int]) -> None:
        for g in reversed(added):
            self.used[self.phi[g]] = False
            self.phi[g] = -1
            self.elems.pop()

    def search(self, gens: list[int], cand_lists: list[list[int]], depth: int = 0):
        if depth == len(gens):
            if len(self.elems) == self.n:
                return list(self.phi)
            return None
        g = gens[depth]
        for h in cand_lists[depth]:
            added = self._assign(g, h)
            if added is None:
                continue
            result = self.search(gens, cand_lists, depth + 1)
            if result is not None:
                return result
            self._undo(added)
        return None


def find_isomorphism(
    A: Group,
    B: Group,
    gens: list[int] | None = None,
    image_pool: list[list[int]] | None = None,
) -> list[int] | None:
    """Explicit isomorphism A -> B as an image list, or None.

    ``gens`` fixes the generating sequence of A; ``image_pool`` optionally
    restricts the candidate images of each generator (both used by the
    subgroup-constrained automorphism search).
    """
    if A.order != B.order:
        return None
    inv_a, inv_b = _element_invariants(A), _element_invariants(B)
    if sorted(inv_a) != sorted(inv_b):
        return None
    if gens is None:
        gens = _generating_sequence(A)
    by_inv: dict[tuple[int, int], list[int]] = {}
    for x in range(B.order):
        by_inv.setdefault(inv_b[x], []).append(x)
    cand_lists = []
    for k, g in enumerate(gens):
        cands = by_inv.get(inv_a[g], [])
        if image_pool is not None and k < len(image_pool):
            allowed = set(image_pool[k])
            cands = [c for c in cands if c in allowed]
        if not cands:
            return None
        cand_lists.append(cands)
    return TableIsoSearch(A.table, B.table, A.order).search(gens, cand_lists)


def isomorphic(A: Group, B: Group) -> bool:
    """True iff a multiplication-preserving bijection exists."""
    if A.order != B.order:
        return False
    if sorted(A.element_order) != sorted(B.element_order):
        return False
    if A.is_abelian() != B.is_abelian():
        return False
    if A.is_abelian():
        # the element-order multiset classifies finite abelian groups
        return True
    if len(A.center()) != len(B.center()):
        return False
    if len(A.commutator_subgroup()) != len(B.commutator_subgroup()):
        return False
    return find_isomorphism(A, B) is not None


def is_isomorphism(A: Group, B: Group, phi: list[int]) -> bool:
    """Full post-check: phi is a bijection preserving every product."""
    n = A.order
    if B.order != n or len(phi) != n or sorted(phi) != list(range(n)):
        return False
    ta, tb = A.table, B.table
    return all(phi[ta[i][j]] == tb[phi[i]][phi[j]] for i in range(n) for j in range(n))
