"""Transversal-isomorphism graphs and completeness criteria.

Vertices of the graph at divisor d are the order-d subgroups; two are adjacent
when they admit transversals with isomorphic induced right loops. Adjacency is
decided by a cascade of sound structural rules falling back to exhaustive NRT
enumeration within budget, with a tri-state answer: exhaustive enumeration is
infeasible at large index, and only structural arguments may assert
non-adjacency there, so honesty requires an UNKNOWN state.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor

from .groups import Group, isomorphic
from .loops import (
    NRT,
    coset_decomposition,
    loop_class_set,
    loops_isomorphic,
    nrt_count,
)
from .subgroups import (
    LATTICE_MAX_DEFAULT,
    LatticeUnavailableError,
    Subgroup,
    all_subgroups,
    central_order_p_subgroups,
    find_automorphism_mapping,
    is_corefree,
    is_normal,
    mask_of,
    maximal_subgroups_pgroup,
    product_is_whole,
    quotient,
    subgroup_group,
    subgroups_of_order,
    _prime_power,
)

ADJACENT = "adjacent"
NON_ADJACENT = "non_adjacent"
UNKNOWN = "unknown"

COMPLETE = "COMPLETE"
NOT_COMPLETE = "NOT_COMPLETE"
VERDICT_UNKNOWN = "UNKNOWN"
NOT_APPLICABLE = "NOT_APPLICABLE"

DEFAULT_BUDGET = 2_000_000

STRATEGIES = ("auto", "exhaustive", "structural")


class EdgeDecision:
    __slots__ = ("status", "rule", "witness")

    def __init__(self, status: str, rule: str, witness: dict | None = None):
        self.status = status
        self.rule = rule
        self.witness = witness or {}

    def to_dict(self) -> dict:
        return {"status": self.status, "rule": self.rule, "witness": self.witness}


class GraphContext:
    """Shared caches for one group: lattice, quotients, complements, class sets."""

    def __init__(self, G: Group, lattice_max: int = LATTICE_MAX_DEFAULT):
        self.G = G
        self.lattice_max = lattice_max
        self._lattice = None
        self._lattice_tried = False
        self._quotients: dict[int, Group] = {}
        self._sub_groups: dict[int, Group] = {}
        self._complements: dict[int, list[Subgroup]] = {}
        self._pk_clean: dict[int, bool] = {}
        self._class_sets: dict[tuple[int, int], object] = {}
        self._lock = threading.Lock()

    def lattice(self):
        if not self._lattice_tried:
            self._lattice_tried = True
            if self.G.order <= self.lattice_max:
                self._lattice = all_subgroups(self.G, self.lattice_max)
        return self._lattice

    def quotient_of(self, H: Subgroup) -> Group:
        if H.mask not in self._quotients:
            self._quotients[H.mask] = quotient(self.G, H)
        return self._quotients[H.mask]

    def group_of(self, K: Subgroup) -> Group:
        if K.mask not in self._sub_groups:
            self._sub_groups[K.mask] = subgroup_group(K)
        return self._sub_groups[K.mask]

    def complements(self, H: Subgroup) -> list[Subgroup]:
        """Subgroup transversals of H: |K| = [G:H], K meet H trivial."""
        if H.mask not in self._complements:
            m = self.G.order // H.order
            lat = self.lattice()
            if lat is not None:
                pool = lat.of_order(m)
            else:
                pool = subgroups_of_order(self.G, m)
            self._complements[H.mask] = [K for K in pool if (K.mask & H.mask) == 1]
        return self._complements[H.mask]

    def proper_cover_clean(self, H: Subgroup) -> bool | None:
        """True iff every proper K with HK = G meets H trivially; None without lattice.

        Under this condition every non-generating NRT of H is itself a subgroup
        (a complement), so the loop classes of H split into generating classes
        and complement group classes.
        """
        lat = self.lattice()
        if lat is None:
            return None
        if H.mask not in self._pk_clean:
            clean = True
            for K in lat.all:
                if K.order == self.G.order:
                    continue
                if product_is_whole(H, K) and (K.mask & H.mask) != 1:
                    clean = False
                    break
            self._pk_clean[H.mask] = clean
        return self._pk_clean[H.mask]

    def class_set(self, H: Subgroup, budget: int):
        key = (H.mask, budget)
        with self._lock:
            cached = self._class_sets.get(key)
        if cached is not None:
            return cached
        comps = None
        if nrt_count(self.G, H) > budget:
            comps = self.complements(H)  # sampled path reuses the cached lattice
        cs = loop_class_set(self.G, H, budget, complements=comps)
        with self._lock:
            return self._class_sets.setdefault(key, cs)

    def min_nrt(self, H: Subgroup) -> NRT:
        cos = coset_decomposition(self.G, H)
        return NRT(cos, tuple(mem[0] for mem in cos.members))


def all_nrts_generate(G: Group, H: Subgroup, context: GraphContext | None = None) -> bool:
    """True iff no proper subgroup K satisfies HK = G.

    An NRT inside K exists iff K meets every right coset iff HK = G, so this is
    exactly "every NRT of H generates G". Checking maximal subgroups suffices.
    """
    ctx = context or GraphContext(G)
    lat = ctx.lattice()
    if lat is None:
        raise LatticeUnavailableError(
            f"all_nrts_generate needs the subgroup lattice (order {G.order} > cap)"
        )
    return not any(product_is_whole(H, M) for M in lat.maximal())


def _complement_nrt_reps(ctx: GraphContext, H: Subgroup, K: Subgroup) -> tuple[int, ...]:
    cos = coset_decomposition(ctx.G, H)
    reps = [-1] * len(cos.members)
    for x in K.elements:
        reps[cos.coset_of[x]] = x
    return tuple(reps)


def _loop_pair_witness(reps1, reps2) -> dict:
    return {"kind": "loop_pair", "nrt1": list(reps1), "nrt2": list(reps2)}


def adjacency(
    G: Group,
    H1: Subgroup,
    H2: Subgroup,
    budget: int = DEFAULT_BUDGET,
    strategy: str = "auto",
    context: GraphContext | None = None,
) -> EdgeDecision:
    """Tri-state adjacency of two same-order subgroups in the transiso graph.

    Cascade: (a) normal pair via quotient isomorphism; (b) automorphism mapping
    one onto the other; pre-check for normal/corefree mixed pairs through
    subgroup transversals; (c) corefree structural rule; (d) loop-class-set
    intersection within budget; (e) UNKNOWN.
    """
    if H1.order != H2.order:
        raise ValueError("adjacency requires subgroups of equal order")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    ctx = context or GraphContext(G)
    structural = strategy in ("auto", "structural")
    exhaustive = strategy in ("auto", "exhaustive")

    if structural:
        decision = _structural_decision(ctx, H1, H2, strategy)
        if decision is not None:
            return decision
    if exhaustive:
        decision = _class_set_decision(ctx, H1, H2, budget)
        if decision is not None:
            return decision
    return EdgeDecision(UNKNOWN, "budget", {"nrt_counts": [
        str(nrt_count(G, H1)), str(nrt_count(G, H2))], "budget": budget})


def _structural_decision(ctx: GraphContext, H1, H2, strategy) -> EdgeDecision | None:
    G = ctx.G
    n1, n2 = is_normal(H1), is_normal(H2)

    # (a) both normal: every NRT induces the quotient group
    if n1 and n2:
        q1, q2 = ctx.quotient_of(H1), ctx.quotient_of(H2)
        if isomorphic(q1, q2):
            w = _loop_pair_witness(ctx.min_nrt(H1).reps, ctx.min_nrt(H2).reps)
            return EdgeDecision(ADJACENT, "normal-quotient", w)
        return EdgeDecision(NON_ADJACENT, "normal-quotient",
                            {"reason": "quotients-non-isomorphic"})

    # (b) automorphic images are always adjacent
    phi = find_automorphism_mapping(G, H1, H2)
    if phi is not None:
        return EdgeDecision(ADJACENT, "automorphism", {"kind": "automorphism", "map": phi})

    # mixed normal / non-normal
    if n1 != n2:
        N, M = (H1, H2) if n1 else (H2, H1)
        lat = ctx.lattice()
        if lat is not None:
            qn = ctx.quotient_of(N)
            for K in ctx.complements(M):
                if isomorphic(ctx.group_of(K), qn):
                    reps_n = ctx.min_nrt(N).reps
                    reps_m = _complement_nrt_reps(ctx, M, K)
                    if N is H1:
                        w = _loop_pair_witness(reps_n, reps_m)
                    else:
                        w = _loop_pair_witness(reps_m, reps_n)
                    return EdgeDecision(ADJACENT, "normal-complement", w)
            if is_corefree(M):
                # the normal side only induces the group G/N; a group loop of a
                # corefree subgroup forces a subgroup transversal, and none matches
                return EdgeDecision(NON_ADJACENT, "normal-vs-corefree", {
                    "reason": "no-complement-isomorphic-to-quotient",
                    "complement_orders": sorted(K.order for K in ctx.complements(M)),
                })
        return None

    # both non-normal: corefree structural rules
    if is_corefree(H1) and is_corefree(H2):
        lat = ctx.lattice()
        if lat is not None:
            clean1, clean2 = ctx.proper_cover_clean(H1), ctx.proper_cover_clean(H2)
            if clean1 and clean2:
                comps1, comps2 = ctx.complements(H1), ctx.complements(H2)
                for K1 in comps1:
                    for K2 in comps2:
                        if isomorphic(ctx.group_of(K1), ctx.group_of(K2)):
                            w = _loop_pair_witness(
                                _complement_nrt_reps(ctx, H1, K1),
                                _complement_nrt_reps(ctx, H2, K2),
                            )
                            return EdgeDecision(ADJACENT, "corefree-complement", w)
                # a shared generating class would extend to an automorphism of G
                # mapping H1 onto H2; group classes are exactly the complements
                rule = "corefree-generate" if not comps1 and not comps2 else "corefree-complement"
                return EdgeDecision(NON_ADJACENT, rule, {
                    "reason": "no-automorphism-and-no-matching-complements",
                    "all_nrts_generate": [not comps1, not comps2],
                })
    return None


def _class_set_decision(ctx: GraphContext, H1, H2, budget) -> EdgeDecision | None:
    cs1 = ctx.class_set(H1, budget)
    cs2 = ctx.class_set(H2, budget)
    hit = _shared_class(cs1, cs2)
    if hit is not None:
        c1, c2 = hit
        w = _loop_pair_witness(c1.witness_reps, c2.witness_reps)
        w["exhaustive"] = [cs1.exhaustive, cs2.exhaustive]
        return EdgeDecision(ADJACENT, "class-intersection", w)
    if cs1.exhaustive and cs2.exhaustive:
        return EdgeDecision(NON_ADJACENT, "class-intersection", {
            "reason": "exhaustive-class-sets-disjoint",
            "classes": [len(cs1), len(cs2)],
        })
    return None


def _shared_class(cs1, cs2):
    for c1 in cs1.classes:
        fp = c1.loop.fingerprint()
        for c2 in cs2.classes:
            if c2.loop.fingerprint() != fp:
                continue
            if loops_isomorphic(c1.loop, c2.loop):
                return c1, c2
    return None


class TransisoGraph:
    """Vertex list plus tri-state adjacency with per-edge provenance."""

    def __init__(self, group: Group, d: int, vertices: list[Subgroup],
                 decisions: dict[tuple[int, int], EdgeDecision], strategy: str,
                 budget: int):
        self.group = group
        self.d = d
        self.vertices = vertices
        self.decisions = decisions
        self.strategy = strategy
        self.budget = budget

    def status(self, i: int, j: int) -> str:
        if i == j:
            raise ValueError("the graph is simple; no diagonal entries")
        key = (min(i, j), max(i, j))
        return self.decisions[key].status

    def decision(self, i: int, j: int) -> EdgeDecision:
        key = (min(i, j), max(i, j))
        return self.decisions[key]

    def pairs(self):
        return sorted(self.decisions)

    def edge_count(self, status: str) -> int:
        return sum(1 for d in self.decisions.values() if d.status == status)

    def fully_decided(self) -> bool:
        return self.edge_count(UNKNOWN) == 0

    def rule_stats(self) -> dict[str, int]:
        stats: dict[str, int] = {}
        for d in self.decisions.values():
            key = f"{d.rule}:{d.status}"
            stats[key] = stats.get(key, 0) + 1
        return dict(sorted(stats.items()))


def build_graph(
    G: Group,
    d: int,
    budget: int = DEFAULT_BUDGET,
    strategy: str = "auto",
    context: GraphContext | None = None,
    workers: int = 1,
) -> TransisoGraph:
    if d < 1 or G.order % d != 0:
        raise ValueError(f"{d} does not divide the group order {G.order}")
    ctx = context or GraphContext(G)
    vertices = subgroups_of_order(G, d)
    pairs = [(i, j) for i in range(len(vertices)) for j in range(i + 1, len(vertices))]

    def decide(pair):
        i, j = pair
        return pair, adjacency(G, vertices[i], vertices[j], budget=budget,
                               strategy=strategy, context=ctx)

    decisions: dict[tuple[int, int], EdgeDecision] = {}
    if workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for pair, dec in pool.map(decide, pairs):
                decisions[pair] = dec
    else:
        for pair in pairs:
            decisions[pair] = decide(pair)[1]
    return TransisoGraph(G, d, vertices, decisions, strategy, budget)


class CompletenessReport:
    def __init__(self, group: Group, d: int, verdict: str, graph: TransisoGraph | None,
                 witness: dict | None = None):
        self.group = group
        self.d = d
        self.verdict = verdict
        self.graph = graph
        self.witness = witness or {}

    def to_dict(self) -> dict:
        out = {
            "group": self.group.label,
            "d": self.d,
            "verdict": self.verdict,
            "vertices": 0 if self.graph is None else len(self.graph.vertices),
            "witness": self.witness,
        }
        if self.graph is not None:
            out["rules"] = self.graph.rule_stats()
        return out


def is_complete(
    G: Group, d: int, budget: int = DEFAULT_BUDGET, strategy: str = "auto",
    context: GraphContext | None = None, workers: int = 1,
) -> CompletenessReport:
    graph = build_graph(G, d, budget=budget, strategy=strategy, context=context,
                        workers=workers)
    non_edges = [p for p in graph.pairs() if graph.decisions[p].status == NON_ADJACENT]
    unknowns = [p for p in graph.pairs() if graph.decisions[p].status == UNKNOWN]
    if non_edges:
        i, j = non_edges[0]
        witness = {
            "pair": [list(graph.vertices[i].elements), list(graph.vertices[j].elements)],
            "rule": graph.decisions[(i, j)].rule,
        }
        return CompletenessReport(G, d, NOT_COMPLETE, graph, witness)
    if unknowns:
        i, j = unknowns[0]
        witness = {"pair": [list(graph.vertices[i].elements), list(graph.vertices[j].elements)]}
        return CompletenessReport(G, d, VERDICT_UNKNOWN, graph, witness)
    return CompletenessReport(G, d, COMPLETE, graph)


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def complete_for_all_divisors(
    G: Group, budget: int = DEFAULT_BUDGET, strategy: str = "auto", workers: int = 1,
) -> dict[int, CompletenessReport]:
    ctx = GraphContext(G)
    return {
        d: is_complete(G, d, budget=budget, strategy=strategy, context=ctx, workers=workers)
        for d in divisors(G.order)
    }


# ---------------------------------------------------------------------------
# structural criteria


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def abelian_sylow_criterion(G: Group) -> bool:
    """For abelian G: every Sylow subgroup elementary abelian or cyclic.

    Equivalent to completeness of every divisor graph, read off element orders.
    """
    if not G.is_abelian():
        raise ValueError("abelian_sylow_criterion requires an abelian group")
    n = G.order
    for p in _prime_factors(n):
        pk = 1
        m = n
        while m % p == 0:
            m //= p
            pk *= p
        p_orders = [o for o in G.element_order if o > 1 and pk % o == 0]
        cyclic = any(o == pk for o in p_orders)
        elementary = all(o == p for o in p_orders)
        if not (cyclic or elementary):
            return False
    return True


class CriterionReport:
    def __init__(self, verdict: str, prime: int | None, witness: dict | None = None,
                 details: dict | None = None):
        self.verdict = verdict
        self.prime = prime
        self.witness = witness or {}
        self.details = details or {}

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "p": self.prime,
                "witness": self.witness, "details": self.details}


def order_p_subgroups(G: Group, p: int) -> list[Subgroup]:
    seen = set()
    out = []
    for g in range(1, G.order):
        if G.element_order[g] != p:
            continue
        mask = 1 | (1 << g)
        x = g
        for _ in range(p - 2):
            x = G.table[x][g]
            mask |= 1 << x
        if mask not in seen:
            seen.add(mask)
            out.append(Subgroup(G, mask, gens=[g]))
    out.sort(key=Subgroup.sort_key)
    return out


def pgroup_gamma_p_criterion(G: Group, p: int | None = None) -> CriterionReport:
    """Completeness of the order-p graph of a p-group via semidirect complements.

    COMPLETE iff for every non-normal order-p subgroup H there is a normal
    complement K (an index-p subgroup avoiding H) isomorphic to G/L for every
    normal order-p subgroup L. NOT_APPLICABLE for abelian or p-central groups.
    """
    pk = _prime_power(G.order)
    if pk is None:
        raise ValueError("pgroup_gamma_p_criterion requires a p-group")
    if p is None:
        p = pk[0]
    elif p != pk[0]:
        raise ValueError(f"group order {G.order} is not a power of {p}")
    subs = order_p_subgroups(G, p)
    central = {L.mask for L in central_order_p_subgroups(G, p)}
    non_normal = [H for H in subs if H.mask not in central]
    if G.is_abelian() or not non_normal:
        return CriterionReport(NOT_APPLICABLE, p,
                               {"reason": "abelian-or-p-central"},
                               {"order_p_subgroups": len(subs)})
    centrals = [H for H in subs if H.mask in central]
    quotients = [(L, quotient(G, L)) for L in centrals]
    q0 = quotients[0][1]
    for L, q in quotients[1:]:
        if not isomorphic(q0, q):
            return CriterionReport(NOT_COMPLETE, p, {
                "reason": "normal-quotients-differ",
                "L1": list(quotients[0][0].elements),
                "L2": list(L.elements),
            }, {"non_normal": len(non_normal), "normal": len(centrals)})
    maximals = maximal_subgroups_pgroup(G)
    valid = [K for K in maximals if isomorphic(subgroup_group(K), q0)]
    for H in non_normal:
        h = H.generators()[0]
        K = next((K for K in valid if h not in K), None)
        if K is None:
            return CriterionReport(NOT_COMPLETE, p, {
                "reason": "no-valid-complement",
                "H": list(H.elements),
            }, {"non_normal": len(non_normal), "normal": len(centrals),
                "valid_complements": len(valid)})
    return CriterionReport(COMPLETE, p, {}, {
        "non_normal": len(non_normal), "normal": len(centrals),
        "valid_complements": len(valid),
    })


def verify_complement_cyclic_property(G: Group, p: int | None = None) -> dict:
    """Check the complement-cyclicity statement on one instance.

    Hypotheses per non-normal order-p H: some normal complement K has all its
    order-p subgroups normal in G and K isomorphic to G/L for every normal
    order-p L. Where they hold, K must come out cyclic; failures are reported.
    """
    pk = _prime_power(G.order)
    if pk is None:
        raise ValueError("requires a p-group")
    if p is None:
        p = pk[0]
    subs = order_p_subgroups(G, p)
    central = {L.mask for L in central_order_p_subgroups(G, p)}
    non_normal = [H for H in subs if H.mask not in central]
    if not non_normal:
        return {"applicable": False, "reason": "no-non-normal-order-p-subgroup",
                "checked": 0, "cyclic_confirmed": True, "failures": []}
    centrals = [H for H in subs if H.mask in central]
    quotients = [quotient(G, L) for L in centrals]
    maximals = maximal_subgroups_pgroup(G)
    failures = []
    cyclic_ok = True
    checked = 0
    for H in non_normal:
        h = H.generators()[0]
        chosen = None
        reasons = []
        for K in maximals:
            if h in K:
                continue
            if not all(isomorphic(subgroup_group(K), q) for q in quotients):
                reasons.append("complement-not-isomorphic-to-all-quotients")
                continue
            kgrp = subgroup_group(K)
            sub_ps = order_p_subgroups(kgrp, p)
            elems = K.elements
            lifted = [
                Subgroup(G, mask_of(elems[i] for i in P.elements)) for P in sub_ps
            ]
            if not all(is_normal(L) for L in lifted):
                reasons.append("complement-has-non-normal-order-p-subgroup")
                continue
            chosen = K
            break
        if chosen is None:
            failures.append({
                "H": list(H.elements),
                "reasons": sorted(set(reasons)) or ["no-complement"],
            })
            continue
        checked += 1
        kgrp = subgroup_group(chosen)
        if not any(o == chosen.order for o in kgrp.element_order):
            cyclic_ok = False
    return {
        "applicable": not failures,
        "checked": checked,
        "cyclic_confirmed": cyclic_ok,
        "failures": failures,
    }
