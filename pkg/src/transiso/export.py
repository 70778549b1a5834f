"""DOT and JSON emission for transiso graphs, with witness re-verification."""

from __future__ import annotations

import json

from .graph import ADJACENT, NON_ADJACENT, UNKNOWN, GraphContext, TransisoGraph
from .groups import Group, build, is_isomorphism, isomorphic
from .loops import NRT, coset_decomposition, induced_loop, loops_isomorphic, nrt_count
from .subgroups import (
    is_corefree,
    is_normal,
    mask_of,
    quotient,
    subgroup_from_elements,
    subgroup_group,
)


def graph_to_doc(graph: TransisoGraph, group_spec: dict | None = None) -> dict:
    doc = {
        "group_label": graph.group.label,
        "group_order": graph.group.order,
        "d": graph.d,
        "strategy": graph.strategy,
        "budget": graph.budget,
        "vertices": [
            {"elements": list(H.elements), "normal": is_normal(H)}
            for H in graph.vertices
        ],
        "edges": [
            {
                "i": i,
                "j": j,
                "status": graph.decisions[(i, j)].status,
                "rule": graph.decisions[(i, j)].rule,
                "witness": graph.decisions[(i, j)].witness,
            }
            for i, j in graph.pairs()
        ],
    }
    if group_spec is not None:
        doc["group_spec"] = group_spec
    return doc


def graph_to_json(graph: TransisoGraph, group_spec: dict | None = None) -> str:
    return json.dumps(graph_to_doc(graph, group_spec), sort_keys=True, indent=2) + "\n"


def _vertex_label(H) -> str:
    return "<" + ",".join(str(g) for g in H.generators()) + ">"


def graph_to_dot(graph: TransisoGraph) -> str:
    lines = [f'graph "Gamma_{graph.d}({graph.group.label})" {{']
    lines.append("  node [shape=circle];")
    for i, H in enumerate(graph.vertices):
        lines.append(f'  v{i} [label="{_vertex_label(H)}"];')
    for i, j in graph.pairs():
        dec = graph.decisions[(i, j)]
        if dec.status == ADJACENT:
            lines.append(f"  v{i} -- v{j};")
        elif dec.status == UNKNOWN:
            lines.append(f'  v{i} -- v{j} [style=dashed, label="unknown"];')
        # non-adjacent pairs are omitted
    lines.append("}")
    return "\n".join(lines) + "\n"


def export(graph: TransisoGraph, format: str, group_spec: dict | None = None) -> str:
    fmt = format.upper()
    if fmt == "DOT":
        return graph_to_dot(graph)
    if fmt == "JSON":
        return graph_to_json(graph, group_spec)
    raise ValueError(f"unknown export format {format!r} (expected DOT or JSON)")


class WitnessError(AssertionError):
    """A stored witness failed re-verification."""


def _nrt_from_reps(G: Group, H, reps) -> NRT:
    cos = coset_decomposition(G, H)
    if len(reps) != len(cos.members):
        raise WitnessError("witness NRT has wrong length")
    for c, r in enumerate(reps):
        if cos.coset_of[r] != c:
            raise WitnessError("witness NRT representative in wrong coset")
    if reps[0] != 0:
        raise WitnessError("witness NRT not normalized")
    return NRT(cos, tuple(reps))


def verify_graph_doc(doc: dict, G: Group | None = None) -> int:
    """Re-verify every edge of an exported graph; returns the edge count checked.

    ADJACENT edges must re-verify from their stored witness (loop pair or
    automorphism); NON_ADJACENT edges are re-derived from their structural rule.
    """
    if G is None:
        if "group_spec" not in doc:
            raise WitnessError("no group available for verification")
        G = build(doc["group_spec"])
    vertices = [subgroup_from_elements(G, v["elements"]) for v in doc["vertices"]]
    for v, H in zip(doc["vertices"], vertices):
        if bool(v["normal"]) != is_normal(H):
            raise WitnessError("stored normality flag is wrong")
    checked = 0
    ctx = GraphContext(G)
    for edge in doc["edges"]:
        H1, H2 = vertices[edge["i"]], vertices[edge["j"]]
        status, witness, rule = edge["status"], edge["witness"], edge["rule"]
        if status == ADJACENT:
            _verify_adjacent(G, H1, H2, witness)
        elif status == NON_ADJACENT:
            _verify_non_adjacent(ctx, G, H1, H2, rule)
        checked += 1
    return checked


def _verify_adjacent(G: Group, H1, H2, witness: dict) -> None:
    kind = witness.get("kind")
    if kind == "automorphism":
        phi = witness["map"]
        if not is_isomorphism(G, G, phi):
            raise WitnessError("automorphism witness does not preserve products")
        if mask_of(phi[x] for x in H1.elements) != H2.mask:
            raise WitnessError("automorphism witness does not map H1 onto H2")
    elif kind == "loop_pair":
        S1 = _nrt_from_reps(G, H1, witness["nrt1"])
        S2 = _nrt_from_reps(G, H2, witness["nrt2"])
        L1 = induced_loop(G, H1, S1)
        L2 = induced_loop(G, H2, S2)
        if not loops_isomorphic(L1, L2):
            raise WitnessError("witness loops are not isomorphic")
    else:
        raise WitnessError(f"unknown adjacency witness kind {kind!r}")


def _verify_non_adjacent(ctx: GraphContext, G: Group, H1, H2, rule: str) -> None:
    if rule == "normal-quotient":
        if not (is_normal(H1) and is_normal(H2)):
            raise WitnessError("normal-quotient rule on a non-normal pair")
        if isomorphic(quotient(G, H1), quotient(G, H2)):
            raise WitnessError("quotients are isomorphic after all")
    elif rule == "normal-vs-corefree":
        N, M = (H1, H2) if is_normal(H1) else (H2, H1)
        if not is_normal(N) or is_normal(M) or not is_corefree(M):
            raise WitnessError("normal-vs-corefree rule hypotheses fail")
        qn = quotient(G, N)
        for K in ctx.complements(M):
            if isomorphic(subgroup_group(K), qn):
                raise WitnessError("a complement matching the quotient exists")
    elif rule in ("corefree-generate", "corefree-complement"):
        from .subgroups import find_automorphism_mapping

        if not (is_corefree(H1) and is_corefree(H2)):
            raise WitnessError("corefree rule on non-corefree pair")
        if not (ctx.proper_cover_clean(H1) and ctx.proper_cover_clean(H2)):
            raise WitnessError("corefree rule hypotheses fail")
        if find_automorphism_mapping(G, H1, H2) is not None:
            raise WitnessError("an automorphism exists after all")
        for K1 in ctx.complements(H1):
            for K2 in ctx.complements(H2):
                if isomorphic(subgroup_group(K1), subgroup_group(K2)):
                    raise WitnessError("isomorphic complements exist after all")
    elif rule == "class-intersection":
        from .graph import _shared_class

        budget = max(nrt_count(G, H1), nrt_count(G, H2))
        cs1 = ctx.class_set(H1, budget)
        cs2 = ctx.class_set(H2, budget)
        if not (cs1.exhaustive and cs2.exhaustive):
            raise WitnessError("class-intersection non-adjacency without exhaustion")
        if _shared_class(cs1, cs2) is not None:
            raise WitnessError("a shared loop class exists after all")
    else:
        raise WitnessError(f"unknown non-adjacency rule {rule!r}")
