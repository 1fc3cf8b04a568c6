"""Interpretation selection: one sense per (dependency, equivalence class).

Phase one ranks each class's consequent values by deviation from the
median frequency (outlier-robust), then walks prefix intersections of the
per-value sense index to find the largest value group a single sense can
cover; the covering sense with the best tuple coverage becomes the
initial assignment.

Phase two models interactions between dependencies that share a
consequent attribute: overlapping classes become edges of a dependency
graph weighted by the earth mover's distance between the overlap's value
distributions as seen under the two assigned senses.  A breadth-first
sweep from the heaviest vertex re-assigns a neighbour's sense when that
is the locally cheapest way to align the distributions and strictly
shrinks the edge weight.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from statistics import median

from .inference import OfdSet
from .ontology import Ontology
from .relation import RelationInstance, partition_of

ClassKey = tuple[int, int]  # (dependency index, class representative)


@dataclass
class ClassInfo:
    ofd_index: int
    representative: int
    consequent: str
    tuple_ids: frozenset[int]
    value_counts: dict[str, int]


@dataclass
class SenseAssignment:
    assignments: dict[ClassKey, str | None]
    potential: dict[ClassKey, tuple[str, ...]]
    classes: dict[ClassKey, ClassInfo]
    literal_classes: list[ClassKey] = field(default_factory=list)
    sset_intersections: int = 0

    def sense_of(self, key: ClassKey) -> str | None:
        return self.assignments[key]

    def to_doc(self) -> list[dict]:
        return [
            {"ofd": ofd_i, "class_rep": rep, "sense": sense}
            for (ofd_i, rep), sense in sorted(self.assignments.items())
        ]


def assignment_from_doc(
    doc: list[dict], inst: RelationInstance, sigma: OfdSet
) -> SenseAssignment:
    """Rebuild an assignment over the instance from serialized triples."""
    base = _collect_classes(inst, sigma)
    assignments: dict[ClassKey, str | None] = {key: None for key in base}
    for entry in doc:
        key = (int(entry["ofd"]), int(entry["class_rep"]))
        if key in assignments:
            assignments[key] = entry["sense"]
    return SenseAssignment(assignments, {k: () for k in base}, base)


def build_sset(onto: Ontology) -> dict[str, frozenset[str]]:
    """Index of senses containing each value known to the ontology."""
    out: dict[str, set[str]] = {}
    for value, pairs in onto.value_index.items():
        out.setdefault(value, set()).update(sid for _, sid in pairs)
    return {v: frozenset(s) for v, s in out.items()}


def mad_rank(value_counts: dict[str, int]) -> list[str]:
    """Distinct values by decreasing |freq - median freq|.

    Ties break by descending frequency, then by value, which keeps the
    ordering deterministic when many values share a frequency.
    """
    if not value_counts:
        return []
    med = median(value_counts.values())
    return sorted(
        value_counts,
        key=lambda v: (-abs(value_counts[v] - med), -value_counts[v], v),
    )


def initial_assignment(
    value_counts: dict[str, int],
    sset: dict[str, frozenset[str]],
    counter: list[int] | None = None,
) -> tuple[str | None, tuple[str, ...]]:
    """Pick the initial sense for one equivalence class.

    Keeps the longest non-empty prefix intersection of the ranked values'
    sense sets; among those senses the one covering the most tuples wins
    (ties by sense id).  Values the ontology does not know cannot appear
    in any intersection, so they are skipped up front; if no value is
    known at all, the class is flagged for literal handling (None).
    """
    ranked = [v for v in mad_rank(value_counts) if sset.get(v)]
    if not ranked:
        return None, ()
    prefix = sset[ranked[0]]
    best = prefix
    for value in ranked[1:]:
        if counter is not None:
            counter[0] += 1
        prefix = prefix & sset[value]
        if not prefix:
            break
        best = prefix
    potential = tuple(sorted(best))

    def coverage(sense: str) -> int:
        return sum(cnt for v, cnt in value_counts.items() if sense in sset.get(v, ()))

    chosen = potential[0]
    best_cov = coverage(chosen)
    for sense in potential[1:]:
        cov = coverage(sense)
        if cov > best_cov:
            chosen, best_cov = sense, cov
    return chosen, potential


def _covered(onto: Ontology, value: str, sense: str | None) -> bool:
    return sense is not None and bool(onto.classes_under_sense(value, sense))


def class_distribution(
    value_counts: dict[str, int], sense: str | None, onto: Ontology
) -> dict[str, float]:
    """Histogram of values as interpreted under a sense.

    Values the sense covers collapse to the canonical value of their class
    under that sense; everything else stays literal.
    """
    dist: dict[str, float] = {}
    for value, count in value_counts.items():
        label = value
        if sense is not None:
            cids = sorted(onto.classes_under_sense(value, sense))
            if cids:
                label = onto.canonical(cids[0], sense) or value
        dist[label] = dist.get(label, 0.0) + count
    return dist


def bin_order(values: set[str], onto: Ontology) -> list[str]:
    """Deterministic 1-D bin layout: canonical values first (sense file
    order), then literal values lexicographically."""
    canonicals: list[str] = []
    seen = set()
    for sense_id in onto.senses:
        for cls in onto.classes.values():
            head = cls.synonyms_by_sense.get(sense_id)
            if head and head[0] in values and head[0] not in seen:
                canonicals.append(head[0])
                seen.add(head[0])
    rest = sorted(v for v in values if v not in seen)
    return canonicals + rest


def emd_prefix(p: list[float], q: list[float]) -> float:
    """One-dimensional EMD of two equal-length bin arrays by prefix scan.

    Tracks the mass that must cross each bin boundary.  Arrays of unequal
    total mass are normalized to unit mass first; equal masses are
    compared as-is.
    """
    if len(p) != len(q):
        raise ValueError("bin arrays differ in length")
    total_p, total_q = float(sum(p)), float(sum(q))
    if total_p <= 0 or total_q <= 0:
        raise ValueError("cannot compare empty distributions")
    scale_p = scale_q = 1.0
    if not math.isclose(total_p, total_q):
        scale_p, scale_q = 1.0 / total_p, 1.0 / total_q
    carry = 0.0
    work = 0.0
    for pi, qi in zip(p, q):
        carry += pi * scale_p - qi * scale_q
        work += abs(carry)
    return work


def emd_1d(p: dict[str, float], q: dict[str, float], onto: Ontology) -> float:
    """Earth mover's distance over the shared 1-D bin layout."""
    bins = bin_order(set(p) | set(q), onto)
    return emd_prefix([p.get(b, 0.0) for b in bins], [q.get(b, 0.0) for b in bins])


@dataclass
class CostOptions:
    """Cost of the four ways to align two overlapping classes."""

    ontology: int
    data: int
    reassign_x: int        # x adopts the x'-side sense
    reassign_x_prime: int  # x' adopts the x-side sense
    data_feasible: bool = True

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.ontology, self.data, self.reassign_x, self.reassign_x_prime)


def _uncovered_tuples(info: ClassInfo, sense: str | None, onto: Ontology) -> int:
    return sum(
        cnt for v, cnt in info.value_counts.items() if not _covered(onto, v, sense)
    )


def repair_cost_options(
    x: ClassInfo,
    x_prime: ClassInfo,
    sense_x: str | None,
    sense_x_prime: str | None,
    onto: Ontology,
    column: list[str],
) -> CostOptions:
    """Alignment costs for two overlapping classes over one consequent.

    Ontology option: insert each overlap outlier under the sense missing
    it.  Data option: rewrite outlier tuples to a value both senses cover
    (infeasible when the senses share no value).  Reassignment options:
    the tuple-count delta of switching one class to the other's sense,
    measured over the full class.
    """
    overlap = x.tuple_ids & x_prime.tuple_ids
    counts = Counter(column[tid] for tid in overlap)
    rho_x = {v for v in counts if not _covered(onto, v, sense_x)}
    rho_xp = {v for v in counts if not _covered(onto, v, sense_x_prime)}
    ontology_cost = len(rho_x) + len(rho_xp)
    data_cost = sum(counts[v] for v in rho_x) + sum(counts[v] for v in rho_xp)
    shared = set()
    if sense_x is not None and sense_x_prime is not None:
        shared = onto.sense_values(sense_x) & onto.sense_values(sense_x_prime)
    reassign_x = _uncovered_tuples(x, sense_x_prime, onto) - _uncovered_tuples(
        x, sense_x, onto
    )
    reassign_xp = _uncovered_tuples(x_prime, sense_x, onto) - _uncovered_tuples(
        x_prime, sense_x_prime, onto
    )
    return CostOptions(
        ontology_cost, data_cost, reassign_x, reassign_xp, bool(shared)
    )


@dataclass
class DependencyGraph:
    vertices: list[ClassKey]
    # normalized (u, v) with u < v -> overlapping tuple ids
    overlaps: dict[tuple[ClassKey, ClassKey], frozenset[int]]
    adjacency: dict[ClassKey, list[ClassKey]] = field(default_factory=dict)

    def edge_key(self, u: ClassKey, v: ClassKey) -> tuple[ClassKey, ClassKey]:
        return (u, v) if u <= v else (v, u)


def _collect_classes(inst: RelationInstance, sigma: OfdSet) -> dict[ClassKey, ClassInfo]:
    out: dict[ClassKey, ClassInfo] = {}
    for i, ofd in enumerate(sigma):
        attr = ofd.single_consequent
        column = inst.column(attr)
        part = partition_of(inst, ofd.antecedent)
        for cls in part.classes:
            counts = Counter(column[tid] for tid in cls)
            out[(i, cls[0])] = ClassInfo(i, cls[0], attr, frozenset(cls), dict(counts))
    return out


def build_dependency_graph(
    inst: RelationInstance, sigma: OfdSet, assignment: SenseAssignment
) -> DependencyGraph:
    """Vertices are equivalence classes; an edge links classes of two
    dependencies with the same consequent attribute and overlapping tuples."""
    keys = sorted(assignment.classes)
    overlaps: dict[tuple[ClassKey, ClassKey], frozenset[int]] = {}
    adjacency: dict[ClassKey, list[ClassKey]] = {k: [] for k in keys}
    for a in range(len(keys)):
        for b in range(a + 1, len(keys)):
            u, v = keys[a], keys[b]
            iu, iv = assignment.classes[u], assignment.classes[v]
            if iu.ofd_index == iv.ofd_index or iu.consequent != iv.consequent:
                continue
            shared = iu.tuple_ids & iv.tuple_ids
            if shared:
                overlaps[(u, v)] = frozenset(shared)
                adjacency[u].append(v)
                adjacency[v].append(u)
    return DependencyGraph(keys, overlaps, adjacency)


def edge_weight(
    graph: DependencyGraph,
    u: ClassKey,
    v: ClassKey,
    assignment: SenseAssignment,
    inst: RelationInstance,
    onto: Ontology,
) -> float:
    """EMD between the overlap's distributions under the two current senses."""
    info = assignment.classes[u]
    overlap = graph.overlaps[graph.edge_key(u, v)]
    column = inst.column(info.consequent)
    counts = dict(Counter(column[tid] for tid in overlap))
    p = class_distribution(counts, assignment.sense_of(u), onto)
    q = class_distribution(counts, assignment.sense_of(v), onto)
    return emd_1d(p, q, onto)


def local_refinement(
    graph: DependencyGraph,
    assignment: SenseAssignment,
    theta_emd: float,
    inst: RelationInstance,
    onto: Ontology,
) -> SenseAssignment:
    """Breadth-first sweep committing neighbour re-assignments.

    Every vertex is visited exactly once, every edge evaluated once (from
    the side reached first).  A neighbour adopts the current vertex's
    sense only when re-assignment is the cheapest alignment option for
    that edge and the edge weight strictly decreases under the new sense.
    """

    def weight(u: ClassKey, v: ClassKey) -> float:
        return edge_weight(graph, u, v, assignment, inst, onto)

    initial = {
        key: sum(weight(key, other) for other in graph.adjacency[key])
        for key in graph.vertices
    }
    visited: set[ClassKey] = set()
    seen_edges: set[tuple[ClassKey, ClassKey]] = set()
    remaining = set(graph.vertices)
    while remaining:
        start = max(remaining, key=lambda k: (initial[k], k))
        queue = [start]
        while queue:
            u = queue.pop(0)
            if u in visited:
                continue
            visited.add(u)
            remaining.discard(u)
            neighbours = sorted(
                graph.adjacency[u], key=lambda v: (-weight(u, v), v)
            )
            for v in neighbours:
                if v not in visited and v not in queue:
                    queue.append(v)
                key = graph.edge_key(u, v)
                if key in seen_edges:
                    continue
                seen_edges.add(key)
                w = weight(u, v)
                if w <= theta_emd:
                    continue
                info_u, info_v = assignment.classes[u], assignment.classes[v]
                column = inst.column(info_u.consequent)
                costs = repair_cost_options(
                    info_u,
                    info_v,
                    assignment.sense_of(u),
                    assignment.sense_of(v),
                    onto,
                    column,
                )
                options = [
                    ("reassign_neighbour", costs.reassign_x_prime),
                    ("reassign_current", costs.reassign_x),
                    ("ontology", costs.ontology),
                ]
                if costs.data_feasible:
                    options.append(("data", costs.data))
                # min keeps the first entry on ties, so the preference is
                # re-assignment, then ontology insertions, then data edits
                best = min(options, key=lambda o: o[1])
                if best[0] != "reassign_neighbour":
                    continue  # only the far vertex is ever re-assigned
                old = assignment.assignments[v]
                assignment.assignments[v] = assignment.sense_of(u)
                if weight(u, v) < w:
                    continue  # commit
                assignment.assignments[v] = old
    return assignment


def sense_assignment(
    inst: RelationInstance,
    sigma: OfdSet,
    onto: Ontology,
    theta_emd: float = 10.0,
) -> SenseAssignment:
    """Initial per-class assignment followed by dependency-graph refinement."""
    for ofd in sigma:
        if not ofd.is_normalized:
            raise ValueError("sense assignment requires single-attribute consequents")
    classes = _collect_classes(inst, sigma)
    sset = build_sset(onto)
    counter = [0]
    assignments: dict[ClassKey, str | None] = {}
    potential: dict[ClassKey, tuple[str, ...]] = {}
    literal: list[ClassKey] = []
    for key in sorted(classes):
        sense, pot = initial_assignment(classes[key].value_counts, sset, counter)
        assignments[key] = sense
        potential[key] = pot
        if sense is None:
            literal.append(key)
    result = SenseAssignment(assignments, potential, classes, literal, counter[0])
    graph = build_dependency_graph(inst, sigma, result)
    return local_refinement(graph, result, theta_emd, inst, onto)
