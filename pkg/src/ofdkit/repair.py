"""Joint data/ontology repair: beam search over value insertions plus
conflict-graph data repair, yielding a Pareto front of repair pairs.

Violations are detected per equivalence class under that class's assigned
sense.  Conflicting tuple pairs form a conflict graph whose approximate
minimum vertex cover bounds the tuples needing edits; cover tuples are
rewritten one at a time to a value compatible with the rest of their
class.  Ontology candidates are the uncovered values of violating
classes; subsets of them are explored level by level (size k), keeping
the top-b nodes per level ranked by the realized data-repair cost.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .inference import INHERITANCE, Ofd, OfdSet
from .ontology import Ontology
from .relation import RelationInstance, partition_of
from .senses import SenseAssignment

Insertion = tuple[str, str, str]  # (value, sense, class id)
CellUpdate = tuple[int, str, str, str]  # (tuple id, attribute, old, new)


class RepairInputError(ValueError):
    pass


@dataclass(frozen=True)
class RepairPair:
    insertions: tuple[Insertion, ...]
    cell_updates: tuple[CellUpdate, ...]
    dist_s: int
    dist_i: int
    delta_p: int
    cover: tuple[int, ...]

    def to_doc(self) -> dict:
        return {
            "insertions": [
                {"value": v, "sense": s, "class": c} for v, s, c in self.insertions
            ],
            "cell_updates": [
                {"tuple": t, "attr": a, "old": o, "new": n}
                for t, a, o, n in self.cell_updates
            ],
            "dist_s": self.dist_s,
            "dist_i": self.dist_i,
            "delta_p": self.delta_p,
            "cover": list(self.cover),
        }


@dataclass
class BeamConfig:
    tau: int | None = None
    beam: int | None = None  # default floor(|pool| / e), at least 1
    k_max: int | None = None


def validate_repair_sigma(sigma: OfdSet) -> None:
    """Repairable dependency sets: synonym semantics, single consequents,
    and no attribute on the left of one dependency and the right of
    another (so equivalence classes stay fixed under consequent edits)."""
    lhs: set[str] = set()
    rhs: set[str] = set()
    for ofd in sigma:
        if not ofd.is_normalized:
            raise RepairInputError("repair requires single-attribute consequents")
        if ofd.kind == INHERITANCE:
            raise RepairInputError("inheritance dependencies are not repairable")
        lhs |= ofd.antecedent
        rhs |= ofd.consequent
    overlap = lhs & rhs
    if overlap:
        raise RepairInputError(
            f"attributes on both dependency sides are unsupported: {sorted(overlap)}"
        )


def _sense_classes(onto: Ontology, value: str, sense: str | None) -> frozenset[str]:
    if sense is None:
        return frozenset()
    return frozenset(onto.classes_under_sense(value, sense))


def _compatible(onto: Ontology, u: str, v: str, sense: str | None) -> bool:
    return u == v or bool(_sense_classes(onto, u, sense) & _sense_classes(onto, v, sense))


def _class_consistent(onto: Ontology, values: set[str], sense: str | None) -> bool:
    if len(values) <= 1:
        return True
    common: frozenset[str] | None = None
    for value in values:
        cids = _sense_classes(onto, value, sense)
        if not cids:
            return False
        common = cids if common is None else common & cids
        if not common:
            return False
    return True


@dataclass
class ConflictGraph:
    # (ti, tj) with ti < tj -> annotations (dependency index, sense)
    edges: dict[tuple[int, int], tuple[tuple[int, str | None], ...]] = field(
        default_factory=dict
    )

    @property
    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def nodes(self) -> set[int]:
        out: set[int] = set()
        for a, b in self.edges:
            out.add(a)
            out.add(b)
        return out


def _classes_for(inst: RelationInstance, ofd: Ofd) -> list[tuple[int, ...]]:
    return partition_of(inst, ofd.antecedent).classes


def build_conflict_graph(
    inst: RelationInstance,
    sigma: OfdSet,
    onto: Ontology,
    assignment: SenseAssignment,
) -> ConflictGraph:
    """One edge per tuple pair whose consequent values disagree under the
    class's assigned sense, for some dependency grouping them together."""
    edges: dict[tuple[int, int], list[tuple[int, str | None]]] = {}
    for i, ofd in enumerate(sigma):
        column = inst.column(ofd.single_consequent)
        for cls in _classes_for(inst, ofd):
            if len(cls) < 2:
                continue
            sense = assignment.assignments.get((i, cls[0]))
            values = {column[t] for t in cls}
            if _class_consistent(onto, values, sense):
                continue
            # distinct-value pairs decide; tuples sharing a value share edges
            value_pairs_incompatible = {}
            distinct = sorted(values)
            for a in range(len(distinct)):
                for b in range(a + 1, len(distinct)):
                    u, v = distinct[a], distinct[b]
                    value_pairs_incompatible[(u, v)] = not _compatible(
                        onto, u, v, sense
                    )
            for ai in range(len(cls)):
                for bi in range(ai + 1, len(cls)):
                    ta, tb = cls[ai], cls[bi]
                    u, v = sorted((column[ta], column[tb]))
                    if u == v:
                        continue
                    if value_pairs_incompatible[(u, v)]:
                        edges.setdefault((ta, tb), []).append((i, sense))
    return ConflictGraph({k: tuple(v) for k, v in sorted(edges.items())})


def approx_vertex_cover(graph: ConflictGraph) -> tuple[int, ...]:
    """Vertex cover within twice the optimum.

    Both endpoints of a maximal matching (edges scanned in sorted order)
    are taken, then redundant vertices are pruned in ascending id order;
    pruning keeps the cover property and never grows the set, so the
    2-approximation bound survives.
    """
    matched: set[int] = set()
    cover: set[int] = set()
    for a, b in graph.edge_list:
        if a not in matched and b not in matched:
            matched.add(a)
            matched.add(b)
            cover.add(a)
            cover.add(b)
    for node in sorted(cover):
        others = cover - {node}
        if all(a in others or b in others for a, b in graph.edges):
            cover = others
    return tuple(sorted(cover))


def delta_p(sigma: OfdSet, cover: tuple[int, ...]) -> int:
    """Upper bound on data edits: each covered tuple changes at most one
    cell per distinct consequent attribute (and per dependency)."""
    z = len({ofd.single_consequent for ofd in sigma})
    return min(z, len(sigma)) * len(cover)


def _repair_value(
    onto: Ontology,
    sense: str | None,
    class_counts: dict[str, int],
    fixed_values: list[str],
) -> str | None:
    """Pick the new consequent value for one covered tuple.

    ``fixed_values`` are the values of class members that are staying put;
    the choice must be compatible with all of them.  Preference: the
    class's strict-majority value, then the most frequent compatible
    value, then a sense synonym (canonical first), then a literal
    majority vote when nothing is covered.
    """
    total = sum(class_counts.values())

    def compatible_with_fixed(v: str) -> bool:
        return all(_compatible(onto, v, u, sense) for u in fixed_values)

    majority = [v for v, c in class_counts.items() if c * 2 > total]
    if majority and compatible_with_fixed(majority[0]):
        return majority[0]
    in_class = sorted(
        (v for v in class_counts if compatible_with_fixed(v)),
        key=lambda v: (-class_counts[v], v),
    )
    if in_class:
        return in_class[0]
    if fixed_values:
        common: frozenset[str] | None = None
        for u in set(fixed_values):
            cids = _sense_classes(onto, u, sense)
            common = cids if common is None else common & cids
            if not common:
                break
        if common:
            target = sorted(common)[0]
            canonical = onto.canonical(target, sense) if sense else None
            if canonical is not None:
                return canonical
        if len(set(fixed_values)) == 1:
            return fixed_values[0]
        return None
    # whole class is being rewritten: any single value restores consistency
    if sense is not None:
        covered = sorted(
            (v for v in class_counts if _sense_classes(onto, v, sense)),
            key=lambda v: (-class_counts[v], v),
        )
        if covered:
            return covered[0]
    return sorted(class_counts, key=lambda v: (-class_counts[v], v))[0]


def repair_data(
    inst: RelationInstance,
    sigma: OfdSet,
    onto: Ontology,
    assignment: SenseAssignment,
) -> tuple[tuple[CellUpdate, ...], int, bool]:
    """Edit consequent cells until every class is consistent.

    Returns (updates, changed-cell count, success).  Covered tuples are
    repaired one at a time against the values that stay fixed; the graph
    is regenerated after each pass.  Gives up (success=False) when a pass
    makes no progress.
    """
    rows = [list(r) for r in inst.rows]
    col_index = {a.name: a.index for a in inst.schema}

    def current() -> RelationInstance:
        return RelationInstance(inst.schema, tuple(tuple(r) for r in rows))

    # antecedents never change, so classes are computed once per dependency
    class_of: list[dict[int, tuple[int, ...]]] = []
    for ofd in sigma:
        lookup: dict[int, tuple[int, ...]] = {}
        for cls in _classes_for(inst, ofd):
            if len(cls) >= 2:
                for t in cls:
                    lookup[t] = cls
        class_of.append(lookup)

    max_rounds = 2 * len(sigma) + 2
    for _ in range(max_rounds):
        graph = build_conflict_graph(current(), sigma, onto, assignment)
        if not graph.edges:
            break
        cover = approx_vertex_cover(graph)
        pending = set(cover)
        progressed = False
        for tid in cover:
            for i, ofd in enumerate(sigma):
                cls = class_of[i].get(tid)
                if cls is None:
                    continue
                idx = col_index[ofd.single_consequent]
                sense = assignment.assignments.get((i, cls[0]))
                values = {rows[t][idx] for t in cls}
                if _class_consistent(onto, values, sense):
                    continue
                fixed = [rows[t][idx] for t in cls if t not in pending]
                counts = Counter(rows[t][idx] for t in cls)
                new = _repair_value(onto, sense, dict(counts), fixed)
                if new is not None and new != rows[tid][idx]:
                    rows[tid][idx] = new
                    progressed = True
            pending.discard(tid)
        if not progressed:
            break

    repaired = current()
    residual = build_conflict_graph(repaired, sigma, onto, assignment)
    # class-level recheck: pairwise edges can miss class-wide conflicts
    clean = not residual.edges and not violating_classes(
        repaired, sigma, onto, assignment
    )
    updates = []
    changed = 0
    for tid, (old_row, new_row) in enumerate(zip(inst.rows, rows)):
        for attr, (old, new) in zip(inst.attribute_names, zip(old_row, new_row)):
            if old != new:
                updates.append((tid, attr, old, new))
                changed += 1
    return tuple(updates), changed, clean


def violating_classes(
    inst: RelationInstance,
    sigma: OfdSet,
    onto: Ontology,
    assignment: SenseAssignment,
) -> list[tuple[int, int]]:
    """(dependency index, class representative) of every violating class."""
    out = []
    for i, ofd in enumerate(sigma):
        column = inst.column(ofd.single_consequent)
        for cls in _classes_for(inst, ofd):
            if len(cls) < 2:
                continue
            sense = assignment.assignments.get((i, cls[0]))
            values = {column[t] for t in cls}
            if not _class_consistent(onto, values, sense):
                out.append((i, cls[0]))
    return out


def collect_candidates(
    inst: RelationInstance,
    sigma: OfdSet,
    onto: Ontology,
    assignment: SenseAssignment,
) -> list[Insertion]:
    """Uncovered values of violating classes, each with an insertion target.

    The target is the class (under the assigned sense) holding the most
    frequent covered value of the violating equivalence class; values of
    classes with no covered value at all have no anchor and are skipped.
    """
    pool: dict[tuple[str, str], str] = {}
    for i, ofd in enumerate(sigma):
        column = inst.column(ofd.single_consequent)
        for cls in _classes_for(inst, ofd):
            if len(cls) < 2:
                continue
            sense = assignment.assignments.get((i, cls[0]))
            if sense is None:
                continue
            values = {column[t] for t in cls}
            if _class_consistent(onto, values, sense):
                continue
            counts = Counter(column[t] for t in cls)
            covered = sorted(
                (v for v in values if _sense_classes(onto, v, sense)),
                key=lambda v: (-counts[v], v),
            )
            if not covered:
                continue
            target = sorted(_sense_classes(onto, covered[0], sense))[0]
            for value in sorted(values):
                if not _sense_classes(onto, value, sense):
                    pool.setdefault((value, sense), target)
    return [
        (value, sense, target)
        for (value, sense), target in sorted(pool.items())
    ]


def pareto_front(pairs: list[RepairPair]) -> list[RepairPair]:
    """Keep the Pareto-optimal pairs.

    A pair is dropped when some other pair is at least as good in both
    distances and better in one; that is what makes only the first and
    third of {(2,2), (2,3), (1,5)} minimal.
    """

    def dominated(p: RepairPair) -> bool:
        return any(
            q.dist_s <= p.dist_s
            and q.dist_i <= p.dist_i
            and (q.dist_s < p.dist_s or q.dist_i < p.dist_i)
            for q in pairs
        )

    return sorted(
        (p for p in pairs if not dominated(p)), key=lambda p: (p.dist_s, p.dist_i)
    )


@dataclass
class _Node:
    insertions: tuple[Insertion, ...]
    updates: tuple[CellUpdate, ...] = ()
    dist_i: int = 0
    clean: bool = False
    cover: tuple[int, ...] = ()
    bound: int = 0

    @property
    def rank(self) -> tuple:
        cost = self.dist_i if self.clean else math.inf
        return (cost, tuple(v for v, _, _ in self.insertions))


def ontology_repair_search(
    inst: RelationInstance,
    sigma: OfdSet,
    onto: Ontology,
    assignment: SenseAssignment,
    cfg: BeamConfig | None = None,
) -> tuple[list[RepairPair], dict]:
    """Beam search over insertion subsets; returns (Pareto front, report).

    Level k holds insertion sets of size k; children extend a surviving
    parent by one pool value.  Each node's cost is the realized data
    repair under the augmented ontology.  Per level the best node is
    recorded; the search stops when data repairs hit zero or at k_max.
    """
    validate_repair_sigma(sigma)
    cfg = cfg or BeamConfig()
    pool = collect_candidates(inst, sigma, onto, assignment)
    beam = cfg.beam if cfg.beam else max(1, math.floor(len(pool) / math.e))
    k_max = cfg.k_max if cfg.k_max is not None else len(pool)

    def evaluate(insertions: tuple[Insertion, ...]) -> _Node:
        branch = onto.clone()
        for value, sense, target in insertions:
            branch.add_value(value, sense, target)
        graph = build_conflict_graph(inst, sigma, branch, assignment)
        cover = approx_vertex_cover(graph)
        bound = delta_p(sigma, cover)
        updates, changed, clean = repair_data(inst, sigma, branch, assignment)
        return _Node(insertions, updates, changed, clean, cover, bound)

    best_per_k: list[_Node] = []
    root = evaluate(())
    best_per_k.append(root)
    frontier = [root]
    k = 1
    while k <= k_max and pool and not (best_per_k[-1].clean and best_per_k[-1].dist_i == 0):
        seen: set[tuple[Insertion, ...]] = set()
        children: list[_Node] = []
        for parent in frontier:
            have = set(parent.insertions)
            for cand in pool:
                if cand in have:
                    continue
                key = tuple(sorted(have | {cand}))
                if key in seen:
                    continue
                seen.add(key)
                children.append(evaluate(key))
        if not children:
            break
        children.sort(key=lambda n: n.rank)
        frontier = children[: max(1, beam)]
        best_per_k.append(children[0])
        k += 1

    pairs = []
    for node in best_per_k:
        if not node.clean:
            continue
        if cfg.tau is not None and node.dist_i > cfg.tau:
            continue
        if node.dist_i > node.bound:
            continue  # exceeded the cover bound: not a certified repair
        pairs.append(
            RepairPair(
                node.insertions,
                node.updates,
                len(node.insertions),
                node.dist_i,
                node.bound,
                node.cover,
            )
        )
    report = {
        "pool": [{"value": v, "sense": s, "class": c} for v, s, c in pool],
        "beam": beam,
        "k_max": k_max,
        "levels_explored": len(best_per_k),
        "feasible": bool(pairs),
    }
    return pareto_front(pairs), report
