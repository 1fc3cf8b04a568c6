"""Deliberately naive reference implementations for cross-checking.

Everything here recomputes results straight from definitions: exhaustive
candidate enumeration with per-class checks, axiom saturation to a
fixpoint, subset search for vertex covers, a transportation LP for the
earth mover's distance, and full enumeration of repair combinations.
None of it shares logic with the production modules beyond the data
types, and every entry point enforces a size budget before running
anything exponential.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

from .inference import SYNONYM, TRADITIONAL, Ofd, OfdSet
from .ontology import Ontology
from .relation import RelationInstance
from .senses import SenseAssignment


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class OracleBudget:
    max_tuples: int = 50
    max_arity: int = 5
    max_candidates: int = 10
    max_graph_nodes: int = 15
    max_bins: int = 8

    def check(self, **observed: int) -> None:
        limits = {
            "tuples": self.max_tuples,
            "arity": self.max_arity,
            "candidates": self.max_candidates,
            "graph_nodes": self.max_graph_nodes,
            "bins": self.max_bins,
        }
        for name, value in observed.items():
            if value > limits[name]:
                raise BudgetExceeded(f"{name}={value} exceeds oracle budget {limits[name]}")


# -- dependency enumeration -------------------------------------------------


def _group_by(inst: RelationInstance, attrs: tuple[str, ...]) -> list[list[int]]:
    groups: dict[tuple[str, ...], list[int]] = {}
    cols = [inst.column(a) for a in attrs]
    for tid in range(inst.size):
        key = tuple(col[tid] for col in cols)
        groups.setdefault(key, []).append(tid)
    return list(groups.values())


def _interpretations(onto: Ontology, value: str, kind: str, theta: int) -> set:
    """Keys under which a value can be read; a literal self-key is always
    present so that equal strings match regardless of the ontology."""
    keys: set = {("literal", value)}
    if kind == TRADITIONAL:
        return keys
    for cid, sid in onto.memberships(value):
        if kind == SYNONYM:
            keys.add((sid, cid))
        else:
            dist = 0
            cur: str | None = cid
            while cur is not None and dist <= theta:
                keys.add((sid, cur))
                cur = onto.classes[cur].parent
                dist += 1
    return keys


def naive_holds(
    inst: RelationInstance,
    onto: Ontology,
    antecedent: tuple[str, ...],
    consequent: str,
    kind: str,
    theta: int = 0,
    kappa: float = 1.0,
) -> bool:
    coln = inst.column(consequent)
    satisfied = 0
    for group in _group_by(inst, antecedent):
        counts = Counter(coln[t] for t in group)
        masses: dict = {}
        for value, n in counts.items():
            for key in _interpretations(onto, value, kind, theta):
                masses[key] = masses.get(key, 0) + n
        best = max(masses.values(), default=0)
        if kappa >= 1.0 and best < len(group):
            return False
        satisfied += best
    return satisfied >= kappa * inst.size


def enumerate_ofds_naive(
    inst: RelationInstance,
    onto: Ontology,
    kinds: tuple[tuple[str, int], ...],
    kappa: float = 1.0,
    minimal: bool = True,
    exclude: tuple[str, ...] = (),
    budget: OracleBudget | None = None,
) -> OfdSet:
    """Test every (X, A) pair directly; optionally drop non-minimal ones."""
    budget = budget or OracleBudget()
    attrs = [a for a in inst.attribute_names if a not in set(exclude)]
    budget.check(tuples=inst.size, arity=len(attrs))
    found: list[Ofd] = []
    holds: dict[tuple, bool] = {}
    for kind, theta in kinds:
        for consequent in attrs:
            rest = [a for a in attrs if a != consequent]
            for r in range(len(rest) + 1):
                for antecedent in itertools.combinations(rest, r):
                    ok = naive_holds(
                        inst, onto, antecedent, consequent, kind, theta, kappa
                    )
                    holds[(kind, theta, antecedent, consequent)] = ok
        for consequent in attrs:
            rest = [a for a in attrs if a != consequent]
            for r in range(len(rest) + 1):
                for antecedent in itertools.combinations(rest, r):
                    if not holds[(kind, theta, antecedent, consequent)]:
                        continue
                    if minimal:
                        smaller = any(
                            holds[(kind, theta, sub, consequent)]
                            for rr in range(r)
                            for sub in itertools.combinations(antecedent, rr)
                        )
                        if smaller:
                            continue
                    found.append(
                        Ofd(frozenset(antecedent), frozenset({consequent}), kind, theta, kappa)
                    )
    return OfdSet(found)


# -- axiom saturation --------------------------------------------------------


def closure_saturate(attrs: frozenset[str], sigma: OfdSet) -> frozenset[str]:
    """Fixpoint over Identity/Decomposition/Composition.

    Any derivation of X -> A only ever composes dependencies whose
    antecedents sit inside X, so the saturation tracks, per subset of X,
    the largest derivable consequent.
    """
    base = sorted(attrs)
    subsets = [
        frozenset(c) for r in range(len(base) + 1) for c in itertools.combinations(base, r)
    ]
    max_consequent: dict[frozenset[str], set[str]] = {u: set(u) for u in subsets}
    for ofd in sigma:
        if ofd.antecedent <= attrs:
            max_consequent[ofd.antecedent] |= ofd.consequent
    changed = True
    while changed:
        changed = False
        for u1 in subsets:
            for u2 in subsets:
                union = u1 | u2
                merged = max_consequent[u1] | max_consequent[u2]
                if not merged <= max_consequent[union]:
                    max_consequent[union] |= merged
                    changed = True
    return frozenset(max_consequent[frozenset(attrs)])


# -- vertex cover -------------------------------------------------------------


def exact_min_vertex_cover(
    edges: list[tuple[int, int]], budget: OracleBudget | None = None
) -> tuple[int, ...]:
    budget = budget or OracleBudget()
    nodes = sorted({n for e in edges for n in e})
    budget.check(graph_nodes=len(nodes))
    for r in range(len(nodes) + 1):
        for combo in itertools.combinations(nodes, r):
            chosen = set(combo)
            if all(a in chosen or b in chosen for a, b in edges):
                return combo
    return ()


# -- earth mover's distance ----------------------------------------------------


def emd_lp(
    p: list[float], q: list[float], budget: OracleBudget | None = None
) -> float:
    """Transportation-problem optimum with |i - j| ground distance."""
    from scipy.optimize import linprog

    budget = budget or OracleBudget()
    if len(p) != len(q):
        raise ValueError("bin arrays differ in length")
    budget.check(bins=len(p))
    total_p, total_q = float(sum(p)), float(sum(q))
    if total_p <= 0 or total_q <= 0:
        raise ValueError("cannot compare empty distributions")
    if abs(total_p - total_q) > 1e-12:
        p = [x / total_p for x in p]
        q = [x / total_q for x in q]
    n = len(p)
    cost = [abs(i - j) for i in range(n) for j in range(n)]
    a_eq = []
    b_eq = []
    for i in range(n):
        row = [0.0] * (n * n)
        for j in range(n):
            row[i * n + j] = 1.0
        a_eq.append(row)
        b_eq.append(p[i])
    for j in range(n):
        row = [0.0] * (n * n)
        for i in range(n):
            row[i * n + j] = 1.0
        a_eq.append(row)
        b_eq.append(q[j])
    res = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success:  # pragma: no cover
        raise RuntimeError(f"transportation LP failed: {res.message}")
    return float(res.fun)


# -- exhaustive repair ---------------------------------------------------------


def _consistent_class(onto: Ontology, values: list[str], sense: str | None) -> bool:
    distinct = set(values)
    if len(distinct) <= 1:
        return True
    common = None
    for v in distinct:
        cids = {c for c, s in onto.memberships(v) if s == sense}
        if not cids:
            return False
        common = cids if common is None else common & cids
        if not common:
            return False
    return True


def _instance_consistent(
    inst: RelationInstance,
    sigma: OfdSet,
    onto: Ontology,
    assignment: SenseAssignment,
) -> bool:
    for i, ofd in enumerate(sigma):
        column = inst.column(ofd.single_consequent)
        for group in _group_by(inst, tuple(sorted(ofd.antecedent))):
            sense = assignment.assignments.get((i, min(group)))
            if not _consistent_class(onto, [column[t] for t in group], sense):
                return False
    return True


def exhaustive_repair(
    inst: RelationInstance,
    sigma: OfdSet,
    onto: Ontology,
    assignment: SenseAssignment,
    budget: OracleBudget | None = None,
    pool: list[tuple[str, str, str]] | None = None,
) -> list[tuple[int, int]]:
    """Exact Pareto front over (ontology distance, data distance).

    Enumerates every insertion subset crossed with every bounded
    assignment of replacement values to the consequent cells of violating
    classes.  ``pool`` fixes the insertion universe, (value, sense,
    target class) triples; without it every class valid under the sense
    is tried as a target.
    """
    budget = budget or OracleBudget()
    budget.check(tuples=inst.size)

    # candidate insertions: uncovered values of violating classes
    candidates: list[tuple[str, str, str]] = list(pool) if pool is not None else []
    cells: list[tuple[int, str]] = []
    domains: dict[tuple[int, str], set[str]] = {}
    for i, ofd in enumerate(sigma):
        attr = ofd.single_consequent
        column = inst.column(attr)
        for group in _group_by(inst, tuple(sorted(ofd.antecedent))):
            sense = assignment.assignments.get((i, min(group)))
            values = [column[t] for t in group]
            if _consistent_class(onto, values, sense):
                continue
            if sense is not None and pool is None:
                sense_classes = sorted(
                    cid
                    for cid, cls in onto.classes.items()
                    if cls.synonyms_by_sense.get(sense)
                )
                for v in sorted(set(values)):
                    if not any(
                        s == sense for _, s in onto.memberships(v)
                    ):
                        for target in sense_classes:
                            candidates.append((v, sense, target))
            value_pool = set(values)
            if sense is not None:
                for v in set(values):
                    for cid, s in onto.memberships(v):
                        if s == sense:
                            value_pool.update(
                                onto.classes[cid].synonyms_by_sense[sense]
                            )
                for v, s, target in candidates:
                    if s == sense:
                        value_pool.add(v)
            for t in group:
                cell = (t, attr)
                if cell not in domains:
                    cells.append(cell)
                    domains[cell] = set()
                domains[cell] |= value_pool
    candidates = sorted(set(candidates))
    budget.check(candidates=len(candidates))
    if len(cells) > 8:
        raise BudgetExceeded(f"{len(cells)} repairable cells exceed oracle budget")

    achieved: list[tuple[int, int]] = []
    for r in range(len(candidates) + 1):
        for combo in itertools.combinations(candidates, r):
            if len({(v, s) for v, s, _ in combo}) != len(combo):
                continue  # one target per inserted (value, sense)
            branch = onto.clone()
            for v, s, target in combo:
                branch.add_value(v, s, target)
            best = None
            options = [
                [None] + sorted(domains[cell]) for cell in cells
            ]
            for choice in itertools.product(*options):
                updates = [
                    (cell[0], cell[1], value)
                    for cell, value in zip(cells, choice)
                    if value is not None and inst.cell(cell[0], cell[1]) != value
                ]
                changed = len(updates)
                if best is not None and changed >= best:
                    continue
                trial_rows = [list(row) for row in inst.rows]
                for tid, attr, value in updates:
                    trial_rows[tid][inst.attribute(attr).index] = value
                trial = RelationInstance(inst.schema, tuple(tuple(x) for x in trial_rows))
                if _instance_consistent(trial, sigma, branch, assignment):
                    best = changed
            if best is not None:
                achieved.append((r, best))
    return pareto_filter_naive(achieved)


def pareto_filter_naive(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Quadratic weak-dominance filter used to cross-check the production one."""
    unique = sorted(set(points))
    return sorted(
        p
        for p in unique
        if not any(
            q != p and q[0] <= p[0] and q[1] <= p[1] for q in unique
        )
    )
