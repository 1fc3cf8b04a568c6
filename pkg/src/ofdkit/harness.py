"""Synthetic fixtures, seeded error injection, repair scoring, benchmarks.

Everything here is deterministic given a seed, so dirty instances, truth
logs, and benchmark tables can be reproduced byte for byte.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .discovery import DiscoveryConfig, discover_ofds
from .inference import SYNONYM, Ofd, OfdSet
from .ontology import ConceptClass, Ontology, Sense
from .relation import RelationInstance, instance_from_rows
from .repair import RepairPair


class InjectionError(ValueError):
    pass


@dataclass
class InjectionSpec:
    err: float  # fraction of consequent cells corrupted
    inc: float  # fraction of ontology values withheld
    mode: str = "mixed"  # new | swap | mixed

    def __post_init__(self):
        if not 0 <= self.err <= 1 or not 0 <= self.inc <= 1:
            raise InjectionError("err and inc must lie in [0, 1]")
        if self.mode not in ("new", "swap", "mixed"):
            raise InjectionError(f"unknown injection mode {self.mode!r}")


@dataclass
class InjectionLog:
    cell_errors: list[dict] = field(default_factory=list)
    withheld: list[dict] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {"cell_errors": self.cell_errors, "withheld": self.withheld}

    @classmethod
    def from_doc(cls, doc: dict) -> "InjectionLog":
        return cls(list(doc.get("cell_errors", [])), list(doc.get("withheld", [])))


def inject_errors(
    inst: RelationInstance,
    onto: Ontology,
    sigma: OfdSet,
    spec: InjectionSpec,
    seed: int,
) -> tuple[RelationInstance, Ontology, InjectionLog]:
    """Corrupt consequent cells and withhold ontology values, logging truth.

    Cell errors flip a consequent cell either to a fresh out-of-domain
    value or to another existing domain value.  Withholding removes a
    value from the ontology wherever the synonym list stays non-empty.
    """
    rng = random.Random(seed)
    log = InjectionLog()
    consequents = sorted({ofd.single_consequent for ofd in sigma})
    cells = [(tid, attr) for attr in consequents for tid in range(inst.size)]
    n_errors = int(round(spec.err * len(cells)))
    if n_errors > len(cells):
        raise InjectionError("error rate exceeds available consequent cells")
    rows = [list(r) for r in inst.rows]
    domains = {attr: sorted(set(inst.column(attr))) for attr in consequents}
    for j, (tid, attr) in enumerate(sorted(rng.sample(cells, n_errors))):
        idx = inst.attribute(attr).index
        clean = rows[tid][idx]
        mode = spec.mode
        if mode == "mixed":
            mode = "new" if rng.random() < 0.5 else "swap"
        if mode == "swap":
            others = [v for v in domains[attr] if v != clean]
            dirty = rng.choice(others) if others else f"__err{j}__"
        else:
            dirty = f"__err{j}__"
        rows[tid][idx] = dirty
        log.cell_errors.append(
            {"tuple": tid, "attr": attr, "clean": clean, "dirty": dirty}
        )

    reduced = onto.clone()
    all_values = sorted(onto.value_index)
    eligible = [
        v
        for v in all_values
        if all(
            len(onto.classes[cid].synonyms_by_sense[sid]) >= 2
            for cid, sid in onto.memberships(v)
        )
    ]
    n_withheld = int(round(spec.inc * len(all_values)))
    if n_withheld > len(eligible):
        n_withheld = len(eligible)
    for value in sorted(rng.sample(eligible, n_withheld)):
        for cid, sid in reduced.remove_value(value):
            log.withheld.append({"value": value, "sense": sid, "class": cid})

    dirty_inst = RelationInstance(inst.schema, tuple(tuple(r) for r in rows))
    return dirty_inst, reduced, log


@dataclass
class RepairScores:
    precision: float
    recall: float
    onto_precision: float
    onto_recall: float

    def to_doc(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "onto_precision": self.onto_precision,
            "onto_recall": self.onto_recall,
        }


def score_repairs(pair: RepairPair, log: InjectionLog) -> RepairScores:
    """Exact-match scoring of a repair pair against the injection log."""
    truth = {(e["tuple"], e["attr"]): e["clean"] for e in log.cell_errors}
    correct = sum(
        1
        for tid, attr, _, new in pair.cell_updates
        if truth.get((tid, attr)) == new
    )
    precision = correct / len(pair.cell_updates) if pair.cell_updates else 1.0
    recall = correct / len(truth) if truth else 1.0
    withheld = {(w["value"], w["sense"]) for w in log.withheld}
    onto_hits = sum(1 for v, s, _ in pair.insertions if (v, s) in withheld)
    onto_precision = onto_hits / len(pair.insertions) if pair.insertions else 1.0
    onto_recall = onto_hits / len(withheld) if withheld else 1.0
    return RepairScores(precision, recall, onto_precision, onto_recall)


# -- synthetic fixtures --------------------------------------------------------


def synthetic_discovery_instance(
    n: int, arity: int, seed: int = 7
) -> tuple[RelationInstance, Ontology]:
    """Instance with one planted synonym dependency and noise columns.

    col0 cycles through 50 keys, col1 holds a synonym variant determined
    by the key (so col0 ->syn col1 holds), and the remaining columns are
    uniform draws from fixed alphabets.  The lattice shape is independent
    of n, which keeps runtime scaling measurements clean.
    """
    if arity < 2:
        raise ValueError("need at least two attributes")
    rng = random.Random(seed)
    groups = 25
    classes = [
        ConceptClass(
            f"grp{g}",
            None,
            {"syn0": [f"w{g}a", f"w{g}b"]},
        )
        for g in range(groups)
    ]
    onto = Ontology(classes, [Sense("syn0")])
    alphabet_sizes = [17, 13, 11, 7, 23, 19, 29, 31]
    header = [f"col{i}" for i in range(arity)]
    rows = []
    for i in range(n):
        key = i % 50
        group = key % groups
        row = [f"k{key}", f"w{group}{'a' if rng.random() < 0.5 else 'b'}"]
        for j in range(arity - 2):
            size = alphabet_sizes[j % len(alphabet_sizes)]
            row.append(f"n{j}_{rng.randrange(size)}")
        rows.append(row)
    return instance_from_rows(header, rows), onto


def synthetic_repair_fixture(
    n: int = 5000,
    n_senses: int = 4,
    n_groups: int = 40,
    n_keys: int = 200,
    mixed_every: int = 8,
    seed: int = 11,
) -> tuple[RelationInstance, Ontology, OfdSet]:
    """Key -> medication style fixture for the repair accuracy harness.

    Every key maps to a concept group interpreted under one sense.  Most
    keys use a single surface value; every ``mixed_every``-th key
    alternates between the group's two synonyms, which is what gives
    ontology withholding something to break.
    """
    senses = [Sense(f"s{i}") for i in range(n_senses)]
    classes = []
    for g in range(n_groups):
        classes.append(
            ConceptClass(
                f"grp{g}",
                None,
                {
                    f"s{s}": [f"g{g}s{s}a", f"g{g}s{s}b"]
                    for s in range(n_senses)
                },
            )
        )
    onto = Ontology(classes, senses)
    rows = []
    for i in range(n):
        key = i % n_keys
        group = key % n_groups
        sense = group % n_senses
        if key % mixed_every == 0:
            variant = "a" if (i // n_keys) % 2 == 0 else "b"
        else:
            variant = "a" if (key // n_groups) % 2 == 0 else "b"
        rows.append([f"k{key}", f"g{group}s{sense}{variant}"])
    inst = instance_from_rows(["PAT", "MED"], rows)
    sigma = OfdSet([Ofd(frozenset({"PAT"}), frozenset({"MED"}), SYNONYM)])
    return inst, onto, sigma


# -- benchmarking ---------------------------------------------------------------


def bench_grid(
    ns: list[int],
    arities: list[int],
    seed: int = 7,
    kappa: float = 1.0,
) -> list[dict]:
    """Run discovery over an (n, arity) grid, one row per configuration."""
    out = []
    for arity in arities:
        for n in ns:
            inst, onto = synthetic_discovery_instance(n, arity, seed)
            cfg = DiscoveryConfig(kinds=((SYNONYM, 0),), kappa=kappa)
            t0 = time.perf_counter()
            sigma, stats = discover_ofds(inst, onto, cfg)
            seconds = time.perf_counter() - t0
            out.append(
                {
                    "n": n,
                    "arity": arity,
                    "seconds": round(seconds, 6),
                    "ofds": len(sigma),
                    "candidates": stats.candidates_generated,
                    "verified": stats.candidates_verified,
                    "lookups": stats.ontology_lookups,
                }
            )
    return out


def bench_rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = list(rows[0])
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(str(row[c]) for c in cols))
    return "\n".join(lines) + "\n"


def linear_r2(xs: list[float], ys: list[float]) -> float:
    """Coefficient of determination of the least-squares line."""
    n = len(xs)
    if n < 2:
        raise ValueError("need at least two points")
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    if sxx == 0:
        raise ValueError("degenerate x values")
    slope = sxy / sxx
    intercept = my - slope * mx
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    ss_tot = sum((y - my) ** 2 for y in ys)
    if ss_tot == 0:
        return 1.0
    return 1.0 - ss_res / ss_tot
