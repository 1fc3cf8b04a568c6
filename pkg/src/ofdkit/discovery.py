"""Level-wise lattice discovery of a complete, minimal set of dependencies.

The search walks the attribute-set containment lattice small-to-large.
Each node X carries a stripped partition (built in linear time as the
product of two parents) and per-kind candidate sets C+(X); a candidate
(X \\ A) -> A is verified only while A survives in the candidate set of
every size-(l-1) subset, which is exactly the minimality condition.  A
verified dependency removes A from C+(X), so no superset of its
antecedent is ever verified again for that consequent.

Verification is class-at-a-time: a class passes a synonym check iff the
ontology memberships of its distinct consequent values share a
(class, sense) pair, and an inheritance check iff under a single sense
all values sit within ``theta`` edges of a common ancestor.  A value
missing from the ontology only matches itself literally, which is what
makes plain FDs a special case.  With support below 1.0 the check instead
sums, per class, the best single interpretation's tuple coverage.

Pruning toggles (candidate-set reuse, superkey fast path, uniform-value
fast path) never change the discovered set, only the work counters.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .inference import INHERITANCE, SYNONYM, TRADITIONAL, Ofd, OfdSet
from .ontology import Ontology
from .relation import Partition, RelationInstance, partition_empty, partition_product, partition_single, strip

# membership key marking "this exact string, no ontology backing"
_LITERAL = "\x00literal"

KindKey = tuple[str, int]


@dataclass
class DiscoveryConfig:
    kinds: tuple[KindKey, ...] = ((SYNONYM, 0),)
    kappa: float = 1.0
    opt2: bool = True
    opt3: bool = True
    opt4: bool = True
    max_level: int | None = None
    exclude: tuple[str, ...] = ()
    threads: int = 1

    def __post_init__(self):
        if not 0 < self.kappa <= 1:
            raise ValueError("kappa must lie in (0, 1]")
        for kind, theta in self.kinds:
            if kind not in (SYNONYM, INHERITANCE, TRADITIONAL):
                raise ValueError(f"unknown kind {kind!r}")
            if theta < 0:
                raise ValueError("theta must be non-negative")


@dataclass
class DiscoveryStats:
    candidates_generated: int = 0
    candidates_verified: int = 0
    pruned: dict[str, int] = field(default_factory=lambda: {"opt2": 0, "opt3": 0})
    ontology_lookups: int = 0
    lookups_by_candidate: dict[str, int] = field(default_factory=dict)
    ofds_per_level: dict[int, int] = field(default_factory=dict)
    candidates_per_level: dict[int, int] = field(default_factory=dict)
    time_per_level: dict[int, float] = field(default_factory=dict)
    max_senses_per_value: int = 0
    total_time: float = 0.0

    def check(self) -> None:
        pruned = sum(self.pruned.values())
        assert self.candidates_generated == self.candidates_verified + pruned

    def to_doc(self) -> dict:
        return {
            "candidates_generated": self.candidates_generated,
            "candidates_verified": self.candidates_verified,
            "pruned": dict(self.pruned),
            "ontology_lookups": self.ontology_lookups,
            "lookups_by_candidate": dict(self.lookups_by_candidate),
            "ofds_per_level": {str(k): v for k, v in self.ofds_per_level.items()},
            "candidates_per_level": {str(k): v for k, v in self.candidates_per_level.items()},
            "time_per_level": {str(k): v for k, v in self.time_per_level.items()},
            "max_senses_per_value": self.max_senses_per_value,
            "total_time": self.total_time,
        }


class Verifier:
    """Kind-aware candidate verification with memoized ontology access."""

    def __init__(self, inst: RelationInstance, onto: Ontology, cfg: DiscoveryConfig):
        self.inst = inst
        self.onto = onto
        self.cfg = cfg
        self._columns: dict[str, list[str]] = {}
        # per (kind, theta, attr): value -> frozenset of interpretation keys
        self._keysets: dict[tuple, dict[str, frozenset]] = {}
        self.max_senses_seen = 0

    def column(self, attr: str) -> list[str]:
        col = self._columns.get(attr)
        if col is None:
            col = self.inst.column(attr)
            self._columns[attr] = col
        return col

    def _keyset(self, kind: KindKey, attr: str, value: str) -> frozenset:
        cache = self._keysets.setdefault((kind, attr), {})
        keys = cache.get(value)
        if keys is None:
            kind_name, theta = kind
            if kind_name == TRADITIONAL:
                keys = frozenset({(_LITERAL, value)})
            elif kind_name == SYNONYM:
                keys = frozenset(self.onto.memberships(value)) | {(_LITERAL, value)}
            else:
                acc = set()
                for cid, sid in self.onto.memberships(value):
                    for anc in self.onto.ancestors_within(cid, theta):
                        acc.add((sid, anc))
                acc.add((_LITERAL, value))
                keys = frozenset(acc)
            senses = len({k[1] for k in keys if k[0] != _LITERAL}) if kind_name == SYNONYM else 0
            self.max_senses_seen = max(self.max_senses_seen, senses)
            cache[value] = keys
        return keys

    def verify(
        self, kind: KindKey, part: Partition, attr: str, kappa: float
    ) -> tuple[bool, int]:
        """Check (attrs of part) -> attr; returns (holds, ontology lookups)."""
        col = self.column(attr)
        lookups = 0
        n = self.inst.size
        if kappa >= 1.0:
            for cls in part.classes:
                values = {col[tid] for tid in cls}
                if len(values) == 1 and self.cfg.opt4:
                    continue  # uniform class satisfies any kind, no lookups
                common = None
                for value in values:
                    lookups += 1
                    keys = self._keyset(kind, attr, value)
                    common = keys if common is None else common & keys
                    if not common:
                        return False, lookups
            return True, lookups
        covered = 0
        stripped_total = 0
        for cls in part.classes:
            stripped_total += len(cls)
            counts: dict[str, int] = {}
            for tid in cls:
                counts[col[tid]] = counts.get(col[tid], 0) + 1
            if len(counts) == 1 and self.cfg.opt4:
                covered += len(cls)
                continue
            key_mass: dict[tuple, int] = {}
            for value, mass in counts.items():
                lookups += 1
                for key in self._keyset(kind, attr, value):
                    key_mass[key] = key_mass.get(key, 0) + mass
            covered += max(key_mass.values(), default=0)
        # singleton classes removed by stripping always count as satisfied
        covered += n - stripped_total
        return covered >= kappa * n, lookups


def check_synonym(
    part: Partition,
    attr: str,
    inst: RelationInstance,
    onto: Ontology,
    kappa: float = 1.0,
) -> bool:
    """Does (attrs of part) ->syn attr hold with the given support?"""
    verifier = Verifier(inst, onto, DiscoveryConfig(kinds=((SYNONYM, 0),)))
    holds, _ = verifier.verify((SYNONYM, 0), part, attr, kappa)
    return holds


def check_inheritance(
    part: Partition,
    attr: str,
    inst: RelationInstance,
    onto: Ontology,
    theta: int,
    kappa: float = 1.0,
) -> bool:
    """Does (attrs of part) ->inh(theta) attr hold with the given support?"""
    verifier = Verifier(inst, onto, DiscoveryConfig(kinds=((INHERITANCE, theta),)))
    holds, _ = verifier.verify((INHERITANCE, theta), part, attr, kappa)
    return holds


def _candidate_label(antecedent: frozenset[str], attr: str, kind: KindKey) -> str:
    kind_name, theta = kind
    tag = f"inh:{theta}" if kind_name == INHERITANCE else kind_name
    return f"{','.join(sorted(antecedent))}->{attr} {tag}"


def calculate_next_level(level: list[frozenset[str]]) -> list[frozenset[str]]:
    """Join same-prefix pairs, keeping sets whose every subset is present."""
    present = set(level)
    blocks: dict[tuple[str, ...], list[str]] = {}
    for attrs in level:
        ordered = tuple(sorted(attrs))
        blocks.setdefault(ordered[:-1], []).append(ordered[-1])
    nxt = []
    for prefix, lasts in sorted(blocks.items()):
        lasts.sort()
        for i in range(len(lasts)):
            for j in range(i + 1, len(lasts)):
                cand = frozenset(prefix) | {lasts[i], lasts[j]}
                if all(cand - {a} in present for a in cand):
                    nxt.append(cand)
    return sorted(nxt, key=lambda s: tuple(sorted(s)))


def discover_ofds(
    inst: RelationInstance, onto: Ontology, cfg: DiscoveryConfig
) -> tuple[OfdSet, DiscoveryStats]:
    """Lattice traversal returning every minimal dependency per requested kind."""
    if inst.size == 0:
        raise ValueError("cannot discover dependencies on an empty instance")
    start = time.perf_counter()
    attrs = [a for a in inst.attribute_names if a not in set(cfg.exclude)]
    if not attrs:
        raise ValueError("all attributes excluded")
    universe = frozenset(attrs)
    max_level = cfg.max_level if cfg.max_level is not None else len(attrs)

    stats = DiscoveryStats()
    verifier = Verifier(inst, onto, cfg)

    # stripped partitions, kept for the previous and current level only
    parts: dict[frozenset[str], Partition] = {frozenset(): strip(partition_empty(inst))}
    for a in attrs:
        parts[frozenset({a})] = strip(partition_single(inst, a))

    cands: dict[KindKey, dict[frozenset[str], frozenset[str]]] = {
        kind: {frozenset(): universe} for kind in cfg.kinds
    }
    sigma: dict[KindKey, list[Ofd]] = {kind: [] for kind in cfg.kinds}

    def verify_candidate(kind: KindKey, antecedent: frozenset[str], attr: str):
        part = parts[antecedent]
        if cfg.opt3 and part.is_superkey():
            # no class of size >= 2 can exist, so the dependency holds
            return True, 0, True
        holds, lookups = verifier.verify(kind, part, attr, cfg.kappa)
        return holds, lookups, False

    level = [frozenset({a}) for a in sorted(attrs)]
    l = 1
    pool = ThreadPoolExecutor(cfg.threads) if cfg.threads > 1 else None
    try:
        while level and l <= max_level:
            t0 = time.perf_counter()
            found_here = 0

            for kind in cfg.kinds:
                kind_cands = cands[kind]
                for attrs_x in level:
                    inter = None
                    for a in attrs_x:
                        sub = kind_cands.get(attrs_x - {a}, frozenset())
                        inter = sub if inter is None else inter & sub
                    kind_cands[attrs_x] = inter if inter is not None else frozenset()

            # gather, then verify (optionally in parallel), then commit in order
            jobs: list[tuple[KindKey, frozenset[str], str]] = []
            for attrs_x in level:
                for kind in cfg.kinds:
                    if cfg.opt2:
                        candidate_attrs = sorted(attrs_x & cands[kind][attrs_x])
                    else:
                        candidate_attrs = sorted(attrs_x)
                    for a in candidate_attrs:
                        stats.candidates_generated += 1
                        antecedent = attrs_x - {a}
                        if not cfg.opt2:
                            emitted = sigma[kind]
                            if any(
                                o.single_consequent == a and o.antecedent <= antecedent
                                for o in emitted
                            ):
                                stats.pruned["opt2"] += 1
                                continue
                        jobs.append((kind, antecedent, a))
                    if cfg.opt2:
                        skipped = len(attrs_x) - len(candidate_attrs)
                        stats.candidates_generated += skipped
                        stats.pruned["opt2"] += skipped

            if pool is not None:
                results = list(pool.map(lambda j: verify_candidate(*j), jobs))
            else:
                results = [verify_candidate(*j) for j in jobs]

            for (kind, antecedent, a), (holds, lookups, fastpath) in zip(jobs, results):
                label = _candidate_label(antecedent, a, kind)
                stats.lookups_by_candidate[label] = lookups
                stats.ontology_lookups += lookups
                if fastpath:
                    stats.pruned["opt3"] += 1
                else:
                    stats.candidates_verified += 1
                if holds:
                    kind_name, theta = kind
                    sigma[kind].append(
                        Ofd(antecedent, frozenset({a}), kind_name, theta, cfg.kappa)
                    )
                    found_here += 1
                    if cfg.opt2:
                        node = antecedent | {a}
                        cands[kind][node] = cands[kind][node] - {a}

            stats.ofds_per_level[l] = found_here
            stats.candidates_per_level[l] = len(jobs)

            nxt = calculate_next_level(level)
            for attrs_x in nxt:
                ordered = sorted(attrs_x)
                left = attrs_x - {ordered[-1]}
                right = attrs_x - {ordered[-2]}
                parts[attrs_x] = partition_product(parts[left], parts[right])
            # size-(l-1) partitions served their last antecedent checks
            for attrs_x in list(parts):
                if len(attrs_x) < l:
                    del parts[attrs_x]
            stats.time_per_level[l] = time.perf_counter() - t0
            level = nxt
            l += 1
    finally:
        if pool is not None:
            pool.shutdown()

    ordered: list[Ofd] = []
    for kind in cfg.kinds:
        ordered.extend(sigma[kind])
    ordered.sort(
        key=lambda o: (
            len(o.antecedent),
            tuple(sorted(o.antecedent)),
            o.single_consequent,
            o.kind,
            o.theta,
        )
    )
    stats.max_senses_per_value = verifier.max_senses_seen
    stats.total_time = time.perf_counter() - start
    stats.check()
    return OfdSet(ordered), stats
