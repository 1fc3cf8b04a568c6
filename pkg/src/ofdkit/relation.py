"""Relational instances and the equivalence-class partition algebra.

Every verification and repair operation in this package works on
partitions: groupings of tuple ids by equal antecedent values.  Instances
and partitions are immutable after construction and safe to share across
workers; cell updates return a fresh instance.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass


class IngestionError(ValueError):
    """Raised for malformed CSV input (ragged rows, empty files)."""


class CellUpdateError(ValueError):
    """Raised when two updates target the same cell with different values."""


@dataclass(frozen=True)
class Attribute:
    """A named column at a fixed ordinal position in the schema."""

    index: int
    name: str


class RelationInstance:
    """An immutable table of string cells with stable 0-based tuple ids."""

    __slots__ = ("schema", "rows", "_by_name")

    def __init__(self, schema: tuple[Attribute, ...], rows: tuple[tuple[str, ...], ...]):
        names = [a.name for a in schema]
        if len(set(names)) != len(names):
            raise IngestionError(f"duplicate attribute names in schema: {names}")
        for i, row in enumerate(rows):
            if len(row) != len(schema):
                raise IngestionError(
                    f"row {i} has {len(row)} cells, expected {len(schema)}"
                )
        self.schema = schema
        self.rows = rows
        self._by_name = {a.name: a for a in schema}

    @property
    def size(self) -> int:
        return len(self.rows)

    @property
    def arity(self) -> int:
        return len(self.schema)

    @property
    def attribute_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.schema)

    def attribute(self, name: str) -> Attribute:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown attribute {name!r}") from None

    def column(self, name: str) -> list[str]:
        idx = self.attribute(name).index
        return [row[idx] for row in self.rows]

    def cell(self, tuple_id: int, name: str) -> str:
        return self.rows[tuple_id][self.attribute(name).index]

    def to_csv(self) -> str:
        import io

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.attribute_names)
        writer.writerows(self.rows)
        return buf.getvalue()

    def __repr__(self) -> str:  # pragma: no cover
        return f"RelationInstance(arity={self.arity}, size={self.size})"


def instance_from_rows(header: list[str], rows: list[list[str]]) -> RelationInstance:
    schema = tuple(Attribute(i, name) for i, name in enumerate(header))
    return RelationInstance(schema, tuple(tuple(r) for r in rows))


def load_csv_text(text: str, has_header: bool = True) -> RelationInstance:
    """Parse RFC-4180 CSV text into an instance.

    Cells are whitespace-trimmed but otherwise opaque; empty cells stay
    empty strings.  Without a header, columns are named col0..colK.
    """
    reader = csv.reader(text.splitlines())
    raw = [row for row in reader]
    if not raw:
        raise IngestionError("empty CSV input")
    if has_header:
        header = [c.strip() for c in raw[0]]
        body = raw[1:]
    else:
        header = [f"col{i}" for i in range(len(raw[0]))]
        body = raw
    if not body:
        raise IngestionError("CSV has a header but no data rows")
    width = len(header)
    rows = []
    for lineno, row in enumerate(body, start=2 if has_header else 1):
        if len(row) != width:
            raise IngestionError(
                f"ragged row at line {lineno}: {len(row)} cells, expected {width}"
            )
        rows.append([c.strip() for c in row])
    return instance_from_rows(header, rows)


def load_csv(path: str, has_header: bool = True) -> RelationInstance:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return load_csv_text(fh.read(), has_header=has_header)


class Partition:
    """Equivalence classes of tuple ids agreeing on an attribute set.

    Classes are stored as sorted tuple-id tuples, ordered by their smallest
    member (the representative).
    """

    __slots__ = ("attribute_set", "classes", "n_tuples", "stripped")

    def __init__(
        self,
        attribute_set: frozenset[str],
        classes: list[tuple[int, ...]],
        n_tuples: int,
        stripped: bool = False,
    ):
        self.attribute_set = attribute_set
        self.classes = sorted((tuple(sorted(c)) for c in classes), key=lambda c: c[0])
        self.n_tuples = n_tuples
        self.stripped = stripped

    @property
    def representatives(self) -> list[int]:
        return [c[0] for c in self.classes]

    def class_of_sizes(self) -> list[int]:
        return [len(c) for c in self.classes]

    def is_superkey(self) -> bool:
        """True iff no class has two tuples (stripped partition is empty)."""
        if self.stripped:
            return not self.classes
        return all(len(c) == 1 for c in self.classes)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Partition)
            and self.attribute_set == other.attribute_set
            and self.classes == other.classes
        )

    def __repr__(self) -> str:  # pragma: no cover
        kind = "StrippedPartition" if self.stripped else "Partition"
        return f"{kind}({sorted(self.attribute_set)}, {len(self.classes)} classes)"


def partition_single(inst: RelationInstance, attr: str) -> Partition:
    groups: dict[str, list[int]] = {}
    for tid, value in enumerate(inst.column(attr)):
        groups.setdefault(value, []).append(tid)
    return Partition(frozenset({attr}), [tuple(g) for g in groups.values()], inst.size)


def partition_empty(inst: RelationInstance) -> Partition:
    """Partition over the empty attribute set: one class with every tuple."""
    classes = [tuple(range(inst.size))] if inst.size else []
    return Partition(frozenset(), classes, inst.size)


def partition_product(p: Partition, q: Partition) -> Partition:
    """Refine p by q: tuples stay together iff co-classed in both.

    Works for stripped inputs too: tuples missing from a stripped partition
    are implicit singletons, and singleton intersections are dropped from a
    stripped result.  Linear in the number of tuples involved.
    """
    if p.n_tuples != q.n_tuples:
        raise ValueError("partitions over different instances")
    probe: dict[int, int] = {}
    for ci, cls in enumerate(p.classes):
        for tid in cls:
            probe[tid] = ci
    buckets: dict[tuple[int, int], list[int]] = {}
    for cj, cls in enumerate(q.classes):
        for tid in cls:
            ci = probe.get(tid)
            if ci is not None:
                buckets.setdefault((ci, cj), []).append(tid)
    stripped = p.stripped or q.stripped
    classes = [tuple(b) for b in buckets.values() if not stripped or len(b) >= 2]
    if not stripped:
        # tuples absent from the buckets (possible only with stripped inputs)
        # would be singletons; for full inputs every tuple is present.
        seen = {tid for b in buckets.values() for tid in b}
        for tid in range(p.n_tuples):
            if tid not in seen:
                classes.append((tid,))
    return Partition(
        p.attribute_set | q.attribute_set, classes, p.n_tuples, stripped=stripped
    )


def strip(p: Partition) -> Partition:
    """Drop singleton classes; they cannot violate any dependency."""
    return Partition(
        p.attribute_set,
        [c for c in p.classes if len(c) >= 2],
        p.n_tuples,
        stripped=True,
    )


def partition_of(inst: RelationInstance, attrs: frozenset[str]) -> Partition:
    """Full partition over an arbitrary attribute set (product of singles)."""
    if not attrs:
        return partition_empty(inst)
    names = sorted(attrs)
    part = partition_single(inst, names[0])
    for name in names[1:]:
        part = partition_product(part, partition_single(inst, name))
    return part


def apply_cell_updates(
    inst: RelationInstance, updates: list[tuple[int, str, str]]
) -> tuple[RelationInstance, int]:
    """Apply (tuple_id, attribute, new_value) updates.

    Returns the new instance together with the number of cells whose final
    value differs from the corresponding cell of ``inst``.  Duplicate
    updates to one cell must agree, otherwise CellUpdateError is raised.
    """
    chosen: dict[tuple[int, int], str] = {}
    for tid, attr, value in updates:
        if not 0 <= tid < inst.size:
            raise CellUpdateError(f"tuple id {tid} out of range")
        idx = inst.attribute(attr).index
        key = (tid, idx)
        if key in chosen and chosen[key] != value:
            raise CellUpdateError(
                f"conflicting updates for tuple {tid}, attribute {attr!r}"
            )
        chosen[key] = value
    rows = [list(row) for row in inst.rows]
    changed = 0
    for (tid, idx), value in chosen.items():
        if rows[tid][idx] != value:
            changed += 1
            rows[tid][idx] = value
    return RelationInstance(inst.schema, tuple(tuple(r) for r in rows)), changed


def instance_distance(a: RelationInstance, b: RelationInstance) -> int:
    """Number of cells on which two same-schema instances differ."""
    if a.attribute_names != b.attribute_names or a.size != b.size:
        raise ValueError("instances are not comparable")
    return sum(
        1
        for ra, rb in zip(a.rows, b.rows)
        for ca, cb in zip(ra, rb)
        if ca != cb
    )
