"""Tree-shaped ontology store with per-sense synonym membership.

An ontology is a forest of concept classes.  Each class carries, per
sense, an ordered list of synonym values; the same class may be valid
under several senses with different value lists (e.g. a drug family whose
members differ between two regulatory authorities).  Two values are
semantically equivalent under a sense iff some class lists both of them
under that sense.

File format (JSON)::

    {
      "senses": ["FDA", {"id": "MoH", "name": "Ministry of Health"}],
      "classes": [
        {"id": "diltiazem", "parent": "drug_root",
         "synonyms": {"FDA": ["cartia", "tiazac"], "MoH": ["cartia", "ASA"]}},
        {"id": "country_us", "synonyms": ["USA", "America"], "senses": ["geo"]}
      ]
    }

``synonyms`` is either a sense->values mapping or a flat list combined
with ``senses`` (default sense ``"default"``).  ``parent`` is optional;
cycles and dangling parents are rejected on load.  The first value listed
for a (class, sense) pair is that pair's canonical value.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)

WITHIN = "within"
EXCEEDS = "exceeds"
NO_COMMON_ANCESTOR = "no_common_ancestor"

DEFAULT_SENSE = "default"


class OntologyError(ValueError):
    """Raised for malformed ontology files (cycles, dangling parents)."""


@dataclass
class Sense:
    id: str
    name: str = ""


@dataclass
class ConceptClass:
    id: str
    parent: str | None = None
    # sense id -> ordered synonym list; order fixes the canonical value
    synonyms_by_sense: dict[str, list[str]] = field(default_factory=dict)

    def all_synonyms(self) -> set[str]:
        out: set[str] = set()
        for values in self.synonyms_by_sense.values():
            out.update(values)
        return out


@dataclass(frozen=True)
class OntologyDelta:
    """Insertion log of an ontology repair: distinct new (value, sense, class)."""

    insertions: tuple[tuple[str, str, str], ...]

    @property
    def dist(self) -> int:
        return len(self.insertions)


class Ontology:
    def __init__(
        self, classes: list[ConceptClass] | None = None, senses: list[Sense] | None = None
    ):
        self.classes: dict[str, ConceptClass] = {}
        self.senses: dict[str, Sense] = {}
        self._children: dict[str, list[str]] = {}
        # value -> set of (class_id, sense_id) memberships
        self.value_index: dict[str, set[tuple[str, str]]] = {}
        self._insertions: list[tuple[str, str, str]] = []
        for sense in senses or []:
            self._register_sense(sense)
        for cls in classes or []:
            self._add_class(cls)
        self._validate()

    # -- construction -----------------------------------------------------

    def _register_sense(self, sense: Sense) -> None:
        if sense.id not in self.senses:
            self.senses[sense.id] = sense

    def _add_class(self, cls: ConceptClass) -> None:
        if cls.id in self.classes:
            raise OntologyError(f"duplicate class id {cls.id!r}")
        if not cls.synonyms_by_sense or not any(cls.synonyms_by_sense.values()):
            raise OntologyError(f"class {cls.id!r} has an empty synonym set")
        self.classes[cls.id] = cls
        self._children.setdefault(cls.id, [])
        for sense_id, values in cls.synonyms_by_sense.items():
            self._register_sense(Sense(sense_id))
            for value in values:
                self.value_index.setdefault(value, set()).add((cls.id, sense_id))

    def _validate(self) -> None:
        for cls in self.classes.values():
            if cls.parent is not None:
                if cls.parent not in self.classes:
                    raise OntologyError(
                        f"class {cls.id!r} names missing parent {cls.parent!r}"
                    )
                self._children[cls.parent].append(cls.id)
        # forest check: walking parents from any node must terminate
        for cls in self.classes.values():
            seen = set()
            cur: str | None = cls.id
            while cur is not None:
                if cur in seen:
                    raise OntologyError(f"cycle through class {cur!r}")
                seen.add(cur)
                cur = self.classes[cur].parent

    def clone(self) -> "Ontology":
        copy = Ontology()
        copy.senses = {sid: Sense(s.id, s.name) for sid, s in self.senses.items()}
        copy.classes = {
            cid: ConceptClass(
                c.id, c.parent, {s: list(v) for s, v in c.synonyms_by_sense.items()}
            )
            for cid, c in self.classes.items()
        }
        copy._children = {cid: list(ch) for cid, ch in self._children.items()}
        copy.value_index = {v: set(m) for v, m in self.value_index.items()}
        copy._insertions = list(self._insertions)
        return copy

    # -- lookups -----------------------------------------------------------

    def names(self, value: str) -> set[str]:
        """All class ids whose synonym set contains the value, any sense."""
        return {cid for cid, _ in self.value_index.get(value, ())}

    def memberships(self, value: str) -> frozenset[tuple[str, str]]:
        """All (class id, sense id) pairs under which the value is listed."""
        return frozenset(self.value_index.get(value, ()))

    def sset(self, value: str) -> set[str]:
        """Senses containing the value anywhere (the sense index)."""
        return {sid for _, sid in self.value_index.get(value, ())}

    def synonyms(self, class_id: str, sense: str | None = None) -> set[str]:
        cls = self._class(class_id)
        if sense is None:
            return cls.all_synonyms()
        return set(cls.synonyms_by_sense.get(sense, ()))

    def descendants(self, class_id: str) -> set[str]:
        """Synonyms of the class and of every is-a descendant."""
        self._class(class_id)
        out: set[str] = set()
        stack = [class_id]
        while stack:
            cid = stack.pop()
            out |= self.classes[cid].all_synonyms()
            stack.extend(self._children[cid])
        return out

    def sense_values(self, sense_id: str) -> set[str]:
        out: set[str] = set()
        for cls in self.classes.values():
            out.update(cls.synonyms_by_sense.get(sense_id, ()))
        return out

    def canonical(self, class_id: str, sense_id: str) -> str | None:
        values = self._class(class_id).synonyms_by_sense.get(sense_id)
        return values[0] if values else None

    def classes_under_sense(self, value: str, sense_id: str) -> set[str]:
        return {
            cid for cid, sid in self.value_index.get(value, ()) if sid == sense_id
        }

    def _class(self, class_id: str) -> ConceptClass:
        try:
            return self.classes[class_id]
        except KeyError:
            raise OntologyError(f"unknown class {class_id!r}") from None

    # -- tree geometry -----------------------------------------------------

    def ancestors_within(self, class_id: str, theta: int) -> dict[str, int]:
        """Map of ancestor class id -> edge distance, for distance <= theta."""
        out: dict[str, int] = {}
        cur: str | None = class_id
        dist = 0
        while cur is not None and dist <= theta:
            out[cur] = dist
            cur = self.classes[cur].parent
            dist += 1
        return out

    def lca_distance(self, values: set[str], theta: int) -> str:
        """Decide whether the values share a near common ancestor.

        Returns WITHIN if under some single sense every value belongs to a
        class within ``theta`` edges of a common ancestor, EXCEEDS if common
        ancestors exist but only farther away, NO_COMMON_ANCESTOR otherwise.
        A value absent from the ontology yields NO_COMMON_ANCESTOR: that is
        a repair signal, not a fault.
        """
        if theta < 0:
            raise ValueError("theta must be non-negative")
        if not values:
            return WITHIN
        best = NO_COMMON_ANCESTOR
        max_depth = max((self._depth(cid) for cid in self.classes), default=0)
        for sense_id in self.senses:
            per_value = []
            for value in values:
                cids = self.classes_under_sense(value, sense_id)
                if not cids:
                    per_value = None
                    break
                per_value.append(cids)
            if per_value is None:
                continue
            # common ancestors at any distance, tracking the minimal radius
            common: dict[str, int] | None = None
            for cids in per_value:
                reach: dict[str, int] = {}
                for cid in cids:
                    for anc, dist in self.ancestors_within(cid, max_depth).items():
                        if anc not in reach or dist < reach[anc]:
                            reach[anc] = dist
                if common is None:
                    common = reach
                else:
                    common = {
                        anc: max(radius, reach[anc])
                        for anc, radius in common.items()
                        if anc in reach
                    }
            if not common:
                continue
            radius = min(common.values())
            if radius <= theta:
                return WITHIN
            best = EXCEEDS
        return best

    def _depth(self, class_id: str) -> int:
        depth = 0
        cur = self.classes[class_id].parent
        while cur is not None:
            depth += 1
            cur = self.classes[cur].parent
        return depth

    # -- repair primitive ---------------------------------------------------

    def add_value(self, value: str, sense_id: str, class_id: str) -> OntologyDelta:
        """Insert a value into a class under a sense.

        Re-adding an existing synonym is a no-op (distance unchanged).
        Existing nodes are never moved or removed.  Returns the cumulative
        insertion delta since load.
        """
        cls = self._class(class_id)
        self._register_sense(Sense(sense_id))
        values = cls.synonyms_by_sense.setdefault(sense_id, [])
        if value in values:
            logger.warning(
                "value %r already in class %r under sense %r; insertion ignored",
                value, class_id, sense_id,
            )
        else:
            values.append(value)
            self.value_index.setdefault(value, set()).add((class_id, sense_id))
            self._insertions.append((value, sense_id, class_id))
        return self.delta()

    def delta(self) -> OntologyDelta:
        return OntologyDelta(tuple(self._insertions))

    def remove_value(self, value: str, sense_id: str | None = None) -> list[tuple[str, str]]:
        """Drop a value from classes (used by the error-injection harness).

        Returns the removed (class, sense) memberships.  Class/sense entries
        that would become empty keep the value (non-empty synonym sets are an
        invariant), so the caller must pick eligible values.
        """
        removed = []
        for cid, sid in sorted(self.memberships(value)):
            if sense_id is not None and sid != sense_id:
                continue
            values = self.classes[cid].synonyms_by_sense[sid]
            if len(values) <= 1:
                continue
            values.remove(value)
            self.value_index[value].discard((cid, sid))
            removed.append((cid, sid))
        if value in self.value_index and not self.value_index[value]:
            del self.value_index[value]
        return removed

    # -- serialization -------------------------------------------------------

    def to_doc(self) -> dict:
        return {
            "senses": [
                {"id": s.id, "name": s.name} if s.name else s.id
                for s in self.senses.values()
            ],
            "classes": [
                {
                    "id": c.id,
                    **({"parent": c.parent} if c.parent else {}),
                    "synonyms": {s: list(v) for s, v in c.synonyms_by_sense.items()},
                }
                for c in self.classes.values()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), indent=2)


def ontology_from_doc(doc: dict) -> Ontology:
    senses = []
    for entry in doc.get("senses", []):
        if isinstance(entry, str):
            senses.append(Sense(entry))
        else:
            senses.append(Sense(entry["id"], entry.get("name", "")))
    classes = []
    for entry in doc.get("classes", []):
        syn = entry.get("synonyms", [])
        if isinstance(syn, dict):
            by_sense = {sid: [str(v) for v in vals] for sid, vals in syn.items()}
        else:
            tags = entry.get("senses") or [DEFAULT_SENSE]
            by_sense = {sid: [str(v) for v in syn] for sid in tags}
        classes.append(ConceptClass(entry["id"], entry.get("parent"), by_sense))
    return Ontology(classes, senses)


def load_ontology_text(text: str) -> Ontology:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OntologyError(f"invalid ontology JSON: {exc}") from exc
    return ontology_from_doc(doc)


def load_ontology(path: str) -> Ontology:
    with open(path, "r", encoding="utf-8") as fh:
        return load_ontology_text(fh.read())
