"""Dependency objects, the axiom-based inference engine, and minimal covers.

The axiom system for ontology FDs has Identity, Decomposition, and
Composition but (unlike classical FDs) no Transitivity: agreeing on a
derived attribute does not mean agreeing syntactically, so a derived
consequent can never feed another antecedent.  Closure is therefore a
single scan: X+ is X plus the consequents of every dependency whose
antecedent is contained in X, and each dependency fires at most once.
"""

from __future__ import annotations

from dataclasses import dataclass

SYNONYM = "syn"
INHERITANCE = "inh"
TRADITIONAL = "fd"


class OfdParseError(ValueError):
    pass


class KindMismatchError(ValueError):
    """Raised when one derivation mixes dependency kinds."""


@dataclass(frozen=True)
class Ofd:
    """A dependency X -> Y of one kind, optionally approximate.

    ``consequent`` may hold several attributes; discovery and the minimal
    cover normalize to a single attribute.  ``theta`` is the inheritance
    distance bound (edge count), ``support`` the satisfied-tuple fraction
    (1.0 = exact).
    """

    antecedent: frozenset[str]
    consequent: frozenset[str]
    kind: str = SYNONYM
    theta: int = 0
    support: float = 1.0

    def __post_init__(self):
        if self.kind not in (SYNONYM, INHERITANCE, TRADITIONAL):
            raise ValueError(f"unknown dependency kind {self.kind!r}")
        if self.theta < 0:
            raise ValueError("theta must be non-negative")
        if not 0 < self.support <= 1:
            raise ValueError("support must lie in (0, 1]")

    @property
    def kind_key(self) -> tuple[str, int]:
        return (self.kind, self.theta if self.kind == INHERITANCE else 0)

    @property
    def is_normalized(self) -> bool:
        return len(self.consequent) == 1

    @property
    def single_consequent(self) -> str:
        (attr,) = self.consequent
        return attr

    def identity_key(self) -> tuple:
        return (self.antecedent, self.consequent, self.kind_key)

    def to_line(self) -> str:
        lhs = ",".join(sorted(self.antecedent))
        rhs = ",".join(sorted(self.consequent))
        kind = f"inh:{self.theta}" if self.kind == INHERITANCE else self.kind
        line = f"{lhs} -> {rhs} {kind}"
        if self.support != 1.0:
            line += f" support={self.support:g}"
        return line

    def __str__(self) -> str:  # pragma: no cover
        return self.to_line()


class OfdSet:
    """An ordered, duplicate-free list of dependencies."""

    def __init__(self, ofds: list[Ofd] | None = None):
        self.ofds: list[Ofd] = []
        seen = set()
        for ofd in ofds or []:
            key = ofd.identity_key()
            if key not in seen:
                seen.add(key)
                self.ofds.append(ofd)

    def __iter__(self):
        return iter(self.ofds)

    def __len__(self) -> int:
        return len(self.ofds)

    def __getitem__(self, i: int) -> Ofd:
        return self.ofds[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, OfdSet):
            return NotImplemented
        return {o.identity_key() for o in self} == {o.identity_key() for o in other}

    def to_lines(self) -> list[str]:
        return [ofd.to_line() for ofd in self.ofds]

    def to_text(self) -> str:
        return "\n".join(self.to_lines()) + ("\n" if self.ofds else "")

    def __repr__(self) -> str:  # pragma: no cover
        return f"OfdSet({self.to_lines()})"


def parse_ofd(line: str) -> Ofd:
    """Parse one ``X1,X2 -> A [syn|inh:t|fd] [support=k]`` line."""
    if "->" not in line:
        raise OfdParseError(f"cannot parse dependency line: {line!r}")
    lhs_text, _, rest = line.partition("->")
    lhs = frozenset(a.strip() for a in lhs_text.split(",") if a.strip())
    tokens = rest.split()
    if not tokens:
        raise OfdParseError(f"dependency without consequent: {line!r}")
    # the consequent may contain spaces around commas only; further
    # whitespace-separated tokens must be kind or support markers
    rhs_tokens = [tokens[0]]
    i = 1
    while i < len(tokens) and (
        rhs_tokens[-1].endswith(",") or tokens[i].startswith(",")
    ):
        rhs_tokens.append(tokens[i])
        i += 1
    tail = tokens[i:]
    rhs = frozenset(a.strip() for a in "".join(rhs_tokens).split(",") if a.strip())
    if not rhs:
        raise OfdParseError(f"dependency without consequent: {line!r}")
    kind, theta, support = SYNONYM, 0, 1.0
    for tok in tail:
        if tok in (SYNONYM, TRADITIONAL):
            kind = tok
        elif tok.startswith("inh:"):
            try:
                kind, theta = INHERITANCE, int(tok.split(":", 1)[1])
            except ValueError:
                raise OfdParseError(f"bad inheritance bound in {line!r}") from None
        elif tok.startswith("support="):
            try:
                support = float(tok.split("=", 1)[1])
            except ValueError:
                raise OfdParseError(f"bad support value in {line!r}") from None
        else:
            raise OfdParseError(f"unexpected token {tok!r} in {line!r}")
    return Ofd(lhs, rhs, kind, theta, support)


def parse_ofd_text(text: str) -> OfdSet:
    ofds = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        ofds.append(parse_ofd(line))
    return OfdSet(ofds)


def _require_uniform_kind(sigma: OfdSet, extra: Ofd | None = None) -> None:
    kinds = {ofd.kind_key for ofd in sigma}
    if extra is not None:
        kinds.add(extra.kind_key)
    if len(kinds) > 1:
        raise KindMismatchError(
            f"cannot mix dependency kinds in one derivation: {sorted(kinds)}"
        )


def closure(attrs: frozenset[str], sigma: OfdSet) -> frozenset[str]:
    """Attribute-set closure X+ under Identity/Decomposition/Composition.

    Each dependency is consumed at most once; an antecedent must be a
    subset of the original X (newly derived attributes never enable
    further dependencies, because Transitivity is unsound here).
    """
    _require_uniform_kind(sigma)
    result = set(attrs)
    for ofd in sigma:  # stable input order; result is order-independent
        if ofd.antecedent <= attrs:
            result |= ofd.consequent
    return frozenset(result)


def implies(sigma: OfdSet, phi: Ofd) -> bool:
    """True iff the axioms derive phi from sigma (consequent within X+)."""
    _require_uniform_kind(sigma, phi)
    return phi.consequent <= closure(phi.antecedent, sigma)


def minimal_cover(sigma: OfdSet) -> OfdSet:
    """Reduce to an equivalent set with single-attribute consequents,
    no removable antecedent attribute, and no removable dependency.

    Attribute removal scans attributes in sorted (schema) order, whole
    dependencies in input order; the output is one canonical minimal cover.
    """
    _require_uniform_kind(sigma)
    # 1. Decomposition: single-attribute consequents, deduplicated.
    split: list[Ofd] = []
    for ofd in sigma:
        for attr in sorted(ofd.consequent):
            split.append(
                Ofd(ofd.antecedent, frozenset({attr}), ofd.kind, ofd.theta, ofd.support)
            )
    work = OfdSet(split).ofds

    # 2. Remove extraneous antecedent attributes.
    reduced: list[Ofd] = []
    for i, ofd in enumerate(work):
        antecedent = set(ofd.antecedent)
        for attr in sorted(ofd.antecedent):
            trial = frozenset(antecedent - {attr})
            current = OfdSet(reduced + work[i:])
            if ofd.consequent <= closure(trial, current):
                antecedent.discard(attr)
        reduced.append(
            Ofd(frozenset(antecedent), ofd.consequent, ofd.kind, ofd.theta, ofd.support)
        )
    work = OfdSet(reduced).ofds

    # 3. Remove dependencies implied by the rest.
    kept: list[Ofd] = list(work)
    i = 0
    while i < len(kept):
        candidate = kept[i]
        rest = OfdSet(kept[:i] + kept[i + 1 :])
        if implies(rest, candidate):
            kept.pop(i)
        else:
            i += 1
    return OfdSet(kept)
