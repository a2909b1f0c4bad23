"""Core data model: relations, constraint formulas, assignments, abduction instances.

Variables are dense 1-based integers; an assignment is an int whose bit v-1
holds the value of variable v.  Literals are signed ints (+v / -v), and a
relation stores its tuples as sorted bit-encoded codes (coordinate i of a
tuple maps to bit i-1), so relation equality and set algebra are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

Assignment = int
Literal = int

SatDecider = Callable[["Formula"], bool]


class StructureError(ValueError):
    """Malformed relation, scope, or instance."""


class FragmentError(ValueError):
    """Instance is outside the fragment an algorithm or reduction expects."""


def encode_tuple(bits: Iterable[int]) -> int:
    code = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise StructureError(f"tuple entries must be 0/1, got {b!r}")
        code |= b << i
    return code


def decode_tuple(code: int, arity: int) -> tuple[int, ...]:
    return tuple((code >> i) & 1 for i in range(arity))


@dataclass(frozen=True)
class Relation:
    """A Boolean relation of fixed arity, given by an explicit tuple list."""

    arity: int
    codes: tuple[int, ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.arity < 0:
            raise StructureError("arity must be non-negative")
        canon = tuple(sorted(set(self.codes)))
        if canon != self.codes:
            object.__setattr__(self, "codes", canon)
        if self.codes and not (0 <= self.codes[0] and self.codes[-1] < (1 << self.arity)):
            raise StructureError("tuple code out of range for arity")
        object.__setattr__(self, "_codeset", frozenset(self.codes))

    @classmethod
    def from_tuples(cls, arity: int, tuples: Iterable[Iterable[int]], name: str | None = None) -> "Relation":
        codes = []
        for t in tuples:
            t = tuple(t)
            if len(t) != arity:
                raise StructureError(f"tuple {t} has length {len(t)}, expected {arity}")
            codes.append(encode_tuple(t))
        return cls(arity, tuple(sorted(set(codes))), name)

    def tuples(self) -> list[tuple[int, ...]]:
        return [decode_tuple(c, self.arity) for c in self.codes]

    def __contains__(self, code: int) -> bool:
        return code in self._codeset  # type: ignore[attr-defined]

    def __len__(self) -> int:
        return len(self.codes)

    @property
    def is_empty(self) -> bool:
        return not self.codes

    @property
    def is_trivial(self) -> bool:
        """Full relation {0,1}^k (imposes nothing)."""
        return len(self.codes) == (1 << self.arity)

    def renamed(self, name: str | None) -> "Relation":
        return Relation(self.arity, self.codes, name)


# The unary constants and their 0-ary cousins (the four constant relations).
BOT = Relation(1, (0,), "BOT")
TOP = Relation(1, (1,), "TOP")
FALSE0 = Relation(0, (), "F")
TRUE0 = Relation(0, (0,), "T")


@dataclass(frozen=True)
class Constraint:
    relation: Relation
    scope: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "scope", tuple(self.scope))
        if len(self.scope) != self.relation.arity:
            raise StructureError(
                f"scope length {len(self.scope)} != arity {self.relation.arity}")
        if any(v < 1 for v in self.scope):
            raise StructureError("scope variables must be >= 1")


@dataclass(frozen=True)
class Formula:
    """A conjunction of constraints over variables 1..num_vars."""

    num_vars: int
    constraints: tuple[Constraint, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.num_vars < 0:
            raise StructureError("num_vars must be non-negative")
        for con in self.constraints:
            if any(v > self.num_vars for v in con.scope):
                raise StructureError(
                    f"scope {con.scope} exceeds num_vars={self.num_vars}")

    def used_vars(self) -> frozenset[int]:
        out: set[int] = set()
        for con in self.constraints:
            out.update(con.scope)
        return frozenset(out)

    def relations(self) -> list[Relation]:
        seen: list[Relation] = []
        for con in self.constraints:
            if con.relation not in seen:
                seen.append(con.relation)
        return seen


def formula(num_vars: int, cons: Iterable[tuple[Relation, Iterable[int]]]) -> Formula:
    return Formula(num_vars, tuple(Constraint(r, tuple(s)) for r, s in cons))


def evaluate(phi: Formula, sigma: Assignment) -> bool:
    """True iff sigma (total over 1..num_vars) satisfies every constraint."""
    for con in phi.constraints:
        code = 0
        for i, v in enumerate(con.scope):
            code |= ((sigma >> (v - 1)) & 1) << i
        if code not in con.relation:
            return False
    return True


def assignment_from_values(values: Iterable[int]) -> Assignment:
    """Build an assignment from the values of variables 1,2,3,... in order."""
    return encode_tuple(values)


def assignment_get(sigma: Assignment, var: int) -> int:
    return (sigma >> (var - 1)) & 1


def satisfies_vars(sigma: Assignment, vs: Iterable[int]) -> bool:
    return all((sigma >> (v - 1)) & 1 for v in vs)


def literals_consistent(lits: Iterable[Literal]) -> bool:
    s = set(lits)
    return all(-l not in s for l in s)


@dataclass(frozen=True)
class AbductionInstance:
    kb: Formula
    hypotheses: frozenset[int]
    manifestations: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "hypotheses", frozenset(self.hypotheses))
        object.__setattr__(self, "manifestations", frozenset(self.manifestations))
        for v in self.hypotheses | self.manifestations:
            if not (1 <= v <= self.kb.num_vars):
                raise StructureError(f"H/M variable {v} outside 1..{self.kb.num_vars}")

    @property
    def num_vars(self) -> int:
        return self.kb.num_vars

    def is_normalized(self) -> bool:
        """H, M inside var(KB) and disjoint (the shape the reductions expect)."""
        used = self.kb.used_vars()
        return (self.hypotheses <= used and self.manifestations <= used
                and not (self.hypotheses & self.manifestations))


@dataclass(frozen=True)
class Explanation:
    literals: frozenset[Literal]
    kind: str  # "full" | "positive" | "general"

    def __post_init__(self) -> None:
        object.__setattr__(self, "literals", frozenset(self.literals))
        if not literals_consistent(self.literals):
            raise StructureError("explanation literals are inconsistent")


def explanation_kind(lits: Iterable[Literal], hypotheses: frozenset[int]) -> str:
    lits = frozenset(lits)
    if all(l > 0 for l in lits):
        return "positive"
    if {abs(l) for l in lits} == set(hypotheses):
        return "full"
    return "general"


def make_explanation(lits: Iterable[Literal], hypotheses: frozenset[int]) -> Explanation:
    lits = frozenset(lits)
    return Explanation(lits, explanation_kind(lits, hypotheses))


def conjoin_literals(phi: Formula, lits: Iterable[Literal]) -> Formula:
    """KB ∧ E realized by forcing each literal with a TOP/BOT unary constraint."""
    extra = []
    for l in lits:
        v = abs(l)
        if not (1 <= v <= phi.num_vars):
            raise StructureError(f"literal {l} outside variable range")
        extra.append(Constraint(TOP if l > 0 else BOT, (v,)))
    return Formula(phi.num_vars, phi.constraints + tuple(extra))


def is_explanation(inst: AbductionInstance, lits: Iterable[Literal],
                   sat: SatDecider | None = None) -> bool:
    """Check the two defining conditions: KB∧E satisfiable and KB∧E entails M.

    Entailment is decomposed into one unsatisfiability check per manifestation
    (KB ∧ E ∧ ¬m must have no model).
    """
    lits = frozenset(lits)
    for l in lits:
        if abs(l) not in inst.hypotheses:
            raise StructureError(f"literal {l} not over the hypothesis set")
    if sat is None:
        from .satenum import decide as sat  # local import to avoid a cycle
    if not literals_consistent(lits):
        return False
    base = conjoin_literals(inst.kb, lits)
    if not sat(base):
        return False
    for m in inst.manifestations:
        if sat(Formula(base.num_vars, base.constraints + (Constraint(BOT, (m,)),))):
            return False
    return True


TRIVIALLY_NO = "trivially-no"
TRIVIALLY_REDUCED = "trivially-reduced"
UNCHANGED = "unchanged"


@dataclass(frozen=True)
class PreprocessResult:
    instance: AbductionInstance
    verdict: str


def preprocess(inst: AbductionInstance) -> PreprocessResult:
    """Normalize H and M against var(KB) without changing the answer.

    Rules (variables never increase):
      - m in M outside var(KB), m not in H: nothing can entail m -> trivially-no;
      - m in M ∩ H outside var(KB): self-explained, drop from both M and H;
      - h in H outside var(KB) (and not in M): irrelevant, drop from H.

    Overlaps H ∩ M *inside* var(KB) are kept: dropping such an m can flip the
    answer (m may be inconsistent with KB), so no sound local rule exists.
    Consumers that require disjointness resolve it themselves (see
    reductions.negimp_to_pos) or reject the instance.
    """
    used = inst.kb.used_vars()
    hyp = set(inst.hypotheses)
    man = set(inst.manifestations)
    changed = False
    for m in sorted(man - used):
        if m in hyp:
            man.discard(m)
            hyp.discard(m)
            changed = True
        else:
            reduced = AbductionInstance(inst.kb, frozenset(hyp), frozenset(man))
            return PreprocessResult(reduced, TRIVIALLY_NO)
    for h in sorted(hyp - used):
        hyp.discard(h)
        changed = True
    out = AbductionInstance(inst.kb, frozenset(hyp), frozenset(man))
    return PreprocessResult(out, TRIVIALLY_REDUCED if changed else UNCHANGED)
