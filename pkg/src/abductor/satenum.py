"""SAT decision and model enumeration engines.

Four engines share one internal constraint form (tuple-code set + scope):

  decide                  -- propagation + lowest-index variable branching
  enumerate_models        -- same search, streaming every total model
  sparse_enumerate        -- per-tuple constraint branching for languages
                             closed under branching (eliminates a whole scope
                             per branch)
  solve_simple_sat        -- branch-and-reduce for positive-clause/negative-DNF
                             instances with the (1,...,p) clause branching

Stats accounting: branch_nodes counts nodes that opened branches; leaves
counts terminal paths, where a satisfied node with f unconstrained variables
contributes one leaf per emitted completion (so models_emitted <= leaves,
while leaves may exceed branch_nodes).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .core import Formula
from .langlib import ConstraintLanguage

_FS0 = frozenset((0,))
_FS1 = frozenset((1,))


class LanguageContractError(ValueError):
    """Formula uses a relation outside the declared branching-closed language."""


@dataclass
class EnumStats:
    branch_nodes: int = 0
    leaves: int = 0
    models_emitted: int = 0
    max_depth: int = 0

    def as_dict(self) -> dict:
        return {
            "branch_nodes": self.branch_nodes,
            "leaves": self.leaves,
            "models_emitted": self.models_emitted,
            "max_depth": self.max_depth,
        }


UNORDERED = "unordered"
WEIGHT_ORDERED = "non-increasing-w_H"


class ModelStream(Iterator[int]):
    """Pull-based stream of assignments with attached stats and ordering tag."""

    def __init__(self, it: Iterable[int], stats: EnumStats, ordering: str = UNORDERED):
        self._it = iter(it)
        self.stats = stats
        self.ordering = ordering

    def __iter__(self) -> "ModelStream":
        return self

    def __next__(self) -> int:
        return next(self._it)


# internal constraint form: (codes frozenset, scope tuple)
_Con = tuple[frozenset[int], tuple[int, ...]]


def _cons_of(phi: Formula) -> list[_Con]:
    return [(frozenset(c.relation.codes), c.scope) for c in phi.constraints]


def _assign(codes: frozenset[int], scope: tuple[int, ...], var: int, val: int) -> _Con:
    keep = [i for i, v in enumerate(scope) if v != var]
    hit = [i for i, v in enumerate(scope) if v == var]
    out = set()
    for code in codes:
        if any(((code >> i) & 1) != val for i in hit):
            continue
        nc = 0
        for j, i in enumerate(keep):
            nc |= ((code >> i) & 1) << j
        out.add(nc)
    return frozenset(out), tuple(scope[i] for i in keep)


def _propagate(cons: list[_Con], amask: int, vmask: int):
    """Drop trivial constraints, force unit values, fail on empty relations.

    Returns (cons, amask, vmask) or None on conflict.
    """
    while True:
        forced: dict[int, int] = {}
        out: list[_Con] = []
        for codes, scope in cons:
            if not codes:
                return None
            k = len(scope)
            if len(codes) == (1 << k):
                continue
            if k == 1:
                val = 0 if codes == _FS0 else 1
                if forced.get(scope[0], val) != val:
                    return None
                forced[scope[0]] = val
                continue
            out.append((codes, scope))
        if not forced:
            return out, amask, vmask
        for v, val in forced.items():
            bit = 1 << (v - 1)
            amask |= bit
            if val:
                vmask |= bit
        nxt: list[_Con] = []
        for codes, scope in out:
            for v, val in forced.items():
                if v in scope:
                    codes, scope = _assign(codes, scope, v, val)
            nxt.append((codes, scope))
        cons = nxt


def decide(phi: Formula) -> bool:
    """True iff the formula has a model (free variables are irrelevant)."""

    def rec(cons: list[_Con]) -> bool:
        r = _propagate(cons, 0, 0)
        if r is None:
            return False
        cons, _, _ = r
        if not cons:
            return True
        var = min(min(scope) for _, scope in cons)
        for val in (0, 1):
            branch = [_assign(codes, scope, var, val) if var in scope else (codes, scope)
                      for codes, scope in cons]
            if rec(branch):
                return True
        return False

    return rec(_cons_of(phi))


def _expand_free(vmask: int, free: list[int], stats: EnumStats) -> Iterator[int]:
    for sub in range(1 << len(free)):
        out = vmask
        for j, v in enumerate(free):
            if (sub >> j) & 1:
                out |= 1 << (v - 1)
        stats.models_emitted += 1
        stats.leaves += 1
        yield out


def enumerate_models(phi: Formula) -> ModelStream:
    """Stream exactly the set of total models over 1..num_vars, each once."""
    stats = EnumStats()
    n = phi.num_vars

    def rec(cons: list[_Con], amask: int, vmask: int, depth: int) -> Iterator[int]:
        stats.max_depth = max(stats.max_depth, depth)
        r = _propagate(cons, amask, vmask)
        if r is None:
            stats.leaves += 1
            return
        cons, amask, vmask = r
        if not cons:
            free = [v for v in range(1, n + 1) if not (amask >> (v - 1)) & 1]
            yield from _expand_free(vmask, free, stats)
            return
        var = min(min(scope) for _, scope in cons)
        stats.branch_nodes += 1
        bit = 1 << (var - 1)
        for val in (0, 1):
            branch = [_assign(codes, scope, var, val) if var in scope else (codes, scope)
                      for codes, scope in cons]
            yield from rec(branch, amask | bit, vmask | (bit if val else 0), depth + 1)

    return ModelStream(rec(_cons_of(phi), 0, 0, 0), stats, UNORDERED)


def _collapse_scope(codes: frozenset[int], scope: tuple[int, ...]) -> _Con:
    """Identification minor for a scope with repeated variables."""
    first: dict[int, int] = {}
    keep: list[int] = []
    for i, v in enumerate(scope):
        if v not in first:
            first[v] = len(keep)
            keep.append(i)
    if len(keep) == len(scope):
        return codes, scope
    out = set()
    for code in codes:
        ok = True
        for i, v in enumerate(scope):
            if ((code >> i) & 1) != ((code >> keep[first[v]]) & 1):
                ok = False
                break
        if ok:
            nc = 0
            for j, i in enumerate(keep):
                nc |= ((code >> i) & 1) << j
            out.add(nc)
    return frozenset(out), tuple(scope[i] for i in keep)


def sparse_enumerate(phi: Formula, lang: ConstraintLanguage, r0: int = 1) -> ModelStream:
    """Enumerate models by branching over the tuples of whole constraints.

    Every relation of the formula must belong to `lang` (expected to be
    branching-closed), so each branch fixes an entire scope and the open
    branch count stays at |R|.  Trivial relations that closure may introduce
    (e.g. identified parity pairs) are never branched on: such constraints
    are dropped and their variables enumerated as free at the leaves, which
    charges them to emitted models rather than branch nodes.  Below arity r0
    the same per-tuple branching applies; r0 only explains the certified
    bound.
    """
    if r0 < 1:
        raise ValueError("r0 must be >= 1")
    members = {(r.arity, r.codes) for r in lang.relations}
    for con in phi.constraints:
        if (con.relation.arity, con.relation.codes) not in members:
            raise LanguageContractError(
                f"relation {con.relation} not in the declared language")

    stats = EnumStats()
    n = phi.num_vars
    start: list[_Con] = []
    for codes, scope in _cons_of(phi):
        codes, scope = _collapse_scope(codes, scope)
        trivial = len(codes) == (1 << len(scope))
        if scope and not trivial and (len(scope), tuple(sorted(codes))) not in members:
            raise LanguageContractError(
                "identification minor escapes the language; it is not branching-closed")
        start.append((codes, scope))

    def rec(cons: list[_Con], amask: int, vmask: int, depth: int) -> Iterator[int]:
        stats.max_depth = max(stats.max_depth, depth)
        live: list[_Con] = []
        for codes, scope in cons:
            if not codes:
                stats.leaves += 1
                return
            if len(codes) == (1 << len(scope)):
                continue
            live.append((codes, scope))
        if not live:
            free = [v for v in range(1, n + 1) if not (amask >> (v - 1)) & 1]
            yield from _expand_free(vmask, free, stats)
            return
        # best local branching base: fewest tuples per eliminated variable
        pick = min(range(len(live)),
                   key=lambda i: len(live[i][0]) ** (1.0 / len(live[i][1])))
        codes, scope = live.pop(pick)
        stats.branch_nodes += 1
        for code in sorted(codes):
            namask, nvmask = amask, vmask
            values = {}
            for i, v in enumerate(scope):
                b = (code >> i) & 1
                values[v] = b
                namask |= 1 << (v - 1)
                if b:
                    nvmask |= 1 << (v - 1)
            branch: list[_Con] = []
            for ocodes, oscope in live:
                for v, b in values.items():
                    if v in oscope:
                        ocodes, oscope = _assign(ocodes, oscope, v, b)
                branch.append((ocodes, oscope))
            yield from rec(branch, namask, nvmask, depth + 1)

    return ModelStream(rec(start, 0, 0, 0), stats, UNORDERED)


def weight(sigma: int, hmask: int) -> int:
    return bin(sigma & hmask).count("1")


def hyp_mask(hypotheses: Iterable[int]) -> int:
    m = 0
    for v in hypotheses:
        m |= 1 << (v - 1)
    return m


def enumerate_weight_ordered(phi: Formula, hypotheses: Iterable[int],
                             base: ModelStream | None = None) -> ModelStream:
    """All models sorted by non-increasing hypothesis weight w_H.

    Materializes the base stream and sorts (stable, so equal weights keep the
    base emission order).
    """
    if base is None:
        base = enumerate_models(phi)
    hmask = hyp_mask(hypotheses)
    models = sorted(base, key=lambda s: -weight(s, hmask))
    return ModelStream(iter(models), base.stats, WEIGHT_ORDERED)


# ---------------------------------------------------------------------------
# SimpleSAT: positive clauses of width <= p plus disjunctions of negative terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimpleSatInstance:
    num_vars: int
    positive_clauses: tuple[frozenset[int], ...]
    negative_dnfs: tuple[tuple[frozenset[int], ...], ...]
    p: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "positive_clauses",
                           tuple(frozenset(c) for c in self.positive_clauses))
        object.__setattr__(self, "negative_dnfs",
                           tuple(tuple(frozenset(t) for t in d) for d in self.negative_dnfs))
        for c in self.positive_clauses:
            if not c:
                raise ValueError("positive clauses must be non-empty")
            if len(c) > self.p:
                raise ValueError(f"clause {sorted(c)} wider than p={self.p}")
            if any(not 1 <= v <= self.num_vars for v in c):
                raise ValueError("clause variable out of range")
        for d in self.negative_dnfs:
            for t in d:
                if any(not 1 <= v <= self.num_vars for v in t):
                    raise ValueError("term variable out of range")


def solve_simple_sat(inst: SimpleSatInstance) -> tuple[int | None, EnumStats]:
    """Branch-and-reduce satisfiability for SimpleSAT instances.

    Variables outside every remaining positive clause stay 0, so a negative
    term survives until some of its variables is set to 1; a DNF whose terms
    have all been hit that way can never be satisfied and fails the branch.
    Positive clauses are consumed with the (1,...,q) branching: branch i sets
    the first i-1 clause variables to 0 and the i-th to 1.

    Returns (model bitmask | None, stats); in a model, only branched-to-1
    variables are set.
    """
    stats = EnumStats()

    def rec(clauses: list[frozenset[int]], dnfs: list[list[frozenset[int]]],
            ones: int, depth: int) -> int | None:
        stats.max_depth = max(stats.max_depth, depth)
        if not clauses:
            stats.leaves += 1
            stats.models_emitted += 1
            return ones
        branch_vars = sorted(clauses[0])
        stats.branch_nodes += 1
        for i, one in enumerate(branch_vars):
            zeros = branch_vars[:i]
            nclauses: list[frozenset[int]] = []
            dead = False
            for c in clauses[1:]:
                if one in c:
                    continue
                c2 = c - set(zeros) if zeros else c
                if not c2:
                    dead = True
                    break
                nclauses.append(c2)
            if dead:
                stats.leaves += 1
                continue
            ndnfs: list[list[frozenset[int]]] = []
            for d in dnfs:
                d2 = [t for t in d if one not in t]
                if not d2:
                    dead = True
                    break
                ndnfs.append(d2)
            if dead:
                stats.leaves += 1
                continue
            got = rec(nclauses, ndnfs, ones | (1 << (one - 1)), depth + 1)
            if got is not None:
                return got
        return None

    dnfs = [list(d) for d in inst.negative_dnfs]
    if any(not d for d in dnfs):
        stats.leaves += 1
        return None, stats
    model = rec(list(inst.positive_clauses), dnfs, 0, 0)
    return model, stats
