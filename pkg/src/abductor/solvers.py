"""Abduction solvers: definitional brute-force oracles, the 2^|H| baselines,
the model-enumeration algorithms (full-class and weight-ordered positive), the
polynomial-space recursive positive solver, the 1-valid shortcut, and the
positive-clause pipeline through SimpleSAT.

Every solver preprocesses its input (see core.preprocess) and returns an
AbdResult whose witness, when present, passes core.is_explanation.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable

from .core import (AbductionInstance, Constraint, Explanation, FragmentError,
                   Formula, TRIVIALLY_NO, BOT,
                   conjoin_literals, evaluate, make_explanation, preprocess,
                   satisfies_vars, SatDecider)
from .langlib import ConstraintLanguage, is_one_valid
from .satenum import (EnumStats, ModelStream, WEIGHT_ORDERED, decide,
                      enumerate_models, enumerate_weight_ordered, hyp_mask,
                      solve_simple_sat, weight)


class OrderingContractError(RuntimeError):
    """A weight-ordered model stream emitted an increasing weight."""


class OracleCapError(ValueError):
    """Instance exceeds the brute-force size cap."""


ALL_FULL = "all-full"
SUBSET_MAXIMAL_POSITIVE = "subset-maximal-positive"


@dataclass(frozen=True)
class AbdResult:
    answer: bool
    witness: Explanation | None
    stats: EnumStats
    algorithm: str


@dataclass(frozen=True)
class ExplanationSet:
    explanations: frozenset[frozenset[int]]
    kind: str


def _no(algorithm: str, stats: EnumStats | None = None) -> AbdResult:
    return AbdResult(False, None, stats or EnumStats(), algorithm)


def _proj_literals(proj: int, hyp: Iterable[int]) -> frozenset[int]:
    return frozenset(h if (proj >> (h - 1)) & 1 else -h for h in hyp)


def _pos_literals(mask: int, n: int) -> frozenset[int]:
    return frozenset(v for v in range(1, n + 1) if (mask >> (v - 1)) & 1)


# ---------------------------------------------------------------------------
# brute-force oracles
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=1024)
def brute_models(phi: Formula) -> tuple[int, ...]:
    """Every satisfying total assignment, by scanning all 2^n candidates."""
    return tuple(s for s in range(1 << phi.num_vars) if evaluate(phi, s))


def brute_sat(phi: Formula) -> bool:
    return any(evaluate(phi, s) for s in range(1 << phi.num_vars))


def _check_caps(inst: AbductionInstance, cap_n: int, cap_h: int) -> None:
    if inst.num_vars > cap_n:
        raise OracleCapError(f"n={inst.num_vars} exceeds oracle cap {cap_n}")
    if len(inst.hypotheses) > cap_h:
        raise OracleCapError(f"|H|={len(inst.hypotheses)} exceeds oracle cap {cap_h}")


def _oracle_stats(phi: Formula, models: tuple[int, ...]) -> EnumStats:
    return EnumStats(branch_nodes=0, leaves=1 << phi.num_vars,
                     models_emitted=len(models), max_depth=0)


def oracle_abd(inst: AbductionInstance, cap_n: int = 20, cap_h: int = 16) -> AbdResult:
    """Ground truth for symmetric abduction via exhaustive assignment scan.

    Iterates the 2^|H| full candidates; a candidate survives iff it has a
    model and every model of KB extending it satisfies M (an explanation
    exists iff a full one does).
    """
    pre = preprocess(inst)
    if pre.verdict == TRIVIALLY_NO:
        return _no("oracle-abd")
    inst = pre.instance
    _check_caps(inst, cap_n, cap_h)
    models = brute_models(inst.kb)
    hyp = sorted(inst.hypotheses)
    hmask = hyp_mask(hyp)
    count: dict[int, int] = {}
    bad: set[int] = set()
    for sigma in models:
        proj = sigma & hmask
        count[proj] = count.get(proj, 0) + 1
        if not satisfies_vars(sigma, inst.manifestations):
            bad.add(proj)
    good = [p for p in count if p not in bad]
    stats = _oracle_stats(inst.kb, models)
    if not good:
        return _no("oracle-abd", stats)
    wit = make_explanation(_proj_literals(min(good), hyp), inst.hypotheses)
    return AbdResult(True, wit, stats, "oracle-abd")


def oracle_full_explanations(inst: AbductionInstance,
                             cap_n: int = 20, cap_h: int = 16) -> frozenset[frozenset[int]]:
    pre = preprocess(inst)
    if pre.verdict == TRIVIALLY_NO:
        return frozenset()
    inst = pre.instance
    _check_caps(inst, cap_n, cap_h)
    hyp = sorted(inst.hypotheses)
    hmask = hyp_mask(hyp)
    count: dict[int, int] = {}
    bad: set[int] = set()
    for sigma in brute_models(inst.kb):
        proj = sigma & hmask
        count[proj] = count.get(proj, 0) + 1
        if not satisfies_vars(sigma, inst.manifestations):
            bad.add(proj)
    return frozenset(_proj_literals(p, hyp) for p in count if p not in bad)


def _pabd_lattice(inst: AbductionInstance) -> tuple[list[int], list[int], list[int]]:
    """Superset-summed (sat-count, bad-count) tables over the H-subset lattice."""
    hyp = sorted(inst.hypotheses)
    h = len(hyp)
    pos = {v: i for i, v in enumerate(hyp)}
    f = [0] * (1 << h)
    g = [0] * (1 << h)
    for sigma in brute_models(inst.kb):
        p = 0
        for v, i in pos.items():
            if (sigma >> (v - 1)) & 1:
                p |= 1 << i
        f[p] += 1
        if not satisfies_vars(sigma, inst.manifestations):
            g[p] += 1
    for i in range(h):
        bit = 1 << i
        for p in range(1 << h):
            if not p & bit:
                f[p] += f[p | bit]
                g[p] += g[p | bit]
    return hyp, f, g


def oracle_pabd(inst: AbductionInstance, cap_n: int = 20, cap_h: int = 16) -> AbdResult:
    """Ground truth for positive abduction: every E ⊆ H is checked against the
    exhaustively computed model table (E is an explanation iff some model sets
    E true and no model setting E true violates M)."""
    pre = preprocess(inst)
    if pre.verdict == TRIVIALLY_NO:
        return _no("oracle-pabd")
    inst = pre.instance
    _check_caps(inst, cap_n, cap_h)
    hyp, f, g = _pabd_lattice(inst)
    stats = _oracle_stats(inst.kb, brute_models(inst.kb))
    best = -1
    for p in range(1 << len(hyp)):
        if f[p] > 0 and g[p] == 0:
            if best < 0 or bin(p).count("1") > bin(best).count("1"):
                best = p
    if best < 0:
        return _no("oracle-pabd", stats)
    lits = frozenset(hyp[i] for i in range(len(hyp)) if (best >> i) & 1)
    return AbdResult(True, make_explanation(lits, inst.hypotheses), stats, "oracle-pabd")


def oracle_positive_explanations(inst: AbductionInstance, cap_n: int = 20,
                                 cap_h: int = 16) -> tuple[frozenset[frozenset[int]],
                                                           frozenset[frozenset[int]]]:
    """(all positive explanations, the subset-maximal ones)."""
    pre = preprocess(inst)
    if pre.verdict == TRIVIALLY_NO:
        return frozenset(), frozenset()
    inst = pre.instance
    _check_caps(inst, cap_n, cap_h)
    hyp, f, g = _pabd_lattice(inst)
    all_ok = [p for p in range(1 << len(hyp)) if f[p] > 0 and g[p] == 0]
    maximal: list[int] = []
    for p in sorted(all_ok, key=lambda q: -bin(q).count("1")):
        if not any(q != p and q & p == p for q in maximal):
            maximal.append(p)

    def unpack(p: int) -> frozenset[int]:
        return frozenset(hyp[i] for i in range(len(hyp)) if (p >> i) & 1)

    return (frozenset(unpack(p) for p in all_ok),
            frozenset(unpack(p) for p in maximal))


def oracle_abd_general(inst: AbductionInstance, cap_h: int = 10) -> bool:
    """Slow independent check over *all* consistent E ⊆ Lits(H) (3^|H| sets).

    Exists to validate the extension property the faster oracles rely on:
    an explanation exists iff a full one does.
    """
    pre = preprocess(inst)
    if pre.verdict == TRIVIALLY_NO:
        return False
    inst = pre.instance
    if len(inst.hypotheses) > cap_h:
        raise OracleCapError("|H| too large for the 3^|H| sweep")
    models = brute_models(inst.kb)
    hyp = sorted(inst.hypotheses)
    states = [(0, 0)]
    for h in hyp:
        bit = 1 << (h - 1)
        states = [(p | (bit if c == 1 else 0), m | (bit if c == 2 else 0))
                  for p, m in states for c in (0, 1, 2)]
    for pos, neg in states:
        sat_seen = False
        entails = True
        for sigma in models:
            if sigma & pos == pos and sigma & neg == 0:
                sat_seen = True
                if not satisfies_vars(sigma, inst.manifestations):
                    entails = False
                    break
        if sat_seen and entails:
            return True
    return False


# ---------------------------------------------------------------------------
# baselines (Theorem-3 style exhaustive candidate enumeration)
# ---------------------------------------------------------------------------

def _entails_all(phi: Formula, manifestations: Iterable[int], sat: SatDecider) -> bool:
    for m in manifestations:
        if sat(Formula(phi.num_vars, phi.constraints + (Constraint(BOT, (m,)),))):
            return False
    return True


def baseline_abd(inst: AbductionInstance, sat: SatDecider = decide) -> AbdResult:
    """Try all 2^|H| full candidates; per candidate one satisfiability check
    and one unsatisfiability check per manifestation."""
    pre = preprocess(inst)
    stats = EnumStats()
    if pre.verdict == TRIVIALLY_NO:
        return _no("baseline-abd", stats)
    inst = pre.instance
    hyp = sorted(inst.hypotheses)
    for pattern in range(1 << len(hyp)):
        stats.branch_nodes += 1
        lits = frozenset(h if (pattern >> i) & 1 else -h for i, h in enumerate(hyp))
        base = conjoin_literals(inst.kb, lits)
        stats.leaves += 1
        if not sat(base):
            continue
        stats.leaves += len(inst.manifestations)
        if _entails_all(base, inst.manifestations, sat):
            return AbdResult(True, make_explanation(lits, inst.hypotheses),
                             stats, "baseline-abd")
    return _no("baseline-abd", stats)


def baseline_pabd(inst: AbductionInstance, sat: SatDecider = decide) -> AbdResult:
    """As baseline_abd but over the 2^|H| positive subsets E ⊆ H."""
    pre = preprocess(inst)
    stats = EnumStats()
    if pre.verdict == TRIVIALLY_NO:
        return _no("baseline-pabd", stats)
    inst = pre.instance
    hyp = sorted(inst.hypotheses)
    for pattern in range(1 << len(hyp)):
        stats.branch_nodes += 1
        lits = frozenset(h for i, h in enumerate(hyp) if (pattern >> i) & 1)
        base = conjoin_literals(inst.kb, lits)
        stats.leaves += 1
        if not sat(base):
            continue
        stats.leaves += len(inst.manifestations)
        if _entails_all(base, inst.manifestations, sat):
            return AbdResult(True, make_explanation(lits, inst.hypotheses),
                             stats, "baseline-pabd")
    return _no("baseline-pabd", stats)


# ---------------------------------------------------------------------------
# enumeration-based symmetric solver (equivalence classes over H)
# ---------------------------------------------------------------------------

def enum_abd(inst: AbductionInstance,
             stream: ModelStream | None = None) -> tuple[AbdResult, ExplanationSet]:
    """Partition the models of KB by their H-restriction and discard a class
    as soon as one member violates M; the survivors are exactly the full
    explanations."""
    pre = preprocess(inst)
    if pre.verdict == TRIVIALLY_NO:
        return _no("enum-abd"), ExplanationSet(frozenset(), ALL_FULL)
    inst = pre.instance
    if stream is None:
        stream = enumerate_models(inst.kb)
    hmask = hyp_mask(inst.hypotheses)
    discarded: set[int] = set()
    potential: set[int] = set()
    for sigma in stream:
        proj = sigma & hmask
        if proj in discarded:
            continue
        if satisfies_vars(sigma, inst.manifestations):
            potential.add(proj)
        else:
            discarded.add(proj)
            potential.discard(proj)
    hyp = sorted(inst.hypotheses)
    exps = frozenset(_proj_literals(p, hyp) for p in potential)
    eset = ExplanationSet(exps, ALL_FULL)
    if not potential:
        return _no("enum-abd", stream.stats), eset
    wit = make_explanation(_proj_literals(min(potential), hyp), inst.hypotheses)
    return AbdResult(True, wit, stream.stats, "enum-abd"), eset


# ---------------------------------------------------------------------------
# polynomial-space recursive positive solver
# ---------------------------------------------------------------------------

@dataclass
class PabdAudit:
    """Instrumentation for the recursive solver's resource contract."""
    visited: set[frozenset[int]] | None = None
    duplicate_visits: int = 0
    max_depth: int = 0
    max_frame_cells: int = 0

    def __post_init__(self) -> None:
        if self.visited is None:
            self.visited = set()


def pabd_recursive(inst: AbductionInstance, sat: SatDecider = decide,
                   audit: PabdAudit | None = None) -> AbdResult:
    """Positive abduction by recursive descent through the subsets of H.

    Each call looks at the candidate E (the removable set D plus the locked
    set delta) through its full extension G = E ∪ {¬x : x ∈ H−E}:

      * if KB ∧ G ∧ ¬m is satisfiable for some m, a model with positive
        pattern exactly E violates M, so E and every subset die: prune;
      * if KB ∧ G is satisfiable, E is accepted *after verifying*
        KB ∧ E ⊨ M directly; a failed verification exhibits a model whose
        positive pattern strictly contains E and violates M, which again
        kills every subset of E, so the subtree is pruned rather than
        accepted (the unverified accept is unsound: a wider pattern that
        never occurs as a visited candidate can otherwise slip through);
      * otherwise recurse, removing one element of D at a time while locking
        previously removed elements into delta, so each subset of H is
        visited at most once.
    """
    pre = preprocess(inst)
    stats = EnumStats()
    if pre.verdict == TRIVIALLY_NO:
        return _no("pabd-rec", stats)
    inst = pre.instance
    hyp = tuple(sorted(inst.hypotheses))
    man = sorted(inst.manifestations)
    witness: list[frozenset[int]] = []

    def rec(d: tuple[int, ...], delta: tuple[int, ...], depth: int) -> bool:
        stats.branch_nodes += 1
        stats.max_depth = max(stats.max_depth, depth)
        e = frozenset(d) | frozenset(delta)
        if audit is not None:
            audit.max_depth = max(audit.max_depth, depth)
            audit.max_frame_cells = max(audit.max_frame_cells, len(d) + len(delta))
            if e in audit.visited:
                audit.duplicate_visits += 1
            audit.visited.add(e)
        g = frozenset(e) | frozenset(-x for x in hyp if x not in e)
        base_g = conjoin_literals(inst.kb, g)
        for m in man:
            if sat(Formula(base_g.num_vars, base_g.constraints + (Constraint(BOT, (m,)),))):
                stats.leaves += 1
                return False
        if sat(base_g):
            base_e = conjoin_literals(inst.kb, e)
            stats.leaves += 1
            if _entails_all(base_e, man, sat):
                witness.append(e)
                return True
            return False  # a superset pattern violates M: whole subtree dead
        if not d:
            stats.leaves += 1
            return False
        for i in range(len(d)):
            if rec(d[i + 1:], delta + d[:i], depth + 1):
                return True
        return False

    found = rec(hyp, (), 1)
    if not found:
        return _no("pabd-rec", stats)
    return AbdResult(True, make_explanation(witness[0], inst.hypotheses),
                     stats, "pabd-rec")


# ---------------------------------------------------------------------------
# weight-ordered enumeration positive solver
# ---------------------------------------------------------------------------

def pabd_enum(inst: AbductionInstance,
              stream: ModelStream | None = None) -> tuple[AbdResult, ExplanationSet]:
    """Positive abduction from a non-increasing-w_H model stream.

    Runs the weight-ordered scheme (extract the positive candidate of each
    model, discard on a violating model, push discards to immediate subsets),
    then verifies survivors against the recorded violating patterns: the
    one-level discard propagation stalls on weight levels with no models, so
    a surviving candidate may still be covered by a wider violating pattern.
    The verified survivors, filtered to subset-maximal elements, are exactly
    the subset-maximal positive explanations.
    """
    pre = preprocess(inst)
    if pre.verdict == TRIVIALLY_NO:
        return _no("pabd-enum"), ExplanationSet(frozenset(), SUBSET_MAXIMAL_POSITIVE)
    inst = pre.instance
    if stream is None:
        stream = enumerate_weight_ordered(inst.kb, inst.hypotheses)
    if stream.ordering != WEIGHT_ORDERED:
        raise OrderingContractError("pabd_enum needs a weight-ordered stream")
    hmask = hyp_mask(inst.hypotheses)
    last_w: int | None = None
    discarded: set[int] = set()
    potential: set[int] = set()
    bad_patterns: set[int] = set()
    for sigma in stream:
        w = weight(sigma, hmask)
        if last_w is not None and w > last_w:
            raise OrderingContractError("model stream weight increased")
        last_w = w
        proj = sigma & hmask
        if proj not in discarded:
            if satisfies_vars(sigma, inst.manifestations):
                potential.add(proj)
            else:
                discarded.add(proj)
                potential.discard(proj)
                bad_patterns.add(proj)
        if proj in discarded:
            p = proj
            while p:
                bit = p & (-p)
                discarded.add(proj & ~bit)
                p ^= bit
    survivors = [e for e in potential
                 if not any(e & b == e for b in bad_patterns)]
    maximal: list[int] = []
    for e in sorted(survivors, key=lambda q: -bin(q).count("1")):
        if not any(q != e and q & e == e for q in maximal):
            maximal.append(e)
    hyp = sorted(inst.hypotheses)
    exps = frozenset(frozenset(h for h in hyp if (p >> (h - 1)) & 1) for p in maximal)
    eset = ExplanationSet(exps, SUBSET_MAXIMAL_POSITIVE)
    if not maximal:
        return _no("pabd-enum", stream.stats), eset
    best = max(maximal, key=lambda q: bin(q).count("1"))
    wit = make_explanation(frozenset(h for h in hyp if (best >> (h - 1)) & 1),
                           inst.hypotheses)
    return AbdResult(True, wit, stream.stats, "pabd-enum"), eset


# ---------------------------------------------------------------------------
# coNP shortcut for 1-valid languages
# ---------------------------------------------------------------------------

def pabd_one_valid(inst: AbductionInstance, sat: SatDecider = decide) -> AbdResult:
    """For 1-valid knowledge bases a positive explanation exists iff H itself
    is one, and KB ∧ H is consistent for free, so only the |M| entailment
    checks remain."""
    lang = ConstraintLanguage(frozenset(inst.kb.relations()))
    if not is_one_valid(lang):
        raise FragmentError("knowledge base is not 1-valid")
    pre = preprocess(inst)
    stats = EnumStats()
    if pre.verdict == TRIVIALLY_NO:
        return _no("one-valid", stats)
    inst = pre.instance
    base = conjoin_literals(inst.kb, inst.hypotheses)
    stats.leaves = len(inst.manifestations)
    if _entails_all(base, inst.manifestations, sat):
        return AbdResult(True, make_explanation(frozenset(inst.hypotheses), inst.hypotheses),
                         stats, "one-valid")
    return _no("one-valid", stats)


# ---------------------------------------------------------------------------
# positive k-CNF pipeline through SimpleSAT
# ---------------------------------------------------------------------------

def abd_kcnf_pos(inst: AbductionInstance) -> AbdResult:
    """Symmetric abduction over positive clauses via the SimpleSAT reduction;
    a model of the reduced instance maps to the negative explanation holding
    ¬h exactly for the hypotheses the model sets to 0."""
    from .reductions import abd_to_simplesat

    pre = preprocess(inst)
    if pre.verdict == TRIVIALLY_NO:
        return _no("simplesat")
    inst = pre.instance
    simple, _report = abd_to_simplesat(inst)
    model, stats = solve_simple_sat(simple)
    if model is None:
        return _no("simplesat", stats)
    lits = frozenset(-h for h in inst.hypotheses if not (model >> (h - 1)) & 1)
    return AbdResult(True, make_explanation(lits, inst.hypotheses), stats, "simplesat")
