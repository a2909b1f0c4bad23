import pytest

from abductor.core import (AbductionInstance, Relation, BOT, TOP, FragmentError,
                           formula, is_explanation)
from abductor.langlib import one_in_k
from abductor.satenum import ModelStream, EnumStats, enumerate_models
from abductor.solvers import (OracleCapError, OrderingContractError, PabdAudit,
                              abd_kcnf_pos, baseline_abd, baseline_pabd,
                              enum_abd, oracle_abd, oracle_abd_general,
                              oracle_full_explanations, oracle_pabd,
                              oracle_positive_explanations, pabd_enum,
                              pabd_one_valid, pabd_recursive)
from abductor.harness import verify
from abductor.harness.generators import (gen_2cnf, gen_aff, gen_equations,
                                         gen_kcnf_neg_imp, gen_kcnf_pos,
                                         gen_nae3, gen_xsat)

from test_core import example1_instance


def alg3_killer() -> AbductionInstance:
    # one bad model at weight 2 and one good model at weight 0, with no
    # models at weight 1: the literal discard propagation stalls
    rel = Relation.from_tuples(3, [(1, 1, 0), (0, 0, 1)])
    return AbductionInstance(formula(3, [(rel, (1, 2, 3))]),
                             frozenset({1, 2}), frozenset({3}))


def alg2_killer() -> AbductionInstance:
    # the bad pattern {1,2} is never visited before {1} along the recursion
    # order, so the unverified accept of the published recursion fires
    rel = Relation.from_tuples(4, [(1, 1, 0, 0), (1, 0, 0, 1)])
    return AbductionInstance(formula(4, [(rel, (1, 2, 3, 4))]),
                             frozenset({1, 2, 3}), frozenset({4}))


class TestExample1:
    def test_all_solvers_say_yes(self):
        inst = example1_instance()
        assert oracle_abd(inst).answer
        assert oracle_pabd(inst).answer
        assert baseline_abd(inst).answer
        assert baseline_pabd(inst).answer
        assert enum_abd(inst)[0].answer
        assert pabd_recursive(inst).answer
        assert pabd_enum(inst)[0].answer

    def test_enum_abd_full_set_contains_e1(self):
        _, eset = enum_abd(example1_instance())
        assert frozenset({1, -4, -5}) in eset.explanations
        assert eset.explanations == oracle_full_explanations(example1_instance())

    def test_pabd_enum_maximal_set_covers_e2(self):
        inst = example1_instance()
        assert is_explanation(inst, {1, 4})
        _, pset = pabd_enum(inst)
        assert any(frozenset({1, 4}) <= e for e in pset.explanations)
        _, maximal = oracle_positive_explanations(inst)
        assert pset.explanations == maximal

    def test_witnesses_are_explanations(self):
        inst = example1_instance()
        for res in (baseline_abd(inst), baseline_pabd(inst), enum_abd(inst)[0],
                    pabd_recursive(inst), pabd_enum(inst)[0]):
            assert res.witness is not None
            assert is_explanation(inst, res.witness.literals)


class TestPublishedAlgorithmGaps:
    """Regression instances on which the verbatim published procedures accept
    a non-explanation; the shipped solvers must match the oracle."""

    def test_weight_ordered_discard_stall(self):
        inst = alg3_killer()
        assert not oracle_pabd(inst).answer
        res, eset = pabd_enum(inst)
        assert not res.answer and not eset.explanations

    def test_recursive_unverified_accept(self):
        inst = alg2_killer()
        assert not oracle_pabd(inst).answer
        assert not pabd_recursive(inst).answer

    def test_verbatim_discard_set_would_accept(self):
        # document the stall: after the bad weight-2 model, the weight-0
        # model's pattern is not in the one-step discard set
        inst = alg3_killer()
        discarded = {0b11, 0b01, 0b10}  # bad pattern and its immediate subsets
        assert 0b00 not in discarded


class TestOracles:
    def test_cap_enforced(self):
        inst = gen_xsat(8, 0)
        with pytest.raises(OracleCapError):
            oracle_abd(inst, cap_n=6)

    def test_extension_property_on_pool_sample(self):
        import itertools
        count = 0
        for inst in itertools.islice(verify.exhaustive_instances(), 0, 2000, 7):
            assert oracle_abd(inst).answer == oracle_abd_general(inst)
            count += 1
        assert count > 200

    def test_pabd_oracle_witness_maximal(self):
        inst = example1_instance()
        res = oracle_pabd(inst)
        assert res.witness.literals == frozenset({1, 4, 5})


class TestEmptyEdges:
    def test_empty_hypotheses_kb_entails(self):
        # KB forces m true, H empty: E = {} explains
        kb = formula(2, [(TOP, (2,)), (one_in_k(2), (1, 2))])
        inst = AbductionInstance(kb, frozenset(), frozenset({2}))
        for res in (oracle_abd(inst), oracle_pabd(inst), baseline_abd(inst),
                    baseline_pabd(inst), pabd_recursive(inst)):
            assert res.answer

    def test_empty_hypotheses_kb_does_not_entail(self):
        kb = formula(2, [(one_in_k(2), (1, 2))])
        inst = AbductionInstance(kb, frozenset(), frozenset({2}))
        assert not baseline_abd(inst).answer
        assert not pabd_recursive(inst).answer

    def test_empty_manifestations(self):
        kb = formula(2, [(one_in_k(2), (1, 2))])
        inst = AbductionInstance(kb, frozenset({1}), frozenset())
        assert oracle_abd(inst).answer and pabd_enum(inst)[0].answer

    def test_descent_to_empty_candidate(self):
        # only E = {} works: H inconsistent with KB, M entailed by KB alone
        kb = formula(2, [(BOT, (1,)), (TOP, (2,))])
        inst = AbductionInstance(kb, frozenset({1}), frozenset({2}))
        res = pabd_recursive(inst)
        assert res.answer and res.witness.literals == frozenset()

    def test_unsat_kb_all_no(self):
        kb = formula(2, [(Relation(2, ()), (1, 2))])
        inst = AbductionInstance(kb, frozenset({1}), frozenset({2}))
        for res in (oracle_abd(inst), oracle_pabd(inst), baseline_abd(inst),
                    enum_abd(inst)[0], pabd_recursive(inst), pabd_enum(inst)[0]):
            assert not res.answer


class TestPabdRecursiveContract:
    def test_subset_visit_audit(self):
        for seed in range(10):
            inst = gen_nae3(7, seed)
            audit = PabdAudit()
            pabd_recursive(inst, audit=audit)
            h = len(inst.hypotheses)
            assert audit.duplicate_visits == 0
            assert len(audit.visited) <= 1 << h
            assert audit.max_depth <= h + 1
            assert audit.max_frame_cells <= h

    def test_exhaustive_descent_visits_every_subset(self):
        # an unsatisfiable KB never fires either pruning test, forcing the
        # full lexicographic traversal (each subset exactly once)
        kb = formula(2, [(Relation(2, ()), (1, 2))])
        inst = AbductionInstance(kb, frozenset({1, 2}), frozenset())
        audit = PabdAudit()
        assert not pabd_recursive(inst, audit=audit).answer
        assert audit.visited == {frozenset(), frozenset({1}), frozenset({2}),
                                 frozenset({1, 2})}
        assert audit.duplicate_visits == 0


class TestPabdEnumContract:
    def test_rejects_unordered_stream(self):
        inst = example1_instance()
        stream = enumerate_models(inst.kb)  # unordered tag
        with pytest.raises(OrderingContractError):
            pabd_enum(inst, stream=stream)

    def test_detects_weight_violation(self):
        inst = example1_instance()
        models = sorted(enumerate_models(inst.kb))  # ascending, so weight increases
        lying = ModelStream(iter(models), EnumStats(), "non-increasing-w_H")
        with pytest.raises(OrderingContractError):
            pabd_enum(inst, stream=lying)


class TestFragmentSolvers:
    def test_one_valid_requires_one_valid_language(self):
        inst = AbductionInstance(formula(1, [(BOT, (1,))]),
                                 frozenset(), frozenset({1}))
        with pytest.raises(FragmentError):
            pabd_one_valid(inst)

    def test_one_valid_agreement(self):
        for seed in range(40):
            inst = gen_kcnf_pos(8, seed, k=3)
            assert pabd_one_valid(inst).answer == oracle_pabd(inst).answer

    def test_one_valid_witness_is_h(self):
        inst = gen_kcnf_pos(6, 3, k=2)
        res = pabd_one_valid(inst)
        if res.answer:
            assert res.witness.literals == preprocessed_h(inst)

    def test_kcnf_pos_agreement(self):
        for seed in range(60):
            inst = gen_kcnf_pos(8, seed, k=3 if seed % 2 else 2)
            assert abd_kcnf_pos(inst).answer == oracle_abd(inst).answer

    def test_kcnf_pos_witness_sound(self):
        for seed in range(20):
            inst = gen_kcnf_pos(7, seed, k=2)
            res = abd_kcnf_pos(inst)
            if res.answer:
                assert is_explanation(inst, res.witness.literals)
                assert all(l < 0 for l in res.witness.literals)

    def test_kcnf_pos_rejects_other_fragments(self):
        inst = gen_nae3(5, 0)
        with pytest.raises(FragmentError):
            abd_kcnf_pos(inst)


class TestRandomAgreement:
    FAMILIES = [gen_xsat, gen_equations, gen_aff, gen_kcnf_pos,
                gen_kcnf_neg_imp, gen_nae3, gen_2cnf]

    def test_solver_oracle_agreement(self):
        failures = []
        for gen in self.FAMILIES:
            for seed in range(12):
                inst = gen(4 + seed % 5, seed)
                failures += [f"{gen.__name__}/{seed}: {f.kind} {f.detail}"
                             for f in verify.check_solvers(inst)]
        assert not failures, failures


def preprocessed_h(inst):
    from abductor.core import preprocess
    return frozenset(preprocess(inst).instance.hypotheses)
