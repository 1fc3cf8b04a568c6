import random

import pytest

from gen import micro_repair_instance, random_instance
from ofdkit.inference import SYNONYM, Ofd, OfdSet
from ofdkit.ontology import ConceptClass, Ontology, Sense
from ofdkit.oracle import (
    BudgetExceeded,
    OracleBudget,
    closure_saturate,
    emd_lp,
    enumerate_ofds_naive,
    exact_min_vertex_cover,
    exhaustive_repair,
    naive_holds,
    pareto_filter_naive,
)
from ofdkit.relation import instance_from_rows
from ofdkit.senses import SenseAssignment, _collect_classes


def test_budgets_enforced():
    rng = random.Random(0)
    inst = random_instance(rng, max_n=30, max_arity=3)
    small = OracleBudget(max_tuples=5)
    with pytest.raises(BudgetExceeded):
        enumerate_ofds_naive(inst, Ontology([], []), ((SYNONYM, 0),), budget=small)
    with pytest.raises(BudgetExceeded):
        exact_min_vertex_cover([(i, i + 1) for i in range(20)])
    with pytest.raises(BudgetExceeded):
        emd_lp([1.0] * 9, [1.0] * 9)


def test_naive_matches_table1_verification(clinical, clinical_onto):
    assert naive_holds(clinical, clinical_onto, ("CC",), "CTRY", SYNONYM)
    assert not naive_holds(clinical, clinical_onto, (), "CTRY", SYNONYM)
    assert naive_holds(clinical, clinical_onto, ("SYMP", "DIAG"), "MED", "inh", 2)


def test_naive_kappa_slack_on_clean_data(clinical, clinical_onto):
    budget = OracleBudget(max_arity=6)
    exact = enumerate_ofds_naive(
        clinical, clinical_onto, ((SYNONYM, 0),), kappa=1.0, exclude=("id",),
        budget=budget,
    )
    near = enumerate_ofds_naive(
        clinical, clinical_onto, ((SYNONYM, 0),), kappa=0.99, exclude=("id",),
        budget=budget,
    )
    assert exact == near


def test_exact_cover_triangle():
    cover = exact_min_vertex_cover([(0, 1), (1, 2), (0, 2)])
    assert len(cover) == 2


def test_exact_cover_edgeless():
    assert exact_min_vertex_cover([]) == ()


def test_exact_cover_table5_graph():
    edges = [(0, 1), (0, 3), (1, 2), (1, 3), (2, 3)]
    cover = exact_min_vertex_cover(edges)
    assert len(cover) == 2  # the 2-approx answer here is also optimal


def test_emd_lp_trivial_cases():
    assert emd_lp([1, 0], [1, 0]) == pytest.approx(0.0)
    assert emd_lp([1, 0], [0, 1]) == pytest.approx(1.0)


def test_closure_saturate_simple():
    sigma = OfdSet(
        [
            Ofd(frozenset({"A"}), frozenset({"B"})),
            Ofd(frozenset({"B"}), frozenset({"C"})),
        ]
    )
    assert closure_saturate(frozenset({"A"}), sigma) == frozenset({"A", "B"})
    assert closure_saturate(frozenset({"A", "B"}), sigma) == frozenset({"A", "B", "C"})


def test_exhaustive_repair_consistent_instance():
    onto = Ontology([ConceptClass("g", None, {"sA": ["v", "w"]})], [Sense("sA")])
    inst = instance_from_rows(["X", "A"], [["x", "v"], ["x", "w"]])
    sigma = OfdSet([Ofd(frozenset({"X"}), frozenset({"A"}))])
    classes = _collect_classes(inst, sigma)
    assignment = SenseAssignment(
        {k: "sA" for k in classes}, {k: () for k in classes}, classes
    )
    assert exhaustive_repair(inst, sigma, onto, assignment) == [(0, 0)]


def test_exhaustive_repair_micro_front_contains_cheap_insertion():
    rng = random.Random(3)
    inst, sigma, onto, assignment = micro_repair_instance(rng)
    front = exhaustive_repair(inst, sigma, onto, assignment)
    assert front  # there is always some repair
    assert front == pareto_filter_naive(front)


def test_pareto_filter_naive_examples():
    assert pareto_filter_naive([(2, 2), (2, 3), (1, 5)]) == [(1, 5), (2, 2)]
    assert pareto_filter_naive([(1, 1)]) == [(1, 1)]
