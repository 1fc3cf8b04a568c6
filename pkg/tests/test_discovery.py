import itertools
import random

from gen import random_instance, random_ontology
from ofdkit.discovery import (
    DiscoveryConfig,
    Verifier,
    calculate_next_level,
    check_inheritance,
    check_synonym,
    discover_ofds,
)
from ofdkit.inference import INHERITANCE, SYNONYM, TRADITIONAL, Ofd
from ofdkit.ontology import Ontology
from ofdkit.oracle import enumerate_ofds_naive
from ofdkit.relation import instance_from_rows, partition_of, strip

SYN = (SYNONYM, 0)


def spart(inst, attrs):
    return strip(partition_of(inst, frozenset(attrs)))


def test_table1_contains_cc_to_ctry(clinical, clinical_onto):
    sigma, stats = discover_ofds(
        clinical, clinical_onto, DiscoveryConfig(kinds=(SYN,), exclude=("id",))
    )
    assert Ofd(frozenset({"CC"}), frozenset({"CTRY"}), SYNONYM) in list(sigma)
    stats.check()


def test_table2_rejected(table2):
    inst, onto = table2
    sigma, _ = discover_ofds(inst, onto, DiscoveryConfig(kinds=(SYN,), exclude=("id",)))
    assert Ofd(frozenset({"X"}), frozenset({"Y"}), SYNONYM) not in list(sigma)
    assert not check_synonym(spart(inst, {"X"}), "Y", inst, onto)


def test_check_synonym_worked_example(clinical, clinical_onto):
    assert check_synonym(spart(clinical, {"CC"}), "CTRY", clinical, clinical_onto)


def test_check_synonym_uniform_class_passes_without_ontology():
    inst = instance_from_rows(["X", "A"], [["x", "v"], ["x", "v"], ["y", "w"]])
    onto = Ontology([], [])
    assert check_synonym(spart(inst, {"X"}), "A", inst, onto)


def test_check_inheritance_worked_example(clinical, clinical_onto):
    part = spart(clinical, {"SYMP", "DIAG"})
    assert check_inheritance(part, "MED", clinical, clinical_onto, theta=2)
    assert not check_inheritance(part, "MED", clinical, clinical_onto, theta=1)


def test_check_inheritance_theta_zero_distinct_values(clinical, clinical_onto):
    inst = instance_from_rows(["X", "A"], [["x", "ibuprofen"], ["x", "naproxen"]])
    assert not check_inheritance(spart(inst, {"X"}), "A", inst, clinical_onto, theta=0)
    assert check_inheritance(spart(inst, {"X"}), "A", inst, clinical_onto, theta=1)


def test_check_inheritance_singletons_only(clinical_onto):
    inst = instance_from_rows(["X", "A"], [["x", "ibuprofen"], ["y", "USA"]])
    assert check_inheritance(spart(inst, {"X"}), "A", inst, clinical_onto, theta=0)


def test_calculate_next_level_full_second_level():
    l1 = [frozenset({a}) for a in "ABC"]
    l2 = calculate_next_level(l1)
    assert l2 == [frozenset(p) for p in (("A", "B"), ("A", "C"), ("B", "C"))]


def test_calculate_next_level_apriori_condition():
    l2 = [frozenset(p) for p in (("A", "B"), ("B", "C"))]  # {A,C} missing
    assert calculate_next_level(l2) == []
    l2_full = [frozenset(p) for p in (("A", "B"), ("A", "C"), ("B", "C"))]
    assert calculate_next_level(l2_full) == [frozenset("ABC")]


def test_calculate_next_level_empty():
    assert calculate_next_level([]) == []


def test_minimality_pruning_blocks_superset_candidates():
    # B -> A holds at level 2, so {B, C} -> A must never be emitted
    rows = [["a1", "b1", "c1"], ["a1", "b1", "c2"], ["a2", "b2", "c1"]]
    inst = instance_from_rows(["A", "B", "C"], rows)
    onto = Ontology([], [])
    sigma, _ = discover_ofds(inst, onto, DiscoveryConfig(kinds=(SYN,)))
    assert Ofd(frozenset({"B"}), frozenset({"A"}), SYNONYM) in list(sigma)
    assert all(
        not (o.single_consequent == "A" and o.antecedent == frozenset({"B", "C"}))
        for o in sigma
    )


def test_discovered_set_is_minimal_by_reverification():
    rng = random.Random(21)
    for _ in range(15):
        inst = random_instance(rng, max_n=30, max_arity=4)
        onto = random_ontology(rng, inst)
        sigma, _ = discover_ofds(inst, onto, DiscoveryConfig(kinds=(SYN,)))
        naive = enumerate_ofds_naive(inst, onto, (SYN,))
        assert sigma == naive


def test_output_equals_oracle_for_inheritance_and_support():
    rng = random.Random(31)
    for _ in range(10):
        inst = random_instance(rng, max_n=25, max_arity=4)
        onto = random_ontology(rng, inst)
        kinds = (SYN, (INHERITANCE, 1))
        for kappa in (1.0, 0.8):
            sigma, _ = discover_ofds(
                inst, onto, DiscoveryConfig(kinds=kinds, kappa=kappa)
            )
            naive = enumerate_ofds_naive(inst, onto, kinds, kappa=kappa)
            assert sigma == naive


def test_optimization_toggles_do_not_change_output():
    rng = random.Random(8)
    for _ in range(6):
        inst = random_instance(rng, max_n=25, max_arity=4)
        onto = random_ontology(rng, inst)
        outputs = []
        pruned = []
        for opt2, opt3, opt4 in itertools.product([True, False], repeat=3):
            cfg = DiscoveryConfig(kinds=(SYN,), opt2=opt2, opt3=opt3, opt4=opt4)
            sigma, stats = discover_ofds(inst, onto, cfg)
            stats.check()
            outputs.append(sigma)
            pruned.append(sum(stats.pruned.values()))
        assert all(o == outputs[0] for o in outputs)
        assert pruned[0] >= pruned[-1]  # all-on prunes at least as much as all-off


def test_full_vs_stripped_partition_verification_agree():
    rng = random.Random(77)
    for _ in range(10):
        inst = random_instance(rng, max_n=25, max_arity=4)
        onto = random_ontology(rng, inst)
        attrs = list(inst.attribute_names)
        verifier = Verifier(inst, onto, DiscoveryConfig(kinds=(SYN,)))
        for a in attrs:
            for r in range(0, len(attrs)):
                for combo in itertools.combinations([x for x in attrs if x != a], r):
                    full = partition_of(inst, frozenset(combo))
                    stripped = strip(full)
                    got_full, _ = verifier.verify(SYN, full, a, 1.0)
                    got_stripped, _ = verifier.verify(SYN, stripped, a, 1.0)
                    assert got_full == got_stripped


def test_traditional_fd_subsumption_on_empty_ontology():
    rng = random.Random(55)
    onto = Ontology([], [])
    for _ in range(8):
        inst = random_instance(rng, max_n=30, max_arity=4)
        syn, _ = discover_ofds(inst, onto, DiscoveryConfig(kinds=(SYN,)))
        fd_naive = enumerate_ofds_naive(inst, onto, ((TRADITIONAL, 0),))
        assert {(o.antecedent, o.consequent) for o in syn} == {
            (o.antecedent, o.consequent) for o in fd_naive
        }


def test_support_monotone_without_minimality_filter():
    rng = random.Random(123)
    for _ in range(8):
        inst = random_instance(rng, max_n=25, max_arity=4)
        onto = random_ontology(rng, inst)
        strong = enumerate_ofds_naive(inst, onto, (SYN,), kappa=1.0, minimal=False)
        weak = enumerate_ofds_naive(inst, onto, (SYN,), kappa=0.8, minimal=False)
        strong_keys = {(o.antecedent, o.consequent) for o in strong}
        weak_keys = {(o.antecedent, o.consequent) for o in weak}
        assert strong_keys <= weak_keys


def test_opt3_key_column_zero_lookups():
    rows = [[f"id{i}", f"b{i % 3}", f"v{i % 2}"] for i in range(6)]
    inst = instance_from_rows(["NCTID", "B", "C"], rows)
    onto = Ontology([], [])
    sigma, stats = discover_ofds(inst, onto, DiscoveryConfig(kinds=(SYN,)))
    # every NCTID -> A dependency appears, each verified with zero lookups
    for attr in ("B", "C"):
        assert Ofd(frozenset({"NCTID"}), frozenset({attr}), SYNONYM) in list(sigma)
        assert stats.lookups_by_candidate.get(f"NCTID->{attr} syn", 0) == 0


def test_opt4_plain_fd_zero_lookups(clinical_onto):
    rows = [["x", "same"], ["x", "same"], ["y", "other"], ["y", "other"]]
    inst = instance_from_rows(["X", "A"], rows)
    sigma, stats = discover_ofds(inst, clinical_onto, DiscoveryConfig(kinds=(SYN,)))
    assert Ofd(frozenset({"X"}), frozenset({"A"}), SYNONYM) in list(sigma)
    assert stats.lookups_by_candidate["X->A syn"] == 0
    # with the uniform-value shortcut off, the same candidate pays lookups
    _, stats_off = discover_ofds(
        inst, clinical_onto, DiscoveryConfig(kinds=(SYN,), opt4=False)
    )
    assert stats_off.lookups_by_candidate["X->A syn"] > 0


def test_stats_accounting_invariant(clinical, clinical_onto):
    _, stats = discover_ofds(
        clinical, clinical_onto,
        DiscoveryConfig(kinds=(SYN, (INHERITANCE, 2)), exclude=("id",)),
    )
    stats.check()
    assert sum(stats.ofds_per_level.values()) >= 1
    assert stats.candidates_generated == stats.candidates_verified + sum(
        stats.pruned.values()
    )


def test_threaded_discovery_matches_sequential(clinical, clinical_onto):
    base, _ = discover_ofds(
        clinical, clinical_onto, DiscoveryConfig(kinds=(SYN,), exclude=("id",))
    )
    threaded, _ = discover_ofds(
        clinical, clinical_onto,
        DiscoveryConfig(kinds=(SYN,), exclude=("id",), threads=4),
    )
    assert base == threaded


def test_max_level_cutoff(clinical, clinical_onto):
    sigma_all, _ = discover_ofds(
        clinical, clinical_onto, DiscoveryConfig(kinds=(SYN,), exclude=("id",))
    )
    sigma_l1, _ = discover_ofds(
        clinical, clinical_onto,
        DiscoveryConfig(kinds=(SYN,), exclude=("id",), max_level=1),
    )
    assert all(len(o.antecedent) == 0 for o in sigma_l1)
    assert set(o.identity_key() for o in sigma_l1) <= set(
        o.identity_key() for o in sigma_all
    )
