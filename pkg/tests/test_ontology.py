import pytest

from ofdkit.ontology import (
    EXCEEDS,
    NO_COMMON_ANCESTOR,
    WITHIN,
    OntologyError,
    load_ontology_text,
)


def test_names_jaguar(jaguar_onto):
    # E1 lists no "jaguar" synonym, so names() follows the synonym sets:
    # {E2, E3}, not the broader set sometimes quoted alongside this example
    assert jaguar_onto.names("jaguar") == {"E2", "E3"}


def test_names_absent_value_empty(jaguar_onto):
    assert jaguar_onto.names("submarine") == set()


def test_names_single_class(jaguar_onto):
    assert jaguar_onto.names("car") == {"E1"}


def test_synonyms_e2(jaguar_onto):
    assert jaguar_onto.synonyms("E2") == {"jaguar", "jaguar land rover"}


def test_synonyms_unknown_class_errors(jaguar_onto):
    with pytest.raises(OntologyError):
        jaguar_onto.synonyms("E99")


def test_descendants_e3(jaguar_onto):
    assert jaguar_onto.descendants("E3") == {
        "jaguar",
        "peruvian jaguar",
        "mexican jaguar",
    }


def test_descendants_leaf_is_own_synonyms(jaguar_onto):
    assert jaguar_onto.descendants("E4") == {"peruvian jaguar"}


def test_descendants_chain_matches_dfs_oracle(clinical_onto):
    def dfs(onto, cid):
        out = set(onto.classes[cid].all_synonyms())
        for other in onto.classes.values():
            if other.parent == cid:
                out |= dfs(onto, other.id)
        return out

    for cid in clinical_onto.classes:
        assert clinical_onto.descendants(cid) == dfs(clinical_onto, cid)


def test_descendants_contains_synonyms_and_is_monotone(clinical_onto):
    for cls in clinical_onto.classes.values():
        assert clinical_onto.synonyms(cls.id) <= clinical_onto.descendants(cls.id)
        if cls.parent:
            assert clinical_onto.descendants(cls.id) <= clinical_onto.descendants(
                cls.parent
            )


def test_lca_drug_example(clinical_onto):
    values = {"ibuprofen", "NSAID", "naproxen"}
    assert clinical_onto.lca_distance(values, 2) == WITHIN
    assert clinical_onto.lca_distance({"analgesic", "tylenol", "acetaminophen"}, 2) == WITHIN
    assert clinical_onto.lca_distance({"analgesic", "tylenol", "acetaminophen"}, 1) == EXCEEDS


def test_lca_single_value_theta_zero(clinical_onto):
    assert clinical_onto.lca_distance({"ibuprofen"}, 0) == WITHIN


def test_lca_disjoint_trees(clinical_onto):
    assert clinical_onto.lca_distance({"ibuprofen", "USA"}, 10) == NO_COMMON_ANCESTOR


def test_lca_absent_value_is_no_common_ancestor(clinical_onto):
    assert clinical_onto.lca_distance({"ibuprofen", "nonexistent"}, 5) == NO_COMMON_ANCESTOR


def test_lca_monotone_in_theta(clinical_onto):
    values = {"ibuprofen", "tylenol"}
    results = [clinical_onto.lca_distance(values, t) for t in range(5)]
    if WITHIN in results:
        first = results.index(WITHIN)
        assert all(r == WITHIN for r in results[first:])


def test_fig1_shared_fda_class(clinical_onto):
    shared = clinical_onto.names("cartia") & clinical_onto.names("tiazac")
    assert "diltiazem" in shared
    # under the FDA sense, tiazac and ASA are not equivalent
    fda_t = clinical_onto.classes_under_sense("tiazac", "FDA")
    fda_a = clinical_onto.classes_under_sense("ASA", "FDA")
    assert fda_t and not fda_a


def test_add_value_updates_index(clinical_onto):
    onto = clinical_onto.clone()
    delta = onto.add_value("adizem", "FDA", "diltiazem")
    assert delta.dist == 1
    assert "diltiazem" in onto.names("adizem")
    assert "adizem" in onto.synonyms("diltiazem", "FDA")
    # index consistency both ways
    for value in ("adizem", "cartia"):
        for cid, sid in onto.memberships(value):
            assert value in onto.synonyms(cid, sid)


def test_add_value_duplicate_is_noop(clinical_onto):
    onto = clinical_onto.clone()
    onto.add_value("xx", "FDA", "diltiazem")
    delta = onto.add_value("xx", "FDA", "diltiazem")
    assert delta.dist == 1


def test_add_value_two_distinct(clinical_onto):
    onto = clinical_onto.clone()
    onto.add_value("aa", "FDA", "diltiazem")
    delta = onto.add_value("bb", "MoH", "diltiazem")
    assert delta.dist == 2


def test_add_value_never_removes(clinical_onto):
    onto = clinical_onto.clone()
    before = {cid: onto.synonyms(cid) for cid in onto.classes}
    onto.add_value("zz", "FDA", "diltiazem")
    for cid, values in before.items():
        assert values <= onto.synonyms(cid)


def test_load_empty_ontology():
    onto = load_ontology_text('{"classes": []}')
    assert onto.names("anything") == set()


def test_load_cycle_is_error():
    doc = """{"classes": [
        {"id": "a", "parent": "b", "synonyms": ["x"]},
        {"id": "b", "parent": "a", "synonyms": ["y"]}
    ]}"""
    with pytest.raises(OntologyError, match="cycle"):
        load_ontology_text(doc)


def test_load_dangling_parent_is_error():
    doc = '{"classes": [{"id": "a", "parent": "ghost", "synonyms": ["x"]}]}'
    with pytest.raises(OntologyError, match="ghost"):
        load_ontology_text(doc)


def test_load_empty_synonyms_is_error():
    with pytest.raises(OntologyError, match="empty synonym"):
        load_ontology_text('{"classes": [{"id": "a", "synonyms": []}]}')


def test_roundtrip_doc(clinical_onto):
    from ofdkit.ontology import ontology_from_doc

    clone = ontology_from_doc(clinical_onto.to_doc())
    assert clone.value_index == clinical_onto.value_index
    assert set(clone.classes) == set(clinical_onto.classes)


def test_canonical_is_first_listed(clinical_onto):
    assert clinical_onto.canonical("diltiazem", "FDA") == "cartia"
    assert clinical_onto.canonical("diltiazem", "general") is None
