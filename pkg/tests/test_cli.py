import json

from click.testing import CliRunner

from conftest import FIXTURES
from ofdkit.cli import main
from ofdkit.inference import parse_ofd_text


def run(*args):
    return CliRunner().invoke(main, args, catch_exceptions=False)


def test_discover_writes_sigma_and_stats(tmp_path):
    out = tmp_path / "sigma.ofds"
    stats = tmp_path / "stats.json"
    result = run(
        "discover",
        "--data", str(FIXTURES / "clinical_t1_t7.csv"),
        "--onto", str(FIXTURES / "clinical_ontology.json"),
        "--kind", "syn",
        "--exclude", "id",
        "--out", str(out),
        "--stats", str(stats),
    )
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    assert "CC -> CTRY syn" in lines
    doc = json.loads(stats.read_text())
    assert doc["candidates_generated"] >= doc["candidates_verified"]


def test_discover_output_roundtrips_through_infer(tmp_path):
    out = tmp_path / "sigma.ofds"
    run(
        "discover",
        "--data", str(FIXTURES / "clinical_t1_t7.csv"),
        "--onto", str(FIXTURES / "clinical_ontology.json"),
        "--exclude", "id",
        "--out", str(out),
    )
    written = parse_ofd_text(out.read_text())
    cover_out = tmp_path / "cover.ofds"
    result = run("infer", "--sigma", str(out), "--minimal-cover", "--out", str(cover_out))
    assert result.exit_code == 0
    # a discovered set is already minimal: the cover round-trips identically
    assert parse_ofd_text(cover_out.read_text()) == written


def test_infer_closure_and_implies(tmp_path):
    sigma = tmp_path / "sigma.ofds"
    sigma.write_text("CC -> CTRY syn\nCC,DIAG -> MED syn\n")
    result = run("infer", "--sigma", str(sigma), "--closure", "CC,DIAG")
    assert result.exit_code == 0
    assert "closure: CC,CTRY,DIAG,MED" in result.output
    result = run(
        "infer", "--sigma", str(sigma), "--implies", "CC,DIAG -> MED,CTRY syn"
    )
    assert "implies: yes" in result.output


def test_bad_input_exits_one(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2,3\n")
    result = CliRunner().invoke(
        main,
        [
            "discover",
            "--data", str(bad),
            "--onto", str(FIXTURES / "clinical_ontology.json"),
        ],
    )
    assert result.exit_code == 1


def test_clean_infeasible_exits_two(tmp_path):
    result = CliRunner().invoke(
        main,
        [
            "clean",
            "--data", str(FIXTURES / "repair_sample.csv"),
            "--onto", str(FIXTURES / "clinical_ontology.json"),
            "--ofds", str(FIXTURES / "repair_sample.ofds"),
            "--kmax", "0",
            "--tau", "0",
        ],
    )
    assert result.exit_code == 2


def test_assign_then_clean_with_override(tmp_path):
    senses = tmp_path / "lambda.json"
    result = run(
        "assign-senses",
        "--data", str(FIXTURES / "sense_fixture.csv"),
        "--onto", str(FIXTURES / "sense_ontology.json"),
        "--ofds", str(FIXTURES / "sense_fixture.ofds"),
        "--theta-emd", "1.5",
        "--out", str(senses),
    )
    assert result.exit_code == 0
    doc = json.loads(senses.read_text())
    assert {"ofd": 1, "class_rep": 2, "sense": "s1"} in doc

    out = tmp_path / "repairs.json"
    result = run(
        "clean",
        "--data", str(FIXTURES / "sense_fixture.csv"),
        "--onto", str(FIXTURES / "sense_ontology.json"),
        "--ofds", str(FIXTURES / "sense_fixture.ofds"),
        "--senses", str(senses),
        "--tau", "30",
        "--out", str(out),
    )
    assert result.exit_code == 0
    assert json.loads(out.read_text())["feasible"]


def test_inject_clean_score_flow(tmp_path):
    from ofdkit.harness import synthetic_repair_fixture

    inst, onto, sigma = synthetic_repair_fixture(n=200, n_keys=20, n_groups=5, mixed_every=1000, seed=8)
    data = tmp_path / "clean.csv"
    data.write_text(inst.to_csv())
    onto_path = tmp_path / "onto.json"
    onto_path.write_text(onto.to_json())
    ofds = tmp_path / "sigma.ofds"
    ofds.write_text(sigma.to_text())

    result = run(
        "inject-errors",
        "--data", str(data),
        "--onto", str(onto_path),
        "--ofds", str(ofds),
        "--err", "0.05",
        "--inc", "0.0",
        "--mode", "new",
        "--seed", "3",
        "--out-data", str(tmp_path / "dirty.csv"),
        "--out-onto", str(tmp_path / "reduced.json"),
        "--out-log", str(tmp_path / "log.json"),
    )
    assert result.exit_code == 0

    result = run(
        "clean",
        "--data", str(tmp_path / "dirty.csv"),
        "--onto", str(tmp_path / "reduced.json"),
        "--ofds", str(ofds),
        "--tau", "0.99",
        "--out", str(tmp_path / "repairs.json"),
    )
    assert result.exit_code == 0

    result = run(
        "score",
        "--repairs", str(tmp_path / "repairs.json"),
        "--log", str(tmp_path / "log.json"),
    )
    assert result.exit_code == 0
    scores = json.loads(result.output)
    assert scores["recall"] >= 0.8


def test_bench_command(tmp_path):
    out = tmp_path / "bench.csv"
    result = run("bench", "--ns", "200", "--arities", "3", "--out", str(out))
    assert result.exit_code == 0
    assert out.read_text().startswith("n,arity,seconds")


def test_discover_verify_with_oracle(tmp_path):
    result = run(
        "discover",
        "--data", str(FIXTURES / "transitivity.csv"),
        "--onto", str(FIXTURES / "transitivity_ontology.json"),
        "--verify-with-oracle",
        "--out", str(tmp_path / "sigma.ofds"),
    )
    assert result.exit_code == 0
