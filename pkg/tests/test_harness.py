"""Instance generation, suite plumbing, CSV determinism, and the CLI."""

import csv
import io
import json
import math

import numpy as np
import pytest

from subpot import (
    ALL_CHECKERS,
    PROBE_CHECKERS,
    SuiteConfig,
    generate_instance,
    rng_for,
    rows_to_csv,
    run_check,
    run_suite,
    run_unit,
)
from subpot.cli import main as cli_main
from subpot.harness import canonical_json, combo_count

SMALL = SuiteConfig(seed=7, instances=2, checkers=("lemma2", "lemma3", "pjp_identity"))


def test_rng_stream_is_keyed_by_checker_and_index():
    a1, s1 = rng_for(5, "lemma2", 0)
    a2, s2 = rng_for(5, "lemma2", 0)
    b, s3 = rng_for(5, "lemma2", 1)
    c, _ = rng_for(5, "lemma3", 0)
    assert s1 == s2
    assert a1.random() == a2.random()
    assert s1 != s3
    draws = {float(g.random()) for g in (rng_for(5, "lemma2", 0)[0], b, c)}
    assert len(draws) == 3


def test_generated_instances_are_deterministic():
    cfg = SuiteConfig(seed=11, instances=1)
    for name in ALL_CHECKERS:
        one = generate_instance(name, rng_for(11, name, 3)[0], cfg)
        two = generate_instance(name, rng_for(11, name, 3)[0], cfg)
        assert canonical_json(one.base_doc) == canonical_json(two.base_doc)
        assert one.combos == two.combos


def test_generated_instances_satisfy_checkers():
    cfg = SuiteConfig(seed=23, instances=1)
    for name in ALL_CHECKERS:
        inst = generate_instance(name, rng_for(23, name, 0)[0], cfg)
        combos = inst.combos or ({},)
        for combo in combos:
            doc = dict(inst.base_doc)
            doc.update(combo)
            rep = run_check(name, doc, quad=cfg.quad_override())
            if name not in PROBE_CHECKERS:
                assert rep.holds(), (name, combo)


def test_generated_atoms_clear_probe_radii():
    cfg = SuiteConfig(seed=31, instances=1)
    for idx in range(6):
        inst = generate_instance("main_theorem_T", rng_for(31, "main_theorem_T", idx)[0], cfg)
        doc = inst.base_doc
        moduli = [math.hypot(a["re"], a["im"]) for a in doc["u"]["plus_atoms"] + doc["u"]["minus_atoms"]]
        probes = [doc["r0"], doc["r"]]
        for k in cfg.k_values:
            probes += [k * doc["r"], math.sqrt(k) * doc["r"]]
        for m in moduli:
            assert min(abs(m - p) for p in probes) >= 1e-3 * min(1.0, max(probes))


def test_run_unit_is_deterministic():
    rows1, fails1 = run_unit("lemma4", 2, SMALL)
    rows2, fails2 = run_unit("lemma4", 2, SMALL)
    assert rows1 == rows2
    assert fails1 == fails2 == []


def test_suite_rows_and_exit_code():
    result = run_suite(SMALL)
    per_combo = sum(combo_count(n, SMALL) for n in SMALL.checkers)
    assert len(result.rows) == SMALL.instances * per_combo
    assert result.exit_code == 0
    assert all(r["holds"] for r in result.rows)


def test_suite_csv_is_byte_identical():
    a = run_suite(SMALL).csv_text
    b = run_suite(SMALL).csv_text
    assert a == b


def test_parallel_matches_serial():
    serial = run_suite(SMALL)
    parallel = run_suite(SuiteConfig(seed=7, instances=2,
                                     checkers=("lemma2", "lemma3", "pjp_identity"), jobs=2))
    assert serial.csv_text == parallel.csv_text


def test_empty_checker_list_yields_empty_csv():
    result = run_suite(SuiteConfig(seed=1, instances=4, checkers=()))
    assert result.rows == []
    assert result.exit_code == 0
    assert result.csv_text.count("\n") == 1  # header only


def test_csv_columns_and_param_payload():
    result = run_suite(SuiteConfig(seed=3, instances=1, checkers=("lemma2",)))
    header, row = list(csv.reader(io.StringIO(result.csv_text)))[:2]
    assert header[:6] == ["name", "seed", "lhs", "rhs", "ratio", "holds"]
    parsed = json.loads(row[header.index("params")])
    assert "fingerprint" in parsed and "r" in parsed and "R" in parsed


def test_canonical_json_handles_nonfinite():
    doc = {"a": math.inf, "b": -math.inf, "c": math.nan, "d": [1.0, {"z": 2}]}
    text = canonical_json(doc)
    assert '"inf"' in text and '"-inf"' in text and '"nan"' in text
    assert json.loads(text)["d"] == [1.0, {"z": 2}]


def test_config_doc_round_trip():
    cfg = SuiteConfig(seed=99, instances=5, checkers=("lemma3",), p_values=(2.0, math.inf),
                      quad_rel_tol=1e-7)
    back = SuiteConfig.from_doc(cfg.to_doc())
    assert back == cfg
    assert back.quad_override().rel_tol == 1e-7
    assert SuiteConfig().quad_override() is None


def test_config_validation():
    with pytest.raises(ValueError):
        SuiteConfig(checkers=("nope",))
    with pytest.raises(ValueError):
        SuiteConfig(instances=-1)
    with pytest.raises(ValueError):
        SuiteConfig(k_values=(0.5,))
    with pytest.raises(ValueError):
        SuiteConfig(radius_range=(2.0, 1.0))
    with pytest.raises(ValueError):
        SuiteConfig(jobs=0)
    with pytest.raises(ValueError):
        SuiteConfig(p_values=(1.0,))


def test_combo_counts_under_default_config():
    cfg = SuiteConfig()
    assert combo_count("lemma2", cfg) == 1
    assert combo_count("main_lemma", cfg) == len(cfg.b_values) * len(cfg.p_values)
    assert combo_count("main_theorem_T", cfg) == len(cfg.k_values) * len(cfg.p_values)
    assert combo_count("nevanlinna_ratio", cfg) == len(cfg.k_values)
    assert combo_count("small_intervals_ratio", cfg) == len([b for b in cfg.b_values if b <= 1.0])


def test_rows_to_csv_floats_round_trip():
    rows, _ = run_unit("lemma3", 0, SuiteConfig(seed=13, instances=1, checkers=("lemma3",)))
    text = rows_to_csv(rows)
    lhs_cell = text.strip().split("\n")[1].split(",")[2]
    assert float(lhs_cell) == rows[0]["lhs"]


# --- command line ------------------------------------------------------------

def test_cli_counterexample_exits_clean(capsys):
    assert cli_main(["counterexample"]) == 0
    out = capsys.readouterr().out
    assert "ok" in out


def test_cli_compute_potential(tmp_path, capsys):
    doc = {"atoms": [{"re": 0.0, "im": 0.0, "mass": 1.0}], "const": 0.0}
    fn = tmp_path / "instance.json"
    fn.write_text(json.dumps(doc))
    assert cli_main(["compute", "--fn", str(fn), "--r", "2.718281828459045"]) == 0
    out = capsys.readouterr().out
    assert "circle_mean" in out


def test_cli_check_generated_instance(capsys):
    assert cli_main(["check", "lemma2", "--gen-seed", "17"]) == 0
    out = capsys.readouterr().out
    assert "lemma2" in out and "holds=True" in out


def test_cli_check_save_and_reload(tmp_path, capsys):
    saved = tmp_path / "inst.json"
    assert cli_main(["check", "lemma4", "--gen-seed", "29", "--save", str(saved)]) == 0
    first = capsys.readouterr().out
    assert cli_main(["check", "lemma4", "--fn", str(saved)]) == 0
    second = capsys.readouterr().out
    assert first == second


def test_cli_suite_writes_csv(tmp_path, capsys):
    out_csv = tmp_path / "report.csv"
    rc = cli_main([
        "suite", "--seed", "7", "--instances", "1",
        "--checkers", "lemma2,lemma3", "--out", str(out_csv),
    ])
    assert rc == 0
    assert out_csv.read_text().startswith("name,seed,")
    summary = capsys.readouterr().out
    assert "exit_code=0" in summary


def test_cli_suite_config_file(tmp_path):
    cfg_fn = tmp_path / "suite.json"
    cfg_fn.write_text(json.dumps({"seed": 7, "instances": 1, "checkers": ["lemma2"]}))
    assert cli_main(["suite", "--config", str(cfg_fn)]) == 0


def test_cli_bad_inputs_exit_three(tmp_path, capsys):
    assert cli_main(["check", "lemma2", "--fn", str(tmp_path / "missing.json")]) == 3
    assert cli_main(["check", "nope", "--gen-seed", "1"]) == 3
    assert cli_main(["check", "lemma2"]) == 3
    assert cli_main(["suite", "--checkers", "unknown_checker"]) == 3
    capsys.readouterr()
