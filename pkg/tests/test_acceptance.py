"""Top-level acceptance gate.

Each test covers one shipping criterion and prints a single PASS/FAIL line
(visible with ``pytest -rA`` or ``-s``).  Lines are printed before the
asserts so a red run still shows the measured numbers.
"""

import json
import math
import time

import numpy as np

from subpot import (
    ALL_CHECKERS,
    AtomicMeasure,
    RationalFunctionSpec,
    SubharmonicPotential,
    SuiteConfig,
    counterexample,
    generate_instance,
    lemma3_check,
    nevanlinna_ratio,
    pjp_identity_check,
    rng_for,
    run_suite,
)

SEED = 20250822


def _line(num: int, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}")


def _float_p(value) -> float:
    return math.inf if value == "inf" else float(value)


def _theorem_suite(checker: str) -> tuple:
    cfg = SuiteConfig(seed=SEED, instances=120, checkers=(checker,), jobs=4)
    t0 = time.perf_counter()
    result = run_suite(cfg)
    elapsed = time.perf_counter() - t0
    rows = result.rows
    live = [r for r in rows if not r["degenerate"]]
    adj = [
        (r["lhs"] + r["err"]) / r["rhs"]
        for r in live
        if r["rhs"] > 0.0 and math.isfinite(r["rhs"])
    ]
    params = [json.loads(r["params_json"]) for r in rows]
    ks = {p["k"] for p in params}
    ps = {_float_p(p["p"]) for p in params}
    return cfg, result, elapsed, rows, adj, ks, ps


def _instance_spans(checker: str, cfg: SuiteConfig, fn_key: str) -> tuple[set, set]:
    atom_counts: set[int] = set()
    piece_counts: set[int] = set()
    for i in range(cfg.instances):
        doc = generate_instance(checker, rng_for(cfg.seed, checker, i)[0], cfg).base_doc
        fn = doc[fn_key]
        if "atoms" in fn:
            atom_counts.add(len(fn["atoms"]))
        else:
            atom_counts.add(len(fn["plus_atoms"]) + len(fn["minus_atoms"]))
        piece_counts.add(len(doc["e"]))
    return atom_counts, piece_counts


def test_criterion_1_reciprocal_counterexample():
    t0 = time.perf_counter()
    record = counterexample()
    elapsed = time.perf_counter() - t0
    bad = [c["label"] for c in record["checks"] if not c["ok"]]
    ok = record["ok"] and not bad and elapsed < 5.0
    _line(1, ok, f"{len(record['checks'])} closed-form checks, "
                 f"{len(bad)} mismatches, elapsed {elapsed:.2f}s")
    assert len(record["checks"]) == 29
    assert not bad
    assert record["ok"]
    assert elapsed < 5.0


def test_criterion_2_circle_mean_difference_identity():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 9))
        moduli = np.exp(rng.uniform(math.log(0.1), math.log(5.0), n))
        angles = rng.uniform(0.0, 2.0 * math.pi, n)
        masses = rng.uniform(0.1, 3.0, n)
        pairs = [
            (complex(m * math.cos(t), m * math.sin(t)), float(w))
            for m, t, w in zip(moduli, angles, masses)
        ]
        v = SubharmonicPotential(AtomicMeasure.from_pairs(pairs), float(rng.uniform(-1.0, 1.0)))
        lo, hi = sorted(np.exp(rng.uniform(math.log(0.05), math.log(10.0), 2)))
        rep = pjp_identity_check(v, float(lo), float(hi))
        worst = max(worst, rep.lhs / rep.rhs)
        assert rep.lhs <= rep.rhs, rep.params
    _line(2, True, f"200 potentials, worst |mean diff - count|/budget = {worst:.3e}")


def test_criterion_3_characteristic_growth_bound():
    cfg, result, elapsed, rows, adj, ks, ps = _theorem_suite("main_theorem_T")
    atom_counts, piece_counts = _instance_spans("main_theorem_T", cfg, "u")
    ok = (
        len(rows) >= 1000
        and all(r["holds"] for r in rows)
        and result.exit_code == 0
        and max(adj) < 1.0 - 1e-6
        and elapsed < 600.0
    )
    _line(3, ok, f"{len(rows)} reports, max margin-adjusted ratio {max(adj):.4f}, "
                 f"elapsed {elapsed:.1f}s")
    assert len(rows) >= 1000
    assert all(r["holds"] for r in rows)
    assert result.exit_code == 0
    assert max(adj) < 1.0 - 1e-6
    assert ks == set(cfg.k_values) and ps == set(cfg.p_values)
    assert atom_counts >= set(range(1, 9))
    assert piece_counts >= set(range(1, 11))
    assert elapsed < 600.0


def test_criterion_4_supremum_growth_bound():
    cfg, result, elapsed, rows, adj, ks, ps = _theorem_suite("main_theorem_M")
    atom_counts, piece_counts = _instance_spans("main_theorem_M", cfg, "v")
    ok = (
        len(rows) >= 1000
        and all(r["holds"] for r in rows)
        and result.exit_code == 0
        and max(adj) < 1.0 - 1e-6
        and elapsed < 600.0
    )
    _line(4, ok, f"{len(rows)} reports, max margin-adjusted ratio {max(adj):.4f}, "
                 f"elapsed {elapsed:.1f}s")
    assert len(rows) >= 1000
    assert all(r["holds"] for r in rows)
    assert result.exit_code == 0
    assert max(adj) < 1.0 - 1e-6
    assert ks == set(cfg.k_values) and ps == set(cfg.p_values)
    assert atom_counts >= set(range(1, 9))
    assert piece_counts >= set(range(1, 11))
    assert elapsed < 600.0


def test_criterion_5_lemma_batches():
    details = []
    all_ok = True
    for name in ("lemma2", "lemma3", "lemma4", "lemma_a", "main_lemma"):
        cfg = SuiteConfig(seed=SEED, instances=500, checkers=(name,), jobs=4)
        result = run_suite(cfg)
        held = all(r["holds"] for r in result.rows)
        all_ok = all_ok and held and result.exit_code == 0 and len(result.rows) >= 500
        details.append(f"{name} {len(result.rows)} rows")
        assert len(result.rows) >= 500
        assert held, name
        assert result.exit_code == 0, name
    equality = lemma3_check(1.0, math.e, 1.0)
    eq_ok = abs(equality.ratio - 1.0) <= 1e-10
    _line(5, all_ok and eq_ok,
          f"{', '.join(details)}; equality-case ratio off by {abs(equality.ratio - 1.0):.2e}")
    assert eq_ok


def test_criterion_6_averaged_growth_versus_characteristic():
    f = RationalFunctionSpec(
        zeros=AtomicMeasure.empty(),
        poles=AtomicMeasure.from_pairs([(0j, 1.0)]),
    )
    diverged = {}
    for k in (2.0, 4.0):
        rep = nevanlinna_ratio(f, 1.0 / (2.0 * k), k)
        diverged[k] = rep.ratio
        assert math.isinf(rep.ratio) and rep.ratio > 0, (k, rep.ratio)
        assert rep.lhs > 0.0 and rep.rhs == 0.0

    cfg = SuiteConfig(seed=SEED, instances=200, checkers=("nevanlinna_ratio",), jobs=4)
    result = run_suite(cfg)
    per_k: dict[float, float] = {}
    for row in result.rows:
        k = json.loads(row["params_json"])["k"]
        per_k[k] = max(per_k.get(k, 0.0), row["ratio"])
    finite = all(math.isfinite(c) for c in per_k.values())
    empirical = ", ".join(f"C({k:g})={c:.3f}" for k, c in sorted(per_k.items()))
    _line(6, finite, f"ratio at r=1/(2k) diverges for k=2,4; "
                     f"empirical over {cfg.instances} instances: {empirical}")
    assert len(result.rows) == cfg.instances * len(cfg.k_values)
    assert finite
    assert set(per_k) == set(cfg.k_values)


def test_criterion_7_small_interval_constant():
    cfg = SuiteConfig(seed=SEED, instances=300, checkers=("small_intervals_ratio",), jobs=4)
    result = run_suite(cfg)
    live = [r for r in result.rows if not r["degenerate"]]
    a_values = [r["a_min"] for r in live if r["a_min"] is not None]
    aggregate = max(a_values)
    ok = math.isfinite(aggregate) and aggregate >= 1.0
    _line(7, ok, f"empirical minimal constant over {cfg.instances} instances: "
                 f"a = {aggregate:.6f} (from {len(a_values)} reports)")
    assert len(result.rows) == cfg.instances * 2
    assert a_values
    assert math.isfinite(aggregate)
    assert aggregate >= 1.0


def test_criterion_8_suite_determinism():
    cfg = SuiteConfig(seed=101, instances=2, checkers=ALL_CHECKERS, jobs=2)
    first = run_suite(cfg).csv_text.encode()
    second = run_suite(cfg).csv_text.encode()
    ok = first == second
    n_rows = first.count(b"\n") - 1
    _line(8, ok, f"two runs over all {len(ALL_CHECKERS)} checkers, "
                 f"{n_rows} rows, byte-identical CSV")
    assert ok
