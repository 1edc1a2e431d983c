"""Monte Carlo harness: seeding, aggregation, config handling, output."""
import json
import math

import numpy as np
import pytest

from lsgof import simulation as sm
from lsgof.distributions import Distribution, Family
from lsgof.errors import DomainError

TRUTH_N25 = Distribution(Family.NORMAL, 2.0, 5.0)
TINY = {"nulls": ["normal"], "truths": [{"family": "normal", "location": 2, "scale": 5}],
        "n": [30], "alphas": [0.05], "replications": 6, "seed": 99}


def _cfg(**over):
    c = {k: (v.copy() if isinstance(v, list) else v) for k, v in TINY.items()}
    c.update(over)
    return c


def test_replication_statistics_deterministic():
    a = sm.replication_statistics(Family.NORMAL, TRUTH_N25, 50, 1729, 3)
    b = sm.replication_statistics(Family.NORMAL, TRUTH_N25, 50, 1729, 3)
    assert a == b
    c = sm.replication_statistics(Family.NORMAL, TRUTH_N25, 50, 1729, 4)
    assert a != c
    assert set(a) == set(sm.METHODS)
    assert all(math.isfinite(v) or math.isinf(v) for v in a.values())


def test_replication_statistics_alpha_free():
    # the data key must not depend on alpha: same truth label, same draws
    key1 = sm._data_key(Family.NORMAL, TRUTH_N25, 50)
    key2 = sm._data_key(Family.NORMAL, TRUTH_N25, 50)
    assert key1 == key2
    assert key1 != sm._data_key(Family.LOGISTIC, TRUTH_N25, 50)
    assert key1 != sm._data_key(Family.NORMAL, TRUTH_N25, 51)


def test_run_replication_consistent_with_statistics():
    cell = sm.SimulationCell(Family.NORMAL, TRUTH_N25, 50, 0.05, 10, 1729)
    stats = sm.replication_statistics(Family.NORMAL, TRUTH_N25, 50, 1729, 2)
    flags = sm.run_replication(cell, 2)
    assert flags["kmt"] == (stats["kmt"] > 2.24)


def test_rejections_nested_across_alpha():
    r05 = sm.run_cell(sm.SimulationCell(Family.NORMAL, TRUTH_N25, 30, 0.05, 40, 7))
    r01 = sm.run_cell(sm.SimulationCell(Family.NORMAL, TRUTH_N25, 30, 0.01, 40, 7))
    for m in sm.METHODS:
        assert r01.rates[m] <= r05.rates[m] + 1e-12


def test_cell_result_stderr_formula():
    res = sm.run_cell(sm.SimulationCell(Family.NORMAL, TRUTH_N25, 30, 0.05, 40, 7))
    for m in sm.METHODS:
        p, eff = res.rates[m], res.effective[m]
        assert eff <= 40
        if eff:
            assert res.stderr[m] == pytest.approx(math.sqrt(p * (1 - p) / eff), abs=1e-12)


def test_cell_validation():
    with pytest.raises(DomainError):
        sm.SimulationCell(Family.NORMAL, TRUTH_N25, 26, 0.05, 10, 1)
    with pytest.raises(DomainError):
        sm.SimulationCell(Family.NORMAL, TRUTH_N25, 30, 0.05, 0, 1)
    with pytest.raises(DomainError):
        sm.SimulationCell(Family.CAUCHY, TRUTH_N25, 30, 0.05, 10, 1)


def test_validate_config_reports_offending_key():
    for key, bad in (("nulls", ["cauchy"]), ("n", [20]), ("alphas", [0.1]),
                     ("replications", 0), ("seed", "x")):
        with pytest.raises(DomainError, match=key):
            sm.validate_config(_cfg(**{key: bad}))
    with pytest.raises(DomainError, match="extra"):
        sm.validate_config(_cfg(extra=1))
    missing = _cfg()
    del missing["alphas"]
    with pytest.raises(DomainError, match="alphas"):
        sm.validate_config(missing)


def test_validate_config_accepts_workers_key():
    sm.validate_config(_cfg(workers=2))


def test_preset_configs_valid():
    for cfg in (sm.paper_config(), sm.desk_config()):
        sm.validate_config(cfg)
        assert cfg["seed"] == 1729
        assert set(cfg["alphas"]) == {0.05, 0.01}
    assert sm.paper_config()["replications"] == 1000
    assert sm.desk_config()["replications"] == 200
    assert sm.paper_config(seed=7)["seed"] == 7


def test_describe_distribution():
    assert sm.describe_distribution(TRUTH_N25) == "normal(2,5)"
    assert sm.describe_distribution(Distribution(Family.STUDENT_T5, 2.0, 5.0)) == "stt(2,5)"
    mtn = Distribution(Family.NORMAL_MIXTURE, 2.0, 5.0, weight=0.9, scale2=15.0)
    assert sm.describe_distribution(mtn) == "mtn(w=0.9,loc=2,s1=5,s2=15)"


def test_run_study_shape_and_kind():
    cfg = _cfg(truths=[{"family": "normal", "location": 2, "scale": 5},
                       {"family": "laplace", "location": 2, "scale": 5}])
    pt = sm.run_study(cfg)
    assert len(pt.rows) == 2 * 1 * 1 * len(sm.METHODS)
    kinds = {(r["truth"], r["kind"]) for r in pt.rows}
    assert ("normal(2,5)", "level") in kinds
    assert ("laplace(2,5)", "power") in kinds


def test_run_study_serial_equals_parallel():
    cfg = _cfg(replications=8)
    a = sm.run_study(cfg, workers=1)
    b = sm.run_study(cfg, workers=2)
    assert a.to_csv() == b.to_csv()


def test_run_study_deterministic_across_calls():
    a = sm.run_study(_cfg())
    b = sm.run_study(_cfg())
    assert a.to_csv() == b.to_csv()
    assert a.to_text() == b.to_text()


def test_outputs_are_timestamp_free_except_metadata():
    pt = sm.run_study(_cfg())
    md = json.loads(pt.metadata_json())
    assert "generated_at" in md
    assert "generated_at" not in pt.to_csv()
    csv = pt.to_csv()
    header = csv.splitlines()[0]
    assert header == "null,truth,n,method,alpha,kind,rate,stderr,failures,reps"
    assert len(csv.splitlines()) == 1 + len(pt.rows)


def test_csv_parses_back():
    import csv as csvmod
    import io
    pt = sm.run_study(_cfg())
    rows = list(csvmod.reader(io.StringIO(pt.to_csv())))
    assert all(len(r) == 10 for r in rows)
    for r in rows[1:]:
        assert r[1] == "normal(2,5)"  # embedded comma survives quoting
        float(r[6]); float(r[7]); int(r[8]); int(r[9])


def test_metadata_round_trips_config():
    cfg = _cfg()
    md = json.loads(sm.run_study(cfg).metadata_json())
    assert md["seed"] == cfg["seed"]
    assert md["replications"] == cfg["replications"]
    assert md["nulls"] == cfg["nulls"]
