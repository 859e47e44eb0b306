import json
from fractions import Fraction
from pathlib import Path

import pytest

import ivmnar

CONFIG = json.loads((Path(__file__).resolve().parents[2] / "data" / "configs" / "1ud-one-sided.json").read_text())


def test_catalog_counts():
    cat = ivmnar.catalog()
    assert sum(e["identifiable"] for e in cat) == 39
    assert sum(not e["identifiable"] for e in cat) == 15


def test_simulate_then_identify_exact():
    obs = ivmnar.simulate(CONFIG)
    assert Fraction(obs["trueCace"]) == Fraction(1, 3)
    res = ivmnar.identify("1UD", obs, exact=True)
    assert Fraction(res["cace"]) == Fraction(1, 3)
    f = ivmnar.identify("1UD", obs)
    assert f["cace"] == pytest.approx(1 / 3, abs=1e-12)


def test_refusal_carries_kind():
    obs = ivmnar.simulate(CONFIG)
    with pytest.raises(ivmnar.IvmnarError) as e:
        ivmnar.identify("1ZDY", obs)
    assert e.value.kind == "MechanismNotIdentifiable"
    with pytest.raises(ivmnar.IvmnarError) as e:
        ivmnar.identify("nope", obs)
    assert e.value.kind == "UnknownMechanism"


def test_sample_and_sensitivity():
    csv = ivmnar.sample_csv(CONFIG, 20000, 3)
    assert csv.startswith("z,d,y\n")
    assert csv == ivmnar.sample_csv(CONFIG, 20000, 3)
    rep = ivmnar.sensitivity(["MCAR-Y", "1ZD", "1UD", "2ZD"], csv=csv, one_sided=True)
    by = {e["mechanism"]: e for e in rep["entries"]}
    assert by["1UD"]["cace"] == pytest.approx(1 / 3, abs=0.05)
    assert by["2ZD"]["error"] == "RegimeMismatch"
    assert rep["dataset"]["n"] == 20000


def test_empirical_observable():
    obs = ivmnar.empirical_observable("z,d,y\n0,0,1\n0,0,\n1,1,1\n1,0,0\n", one_sided=True)
    assert obs["regime"] == "OutcomeOnly"
    assert obs["cells"]["011|0"] == 0.5


def test_fixtures_verify():
    reports = ivmnar.verify_counterexamples()
    assert len(reports) == 14
    assert all(r["forwardA"] and r["forwardB"] and r["refused"] for r in reports)
    fx = ivmnar.fixtures()
    assert fx[0]["id"].startswith("S3.1.1")


def test_joint_and_conditions():
    cfg = dict(CONFIG, mechanism="1ZD", responseY="1/2", oneSided=False,
               piU={"a": "1/5", "c": "1/2", "n": "3/10"}, outcomeLaw={"a1": "1/2", "n0": "1/2", "c0": "1/3", "c1": "2/3"})
    obs = ivmnar.simulate(cfg)
    j = ivmnar.recover_joint("1ZD", obs)
    assert j["joint"] is not None
    rep = ivmnar.check_conditions("1ZD", obs, exact=True)
    assert rep["allPass"]


def test_label_normalization():
    assert ivmnar.normalize_label("1U⊕2ZD") == "1U(+)2ZD"
