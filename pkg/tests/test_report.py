import json
import math

import pytest
from hypothesis import given, strategies as st

from whankel.report import FAIL, PASS, VACUOUS, InequalityReport, compare, reports_to_csv, reports_to_json


def test_compare_relations_and_slack():
    assert compare("a", 1.0, 1.0 + 5e-5, ">=").passed
    assert not compare("a", 1.0, 1.001, ">=").passed
    assert compare("b", -1.0, -1.0 - 1e-5, ">=").passed
    assert compare("c", 2.0, 1.0, "<=").status == FAIL
    with pytest.raises(ValueError):
        compare("d", 1, 1, "==")


def test_report_properties():
    r = compare("x", 3.0, 2.0, ">=", params={"alpha": 0.0})
    assert r.status == PASS and r.ratio == 1.5 and r.margin == 1.0
    assert compare("y", 1.0, 0.0, "<=", atol=2.0).ratio is None
    v = InequalityReport("z", 1.0, 2.0, ">=", 0.0, True, VACUOUS)
    assert v.vacuous and "HYPOTHESIS" in v.line().upper()


@given(st.floats(allow_nan=False, allow_infinity=False, width=64))
def test_json_roundtrip_is_bit_exact(x):
    r = compare("t", x, 0.5, "<=", params={"v": x}, diagnostics={"w": [x, x / 3]})
    doc = json.loads(reports_to_json([r], version="0", seed=1))
    assert doc["reports"][0]["lhs"] == x
    assert doc["reports"][0]["diagnostics"]["w"][1] == x / 3


def test_json_envelope_and_determinism():
    reps = [compare("a", 1.0, 0.5, ">=", params={"alpha": 0.5, "c": 1.5}), compare("b", math.pi, 4.0, "<=")]
    one = reports_to_json(reps, version="1", config_echo={"b": 1, "a": [1, 2]}, seed=9)
    assert one == reports_to_json(reps, version="1", config_echo={"a": [1, 2], "b": 1}, seed=9)
    doc = json.loads(one)
    assert set(doc) == {"version", "config_echo", "seed", "reports"}
    assert doc["seed"] == 9


def test_non_finite_values_become_null():
    r = compare("inf", 1.0, math.inf, "<=")
    assert json.loads(reports_to_json([r], version="0"))["reports"][0]["rhs"] is None


def test_csv_summary():
    text = reports_to_csv([compare("a", 1.0, 0.5, ">=", params={"alpha": 0.5, "c": 1.5})])
    lines = text.splitlines()
    assert lines[0] == "name,alpha,params,lhs,rhs,ratio,pass"
    assert lines[1].startswith('a,0.5,"c=1.5",1,0.5,2,true')
