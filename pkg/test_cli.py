#!/usr/bin/env python3
"""
Command line and instance file tests for feynsum.
Covers config and schema validation, evaluations, enumeration, exit codes
and byte-stable reports.
"""

import json
import os
from fractions import Fraction

import pytest

from src.feynsum import EXIT_FAIL, EXIT_INPUT, EXIT_PASS, main, parse_profile, run
from src.logic.config import Config
from src.logic.controller import Controller
from src.logic.element import Element
from src.logic.errors import InstanceError
from src.logic.instance import Instance
from src.logic.storage import Storage

DATA = os.path.join(os.path.dirname(__file__), "test_data")
KIL = os.path.join(DATA, "kil_instance.json")
DEFAULT = os.path.join(DATA, "default_instance.json")


def kil_data() -> dict:
    return Storage.load_instance(KIL)


def closed_xy(**extra) -> dict:
    return dict({
        "schema_version": 1,
        "closed": {"letters": [{"name": "x", "degree": 0}, {"name": "y", "degree": 1}]},
    }, **extra)


# ---------------- config ----------------

def test_config_defaults_and_overrides():
    config = Config()
    assert config.window.max_words == 4 and config.window.max_gamma == 2
    changed = config.overridden(seed=None, jobs=3)
    assert changed.jobs == 3 and changed.seed == config.seed


def test_config_rejects_unknown_field_with_suggestion():
    with pytest.raises(InstanceError, match="window_words"):
        Config.from_dict({"window_word": 3})


def test_config_rejects_bad_values():
    with pytest.raises(InstanceError):
        Config(jobs=True)
    with pytest.raises(InstanceError):
        Config(window_words=0)
    with pytest.raises(InstanceError):
        Config(defect_mode="spread")


# ---------------- instance files ----------------

def test_kil_instance_parses():
    inst = Instance.from_dict(kil_data())
    assert inst.name == "kil"
    assert inst.config.seed == 7
    assert set(inst.closed.space.names()) == {"p", "q", "t", "u"}
    assert inst.kernel(inst.closed.space.get("p"), inst.closed.space.get("u")) == 1
    assert inst.samples["bvinf"] == 20
    assert [e.name for e in inst.evaluations] == ["K2(p,u)", "K2(q,t)", "K1(pu)", "oc1(p)"]


def test_unknown_top_level_field_is_rejected():
    with pytest.raises(InstanceError, match="campaigns"):
        Instance.from_dict({"schema_version": 1, "campains": []})


def test_unknown_nested_field_is_rejected():
    data = kil_data()
    data["closed"]["letters"][0]["deg"] = 0
    with pytest.raises(InstanceError, match="unknown field"):
        Instance.from_dict(data)


def test_schema_version_is_required():
    with pytest.raises(InstanceError, match="schema_version"):
        Instance.from_dict({"name": "x"})


def test_kernel_needs_closed_section():
    with pytest.raises(InstanceError):
        Instance.from_dict({"schema_version": 1, "kernel": {"entries": []}})


def test_unknown_letter_is_rejected():
    data = closed_xy(elements={"e": {"terms": [{"word": ["w"]}]}})
    with pytest.raises(InstanceError, match="Unknown letter"):
        Instance.from_dict(data)


def test_window_overflow_is_an_input_error():
    data = closed_xy(elements={"e": {"terms": [{"word": ["x"] * 5}]}})
    with pytest.raises(InstanceError, match="window overflow"):
        Instance.from_dict(data)
    data = closed_xy(elements={"e": {"terms": [{"word": ["x"], "gamma": 3}]}})
    with pytest.raises(InstanceError, match="window overflow"):
        Instance.from_dict(data)


def test_closed_and_w_names_must_differ():
    data = kil_data()
    data["w"]["letters"][0]["name"] = "p"
    data["w"]["bracket"] = []
    with pytest.raises(InstanceError, match="distinct"):
        Instance.from_dict(data)


def test_digest_depends_on_config():
    inst = Instance.from_dict(kil_data())
    assert inst.digest() == Instance.from_dict(kil_data()).digest()
    assert inst.digest() != inst.with_config(inst.config.overridden(seed=8)).digest()


# ---------------- controller ----------------

def test_eval_with_zero_kernel():
    inst = Instance.from_dict(Storage.load_instance(DEFAULT))
    report = Controller(inst).cmd_eval()
    space = inst.closed.space
    y, x = space.get("y"), space.get("x")
    assert report.passed
    assert report.payload["K1(y gamma^2)"] == Element.monomial(space, 3, [y], 2).to_dict()
    assert report.payload["K1(x/2)"] == Element.monomial(space, 3, [x], 0, Fraction(1, 2)).to_dict()


def test_eval_on_kil_instance():
    inst = Instance.from_dict(kil_data())
    report = Controller(inst).cmd_eval()
    space = inst.closed.space
    p, u = space.get("p"), space.get("u")
    assert report.payload["K2(p,u)"] == Element.unit(space, 3).to_dict()
    assert report.payload["K2(q,t)"] == Element.unit(space, 3, -1).to_dict()
    pu = Element.monomial(space, 3, [p, u]) + Element.unit(space, 3).times_gamma(1)
    assert report.payload["K1(pu)"] == pu.to_dict()
    assert report.payload["oc1(p)"] == Element.monomial(space, 3, [p]).to_dict()


def test_eval_needs_evaluations():
    with pytest.raises(InstanceError):
        Controller(Instance.from_dict(closed_xy())).cmd_eval()


def test_enumerate_smallest_cell():
    report = Controller(Instance.from_dict({"schema_version": 1})).cmd_enumerate(1, 0, 1)
    assert report.passed
    assert len(report.payload["classes"]) == 2
    assert sorted(report.payload["aut_table"].values()) == sorted(c["aut"] for c in report.payload["classes"])


def test_unknown_campaign():
    with pytest.raises(InstanceError):
        Controller(Instance.from_dict({"schema_version": 1})).cmd_verify("everything")


def test_gt_bijection_campaign_is_independent_of_jobs():
    data = {"schema_version": 1,
            "sweep": {"max_g": 0, "max_n": 1, "max_m": 2, "max_k": 1, "max_half_edges": 4}}
    serial = Controller(Instance.from_dict(data)).cmd_verify("gt-bijection")
    parallel = Controller(Instance.from_dict(data, Config(jobs=2))).cmd_verify("gt-bijection")
    assert serial.passed
    assert [c.to_dict() for c in serial.checks] == [c.to_dict() for c in parallel.checks]
    assert serial.payload == parallel.payload


# ---------------- command line ----------------

def test_parse_profile():
    assert parse_profile("3:0,2:1") == [(3, 0), (2, 1)]


def test_exit_code_pass_and_report_bytes(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["eval", "--file", DEFAULT, "--out", str(first)]) == EXIT_PASS
    assert main(["eval", "--file", DEFAULT, "--out", str(second)]) == EXIT_PASS
    assert first.read_bytes() == second.read_bytes()
    report = json.loads(first.read_text(encoding="utf-8"))
    assert report["schema_version"] == 1
    assert "timings" not in report


def test_timings_only_on_request(tmp_path):
    out = tmp_path / "r.json"
    assert main(["eval", "--file", DEFAULT, "--timings", "--out", str(out)]) == EXIT_PASS
    assert "eval" in json.loads(out.read_text(encoding="utf-8"))["timings"]


def test_exit_code_input_errors(tmp_path):
    assert main(["eval", "--file", str(tmp_path / "missing.json")]) == EXIT_INPUT
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    assert main(["eval", "--file", str(broken)]) == EXIT_INPUT
    overflow = tmp_path / "overflow.json"
    overflow.write_text(json.dumps(closed_xy(elements={"e": {"terms": [{"word": ["x"] * 3}]}})), encoding="utf-8")
    assert main(["eval", "--file", str(overflow), "--window-words", "2"]) == EXIT_INPUT
    with pytest.raises(SystemExit) as e:
        main(["verify", "--campaign", "everything"])
    assert e.value.code == EXIT_INPUT


def test_exit_code_check_failure(tmp_path):
    data = kil_data()
    data["kernel"]["entries"] = [["p", "u", 1], ["q", "t", 1]]
    data["samples"] = {"linfty": 0}
    path = tmp_path / "mutated.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    code, report = run(["verify", "--campaign", "linfty", "--file", str(path)])
    assert code == EXIT_FAIL
    assert "kil-certificate" in [c.name for c in report.failures()]
