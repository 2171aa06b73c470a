import json
import os
import subprocess

import pytest

import ztac


def test_golden_request_accepts(engine):
    request = ztac.golden_request(20230327)
    decision = engine.decide(request, now=1679941199)
    assert decision["status"] == "Accept"
    assert decision["scores"]["bt"] >= 0.9
    assert decision["fields"]["f3"][:8] == "6421EC5F"  # now + one hour
    assert len(decision["context"]) == 32


def test_decide_output_matches_schema(engine, validator):
    request = ztac.golden_request(5)
    validator("decide_request.schema.json").validate(request)
    check = validator("final_decision.schema.json")
    check.validate(engine.decide(request, now=0))
    request["checks"] = {k: False for k in request["checks"]}
    denied = engine.decide(request, now=0)
    assert denied["status"] == "Deny"
    assert denied["fields"]["f4"] == "0"
    check.validate(denied)


def test_score_output_matches_schema(engine, validator):
    request = ztac.golden_request(9)
    body = {k: request[k] for k in ("attributes", "candidate_report", "patient_history", "checks")}
    validator("score_request.schema.json").validate(body)
    scores = engine.score(body)
    validator("trust_scores.schema.json").validate(scores)
    assert scores["bt"] == pytest.approx((scores["bt_a"] + scores["bt_b"]) / 2, abs=1e-6)


def test_schema_errors_name_the_path(engine):
    request = ztac.golden_request(1)
    del request["checks"]["logging"]
    with pytest.raises(ztac.SchemaError, match="/checks/logging"):
        engine.decide(request, now=0)
    request = ztac.golden_request(1)
    request["requested_level"] = 9
    with pytest.raises(ztac.InvalidArgument):
        engine.decide(request, now=0)


def test_dataset_matches_schema_and_evaluates(engine, validator):
    jsonl = ztac.generate_dataset(4, 200, 0.5)
    lines = jsonl.splitlines()
    assert len(lines) == 200
    check = validator("labeled_sample.schema.json")
    for line in lines:
        check.validate(json.loads(line))
    assert sum(json.loads(line)["label"] == "misuse" for line in lines) == 100
    assert ztac.generate_dataset(4, 200, 0.5) == jsonl

    report = engine.evaluate(jsonl, threshold=0.7, threads=2)
    assert report["samples"] == 200
    assert report["proposed"]["f1"] > report["bleu"]["f1"]


def test_audit_entries_match_schema(tmp_path, validator, source_dir):
    cli = os.environ.get("ZTAC_CLI")
    if not cli:
        pytest.skip("command line tool not available")
    log = tmp_path / "audit.jsonl"
    golden = source_dir / "data" / "golden_request.json"
    for _ in range(3):
        subprocess.run([cli, "decide", str(golden), "--audit-log", str(log), "--now", "1679941199"],
                       check=True, capture_output=True)
    check = validator("audit_entry.schema.json")
    entries = [json.loads(line) for line in log.read_text().splitlines()]
    assert [e["sequence"] for e in entries] == [1, 2, 3]
    for e in entries:
        check.validate(e)
    assert ztac.verify_audit_log(str(log)) == {"ok": True, "entries": 3, "first_broken": None, "reason": ""}

    data = bytearray(log.read_bytes())
    data[len(data) // 2] ^= 0x01
    log.write_bytes(bytes(data))
    result = ztac.verify_audit_log(str(log))
    assert not result["ok"]
    assert result["first_broken"] == 2
