"""Command line behavior: subcommands, exit codes, JSON output."""
import json
import os


from fixleads.cli import main

DATA = os.path.join(os.path.dirname(__file__), "data")


def _path(name):
    return os.path.join(DATA, name)


def test_check_idle_with_oracle(capsys):
    code = main(["check", _path("idle.evt"), "--oracle"])
    out = capsys.readouterr().out
    assert code == 0
    assert "PASS reach" in out and "oracle agrees" in out


def test_check_cycle3_fails_with_counterexample(capsys):
    code = main(["check", _path("cycle3.evt")])
    out = capsys.readouterr().out
    assert code == 1
    assert "FAIL climb" in out
    assert "counterexample" in out


def test_check_missing_file(capsys):
    code = main(["check", "missing.evt"])
    assert code == 2
    assert "no such file" in capsys.readouterr().err


def test_check_parse_error_is_usage(tmp_path, capsys):
    bad = tmp_path / "bad.evt"
    bad.write_text("system s\nvar x 0 .. 1\n")
    assert main(["check", str(bad)]) == 2


def test_check_json_report(capsys):
    code = main(["check", _path("mono3.evt"), "--oracle", "--json"])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["schema"] == 1
    assert report["system"] == "mono3"
    names = [p["name"] for p in report["properties"]]
    assert names == ["climb", "climb_by_variant"]
    for entry in report["properties"]:
        assert entry["verdict"]["holds"] is True
        assert entry["agreement"] is True
        assert "time_ms" in entry


def test_assume_override_flips_idle(capsys):
    # the idle property holds under wf but fails under forced mp
    assert main(["check", _path("idle.evt"), "--assume", "mp"]) == 1


def test_max_states_flag(tmp_path, capsys):
    assert main(["check", _path("idle.evt"), "--max-states", "1"]) == 2
    assert "cap" in capsys.readouterr().err


def test_max_states_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("FIXLEADS_MAX_STATES", "1")
    assert main(["check", _path("idle.evt")]) == 2
    monkeypatch.setenv("FIXLEADS_MAX_STATES", "not-a-number")
    assert main(["check", _path("idle.evt")]) == 2


def test_si_command(capsys):
    code = main(["si", _path("mono3.evt"), "--verify"])
    out = capsys.readouterr().out
    assert code == 0
    assert "x=0" in out and "x=2" in out
    assert "verified" in out


def test_si_shifted_init(tmp_path, capsys):
    src = tmp_path / "shift.evt"
    src.write_text(
        "system shift\nvar x : 0 .. 2\ninit x = 1\n"
        "event inc when x != 2 then x := x + 1\n"
    )
    assert main(["si", str(src)]) == 0
    out = capsys.readouterr().out
    assert "x=1" in out and "x=2" in out and "x=0" not in out


def test_si_requires_init(tmp_path, capsys):
    src = tmp_path / "noinit.evt"
    src.write_text("system s\nvar x : 0 .. 1\nevent e then x := 1\n")
    assert main(["si", str(src)]) == 2
    assert "no init" in capsys.readouterr().err


def test_si_empty_init(tmp_path, capsys):
    src = tmp_path / "empty.evt"
    src.write_text("system s\nvar x : 0 .. 1\ninit false\nevent e then x := 1\n")
    assert main(["si", str(src)]) == 0
    assert capsys.readouterr().out.strip() == "{}"


def test_explain_and_check_cert_round_trip(tmp_path, capsys):
    out_file = tmp_path / "reach.cert.json"
    assert main(["explain", _path("idle.evt"), "reach", "--out", str(out_file)]) == 0
    payload = json.loads(out_file.read_text())
    assert payload["schema"] == 1
    assert payload["assumption"] == "wf"
    assert payload["certificate"]["rule"] in ("SBR", "STR", "SDR")
    assert main(["check-cert", _path("idle.evt"), str(out_file)]) == 0
    assert "accepted" in capsys.readouterr().out


def test_explain_wf_certificate_has_disjunction_layer(tmp_path):
    out_file = tmp_path / "reach.cert.json"
    main(["explain", _path("idle.evt"), "reach", "--out", str(out_file)])
    data = json.dumps(json.loads(out_file.read_text()))
    assert '"SDR"' in data


def test_explain_failing_property(capsys):
    assert main(["explain", _path("cycle3.evt"), "climb"]) == 1
    assert "fails" in capsys.readouterr().err


def test_explain_unknown_property(capsys):
    assert main(["explain", _path("cycle3.evt"), "ghost"]) == 2


def test_check_cert_rejects_tampering(tmp_path, capsys):
    out_file = tmp_path / "climb.cert.json"
    assert main(["explain", _path("mono3.evt"), "climb", "--out", str(out_file)]) == 0
    payload = json.loads(out_file.read_text())
    # claim a start set larger than the certificate's conclusion
    payload["claimed"]["a"] = [{"x": 0}, {"x": 1}, {"x": 2}]
    node = payload["certificate"]
    while node["rule"] == "STR":
        node = node["right"]
    node["q"] = [{"x": 1}]  # corrupt the final target
    out_file.write_text(json.dumps(payload))
    assert main(["check-cert", _path("mono3.evt"), str(out_file)]) == 1


def test_usage_without_subcommand():
    assert main([]) == 2


def test_version_flag():
    assert main(["--version"]) == 0
