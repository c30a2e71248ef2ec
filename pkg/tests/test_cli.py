import json
import subprocess
import sys

import pytest

from fgl_forge import cli
from fgl_forge.errors import VerificationFailure
from fgl_forge.reports import CONVENTIONS, SCHEMA, canonical_json, envelope, render_line


def _run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


def _body(out):
    body = json.loads(out)
    assert body["schema"] == SCHEMA
    assert body["conventions"] == CONVENTIONS
    return body


# ---- log ------------------------------------------------------------------------

def test_log_command(capsys):
    code, out = _run(["log", "--n", "2", "--k", "1"], capsys)
    assert code == 0
    body = _body(out)
    report = body["reports"][0]
    assert report["claim"] == "log" and report["status"] == "verified"
    terms = report["params"]["values"][0]["terms"]
    assert {t["monomial"].popitem()[0]: t["coeff"] for t in terms} == {
        "t1": "1/2",
        "g1t1": "1/2",
    }


def test_log_usage_error():
    with pytest.raises(SystemExit) as err:
        cli.main(["log", "--n", "0"])
    assert err.value.code == 2


# ---- verify ---------------------------------------------------------------------

@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "eq351", "--n", "2", "--k", "3"],
        ["verify", "recursion", "--n", "2", "--k", "2"],
        ["verify", "tkvk", "--n", "2", "--k", "2"],
        ["verify", "invariance", "--n", "2", "--k", "2"],
        ["verify", "v-collapse", "--n", "2", "--m", "1", "--k", "3"],
        ["verify", "t-collapse", "--n", "2", "--m", "1", "--k", "3"],
        ["verify", "chain-inversion", "--n", "2", "--k", "2"],
        ["verify", "cotangent", "--n", "2", "--m", "1"],
        ["verify", "height", "--n", "2", "--m", "1"],
        ["verify", "unit-factors", "--n", "2", "--m", "1"],
        ["verify", "fixed-subring", "--n", "2", "--m", "1"],
    ],
)
def test_verify_claims_pass(argv, capsys):
    code, out = _run(argv, capsys)
    assert code == 0
    body = _body(out)
    assert body["ok"] is True
    assert all(r["status"] == "verified" for r in body["reports"])
    assert body["config"]["claim"] == argv[1]


def test_verify_emits_every_covered_level(capsys):
    code, out = _run(["verify", "t-collapse", "--n", "2", "--m", "1", "--k", "3"], capsys)
    body = _body(out)
    assert code == 0
    assert [r["params"]["level"] for r in body["reports"]] == [2, 1]


def test_verify_failure_exits_one(capsys, monkeypatch):
    report = {"claim": "tkvk", "params": {"n": 2, "k": 2}, "status": "failed",
              "witness": None, "bounds": {}}

    def boom(ctx, k):
        raise VerificationFailure("forced failure", report=report)

    monkeypatch.setattr(cli, "verify_tkvk", boom)
    code, out = _run(["verify", "tkvk", "--n", "2", "--k", "2"], capsys)
    assert code == 1
    body = _body(out)
    assert body["ok"] is False
    assert body["reports"][0]["status"] == "failed"


def test_verify_config_error_exits_two(capsys):
    # r <= h violates the collapse precondition: config error, not failure
    code, _ = _run(["verify", "v-collapse", "--n", "2", "--m", "1", "--k", "2"], capsys)
    assert code == 2


def test_unknown_claim_is_usage_error():
    with pytest.raises(SystemExit) as err:
        cli.main(["verify", "nonsense"])
    assert err.value.code == 2


def test_feasibility_limits_and_force():
    parser = cli._build_parser()
    with pytest.raises(SystemExit) as err:
        cli._check_limits(parser.parse_args(["verify", "eq351", "--k", "7"]), parser)
    assert err.value.code == 2
    args = parser.parse_args(["verify", "eq351", "--k", "7", "--force"])
    cli._check_limits(args, parser)  # no exit


def test_height_cutoff_flag(capsys):
    code, out = _run(["verify", "height", "--n", "2", "--m", "1", "--cutoff", "8"], capsys)
    assert code == 0
    report = _body(out)["reports"][0]
    assert report["params"]["cutoff"] == 8
    assert report["params"]["computed_height"] == 2


# ---- suite ----------------------------------------------------------------------

def test_suite_quick(tmp_path, capsys):
    out_path = tmp_path / "quick.json"
    code, out = _run(["suite", "quick", "--json", str(out_path)], capsys)
    assert code == 0
    assert out.count("[ok ]") == len(cli._suite_jobs("quick"))
    body = json.loads(out_path.read_text())
    assert body["ok"] is True
    claims = {r["claim"] for r in body["reports"]}
    assert claims == {
        "eq351", "recursion", "tkvk", "invariance", "v-collapse", "t-collapse",
        "chain-inversion", "cotangent", "height", "unit-factors", "fixed-subring",
    }


def test_suite_json_is_deterministic(tmp_path, capsys, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    monkeypatch.setenv("FGL_FORGE_THREADS", "1")
    assert cli.main(["suite", "quick", "--json", str(a)]) == 0
    monkeypatch.setenv("FGL_FORGE_THREADS", "3")
    assert cli.main(["suite", "quick", "--json", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_suite_interrupt_flushes_partial_report(capsys, monkeypatch):
    def boom(ctx, k):
        raise KeyboardInterrupt

    monkeypatch.setattr(cli, "verify_tkvk", boom)
    code, out = _run(["suite", "quick"], capsys)
    assert code == 130
    body = _body(out)
    assert body["interrupted"] is True and body["ok"] is False
    assert all(r["status"] == "verified" for r in body["reports"])
    assert len(body["reports"]) < len(cli._suite_jobs("quick"))


def test_full_profile_covers_acceptance_grid():
    names = [name for name, _ in cli._suite_jobs("full")]
    for n, k in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3)]:
        assert f"recursion n={n} k={k}" in names
        assert f"tkvk n={n} k={k}" in names
    for scenario in ["n=2 m=1 d=1", "n=2 m=2 d=2", "n=3 m=1 d=1"]:
        for claim in ["cotangent", "height", "unit-factors", "fixed-subring"]:
            assert f"{claim} {scenario}" in names
    assert "v-collapse n=2 m=1 r=3" in names and "v-collapse n=2 m=1 r=4" in names


# ---- envelope and rendering ------------------------------------------------------

def test_canonical_json_is_sorted_and_stable():
    body = envelope(
        [{"claim": "x", "params": {"b": 1, "a": 2}, "status": "verified",
          "witness": None, "bounds": {}}],
        config={"n": 2},
    )
    text = canonical_json(body)
    assert text == canonical_json(json.loads(text) | {})
    assert text.index('"a"') < text.index('"b"')
    assert text.endswith("\n")
    assert "timestamp" not in text


def test_render_line_marks_failures():
    line = render_line({"claim": "tkvk", "params": {"k": 2}, "status": "failed"})
    assert line.startswith("[FAIL]") and "k=2" in line


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fgl_forge", "verify", "eq351", "--n", "1", "--k", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["ok"] is True
