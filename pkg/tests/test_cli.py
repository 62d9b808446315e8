import json
import subprocess
import sys
from pathlib import Path

import pytest

from ultrascale import cli
from ultrascale.errors import ParseError, UnknownTaskKind

CONFIG_DIR = Path(__file__).resolve().parent.parent / "demos" / "configs"


def minimal_config(tasks=None, objects=None):
    return {"objects": objects or {}, "tasks": tasks or [], "output": {}}


# --------------------------------------------------------------------------
# parsing and validation
# --------------------------------------------------------------------------

def test_dangling_reference_rejected_at_parse_time():
    cfg = minimal_config(tasks=[{"id": "t", "kind": "check_seq", "object": "M9",
                                 "property": "log_convex"}])
    with pytest.raises(ParseError) as exc:
        cli.JobConfig(cfg)
    assert "M9" in str(exc.value)
    assert "tasks[0]" in str(exc.value)


def test_cycle_detection():
    cfg = cli.JobConfig({
        "objects": {
            "a": {"kind": "weight_fn", "form": "from_sequence", "sequence": "b"},
            "b": {"kind": "weight_fn", "form": "from_sequence", "sequence": "a"},
        },
        "tasks": [],
    })
    with pytest.raises(ParseError) as exc:
        cfg.obj("a")
    assert "cycle" in str(exc.value)


def test_syntax_error_carries_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"objects": {,}}')
    with pytest.raises(ParseError) as exc:
        cli.load_config(str(p))
    assert ":1:" in str(exc.value)


def test_unknown_task_kind():
    cfg = cli.JobConfig(minimal_config(tasks=[{"id": "t", "kind": "frobnicate"}]))
    with pytest.raises(UnknownTaskKind):
        cli.run_task(cfg, cfg.tasks[0])


def test_shipped_configs_roundtrip():
    paths = sorted(CONFIG_DIR.glob("*.json"))
    assert len(paths) >= 3
    for p in paths:
        raw = json.loads(p.read_text())
        cfg = cli.JobConfig(raw, source=str(p))
        again = json.loads(json.dumps(cfg.raw))
        assert again == raw, p.name


# --------------------------------------------------------------------------
# execution and reports
# --------------------------------------------------------------------------

def test_empty_task_list_exact_bytes():
    out = cli.emit_report([], fmt="json")
    assert out == '{"version":"1","tasks":[]}'


def test_report_determinism_byte_identical():
    raw = json.loads((CONFIG_DIR / "seq_conditions.json").read_text())
    a = cli.emit_report(cli.run_job(cli.JobConfig(raw)))
    b = cli.emit_report(cli.run_job(cli.JobConfig(raw)))
    assert a == b


def test_parallel_matches_sequential():
    raw = json.loads((CONFIG_DIR / "seq_conditions.json").read_text())
    seq = cli.emit_report(cli.run_job(cli.JobConfig(raw), parallel=False))
    par = cli.emit_report(cli.run_job(cli.JobConfig(raw), parallel=True))
    assert seq == par


def test_shipped_configs_meet_expectations():
    for p in sorted(CONFIG_DIR.glob("*.json")):
        cfg = cli.JobConfig(json.loads(p.read_text()), source=str(p))
        results = cli.run_job(cfg)
        for r in results:
            assert r.status != "error", (p.name, r.task_id, r.diagnostics)
            assert r.expectation_met, (p.name, r.task_id, r.status, r.expect)


def test_report_schema_keys_and_witness_rule():
    raw = json.loads((CONFIG_DIR / "seq_conditions.json").read_text())
    doc = json.loads(cli.emit_report(cli.run_job(cli.JobConfig(raw))))
    assert list(doc.keys()) == ["version", "tasks"]
    assert doc["version"] == "1"
    for entry in doc["tasks"]:
        keys = list(entry.keys())
        assert keys[0] == "task_id" and keys[1] == "kind" and keys[2] == "status"
        assert keys[-1] == "citation"
        if entry["status"] == "inconclusive" and "witnesses" in entry:
            assert entry["diagnostics"].get("force_witnesses")
        # citations name conditions by their content
        assert "Thm" not in entry["citation"] and "eq." not in entry["citation"]


def test_task_error_wrapped_with_task_id():
    cfg = cli.JobConfig(minimal_config(
        objects={"M": {"kind": "sequence", "family": "gevrey",
                       "params": {"s": 2}, "K": 10}},
        tasks=[{"id": "t9", "kind": "check_seq", "object": "M",
                "property": "om7seq"}]))
    results = cli.run_job(cfg)
    assert results[0].status == "error"
    assert results[0].task_id == "t9"
    assert "TruncationTooSmall" in results[0].diagnostics["notes"][0]


def test_loss_task_values():
    cfg = cli.JobConfig(minimal_config(
        objects={"P": {"kind": "operator", "d": 2, "char": "hypoelliptic",
                       "vanishing_order": 2}},
        tasks=[{"id": "t", "kind": "loss", "class": {"name": "gevrey", "s": 2},
                "operator": "P"}]))
    r = cli.run_job(cfg)[0]
    assert r.witnesses["s_prime"] == 2.5
    assert r.witnesses["delta"] == pytest.approx(2.0 / 3.0)


# --------------------------------------------------------------------------
# command line entry points
# --------------------------------------------------------------------------

def test_main_run_and_exit_codes(tmp_path):
    good = {"objects": {"M": {"kind": "sequence", "family": "gevrey",
                              "params": {"s": 2}, "K": 100}},
            "tasks": [{"id": "t", "kind": "check_seq", "object": "M",
                       "property": "log_convex", "expect": "holds"}]}
    p = tmp_path / "job.json"
    p.write_text(json.dumps(good))
    out = tmp_path / "report.json"
    assert cli.main(["run", str(p), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["tasks"][0]["status"] == "holds"

    bad = dict(good)
    bad["tasks"] = [dict(good["tasks"][0], expect="fails")]
    p.write_text(json.dumps(bad))
    assert cli.main(["run", str(p), "--out", str(out)]) == 1


def test_main_stamp_adds_timestamp(tmp_path, capsys):
    p = tmp_path / "job.json"
    p.write_text(json.dumps({"objects": {}, "tasks": []}))
    assert cli.main(["run", str(p), "--stamp"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert "generated_at" in doc


def test_shorthand_check_seq(capsys):
    assert cli.main(["check-seq", "--family", "gevrey:2", "--K", "120",
                     "--prop", "log_convex", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["tasks"][0]["status"] == "holds"


def test_shorthand_relate(capsys):
    assert cli.main(["relate", "--left", "gevrey:2", "--right", "gevrey:3",
                     "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["tasks"][0]["status"] == "lhd"


def test_shorthand_conjugate(capsys):
    assert cli.main(["conjugate", "--s", "2", "--t", "2.0", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["tasks"][0]["witnesses"]["phi_star"] == pytest.approx(1.0, abs=1e-9)


def test_shorthand_loss(capsys):
    assert cli.main(["loss", "--class", "gevrey:2", "--d", "2",
                     "--vanishing-order", "2", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["tasks"][0]["witnesses"]["s_prime"] == 2.5


def test_shorthand_scale(capsys):
    assert cli.main(["scale", "--form", "power", "--r", "2",
                     "--lambdas", "1,2,4", "--condition", "square",
                     "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["tasks"][0]["status"] == "holds"


def test_shorthand_probe_mellin(capsys):
    assert cli.main(["probe", "--mellin", "--lam", "1.0", "--k-max", "10",
                     "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["tasks"][0]["status"] == "holds"


def test_error_exit_code(tmp_path):
    p = tmp_path / "nope.json"
    assert cli.main(["run", str(p)]) == 2


def test_console_script_installed():
    proc = subprocess.run([sys.executable, "-m", "ultrascale.cli", "probe",
                           "--mellin", "--k-max", "5"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "mellin_check" in proc.stdout


def test_grid_scale_env(monkeypatch):
    from ultrascale import conjugate as cj

    base = cj.default_t_grid().size
    monkeypatch.setenv("ULTRASCALE_GRID_SCALE", "2.0")
    assert cj.default_t_grid().size == 2 * base
    monkeypatch.setenv("ULTRASCALE_GRID_SCALE", "bogus")
    assert cj.default_t_grid().size == base
