import json

import pytest

from sinkfree.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(autouse=True)
def outdir(tmp_path, monkeypatch):
    monkeypatch.setenv("SINKFREE_OUT", str(tmp_path))
    return tmp_path


def test_validate_exit_codes(capsys):
    assert run(capsys, "validate", "7,3,0,1")[0] == 0
    assert run(capsys, "validate", "5,3,0,0")[0] == 1
    assert run(capsys, "validate", "4,1,0,2")[0] == 1
    assert run(capsys, "validate", "x,y")[0] == 2


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["validate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_validate_json(capsys):
    code, out, _ = run(capsys, "validate", "7,3,0,1", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["valid"] and data["primitive"]


def test_certify_23_11_1_7(capsys, tmp_path):
    path = tmp_path / "c.json"
    code, out, _ = run(capsys, "certify", "23,11,1,7", "--out", str(path))
    assert code == 0 and "1/4" in out and "hierarchy length 1" in out and "double points checked" in out
    assert run(capsys, "verify", str(path))[0] == 0


def test_certify_primitive_and_default_directory(capsys, outdir):
    code, out, _ = run(capsys, "certify", "7,3,0,1")
    assert code == 0 and "hierarchy length 0" in out
    assert (outdir / "certificate_7_3_0_1.json").exists()


def test_certify_simple_fails(capsys):
    code, _, err = run(capsys, "certify", "5,0,0,1")
    assert code == 1 and "simple diagram: no associated branched surface" in err


def test_verify_rejects_tampering(capsys, tmp_path):
    path = tmp_path / "c.json"
    run(capsys, "certify", "23,11,1,7", "--out", str(path))
    data = json.loads(path.read_text())
    data["levels"][0]["collapse"]["strand"]["q"] = 5
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", str(path), "--format", "json")
    assert code == 1 and json.loads(out)["divergence"]["path"] == "levels[0].collapse.strand.q"
    assert run(capsys, "verify", str(tmp_path / "missing.json"))[0] == 2


def test_render(capsys, tmp_path):
    path = tmp_path / "d.svg"
    code, _, _ = run(capsys, "render", "7,3,0,1", "--out", str(path), "--style", "disks", "--size", "300")
    text = path.read_text()
    assert code == 0 and 'width="300"' in text and "sink disk" in text
    assert run(capsys, "render", "7,3,0,1", "--style", "sparkle")[0] == 2
    assert run(capsys, "render", "23,11,1,7", "--style", "delta,tube")[0] == 0


def test_sweep_jobs_agree(capsys, tmp_path):
    code1, out1, _ = run(capsys, "sweep", "--max-p", "8", "--format", "json",
                         "--checkpoint", str(tmp_path / "a.jsonl"))
    code2, out2, _ = run(capsys, "sweep", "--max-p", "8", "--jobs", "2", "--format", "json",
                         "--checkpoint", str(tmp_path / "b.jsonl"))
    s1, s2 = json.loads(out1), json.loads(out2)
    assert code1 == code2 == 0 and s1 == s2
    assert s1["failed"] == 0 and s1["passed"] == s1["total"] > 0
    assert s1["hierarchy_length_histogram"]


def test_sweep_resumes_from_checkpoint(capsys, tmp_path):
    ck = tmp_path / "ck.jsonl"
    full = json.loads(run(capsys, "sweep", "--max-p", "8", "--format", "json",
                          "--checkpoint", str(tmp_path / "full.jsonl"))[1])
    code, out, _ = run(capsys, "sweep", "--max-p", "8", "--format", "json", "--checkpoint", str(ck),
                       "--stop-after", "20")
    part = json.loads(out)
    assert code == 1 and not part["complete"] and part["total"] == 20
    with ck.open("a") as fh:
        fh.write('{"tuple": "8,1,')        # a line cut short by the interruption
    code, out, _ = run(capsys, "sweep", "--max-p", "8", "--format", "json", "--checkpoint", str(ck), "--resume")
    assert code == 0 and json.loads(out) == full


def test_sweep_sample_is_seeded(capsys, tmp_path):
    a = run(capsys, "sweep", "--max-p", "10", "--sample", "15", "--seed", "4", "--format", "json",
            "--checkpoint", str(tmp_path / "a.jsonl"))[1]
    b = run(capsys, "sweep", "--max-p", "10", "--sample", "15", "--seed", "4", "--format", "json",
            "--checkpoint", str(tmp_path / "b.jsonl"))[1]
    assert a == b and json.loads(a)["total"] == 15


def test_sweep_rejects_small_bound(capsys):
    assert run(capsys, "sweep", "--max-p", "2")[0] == 2


def test_reduce_and_inspect(capsys):
    code, out, _ = run(capsys, "reduce", "23,11,1,7")
    assert code == 0 and "hierarchy length 1" in out and "primitive" in out
    code, out, _ = run(capsys, "reduce", "23,11,1,7", "--format", "json")
    assert json.loads(out)["schema"] == "sinkfree.hierarchy/1"
    assert run(capsys, "reduce", "5,0,0,1")[0] == 1
    code, out, _ = run(capsys, "inspect", "7,3,0,1", "--format", "json")
    assert code == 0 and json.loads(out)["primitive"] is True
