import subprocess
import sys

import pytest

from irisbio.cli import STAGE_NAMES, main
from irisbio.synth import parse_truth


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def eyes(tmp_path_factory):
    """Ten identities plus a perturbed second capture of each."""
    d = tmp_path_factory.mktemp("eyes")
    for s in range(10):
        assert main(["synth", "--seed", str(s), "--noise", "6", "--out", str(d / f"e{s}.pgm"), "--truth-out", str(d / f"e{s}.txt")]) == 0
        assert main(["synth", "--seed", str(s), "--noise", "6", "--noise-seed", "9", "--rotation", "0.06", "--dilation", "3", "--out", str(d / f"p{s}.pgm")]) == 0
    return d


def test_segment_matches_truth(capsys, eyes):
    code, out, _ = run(capsys, "segment", eyes / "e2.pgm")
    assert code == 0
    lines = out.splitlines()
    assert [ln.split()[0] for ln in lines] == ["pupil", "limbic", "elapsed_seconds", "quality"]
    truth = parse_truth((eyes / "e2.txt").read_text())
    pupil = [float(v) for v in lines[0].split()[1:]]
    limbic = [float(v) for v in lines[1].split()[1:]]
    assert all(abs(a - b) <= 2 for a, b in zip(pupil, truth["pupil"].as_tuple()))
    assert abs(limbic[2] - truth["limbic"].r) <= 4
    assert len(lines[0].split()[1].split(".")[1]) == 4


def test_segment_idop_same_shape(capsys, eyes):
    code, out, _ = run(capsys, "segment", eyes / "e2.pgm", "--method", "idop")
    assert code == 0
    assert [ln.split()[0] for ln in out.splitlines()] == ["pupil", "limbic", "elapsed_seconds", "quality"]


@pytest.mark.parametrize("method", ["cht", "idop"])
def test_emit_stages(capsys, eyes, tmp_path, method):
    code, _, _ = run(capsys, "segment", eyes / "e1.pgm", "--emit-stages", "--out-dir", tmp_path, "--method", method)
    assert code == 0
    assert sorted(p.stem for p in tmp_path.iterdir()) == list(STAGE_NAMES)
    assert (tmp_path / "06_strip.pgm").read_bytes().startswith(b"P5\n512 64\n255\n")


def test_stage_dumps_deterministic(capsys, eyes, tmp_path):
    for sub in ("a", "b"):
        assert run(capsys, "segment", eyes / "e3.pgm", "--emit-stages", "--out-dir", tmp_path / sub)[0] == 0
    for name in STAGE_NAMES:
        assert (tmp_path / "a" / f"{name}.pgm").read_bytes() == (tmp_path / "b" / f"{name}.pgm").read_bytes()


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "segment", tmp_path / "none.pgm")
    assert code == 2 and "error" in err


def test_enroll_verify_identify(capsys, eyes, tmp_path):
    db = tmp_path / "t.irdb"
    for s in range(10):
        assert run(capsys, "enroll", eyes / f"e{s}.pgm", "--id", f"id{s}", "--db", db)[0] == 0
    code, out, _ = run(capsys, "verify", eyes / "e4.pgm", "--id", "id4", "--db", db)
    assert code == 0 and out.startswith("hd=0.0000 shift=0 decision=accept")
    code, out, _ = run(capsys, "verify", eyes / "p4.pgm", "--id", "id4", "--db", db)
    assert code == 0 and "decision=accept" in out
    code, out, _ = run(capsys, "verify", eyes / "p4.pgm", "--id", "id5", "--db", db)
    assert code == 1 and "decision=reject" in out
    assert run(capsys, "verify", eyes / "p4.pgm", "--id", "ghost", "--db", db)[0] == 2
    assert run(capsys, "enroll", eyes / "e0.pgm", "--id", "id0", "--db", db)[0] == 2
    code, out, _ = run(capsys, "identify", eyes / "p3.pgm", "--db", db)
    ranked = [ln.split() for ln in out.splitlines()]
    assert code == 0 and ranked[0][0] == "id3" and len(ranked) == 10
    assert [float(h) for _, h in ranked] == sorted(float(h) for _, h in ranked)


def test_verify_threshold_flag(capsys, eyes, tmp_path):
    db = tmp_path / "t.irdb"
    run(capsys, "enroll", eyes / "e6.pgm", "--id", "x", "--db", db)
    code, out, _ = run(capsys, "verify", eyes / "p6.pgm", "--id", "x", "--db", db, "--threshold", "0.001")
    assert code == 1 and "decision=reject" in out


def test_identify_empty_store(capsys, eyes, tmp_path):
    assert run(capsys, "identify", eyes / "e1.pgm", "--db", tmp_path / "none.irdb")[0] == 2


def test_eval(capsys, eyes, tmp_path):
    gen = tmp_path / "gen.txt"
    imp = tmp_path / "imp.txt"
    gen.write_text("".join(f"{eyes}/p{s}.pgm {eyes}/e{s}.pgm\n" for s in range(10)) * 2)
    imp.write_text("".join(f"{eyes}/p{s}.pgm {eyes}/e{(s + 1 + k) % 10}.pgm\n" for k in range(2) for s in range(10)))
    out_csv = tmp_path / "o.csv"
    code, out, _ = run(capsys, "eval", gen, imp, "--out", out_csv, "--scores-dir", tmp_path / "scores")
    assert code == 0
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "threshold,far,frr" and len(lines) == 52
    assert float(lines[-1].split("=")[1]) > 0
    assert len((tmp_path / "scores" / "genuine.txt").read_text().split()) == 20


def test_eval_skips_failures(capsys, caplog, eyes, tmp_path):
    gen = tmp_path / "gen.txt"
    imp = tmp_path / "imp.txt"
    gen.write_text(f"{eyes}/p1.pgm {eyes}/e1.pgm\nmissing.pgm {eyes}/e1.pgm\n")
    imp.write_text(f"{eyes}/p1.pgm {eyes}/e2.pgm\n")
    code, out, err = run(capsys, "eval", gen, imp, "--out", "-")
    assert code == 0 and "skipping" in caplog.text and "# dprime=" in out


def test_eval_all_fail(capsys, tmp_path):
    (tmp_path / "g.txt").write_text("a.pgm b.pgm\n")
    assert run(capsys, "eval", tmp_path / "g.txt", tmp_path / "g.txt", "--out", "-")[0] == 2


def test_eval_empty_lists(capsys, tmp_path):
    (tmp_path / "e.txt").write_text("# nothing\n")
    assert run(capsys, "eval", tmp_path / "e.txt", tmp_path / "e.txt", "--out", tmp_path / "o.csv")[0] == 2


def test_synth_deterministic_and_truth(capsys, tmp_path):
    for name in ("a", "b"):
        assert run(capsys, "synth", "--seed", 5, "--noise", 8, "--eyelashes", 5, "--rotation", 0.2,
                   "--out", tmp_path / f"{name}.pgm", "--truth-out", tmp_path / f"{name}.txt")[0] == 0
    assert (tmp_path / "a.pgm").read_bytes() == (tmp_path / "b.pgm").read_bytes()
    assert (tmp_path / "a.txt").read_bytes() == (tmp_path / "b.txt").read_bytes()
    assert parse_truth((tmp_path / "a.txt").read_text())["rotation"] == 0.2


@pytest.mark.parametrize("flags", [["--pupil-r", "120"], ["--limbic-r", "200"], ["--pupil-r", "-3"], ["--specular", "1,2"]])
def test_synth_invalid(capsys, tmp_path, flags):
    assert run(capsys, "synth", "--seed", 1, "--out", tmp_path / "x.pgm", *flags)[0] == 2


def test_print_config(capsys, tmp_path):
    code, out, _ = run(capsys, "--print-config")
    assert code == 0 and "pupil_threshold = 70" in out and "shifts = -16,-12,-8,-4,0,4,8,12,16" in out
    cfg = tmp_path / "c.cfg"
    cfg.write_text("pupil_threshold = 64\n")
    code, out, _ = run(capsys, "--config", cfg, "--print-config")
    assert "pupil_threshold = 64" in out


def test_bad_config(capsys, eyes, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("nonsense = 1\n")
    assert run(capsys, "--config", cfg, "segment", eyes / "e1.pgm")[0] == 2


def test_reference_image(capsys, eyes):
    code, out, _ = run(capsys, "--reference-image", eyes / "e0.pgm", "segment", eyes / "e2.pgm")
    assert code == 0 and out.startswith("pupil")


def test_no_command(capsys):
    assert run(capsys)[0] == 2


def test_module_entry_point(eyes):
    proc = subprocess.run([sys.executable, "-m", "irisbio.cli", "segment", str(eyes / "e0.pgm")], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("pupil ")
