import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from pomcka.cli import main
from pomcka.samples import message_passing
from pomcka.textio import dump_ps, parse_ps

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_data_matches_samples():
    assert parse_ps((DATA / "message_passing.ps").read_text()) == message_passing()


class TestRefine:
    def test_holds_with_witness(self, capsys):
        code, out, _ = run(capsys, "refine", DATA / "n_shape.ps", DATA / "message_passing.ps", "--witness")
        assert code == 0
        assert "e3 -> e3" in out

    def test_fails(self, capsys):
        code, out, _ = run(capsys, "refine", DATA / "message_passing.ps", DATA / "n_shape.ps", "--method", "sat")
        assert code == 1
        assert "does not refine" in out

    def test_cnf_export(self, capsys, tmp_path):
        cnf = tmp_path / "q.cnf"
        code, _, _ = run(capsys, "refine", DATA / "n_shape.ps", DATA / "message_passing.ps", "--cnf", cnf)
        assert code == 0
        assert cnf.read_text().startswith("p cnf 4 ")
        assert (tmp_path / "q.cnf.map").read_text().splitlines()[0] == "1 e0 e0"

    def test_json(self, capsys):
        code, out, _ = run(capsys, "--json", "refine", DATA / "n_shape.ps", DATA / "message_passing.ps", "--witness")
        data = json.loads(out)
        assert code == 0 and data["refines"] is True
        assert data["witness"]["e1"] == "e1"


class TestPrograms:
    def test_lfp_bound(self, capsys):
        code, out, _ = run(capsys, "lfp-refine", DATA / "aa.prog", DATA / "a.prog", "--join", "seq")
        assert code == 0
        assert out.splitlines()[0] == "n=2 l_X=2 l_Y=1"

    def test_lfp_fails(self, capsys):
        code, out, _ = run(capsys, "lfp-refine", DATA / "a.prog", DATA / "aa.prog", "--join", "seq")
        assert code == 1 and "n=0" in out

    def test_lfp_precondition(self, capsys, tmp_path):
        one = tmp_path / "one.prog"
        one.write_text("begin ps empty\nend\n")
        code, _, err = run(capsys, "lfp-refine", DATA / "a.prog", one, "--join", "par")
        assert code == 3
        assert "precondition" in err

    def test_prog_refine(self, capsys):
        assert run(capsys, "prog-refine", DATA / "a.prog", DATA / "a.prog")[0] == 0
        assert run(capsys, "prog-refine", DATA / "a.prog", DATA / "aa.prog")[0] == 1

    def test_closure(self, capsys):
        code, out, _ = run(capsys, "--json", "closure", DATA / "mp.prog")
        assert code == 0 and json.loads(out)["count"] == 20

    def test_closure_bound(self, capsys):
        code, _, _ = run(capsys, "closure", DATA / "mp.prog", "--max-events", "3")
        assert code == 3

    def test_restrict(self, capsys):
        code, out, _ = run(capsys, "--json", "restrict", DATA / "mp.prog")
        data = json.loads(out)
        assert code == 0 and data["count"] == 15
        n_shape = parse_ps((DATA / "n_shape.ps").read_text())
        assert any(parse_ps(s).canonical() == n_shape.canonical() for s in data["strings"])


class TestMemory:
    def test_axioms_hold_with_init(self, capsys):
        code, out, _ = run(capsys, "axioms", DATA / "n_shape.ps", DATA / "n_shape.rf", "--init")
        assert code == 0 and "fr: ok" in out

    def test_axioms_fail(self, capsys):
        code, out, _ = run(capsys, "--json", "axioms", DATA / "stale.ps", DATA / "stale.rf")
        data = json.loads(out)
        assert code == 1
        assert data["fr"] is False and ["fr", "l", "s0", "s1"] in data["witnesses"]

    def test_malformed_rf(self, capsys, tmp_path):
        bad = tmp_path / "bad.rf"
        bad.write_text("rf l s9\n")
        code, _, err = run(capsys, "axioms", DATA / "stale.ps", bad)
        assert code == 2 and "s9" in err

    def test_races(self, capsys):
        code, out, _ = run(capsys, "--json", "races", DATA / "n_shape.ps")
        assert code == 1 and json.loads(out)["races"] == [["e1", "e2"]]
        assert run(capsys, "races", DATA / "stale.ps")[0] == 0


class TestEncoder:
    def test_stats(self, capsys):
        code, out, _ = run(capsys, "--json", "stats", DATA / "star3.ps", "--no-init")
        data = json.loads(out)
        assert code == 0
        assert data["cubic"]["counts"]["fr"] == 18
        assert data["quadratic"]["counts"]["wrc"] == 9

    def test_encode_to_file_is_stable(self, capsys, tmp_path):
        a, b = tmp_path / "a.smt2", tmp_path / "b.smt2"
        assert run(capsys, "encode", DATA / "message_passing.ps", "-o", a)[0] == 0
        assert run(capsys, "encode", DATA / "message_passing.ps", "-o", b)[0] == 0
        assert a.read_bytes() == b.read_bytes()
        assert a.read_text().count("(declare-fun clk_") == 6

    def test_encode_stdout(self, capsys):
        code, out, _ = run(capsys, "encode", DATA / "message_passing.ps", "--encoding", "cubic", "--format", "text")
        assert code == 0 and out.startswith("# cubic encoding, 6 events")

    def test_out_dir_env(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("POMCKA_OUT_DIR", str(tmp_path / "out"))
        code, out, _ = run(capsys, "encode", DATA / "star3.ps", "--encoding", "cubic")
        assert code == 0
        assert (tmp_path / "out" / "star3.cubic.smt2").exists()

    def test_equisat(self, capsys):
        code, out, _ = run(capsys, "equisat", DATA / "message_passing.ps")
        assert code == 0 and "equisatisfiable" in out

    def test_equisat_too_large(self, capsys, tmp_path):
        from pomcka.encoder import star_skeleton

        big = tmp_path / "big.ps"
        big.write_text(dump_ps(star_skeleton(5)))
        assert run(capsys, "equisat", big)[0] == 3

    def test_opaque_input(self, capsys, tmp_path):
        p = tmp_path / "o.ps"
        p.write_text("event x opaque a\n")
        assert run(capsys, "stats", p)[0] == 3

    @pytest.mark.skipif(shutil.which("z3") is None, reason="z3 binary not on PATH")
    def test_solver(self, capsys):
        code, out, _ = run(capsys, "encode", DATA / "message_passing.ps", "--solver", "z3")
        assert code == 0 and out.strip() == "sat"
        code, out, _ = run(capsys, "--json", "equisat", DATA / "star3.ps", "--solver", "z3")
        data = json.loads(out)
        assert code == 0 and data["cubic"] == data["quadratic"] == "sat"

    def test_broken_solver(self, capsys):
        code, _, err = run(capsys, "encode", DATA / "message_passing.ps", "--solver", "true")
        assert code == 2 and "no verdict" in err


class TestErrors:
    def test_parse_error(self, capsys, tmp_path):
        p = tmp_path / "cyc.ps"
        p.write_text("event a opaque x\nevent b opaque y\norder a b\norder b a\n")
        code, _, err = run(capsys, "refine", p, p)
        assert code == 2 and "cyclic" in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "refine", tmp_path / "nope.ps", tmp_path / "nope.ps")[0] == 2

    def test_usage(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["lfp-refine", "x"])
        assert info.value.code == 2

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "pomcka", "refine", str(DATA / "n_shape.ps"), str(DATA / "message_passing.ps")],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0 and "refines" in proc.stdout

    def test_exit_codes_repeat(self, capsys):
        codes = {run(capsys, "refine", DATA / "message_passing.ps", DATA / "n_shape.ps")[0] for _ in range(3)}
        assert codes == {1}
