import json

import pytest

from quiverepi.cli import main

A2 = "vertices 1 2\narrow a 1 2\n"
KRONECKER = "vertices 1 2\narrow a 1 2\narrow b 1 2\n"


@pytest.fixture
def workdir(tmp_path):
    (tmp_path / "a2.quiver").write_text(A2)
    (tmp_path / "kronecker.quiver").write_text(KRONECKER)
    (tmp_path / "brick.rep").write_text("quiver a2.quiver\ndims 1=1 2=1\nmap a 1\n")
    (tmp_path / "s1s1.rep").write_text("quiver a2.quiver\ndims 1=2 2=0\n")
    (tmp_path / "pre12.rep").write_text(
        "quiver kronecker.quiver\ndims 1=1 2=2\nmap a 1 ; 0\nmap b 0 ; 1\n"
    )
    return tmp_path


def run(capsys, argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


class TestCheck:
    def test_brick_report(self, workdir, capsys):
        code, report = run(capsys, ["check", workdir / "brick.rep"])
        assert code == 0
        assert report["brick"] is True
        assert report["exceptional"] is True
        assert report["end_dim"] == 1
        assert report["ext1_dim"] == 0

    def test_decomposable_report(self, workdir, capsys):
        code, report = run(capsys, ["check", workdir / "s1s1.rep"])
        assert code == 0
        assert report["brick"] is False
        assert report["end_dim"] == 4

    def test_zero_module_is_input_error(self, workdir, capsys):
        (workdir / "zero.rep").write_text("quiver a2.quiver\ndims 1=0 2=0\n")
        code = main(["check", str(workdir / "zero.rep")])
        assert code == 2

    def test_parse_error_positioned(self, workdir, capsys):
        (workdir / "bad.quiver").write_text("vertices 1 2\narrow a 1 3\n")
        (workdir / "bad.rep").write_text("quiver bad.quiver\ndims 1=1 2=1\n")
        code = main(["check", str(workdir / "bad.rep")])
        err = capsys.readouterr().err
        assert code == 2
        assert "line 2" in err

    def test_prime_field(self, workdir, capsys):
        code, report = run(capsys, ["--field", "fp:5", "check", workdir / "brick.rep"])
        assert code == 0
        assert report["brick"] is True


class TestBuild:
    def test_build_brick_writes_hom(self, workdir, capsys):
        out = workdir / "brick.hom.json"
        code, report = run(capsys, ["build", "brick", workdir / "brick.rep", "--out", out])
        assert code == 0
        assert report["size"] == 2
        hom = json.loads(out.read_text())
        assert hom["schema"] == 1
        assert hom["alphabet"] == []

    def test_build_extend(self, workdir, capsys):
        out = workdir / "t20.hom.json"
        code, report = run(capsys, [
            "build", "extend", workdir / "brick.rep", workdir / "kronecker.quiver",
            "--out", out,
        ])
        assert code == 0
        assert report["alphabet"] == ["x[b]_1_1"]
        assert report["generation_identity"] is True

    def test_build_glue_m1_exit_2(self, workdir, capsys):
        code = main(["build", "glue", str(workdir / "brick.rep"), "2"])
        err = capsys.readouterr().err
        assert code == 2
        assert "dimension 1" in err

    def test_build_glue(self, workdir, capsys):
        out = workdir / "glue.hom.json"
        code, report = run(capsys, ["build", "glue", workdir / "pre12.rep", "2",
                                    "--out", out])
        assert code == 0
        assert report["size"] == 4
        assert report["alphabet"] == ["x1"]

    def test_build_canonical_needs_dims(self, workdir, capsys):
        code = main(["build", "canonical", str(workdir / "kronecker.quiver")])
        assert code == 2

    def test_build_canonical(self, workdir, capsys):
        code, report = run(capsys, [
            "build", "canonical", workdir / "kronecker.quiver", "--dims", "1=1,2=1",
        ])
        assert code == 0
        assert report["alphabet"] == ["x[a]_1_1", "x[b]_1_1"]

    def test_build_presentation(self, workdir, capsys):
        code, report = run(capsys, [
            "build", "presentation", workdir / "brick.rep", workdir / "kronecker.quiver",
        ])
        assert code == 0
        assert report["generators"] == ["x[a]_1_1 - 1"]

    def test_build_invariant(self, workdir, capsys):
        (workdir / "kr_reg.rep").write_text(
            "quiver kronecker.quiver\ndims 1=1 2=1\nmap a 1\n"
        )
        code, report = run(capsys, [
            "build", "invariant", workdir / "kr_reg.rep", "b", "i",
        ])
        assert code == 0
        assert report["alphabet"] == ["x21_1_1"]

    def test_build_non_brick_exit_2(self, workdir, capsys):
        code = main(["build", "brick", str(workdir / "s1s1.rep")])
        assert code == 2

    def test_build_invariant_bad_case(self, workdir, capsys):
        (workdir / "kr_reg2.rep").write_text(
            "quiver kronecker.quiver\ndims 1=1 2=1\nmap a 1\n"
        )
        code = main(["build", "invariant", str(workdir / "kr_reg2.rep"), "b", "v"])
        assert code == 2

    def test_allow_non_brick_flag(self, workdir, capsys):
        code, report = run(capsys, [
            "build", "brick", workdir / "s1s1.rep", "--allow-non-brick",
        ])
        assert code == 0
        assert report["size"] == 2


class TestVerify:
    def build_hom(self, workdir, capsys, kind, *inputs, extra=()):
        out = workdir / f"{kind}.hom.json"
        code, _ = run(capsys, ["build", kind, *inputs, *extra, "--out", out])
        assert code == 0
        return out

    def test_brick_hom_verified(self, workdir, capsys):
        hom = self.build_hom(workdir, capsys, "brick", workdir / "brick.rep")
        code, report = run(capsys, ["verify", hom, "--degree", "1"])
        assert code == 0
        assert report["verdict"] == "Verified"
        assert report["degree_used"] == 1
        assert report["specialization"]["passed"] is True

    def test_refuted_hom_exit_1(self, workdir, capsys):
        hom = self.build_hom(workdir, capsys, "brick", workdir / "s1s1.rep",
                             extra=("--allow-non-brick",))
        code, report = run(capsys, ["verify", hom])
        assert code == 1
        assert report["verdict"] == "Refuted"
        assert report["witness"]["dim_path_algebra"] == 4

    def test_tiny_degree_undetermined_exit_3(self, workdir, capsys):
        hom = self.build_hom(workdir, capsys, "extend", workdir / "brick.rep",
                             workdir / "kronecker.quiver")
        code, report = run(capsys, ["verify", hom, "--degree", "1"])
        assert code == 3
        assert report["verdict"] == "Undetermined"
        assert "degree" in report["hint"]

    def test_default_degree_verifies_extend(self, workdir, capsys):
        hom = self.build_hom(workdir, capsys, "extend", workdir / "brick.rep",
                             workdir / "kronecker.quiver")
        code, report = run(capsys, ["verify", hom])
        assert code == 0
        assert report["verdict"] == "Verified"

    def test_field_conflict(self, workdir, capsys):
        hom = self.build_hom(workdir, capsys, "brick", workdir / "brick.rep")
        code = main(["--field", "fp:5", "verify", str(hom)])
        assert code == 2

    def test_prime_field_build_and_verify(self, workdir, capsys):
        out = workdir / "fp.hom.json"
        code, _ = run(capsys, ["--field", "fp:5", "build", "extend",
                               workdir / "brick.rep", workdir / "kronecker.quiver",
                               "--out", out])
        assert code == 0
        assert json.loads(out.read_text())["field"] == "fp:5"
        code, report = run(capsys, ["verify", out, "--degree", "3"])
        assert code == 0
        assert report["verdict"] == "Verified"
        assert report["config"]["field"] == "fp:5"

    def test_reports_byte_identical(self, workdir, capsys):
        hom = self.build_hom(workdir, capsys, "brick", workdir / "brick.rep")
        out1, out2 = workdir / "r1.json", workdir / "r2.json"
        for out in (out1, out2):
            code = main(["verify", str(hom), "--degree", "2", "--trials", "8",
                         "--sizes", "1,2", "--seed", "42", "--out", str(out)])
            assert code == 0
        assert out1.read_bytes() == out2.read_bytes()
