import subprocess
import sys

import pytest

from spanshare.cli import SplitMix64, main

ORAND = "or(and(1,3),and(2,3))"


@pytest.fixture
def orand_msp_file(tmp_path):
    path = tmp_path / "orand.msp"
    assert main(["msp", "from-formula", ORAND, "--field", "5", "--out", str(path)]) == 0
    return path


@pytest.fixture
def shamir_msp_file(tmp_path):
    path = tmp_path / "shamir13.msp"
    assert main(["msp", "from-formula", "thr2(1,2,3)", "--field", "5", "--out", str(path)]) == 0
    return path


@pytest.fixture
def structure_file(tmp_path):
    path = tmp_path / "nonsd.adv"
    path.write_text("players 3\nmaximal 1 2\nmaximal 3\n")
    return path


def test_splitmix64_reference_values():
    gen = SplitMix64(0)
    # reference sequence of SplitMix64 seeded with 0
    assert gen.next_u64() == 0xE220A8397B1DCDAF
    assert gen.next_u64() == 0x6E789E6AA1B965F4
    assert SplitMix64(0).elements(5, 3) == SplitMix64(0).elements(5, 3)


def test_structure_check(structure_file, capsys):
    assert main(["structure", "check", str(structure_file)]) == 0
    out = capsys.readouterr().out
    assert "q2=false q2star=true selfdual=false" in out

    assert main(["structure", "check", str(structure_file), "--require", "q2star"]) == 0
    assert main(["structure", "check", str(structure_file), "--require", "selfdual"]) == 1


def test_structure_check_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.adv"
    bad.write_text("players x\n")
    assert main(["structure", "check", str(bad)]) == 2
    assert "error" in capsys.readouterr().err


def test_structure_dual_and_extend(structure_file, tmp_path, capsys):
    assert main(["structure", "dual", str(structure_file)]) == 0
    out = capsys.readouterr().out
    assert "maximal 1\nmaximal 2" in out

    ext = tmp_path / "ext.adv"
    assert main(["structure", "extend", str(structure_file), "--out", str(ext)]) == 0
    text = ext.read_text()
    assert "players 4" in text
    assert main(["structure", "check", str(ext), "--require", "selfdual"]) == 0


def test_structure_extend_rejects_non_q2star(tmp_path, capsys):
    bad = tmp_path / "nq.adv"
    bad.write_text("players 2\nmaximal\n")  # only the empty set: {1},{2} disjoint qualified
    assert main(["structure", "extend", str(bad)]) == 1
    assert "no-cloning" in capsys.readouterr().err


def test_msp_from_formula_and_eval(orand_msp_file, capsys):
    text = orand_msp_file.read_text()
    assert text.startswith("msp field=5 d=4 e=3 n=3")

    assert main(["msp", "eval", str(orand_msp_file), "--set", "2,3"]) == 0
    assert capsys.readouterr().out.strip() == "1"
    assert main(["msp", "eval", str(orand_msp_file), "--set", "1,2"]) == 0
    assert capsys.readouterr().out.strip() == "0"


def test_msp_from_formula_field_too_small(capsys):
    assert main(["msp", "from-formula", "thr2(1,2,3)", "--field", "2"]) == 2
    assert "too small" in capsys.readouterr().err


def test_msp_dual_and_extend(orand_msp_file, tmp_path, capsys):
    assert main(["msp", "dual", str(orand_msp_file)]) == 0
    assert capsys.readouterr().out.startswith("msp field=5")

    ext = tmp_path / "ext.msp"
    assert main(["msp", "extend", str(orand_msp_file), "--out", str(ext)]) == 0
    assert "n=4" in ext.read_text().splitlines()[0]

    bad = tmp_path / "or12.msp"
    assert main(["msp", "from-formula", "or(1,2)", "--field", "5", "--out", str(bad)]) == 0
    assert main(["msp", "extend", str(bad)]) == 1
    assert "no-cloning" in capsys.readouterr().err


def test_share_and_reconstruct(shamir_msp_file, tmp_path, capsys):
    shares = tmp_path / "shares.txt"
    assert main(["share", str(shamir_msp_file), "--secret", "3", "--seed", "7", "--out", str(shares)]) == 0
    text = shares.read_text()
    assert "# seed 7" in text
    assert "field 5" in text

    assert main(["reconstruct", str(shamir_msp_file), str(shares), "--set", "2,3"]) == 0
    assert capsys.readouterr().out.strip() == "3"
    assert main(["reconstruct", str(shamir_msp_file), str(shares), "--set", "1,3"]) == 0
    assert capsys.readouterr().out.strip() == "3"

    assert main(["reconstruct", str(shamir_msp_file), str(shares), "--set", "1"]) == 1
    assert "cannot reconstruct" in capsys.readouterr().err


def test_share_determinism(shamir_msp_file, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for out in (a, b):
        assert main(["share", str(shamir_msp_file), "--secret", "2", "--seed", "99", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.txt"
    assert main(["share", str(shamir_msp_file), "--secret", "2", "--seed", "100", "--out", str(c)]) == 0
    assert a.read_bytes() != c.read_bytes()


def test_qss_verify_pure(shamir_msp_file, orand_msp_file, capsys):
    assert main(["qss", "verify-pure", str(shamir_msp_file), "--random", "2"]) == 0
    out = capsys.readouterr().out
    assert "result: PASS" in out

    assert main(["qss", "verify-pure", str(orand_msp_file), "--random", "2"]) == 1
    err = capsys.readouterr().err
    assert "verify-mixed" in err


def test_qss_verify_mixed(orand_msp_file, capsys):
    assert main(["qss", "verify-mixed", str(orand_msp_file), "--random", "2", "--format", "machine"]) == 0
    out = capsys.readouterr().out
    assert "check=recovery" in out and "result=pass" in out


def test_qss_machine_format_deterministic(shamir_msp_file, capsys):
    args = ["qss", "verify-pure", str(shamir_msp_file), "--random", "3", "--seed", "5", "--format", "machine"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    second = capsys.readouterr().out
    assert first == second
    assert "seed=5" in first


def test_condition_check_and_search(tmp_path, capsys):
    fixture = tmp_path / "counter.scheme"
    assert main(["condition", "search", "--out", str(fixture)]) == 0
    out = capsys.readouterr().out
    assert "counterexample found" in out
    assert "max_distance=0.5" in out

    assert main(["condition", "check", str(fixture), "--set", "1"]) == 1
    assert "eq1=false oracle=false agree=true" in capsys.readouterr().out


def test_condition_check_shamir(tmp_path, capsys):
    from spanshare.condition import format_scheme, scheme_from_msp
    from spanshare.galois import Field
    from spanshare.msp import shamir_msp

    path = tmp_path / "shamir.scheme"
    path.write_text(format_scheme(scheme_from_msp(shamir_msp(3, 1, Field(5)))))
    assert main(["condition", "check", str(path), "--set", "1"]) == 0
    assert "eq1=true oracle=true agree=true" in capsys.readouterr().out


def test_condition_check_invalid_table(tmp_path, capsys):
    bad = tmp_path / "bad.scheme"
    # normalized rows but the full share vector does not determine s
    bad.write_text(
        "scheme n=2 secrets=2\nspace 1 2\nspace 2 2\n"
        "p 0 0 0 1/1\np 1 0 0 1/1\n"
    )
    assert main(["condition", "check", str(bad), "--set", "1"]) == 2
    assert "not a valid secret-sharing table" in capsys.readouterr().err


def test_condition_check_bad_split(tmp_path, capsys):
    from spanshare.condition import format_scheme, scheme_from_msp
    from spanshare.galois import Field
    from spanshare.msp import shamir_msp

    path = tmp_path / "shamir.scheme"
    path.write_text(format_scheme(scheme_from_msp(shamir_msp(3, 1, Field(5)))))
    assert main(["condition", "check", str(path), "--set", "2,3"]) == 2
    assert "not correct" in capsys.readouterr().err


def test_condition_search_function_family_finds_nothing(capsys):
    assert main(["condition", "search", "--den", "3", "--family", "function"]) == 1
    assert "no counterexample" in capsys.readouterr().out


def test_missing_file_is_exit_2(capsys):
    assert main(["msp", "eval", "/nonexistent.msp", "--set", "1"]) == 2


@pytest.mark.parametrize(
    "content",
    ["\x00\x01garbage\xff", "msp field=banana", "players 99\nmaximal 1\n",
     "scheme n=2\np 0 0 0 1/0\n", "field five\nshare a b c\n"],
)
def test_malformed_files_never_traceback(tmp_path, capsys, content):
    path = tmp_path / "junk"
    path.write_text(content)
    for argv in (
        ["structure", "check", str(path)],
        ["msp", "eval", str(path), "--set", "1"],
        ["condition", "check", str(path), "--set", "1"],
        ["reconstruct", str(path), str(path), "--set", "1"],
    ):
        assert main(argv) == 2
        assert "Traceback" not in capsys.readouterr().err


def test_console_entry_point():
    result = subprocess.run(
        [sys.executable, "-m", "spanshare.cli", "msp", "from-formula", "or(1,2)", "--field", "5"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert result.stdout.startswith("msp field=5 d=2 e=1 n=2")
