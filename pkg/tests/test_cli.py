import subprocess
import sys

import pytest

from codecubature.cli import main
from codecubature.fileformat import read


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def generate(tmp_path, capsys, name, *args):
    path = tmp_path / name
    code, out, _ = run(["generate", *args, "-o", path], capsys)
    assert code == 0, out
    return path, out


def test_generate_simplex_dim4_degree3(tmp_path, capsys):
    path, out = generate(tmp_path, capsys, "s.cub", "--region", "simplex", "--dim", 4, "--degree", 3)
    assert "points: 11" in out
    ff = read(str(path))
    assert ff.header["points"] == "11" and len(ff.weights) == 11
    assert run(["verify", path], capsys)[0] == 0


def test_generate_sphere_dim16_degree5(tmp_path, capsys):
    path, out = generate(tmp_path, capsys, "sp.cub", "--region", "sphere", "--dim", 16, "--degree", 5)
    assert "points: 288" in out
    assert read(str(path)).header["equal-weight"] == "true"


def test_verify_pass_overclaim_and_corruption(tmp_path, capsys):
    path, _ = generate(tmp_path, capsys, "c.cub", "--region", "cube", "--dim", 16, "--degree", 5)
    code, out, _ = run(["verify", path, "--strategy", "exhaustive"], capsys)
    assert code == 0 and "pass=true" in out
    code, out, _ = run(["verify", path, "--strategy", "exhaustive", "--degree", 6], capsys)
    assert code == 1 and "violating monomial: x" in out
    lines = path.read_text().splitlines()
    first = lines.index("end-header") + 1
    vals = lines[first].split()
    vals[3] = repr(float(vals[3]) + 1e-3)
    lines[first] = " ".join(vals)
    bad = tmp_path / "bad.cub"
    bad.write_text("\n".join(lines) + "\n")
    for strategy in ("exhaustive", "sampled", "structural"):
        assert run(["verify", bad, "--strategy", strategy], capsys)[0] == 1, strategy


def test_verify_reports_parse_errors_with_line(tmp_path, capsys):
    path, _ = generate(tmp_path, capsys, "c.cub", "--region", "cube", "--dim", 3, "--degree", 3)
    text = path.read_text().replace("end-header\n", "end-header\n0.1 oops 0 0\n", 1)
    bad = tmp_path / "bad.cub"
    bad.write_text(text)
    code, _, err = run(["verify", bad], capsys)
    assert code == 2 and "line" in err


def test_regeneration_is_byte_identical(tmp_path, capsys):
    for args in (["--region", "cube", "--dim", 20, "--degree", 5, "--strategy", "sampled", "--count", 500, "--seed", 9],
                 ["--region", "ball", "--dim", 8, "--degree", 5],
                 ["--region", "simplex", "--dim", 6, "--degree", 3]):
        a, _ = generate(tmp_path, capsys, "a.cub", *args)
        b, _ = generate(tmp_path, capsys, "b.cub", *args)
        assert a.read_bytes() == b.read_bytes()


def test_usage_and_infeasible_exit_codes(tmp_path, capsys):
    code, _, err = run(["generate", "--region", "sphere", "--dim", 4, "--degree", 4], capsys)
    assert code == 2 and "odd" in err
    assert run(["generate", "--region", "spherical-shell", "--dim", 3, "--degree", 3], capsys)[0] == 2
    assert run(["generate", "--region", "nowhere", "--dim", 3, "--degree", 3], capsys)[0] == 2
    code, _, err = run(["quad", "--kind", "equal-weight", "--measure", "gaussian", "--q", 5, "--t", 5], capsys)
    assert code == 3 and "infeasible" in err


def test_oa_command(capsys):
    code, out, err = run(["oa", "--q", 2, "--m", 4, "--strength", 5, "--family", "kerdock"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "2 16 256 5"
    assert len(lines) == 257 and all(len(r) == 16 for r in lines[1:])
    assert "verified strength 5" in err


def test_quad_command(capsys):
    code, out, _ = run(["quad", "--kind", "convolutional", "--s", 3], capsys)
    body = out.split("end-header\n")[1].split()
    pts = sorted(abs(float(v)) for v in body[1::2])
    assert code == 0 and len(pts) == 8
    pairs = [float(v) for v in out.split("pairs: ")[1].split("\n")[0].split()]
    assert [round(z, 6) for z in pairs] == [0.500128, 0.243941, 0.153942]


def test_bounds_command(capsys):
    code, out, _ = run(["bounds", "--dim", 100, "--degree", 5, "--symmetric"], capsys)
    assert code == 0
    assert "tchakaloff-symmetric: 8852652" in out and "exact-determination: 87651" in out


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "codecubature", "bounds", "--dim", "3", "--degree", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "tchakaloff: 10" in res.stdout
