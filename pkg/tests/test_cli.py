import csv

import numpy as np
import pytest

from bfio.cli import main
from bfio.oracle import relative_error, white_noise
from bfio.vecio import read_vector, write_vector


@pytest.fixture
def fvec(tmp_path):
    p = tmp_path / "f.bin"
    write_vector(p, white_noise(32, 0), 32)
    return p


def test_apply_deterministic(tmp_path, fvec, capsys):
    out1, out2 = tmp_path / "u1.bin", tmp_path / "u2.bin"
    assert main(["apply", "--n", "32", "--q", "5", "--input", str(fvec), "--output", str(out1)]) == 0
    assert main(["apply", "--n", "32", "--q", "5", "--input", str(fvec), "--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert capsys.readouterr().out.count("apply N=32") == 2


def test_apply_matches_oracle(tmp_path, fvec):
    u, d = tmp_path / "u.bin", tmp_path / "d.bin"
    assert main(["apply", "--n", "32", "--q", "9", "--phase", "fourier", "--pair-offset", "2",
                 "--input", str(fvec), "--output", str(u)]) == 0
    assert main(["oracle", "--n", "32", "--phase", "fourier", "--input", str(fvec), "--output", str(d)]) == 0
    assert relative_error(read_vector(u)[0], read_vector(d)[0]) < 1e-4


def test_apply_with_amplitude(tmp_path, fvec, capsys):
    u = tmp_path / "u.bin"
    assert main(["apply", "--n", "32", "--q", "5", "--phase", "circle", "--amp", "circle",
                 "--input", str(fvec), "--output", str(u)]) == 0
    assert " s=" in capsys.readouterr().out


def test_missing_input_exit_2(tmp_path, capsys):
    rc = main(["apply", "--n", "32", "--input", str(tmp_path / "nope.bin"), "--output", str(tmp_path / "u")])
    assert rc == 2
    assert "not found" in capsys.readouterr().err


def test_n_mismatch_exit_2(tmp_path, fvec, capsys):
    assert main(["apply", "--n", "64", "--input", str(fvec), "--output", str(tmp_path / "u")]) == 2
    assert "mismatch" in capsys.readouterr().err


def test_bad_file_exit_2(tmp_path):
    p = tmp_path / "bad.bin"
    p.write_bytes(b"nonsense-bytes-here-0000000")
    assert main(["apply", "--n", "32", "--input", str(p), "--output", str(tmp_path / "u")]) == 2


def test_invalid_plan_exit_2(tmp_path, fvec):
    assert main(["apply", "--n", "32", "--q", "40", "--input", str(fvec), "--output", str(tmp_path / "u")]) == 2


def test_oracle_guard(tmp_path):
    p = tmp_path / "f.bin"
    write_vector(p, np.zeros(512 * 512), 512)
    assert main(["oracle", "--n", "512", "--input", str(p), "--output", str(tmp_path / "u")]) == 2


def test_bench_cross_product(tmp_path, capsys):
    path = tmp_path / "b.csv"
    assert main(["bench", "--n", "32,64", "--q", "3,5", "--csv", str(path), "--check-samples", "64"]) == 0
    rows = list(csv.DictReader(open(path)))
    assert len(rows) == 4
    assert list(rows[0]) == ["N", "q", "phase", "amp", "Ta_sec", "Td_sec", "speedup", "eps_a", "seed"]
    assert "Td/Ta" in capsys.readouterr().out


def test_bench_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["bench", "--n", "32", "--q", "5", "--seed", "4"]
    main(args + ["--csv", str(a)])
    main(args + ["--csv", str(b)])
    ra, rb = next(csv.DictReader(open(a))), next(csv.DictReader(open(b)))
    for key in ("N", "q", "phase", "amp", "eps_a", "seed"):
        assert ra[key] == rb[key]


def test_bench_eps_decreases_with_q(tmp_path):
    path = tmp_path / "b.csv"
    main(["bench", "--n", "64", "--q", "5,7,9", "--csv", str(path)])
    eps = [float(r["eps_a"]) for r in csv.DictReader(open(path))]
    assert eps[0] > eps[1] > eps[2]


def test_bench_row_failure_nonzero(tmp_path, capsys):
    assert main(["bench", "--n", "32,100", "--q", "5"]) == 1
    assert "failed" in capsys.readouterr().out


def test_config_file(tmp_path, fvec):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# run\nn = 32\nq = 5\nphase = fourier\ninput = {fvec}\noutput = {tmp_path / 'u.bin'}\n")
    assert main(["apply", "--config", str(cfg)]) == 0
    assert read_vector(tmp_path / "u.bin")[1] == 32
    # flags win over the file
    assert main(["apply", "--config", str(cfg), "--n", "64"]) == 2


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 32\ncolour = blue\n")
    assert main(["apply", "--config", str(cfg)]) == 2


def test_probe(capsys):
    assert main(["probe", "--n", "64", "--q", "5", "--phase", "fourier"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert out[0].split()[:2] == ["lvl(A)", "lvl(B)"]
    assert len(out) > 5
