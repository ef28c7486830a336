from __future__ import annotations

import io
from fractions import Fraction
from pathlib import Path

import pytest

from tripadic import cli, hecke_euler as he, oracles, spectral
from tripadic.config import SAMPLE_CONFIG, TWO_PRIME_CONFIG, parse_config
from tripadic.distributions import HeckeMatrix
from tripadic.errors import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(argv, stdin: str = "") -> tuple[int, str]:
    out = io.StringIO()
    code = cli.main(argv, stdin=io.StringIO(stdin), stdout=out)
    return code, out.getvalue()


def write(tmp_path, text: str) -> str:
    path = tmp_path / "c.cfg"
    path.write_text(text)
    return str(path)


def test_shipped_configs_match_constants():
    assert (CONFIGS / "sample.cfg").read_text() == SAMPLE_CONFIG
    assert (CONFIGS / "two_primes.cfg").read_text() == TWO_PRIME_CONFIG


def test_euler_sample_machine():
    code, out = run(["--machine", "euler", "--config", str(CONFIGS / "sample.cfg")])
    assert code == 0
    kv = dict(line.split(":", 1) for line in out.splitlines())
    assert kv["t1.p0.E"] == "3328"
    assert kv["t1.p0.E1"] == "19360"
    assert kv["t1.p0.ratio"] == "104/605"
    assert kv["t1.product"] == "104/605"
    assert kv["t1.archimedean"] == "9"


def test_euler_table_matches_library():
    cfg = parse_config(SAMPLE_CONFIG)
    rows, footers = cli.euler_rows(cfg)
    t, e = cfg.triples["t1"], cfg.eigen["t1"]
    assert rows[0].E == he.euler_factor_Ep(t, e, "p0")
    assert rows[0].E1 == he.euler_factor_Ep1(t, e, "p0")
    assert footers[0].product == he.interpolation_factor(t, e)
    code, out = run(["euler", "--config", str(CONFIGS / "sample.cfg")])
    lines = out.splitlines()
    assert code == 0 and lines[0].split() == ["triple", "weights", "prime", "E", "E1", "E/E1"]
    assert lines[2].split() == ["t1", "(2|2|6)", "p0", "3328", "19360", "104/605"]


def test_euler_two_primes():
    cfg = parse_config(TWO_PRIME_CONFIG)
    rows, footers = cli.euler_rows(cfg)
    assert [r.prime for r in rows] == ["p0", "p1"]
    assert rows[1].ratio == Fraction(4778596, 4782969)
    assert footers[0].product == Fraction(104, 605) * Fraction(4778596, 4782969)
    assert footers[0].product == he.interpolation_factor(cfg.triples["t1"], cfg.eigen["t1"])


def test_euler_trivial_betas(tmp_path):
    text = SAMPLE_CONFIG.replace("1, 3", "1, 0").replace("1, 243", "1, 0")
    code, out = run(["--machine", "euler", "--config", write(tmp_path, text)])
    assert code == 0 and "t1.p0.ratio:1" in out.splitlines()


def test_euler_exceptional_zero(tmp_path):
    code, out = run(["--machine", "euler", "--config", write(tmp_path, SAMPLE_CONFIG.replace("1, 243", "1, 27"))])
    assert code == 0 and "t1.p0.ratio:exceptional-zero" in out


def test_euler_symbolic(tmp_path):
    text = SAMPLE_CONFIG.replace("p0.x = 1, 3", "p0.x = symbolic")
    code, out = run(["--machine", "euler", "--config", write(tmp_path, text)])
    assert code == 0 and "alpha_x_p0" in out


def test_missing_eigenvalue(tmp_path, capsys):
    code, _ = run(["euler", "--config", write(tmp_path, SAMPLE_CONFIG.replace("p0.z = 1, 243\n", ""))])
    assert code == 2
    assert "missing eigenvalues p0.z" in capsys.readouterr().err


def test_error_names_line(tmp_path, capsys):
    code, _ = run(["euler", "--config", write(tmp_path, SAMPLE_CONFIG.replace("D = 5", "D = -1"))])
    assert code == 2
    assert "line 6: [general] D" in capsys.readouterr().err


@pytest.mark.parametrize(
    "old, new",
    [("p = 3", "p = 2"), ("t1 = 2 | 2 | 6", "t1 = 2 | 2"), ("p0.x = 1, 3", "p7.x = 1, 3"), ("D = 5", "D = five")],
)
def test_bad_configs(old, new):
    with pytest.raises(ConfigError):
        parse_config(SAMPLE_CONFIG.replace(old, new))


def test_missing_file():
    assert run(["euler", "--config", "/nonexistent.cfg"])[0] == 2


def test_non_interpolation_point(tmp_path):
    assert run(["euler", "--config", write(tmp_path, SAMPLE_CONFIG.replace("2 | 2 | 6", "2 | 2 | 2"))])[0] == 2


def test_usage_errors():
    assert run([])[0] == 2
    assert run(["verify", "nosuch"])[0] == 2
    assert run(["qexp", "--op", "W"])[0] == 2
    assert run(["--help"])[0] == 0


def test_slopes_sample():
    cfg = parse_config(SAMPLE_CONFIG)
    rows = cli.slope_rows(cfg)
    assert [r.label for r in rows] == ["k=0", "k=1", "k=2", "k=3"]
    for r in rows:
        assert r.slopes == tuple((Fraction(j), 1) for j in range(cfg.D + 1))
        assert r.unresolved == 0 and r.zero == r.size - cfg.D - 1
    assert [r.below for r in rows] == [0, 0, 1, 2]
    code, out = run(["--machine", "slopes", "--config", str(CONFIGS / "sample.cfg")])
    assert code == 0 and "k=2.slopes:0 1 2 3 4 5" in out and "k=3.classical:2" in out


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_slopes_agree_with_classical_polynomials(k):
    # the classical U on degree-k polynomials has the same low slopes
    classical = spectral.newton_polygon(spectral.char_series(HeckeMatrix.of(oracles.classical_up_sym(k, 3), 3)))
    normalised = tuple((s - 1, m) for s, m in classical.segments)
    row = cli.slope_rows(parse_config(SAMPLE_CONFIG))[k]
    assert row.slopes[: k + 1] == normalised


def test_slopes_diag_matrix(tmp_path):
    text = "[general]\np = 5\n[slopes]\nmatrix = diag: 1, 5, 25, 250\n"
    code, out = run(["--machine", "slopes", "--config", write(tmp_path, text)])
    assert code == 0 and "matrix.slopes:0 1 2 3" in out


def test_slopes_rows_matrix(tmp_path):
    text = "[general]\np = 3\n[slopes]\nmatrix = 1 0; 0 9\n"
    assert cli.slope_rows(parse_config(text))[0].slopes == ((0, 1), (2, 1))


def test_slopes_empty_grid(tmp_path):
    code, out = run(["slopes", "--config", write(tmp_path, "[general]\np = 3\n")])
    assert code == 0 and len(out.splitlines()) == 2


def test_precision_override_reports_unresolved():
    code, out = run(["--machine", "--precision", "3", "slopes", "--config", str(CONFIGS / "sample.cfg")])
    assert code == 0
    kv = dict(line.split(":", 1) for line in out.splitlines())
    assert int(kv["k=0.unresolved"]) > 0
    assert int(kv["k=0.unresolved"]) + int(kv["k=0.zero"]) + len(kv["k=0.slopes"].split()) >= 13


def test_slopes_two_primes():
    rows = cli.slope_rows(parse_config(TWO_PRIME_CONFIG))
    assert len(rows) == 3 and all(r.unresolved == 0 for r in rows)


def test_qexp_ops():
    assert run(["qexp", "--op", "U"], "1:2\n3:5\n9:1\n") == (0, "1:5\n3:1\n")
    code, out = run(["qexp", "--op", "V"], "1:2\n")
    assert code == 0 and out == "3:2\n"
    code, out = run(["qexp", "--op", "deplete"], "1:2\n3:5\n")
    assert out == "1:2\n"
    code, out = run(["qexp", "--op", "Theta", "--prime", "5"], "2:1\n")
    assert out == "2:2\n"


def test_verify_suites():
    code, out = run(["verify", "serre-tate"])
    assert code == 0 and out.splitlines()[-1].endswith("passed")
    code, out = run(["--machine", "verify", "hecke-euler"])
    assert code == 0 and all(line.endswith(":pass") for line in out.splitlines())
