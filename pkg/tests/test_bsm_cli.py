import io

import numpy as np
import pytest

from bchsense.bsm import ParseError, format_bsm, read_bsm, read_vector, write_bsm, write_vector
from bchsense.cli import main
from bchsense.matrices import DevoreSpec, build_devore, build_ternary, coherence, pm1_matrix


def run(args):
    out = io.StringIO()
    code = main(args, out=out)
    return code, out.getvalue()


@pytest.mark.parametrize("make", [
    lambda: pm1_matrix(4, 3, "x^4+x+1"),
    lambda: pm1_matrix(6, 2),
    lambda: build_devore(DevoreSpec(5, 2)),
    lambda: build_ternary(2, 2),
])
def test_round_trip(make):
    M = make()
    text = format_bsm(M)
    back = read_bsm(io.StringIO(text))
    assert back.kind == M.kind
    assert np.array_equal(back.dense(), M.dense())
    assert back.orbit_table == M.orbit_table
    assert back.meta == M.meta
    assert coherence(back) == coherence(M)
    assert format_bsm(back) == text


def test_header_and_metadata():
    text = format_bsm(pm1_matrix(4, 3, "x^4+x+1"))
    lines = text.splitlines()
    assert lines[0] == "BSM1 PM1 15 16"
    assert lines[1] == "# mtilde=4 i=3 primpoly=0x13 parity=even"
    assert lines[2:4] == ["# orbit 0 1", "# orbit 1 15"]
    assert all(len(r) == 16 and set(r) <= {"+", "-"} for r in lines[4:])


@pytest.mark.parametrize("text,lineno", [
    ("", 1),
    ("BSM2 PM1 1 1\n+\n", 1),
    ("BSM1 FOO 1 1\n+\n", 1),
    ("BSM1 PM1 x 1\n+\n", 1),
    ("BSM1 PM1 2 2\n++\n+\n", 3),
    ("BSM1 PM1 2 2\n++\n+?\n", 3),
    ("BSM1 PM1 3 2\n++\n+-\n", 3),
    ("BSM1 PM1 1 2\n# orbit 0\n++\n", 2),
])
def test_parse_errors_carry_line_numbers(text, lineno):
    with pytest.raises(ParseError) as info:
        read_bsm(io.StringIO(text))
    assert info.value.lineno == lineno
    assert f"line {lineno}" in str(info.value)


def test_bad_orbit_records_rejected():
    text = format_bsm(pm1_matrix(4, 3)).replace("# orbit 1 15", "# orbit 1 5")
    with pytest.raises(ParseError):
        read_bsm(io.StringIO(text))


def test_vector_round_trip(tmp_path):
    v = np.random.default_rng(0).standard_normal(17)
    write_vector(tmp_path / "v.txt", v, comment="hello")
    assert np.array_equal(read_vector(tmp_path / "v.txt"), v)
    (tmp_path / "bad.txt").write_text("1.0\nabc\n")
    with pytest.raises(ParseError, match="line 2"):
        read_vector(tmp_path / "bad.txt")


def test_construct(tmp_path):
    f = tmp_path / "m4.bsm"
    code, out = run(["construct", "--mtilde", "4", "--i", "3", "--out", str(f)])
    assert code == 0
    assert f.read_text().splitlines()[0] == "BSM1 PM1 15 16"
    assert "coherence_bound: 1/15" in out
    assert "dmin_bound: 7" in out


def test_construct_from_order(tmp_path):
    f = tmp_path / "m3.bsm"
    code, out = run(["construct", "--mtilde", "3", "--k", "7", "--out", str(f)])
    assert code == 0
    M = read_bsm(f)
    assert (M.rows, M.cols) == (7, 8)
    assert M.meta["i"] == 3


def test_construct_rejects_large_gap():
    assert run(["construct", "--mtilde", "4", "--i", "5"])[0] == 1
    assert run(["construct", "--mtilde", "4"])[0] == 1
    assert run(["construct", "--mtilde", "4", "--i", "3", "--primpoly", "x^4+x^3+x^2+x+1"])[0] == 1


def test_construct_is_deterministic(tmp_path):
    a, b = tmp_path / "a.bsm", tmp_path / "b.bsm"
    out_a = run(["construct", "--mtilde", "5", "--i", "2", "--out", str(a)])[1]
    out_b = run(["construct", "--mtilde", "5", "--i", "2", "--out", str(b)])[1]
    assert a.read_bytes() == b.read_bytes()
    assert out_a.replace(str(a), "") == out_b.replace(str(b), "")


def test_analyze(tmp_path):
    f = tmp_path / "m4.bsm"
    write_bsm(pm1_matrix(4, 3), f)
    code, out = run(["analyze", str(f), "--trials", "50"])
    assert code == 0
    assert "coherence: 1/15" in out
    assert "max_rip_order: 15" in out
    assert "k=15 delta=14/15" in out
    assert "k=16" not in out
    assert "gershgorin_failures: 0" in out
    code, csv = run(["analyze", str(f), "--format", "csv", "--trials", "10"])
    assert "coherence,1/15" in csv
    assert "2,1/15" in csv


def test_analyze_single_column(tmp_path):
    f = tmp_path / "one.bsm"
    f.write_text("BSM1 BIN 3 1\n+\n0\n0\n")
    code, out = run(["analyze", str(f)])
    assert code == 0
    assert "coherence: 0\n" in out
    assert "delta=" not in out


def test_analyze_errors(tmp_path):
    assert run(["analyze", str(tmp_path / "missing.bsm")])[0] == 2
    bad = tmp_path / "bad.bsm"
    bad.write_text("BSM1 PM1 2 2\n++\n+x\n")
    assert run(["analyze", str(bad)])[0] == 2


def test_recover(tmp_path):
    M = pm1_matrix(6, 3)
    f, y, c = tmp_path / "m6.bsm", tmp_path / "y.txt", tmp_path / "c.txt"
    write_bsm(M, f)
    write_vector(y, M.normalized()[:, 5])
    code, out = run(["recover", str(f), "--y", str(y), "--out", str(c)])
    assert code == 0
    assert "support: 5\n" in out
    coef = read_vector(c)
    assert coef.shape == (64,)
    assert np.flatnonzero(np.abs(coef) > 1e-9).tolist() == [5]
    code, out = run(["recover", str(f), "--y", str(y), "--backend", "dft", "--mode", "pure_mp"])
    assert code == 0 and "support: 5\n" in out


def test_recover_dimension_mismatch(tmp_path):
    f, y = tmp_path / "m4.bsm", tmp_path / "y.txt"
    write_bsm(pm1_matrix(4, 3), f)
    write_vector(y, np.ones(7))
    assert run(["recover", str(f), "--y", str(y)])[0] == 1


def test_simulate():
    code, out = run(["simulate", "--mtilde", "6", "--i", "3", "--sparsity", "4",
                     "--trials", "50", "--seed", "11"])
    assert code == 0
    assert "success_rate: 1.000000" in out
    assert "selection_guarantee: yes" in out
    assert "mult_count_naive: 4032" in out
    assert "mult_count_dft: 1576" in out
    assert out == run(["simulate", "--mtilde", "6", "--i", "3", "--sparsity", "4",
                       "--trials", "50", "--seed", "11"])[1]


def test_simulate_without_guarantee():
    code, out = run(["simulate", "--mtilde", "4", "--i", "3", "--sparsity", "9", "--trials", "5"])
    assert code == 0
    assert "selection_guarantee: no" in out


def test_tables():
    code, out = run(["tables", "--i", "3", "--mtilde", "4,6,8,10"])
    assert code == 0
    rows = [line.split() for line in out.splitlines()[1:]]
    assert [r[4] for r in rows] == ["5", "7", "13", "26"]
    assert rows[0][3] == "0x35"
    code, csv = run(["tables", "--k", "8", "--mtilde", "4", "--format", "csv"])
    assert csv.splitlines()[0].startswith("m_tilde,i,primitive_poly_hex,h_hex,deg_h")


def test_count():
    code, out = run(["count", "--a", "3", "--b", "1..8"])
    assert code == 0
    lines = out.splitlines()
    assert [int(line.split()[2]) for line in lines] == [2, 3, 4, 5, 7, 10, 14, 19]
    assert lines[-1] == "3 8 19 13"
    code, out = run(["count", "--degh", "--b", "4"])
    assert out.splitlines() == ["4 1 7", "4 2 5", "4 3 5", "4 4 5"]


def test_devore_and_combine(tmp_path):
    d, t = tmp_path / "d.bsm", tmp_path / "t.bsm"
    assert run(["devore", "--p", "7", "--r", "2", "--out", str(d)])[0] == 0
    assert d.read_text().splitlines()[0] == "BSM1 BIN 49 343"
    assert run(["combine", "--p", "7", "--k", "3", "--out", str(t)])[0] == 0
    assert t.read_text().splitlines()[0] == "BSM1 TERN 49 2744"
    assert run(["combine", "--p", "15", "--k", "3"])[0] == 1
    assert run(["devore", "--p", "8", "--r", "2"])[0] == 1


def test_usage_errors():
    assert run([])[0] == 1
    assert run(["construct", "--mtilde", "four"])[0] == 1
