import csv
import io
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from besov_lab.errors import DomainError
from besov_lab.experiments import (
    GAP_COLUMNS,
    GapRecord,
    dft_path_norm,
    plot_data,
    records_to_csv,
    residual_certificates,
    seq_params,
    sequence_checks,
    summarize,
    summary_json,
    sweep,
    thm1_gap,
    thm2_admissible,
    thm2_ratio,
    thm3_gap,
    thm4_gap,
    write_records_csv,
)
from besov_lab.lacunary import build_profile, shear_initial_data
from besov_lab.littlewood_paley import BesovIndex, besov_norm_shear

SQRT2PI = math.sqrt(2 * math.pi)


# -- sequence parameters --------------------------------------------------------


@pytest.mark.parametrize("n", range(3, 20))
def test_sequence_times(n):
    pi = seq_params(n, "pi")
    assert pi.t_over_pi == Fraction(8, 11 * 2 ** n)
    assert (11 / 8) * 2 ** n * pi.t == pytest.approx(math.pi, rel=1e-15)
    assert seq_params(n, "n_pi").t == pytest.approx(n * pi.t, rel=1e-15)
    assert seq_params(n, "n_pi").lam == pytest.approx(1 + 1 / n)
    visc = seq_params(n, "viscous")
    assert visc.eps * visc.t == pytest.approx(4.0 ** -n * 64 / 121, rel=1e-14)


@given(st.integers(3, 40), st.integers(3, 60))
def test_angles_are_exact(n, j):
    sp = seq_params(n, "pi")
    lam = 11 * 2 ** (j - 3)
    q = Fraction(lam) * sp.t_over_pi % 2
    assert sp.angle(lam) == pytest.approx(float(q) * math.pi, abs=1e-15)
    if j == n:
        assert sp.angle(lam) == pytest.approx(math.pi, abs=1e-15)


def test_sequence_validation():
    with pytest.raises(DomainError):
        seq_params(2, "pi")
    with pytest.raises(DomainError):
        seq_params(5, "bogus")
    assert "ε" in seq_params(5, "viscous").describe()


# -- the four constructions -----------------------------------------------------


@pytest.mark.parametrize("s,p,d,n,expected", [
    (2.0, 2, 2, 10, 2 * math.pi * math.sqrt(2)),
    (1.0, math.inf, 2, 8, 2.0),
    (0.5, 1, 2, 10, 16 * math.pi),
])
def test_thm1_examples(s, p, d, n, expected):
    rec = thm1_gap(s, p, d, n)
    assert rec.full_norm == pytest.approx(expected, rel=1e-8)
    assert rec.block_norm_at_n == pytest.approx(expected, rel=1e-8)
    assert rec.passed
    assert rec.cross_path_rel_err <= 1e-8


def test_thm1_time_and_constants():
    rec = thm1_gap(2.0, 2, 2, 10)
    assert rec.t_n == pytest.approx(2.2312e-3, rel=1e-4)
    assert rec.fubini_factor_used == pytest.approx(SQRT2PI)
    assert rec.paper_constant_claimed == pytest.approx(2 * math.sqrt(math.pi) * 2 * math.pi)
    assert rec.tail_bound <= rec.full_norm


@pytest.mark.parametrize("p", [1, 2, math.inf])
def test_thm1_gap_is_n_independent(p):
    vals = [thm1_gap(1.0, p, 3, n, cross_check=False).full_norm for n in range(4, 13)]
    assert max(vals) - min(vals) <= 1e-10 * max(vals)


@pytest.mark.parametrize("n,bound", [(10, 1.8812), (14, 3.839)])
def test_thm2_bound(n, bound):
    rec = thm2_ratio(2.0, 2, 1, 0.5, 2, n)
    assert rec.paper_bound == pytest.approx(bound, rel=1e-3)
    assert rec.ratio >= rec.paper_bound
    assert rec.ratio == pytest.approx(rec.full_norm / math.sqrt(rec.t_n))
    assert rec.passed


def test_thm2_ratios_increase():
    recs = [thm2_ratio(2.0, 2, 1, 0.5, 2, n, cross_check=False) for n in range(6, 15)]
    assert sequence_checks(recs)["ratio_increasing"]


def test_thm2_rejections():
    with pytest.raises(DomainError, match="Hölder"):
        thm2_ratio(2.0, 2, 1, 0.0, 2, 8)
    with pytest.raises(DomainError, match="inadmissible"):
        thm2_admissible(1.5, 2.0, 1.0, 2)
    with pytest.raises(DomainError, match="inadmissible"):
        thm2_admissible(2.0, 2.0, 2.0, 2)
    with pytest.raises(DomainError):
        thm2_admissible(3.0, 2.0, math.inf, 2)
    thm2_admissible(2.0, 2.0, 1.0, 2)
    thm2_admissible(2.5, 2.0, 2.0, 2)


def test_thm3_example():
    rec = thm3_gap(2.0, 2, 2, 10)
    assert rec.initial_gap == pytest.approx(0.157080, abs=1e-6)
    assert rec.initial_gap == pytest.approx(rec.initial_gap_closed_form, abs=1e-12)
    assert rec.initial_gap_paper == pytest.approx(0.1)
    assert rec.full_norm == pytest.approx(8.88577, rel=1e-6)
    assert rec.lambda_n == pytest.approx(1.1)
    assert rec.passed


def test_thm3_sup_norm_case():
    rec = thm3_gap(2.0, math.inf, 2, 8)
    assert rec.full_norm == pytest.approx(2.0, rel=1e-10)
    assert rec.initial_gap == pytest.approx(2.0 ** -2 / 8, abs=1e-12)


def test_thm3_strict_regularity():
    thm3_gap(2.0, 2, 2, 4, J=8, cross_check=False)
    with pytest.raises(DomainError):
        thm3_gap(2.0, 2, 2, 4, strict=True)


def test_thm4_example():
    rec = thm4_gap(2.0, 2, 2, 10)
    # (1 - 1/e)·√π·√(2π)
    assert rec.block_norm_at_n == pytest.approx(-math.expm1(-1) * math.sqrt(math.pi) * SQRT2PI, rel=1e-10)
    assert rec.block_norm_at_n == pytest.approx(2.8084, abs=1e-4)
    assert rec.eps_n == pytest.approx(2.2607e-4, rel=1e-4)
    assert rec.full_norm >= rec.block_norm_at_n
    assert rec.passed


def test_thm4_sup_norm_block():
    rec = thm4_gap(2.0, math.inf, 2, 8)
    assert rec.block_norm_at_n == pytest.approx(0.632121, abs=1e-6)
    assert rec.paper_bound == pytest.approx(1 - math.exp(-1))


@pytest.mark.parametrize("fn,args", [(thm1_gap, (2.0, 2, 2, 15)), (thm3_gap, (2.0, 2, 2, 2)),
                                     (thm4_gap, (2.0, 2, 2, 20))])
def test_index_range(fn, args):
    with pytest.raises(DomainError):
        fn(*args)


def test_dft_path_matches_exact_norm():
    state = shear_initial_data(build_profile(2.0, 12), 2, 1.0)
    idx = BesovIndex(2.0, 1, math.inf)
    exact = besov_norm_shear(state, idx)
    assert dft_path_norm(state, idx) == pytest.approx(exact, rel=1e-10)


def test_residual_certificates():
    rows = residual_certificates(s=0.5, J=8, N=2048, n_values=range(4, 7))
    assert [r["n"] for r in rows] == [4, 5, 6]
    for r in rows:
        assert r["euler_residual"] <= 1e-10
        assert r["ns_residual"] <= 1e-10


# -- records, sweeps and summaries ------------------------------------------------


@pytest.fixture(scope="module")
def small_sweep():
    return sweep("thm1", s_values=(1.0, "d/p+1+0.1"), p_values=(2, math.inf), d_values=(2,),
                 n_values=range(4, 8), J=10)


def test_sweep_order_and_dedup(small_sweep):
    keys = [(r.s, r.p, r.n) for r in small_sweep]
    assert keys == sorted(keys)
    # s = d/p + 1.1 at p = inf is 1.1, distinct from 1.0
    assert len(small_sweep) == 4 * 4
    assert all(r.passed for r in small_sweep)


def test_sweep_skips_inadmissible_thm2():
    recs = sweep("thm2", s_values=(1.0, 2.5), p_values=(2,), d_values=(2,), n_values=(6,),
                 r_values=(1, 2), J=10, cross_check=False)
    assert {(r.s, r.r) for r in recs} == {(2.5, 1.0), (2.5, 2.0)}
    with pytest.raises(DomainError):
        sweep("thm2", s_values=(1.0,), p_values=(2,), d_values=(2,), n_values=(6,),
              skip_inadmissible=False, J=10)


def test_csv_columns(small_sweep):
    text = records_to_csv(small_sweep)
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == GAP_COLUMNS
    assert rows[0][:4] == ["theorem", "n", "s", "p"]
    assert "pass" in rows[0] and "passed" not in rows[0]
    assert len(rows) == 1 + len(small_sweep)
    assert rows[1][rows[0].index("pass")] == "true"
    inf_row = next(r for r in rows[1:] if r[3] == "inf")
    assert inf_row[rows[0].index("alpha")] == ""


def test_csv_round_trips_floats(small_sweep):
    rows = list(csv.DictReader(io.StringIO(records_to_csv(small_sweep))))
    for rec, row in zip(small_sweep, rows):
        assert float(row["full_norm"]) == rec.full_norm
        assert int(row["n"]) == rec.n


def test_csv_is_deterministic(tmp_path, small_sweep):
    again = sweep("thm1", s_values=(1.0, "d/p+1+0.1"), p_values=(2, math.inf), d_values=(2,),
                  n_values=range(4, 8), J=10)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_records_csv(small_sweep, str(a))
    write_records_csv(again, str(b))
    assert a.read_bytes() == b.read_bytes()


def test_plot_data(small_sweep):
    lines = plot_data(small_sweep[:3]).splitlines()
    assert lines[0] == "# n full_norm"
    assert lines[1].split()[0] == "4"


def test_summary(small_sweep):
    summ = summarize(small_sweep)
    assert len(summ) == 4
    for entry in summ:
        assert entry["fail_count"] == 0
        assert entry["sequence_checks"]["full_gap_n_independent"]
        assert entry["params"]["n"] == [4, 5, 6, 7]
    assert json.loads(summary_json(small_sweep)) == json.loads(json.dumps(summ, default=str))


def test_sequence_checks_detect_failures():
    rec = thm1_gap(1.0, 2, 2, 5, J=10, cross_check=False)
    other = thm1_gap(1.0, 2, 2, 6, J=10, cross_check=False)
    assert not sequence_checks([other, rec])["t_n_decreasing"]
    assert sequence_checks([]) == {}


def test_record_fields_are_consistent():
    rec = thm4_gap(1.0, 1, 3, 7, J=10)
    assert isinstance(rec, GapRecord)
    assert rec.r == math.inf and rec.alpha is None and rec.lambda_n is None
    assert np.isfinite(rec.tail_bound)
    assert rec.fubini_factor_used == pytest.approx((2 * math.pi) ** 2)
