from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from cayleygrowth.analysis import (
    QuasiPolynomial,
    describe,
    gaussian_fit,
    gumbel_fit,
    interpolate,
    quasipoly_eval,
    quasipoly_fit,
)
from cayleygrowth.bfs import growth
from cayleygrowth.catalog import catalog
from cayleygrowth.graph import make_graph
from cayleygrowth.matgroup import abelian_growth


def test_describe_bernoulli():
    s = describe([1, 1])
    assert s.mean == 0.5 and s.variance == 0.25
    assert s.skewness == 0 and s.excess_kurtosis == pytest.approx(-2)


def test_describe_matches_scipy():
    sizes = [1, 4, 9, 7, 2]
    sample = np.repeat(np.arange(len(sizes)), sizes)
    s = describe(sizes)
    assert s.mean == pytest.approx(sample.mean())
    assert s.variance == pytest.approx(sample.var())
    assert s.skewness == pytest.approx(stats.skew(sample))
    assert s.excess_kurtosis == pytest.approx(stats.kurtosis(sample))
    assert s.mode == 2 and s.total == 23


def test_mode_tie_takes_smallest_index():
    assert describe([1, 3, 3, 1]).mode == 1


def test_coxeter5_symmetric():
    s = describe(growth(make_graph(catalog("coxeter", 5))))
    assert s.mean == 5 and s.skewness == 0


def test_lx10_left_skewed():
    assert describe(growth(make_graph(catalog("lx", 10)))).skewness < 0


@given(st.lists(st.integers(1, 10**6), min_size=1, max_size=12))
def test_palindromic_growth_has_zero_skew(half):
    sizes = half + half[::-1]
    s = describe(sizes)
    assert s.skewness == 0
    assert s.mean == (len(sizes) - 1) / 2


def test_describe_rejects_bad_input():
    with pytest.raises(ValueError):
        describe([])
    from cayleygrowth.bfs import GrowthResult

    with pytest.raises(ValueError):
        describe(GrowthResult((1, 2), truncated=True))


def test_gaussian_fit_abelian():
    assert gaussian_fit(abelian_growth(6, 11)).max_abs_error < 0.01


def test_gaussian_fit_degenerate():
    with pytest.raises(ValueError):
        gaussian_fit([1])


def test_gaussian_fit_transposon_coset20():
    g = growth(make_graph(catalog("transposons", 20), "binary"))
    assert gaussian_fit(g).max_abs_error < 0.02


def test_gumbel_fit_recovers_gumbel_sample():
    k = np.arange(60)
    dist = stats.gumbel_r(20, 4)
    sizes = np.round(1e6 * (dist.cdf(k + 0.5) - dist.cdf(k - 0.5))).astype(int)
    fit = gumbel_fit(sizes)
    assert fit.family == "gumbel_r" and fit.max_abs_error < 0.005
    assert fit.loc == pytest.approx(20, abs=0.2)


def test_gumbel_mirrors_for_left_skew():
    assert gumbel_fit(growth(make_graph(catalog("lx", 9)))).family == "gumbel_l"


# ---------------------------------------------------------------- quasi-polynomials


def test_interpolate_exact():
    assert interpolate([1, 2, 3], [1, 4, 9]) == (0, 0, 1)


def test_fit_triangular_numbers():
    qp = quasipoly_fit([(n, n * (n - 1) // 2) for n in range(3, 11)])
    assert qp.s == 1
    assert qp.constituents[0] == (0, Fraction(-1, 2), Fraction(1, 2))


def lx_formula(n):
    return Fraction(3 * n * n - 8 * n + (12 if n % 2 == 0 else 9), 4)


def test_fit_lx_shape():
    qp = quasipoly_fit([(n, lx_formula(n)) for n in range(4, 13)])
    assert qp.s == 2 and qp.degree == 2
    assert qp.constituents[0] == (3, -2, Fraction(3, 4))
    assert qp.constituents[1] == (Fraction(9, 4), -2, Fraction(3, 4))
    assert quasipoly_eval(qp, 14) == (3 * 196 - 112 + 12) // 4 == 122


def test_fit_transposon_ceiling():
    qp = quasipoly_fit([(n, -(-(n + 1) // 2)) for n in range(4, 13)])
    assert qp.s == 2 and qp.degree == 1


def test_fit_constant():
    qp = QuasiPolynomial(1, ((Fraction(7),),))
    assert qp(3) == 7 and qp(100) == 7


def test_eval_below_domain():
    qp = quasipoly_fit([(n, n) for n in range(5, 9)])
    with pytest.raises(ValueError):
        quasipoly_eval(qp, 4)


def test_fibonacci_refused():
    fib = [1, 1]
    while len(fib) < 15:
        fib.append(fib[-1] + fib[-2])
    assert quasipoly_fit(list(zip(range(1, 16), fib)), s_max=8, deg_max=2) is None


def test_too_few_points_refused():
    assert quasipoly_fit([(1, 1), (2, 4)], deg_max=2) is None
    assert quasipoly_fit([]) is None


def test_duplicate_n_rejected():
    with pytest.raises(ValueError):
        quasipoly_fit([(1, 1), (1, 2)])


def test_residue_restriction():
    pts = [(n, n * n // 12 + 1) for n in range(12, 61, 6)]
    qp = quasipoly_fit(pts, residues=[0])
    assert qp is not None and qp.s == 1


quasi = st.integers(1, 3).flatmap(lambda s: st.tuples(
    st.just(s),
    st.lists(st.lists(st.fractions(-5, 5, max_denominator=6), min_size=1, max_size=3),
             min_size=s, max_size=s)))


@given(quasi, st.integers(1, 9))
def test_fit_reproduces_points_and_scales(spec, c):
    s, cons = spec
    truth = QuasiPolynomial(s, tuple(tuple(map(Fraction, k)) for k in cons))
    pts = [(n, truth(n)) for n in range(1, 1 + s * 6)]
    qp = quasipoly_fit(pts, s_max=3, deg_max=2)
    assert qp is not None and qp.s <= s
    assert all(qp(n) == v for n, v in pts)
    scaled = quasipoly_fit([(n, c * v) for n, v in pts], s_max=3, deg_max=2)
    assert (scaled.s, scaled.degree) == (qp.s, qp.degree)
    for a, b in zip(scaled.constituents, qp.constituents):
        assert a == tuple(c * x for x in b) or (a == (0,) and b == (0,))


def test_fit_json_round_trip():
    qp = quasipoly_fit([(n, lx_formula(n)) for n in range(4, 13)])
    assert QuasiPolynomial.from_dict(qp.to_dict()) == qp
    assert qp.to_dict()["constituents"][0] == [[3, 1], [-2, 1], [3, 4]]
