"""Boundary-torus action and character-ring structure on two-variable series.

The skein algebra of the torus acts through the quantum-torus operators
x^(1/2): x^u -> x^(u+1/2) and y: x^u -> q^u x^u (so y x^(1/2) =
q^(1/2) x^(1/2) y); the meridian acts by x^(1/2) + x^(-1/2) and the
longitude by y + y^(-1).  R_chi is the character ring of sl2, realized on
the chi_n basis with products re-expanded through chi_2 chi_n =
chi_{n-1} + chi_{n+1}.
"""

from __future__ import annotations

from fractions import Fraction

from .qalg import INF, QLaurent, XSeries, chi_x, quarter


class TorusOperator:
    """Finite sum of normal-ordered monomials x^(a/2) y^b with QLaurent coeffs.

    Stored as {(a, b): QLaurent} with a in half units (x-exponent*2) and b an
    integer; composition enforces y x^(1/2) = q^(1/2) x^(1/2) y.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict = {}
        if terms:
            for k, c in terms.items():
                if isinstance(c, (int, Fraction)):
                    c = QLaurent.const(c)
                if not c.is_zero():
                    self.terms[k] = c

    @classmethod
    def x_half(cls, power: int = 1):
        return cls({(power, 0): QLaurent.one()})

    @classmethod
    def y(cls, power: int = 1):
        return cls({(0, power): QLaurent.one()})

    @classmethod
    def meridian(cls):
        return cls({(1, 0): QLaurent.one(), (-1, 0): QLaurent.one()})

    @classmethod
    def longitude(cls):
        return cls({(0, 1): QLaurent.one(), (0, -1): QLaurent.one()})

    def __add__(self, other):
        t = dict(self.terms)
        for k, c in other.terms.items():
            s = t.get(k, QLaurent.zero()) + c
            if s.is_zero():
                t.pop(k, None)
            else:
                t[k] = s
        return TorusOperator(t)

    def __mul__(self, other):
        """Composition self o other, normal ordering with y x = q^(1/2)^... ."""
        t = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                # y^b x^(a/2) = q^(a b / 2) x^(a/2) y^b
                phase = QLaurent.q_power(Fraction(b1 * a2, 2))
                k = (a1 + a2, b1 + b2)
                c = c1 * c2 * phase
                s = t.get(k, QLaurent.zero()) + c
                if s.is_zero():
                    t.pop(k, None)
                else:
                    t[k] = s
        return TorusOperator(t)

    def apply(self, s: XSeries) -> XSeries:
        """Termwise action on a series in x."""
        out = XSeries({}, s.complete_to)
        for (a, b), c in self.terms.items():
            t = {}
            for e4, coeff in s.terms.items():
                # y^b : x^u -> q^(u b) x^u with u = e4/4
                t[e4 + 2 * a] = coeff * c * QLaurent.q_power(Fraction(e4 * b, 4))
            n = s.complete_to if s.complete_to is INF else s.complete_to + 2 * a
            out = out + XSeries(t, n, check_coset=False)
        return out


def apply_torus_op(op: TorusOperator, s: XSeries) -> XSeries:
    return op.apply(s)


class RChiElement:
    """Finite QLaurent-combination of the characters chi_n, n >= 1."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs: dict[int, QLaurent] = {}
        if coeffs:
            for n, c in coeffs.items():
                if isinstance(c, (int, Fraction)):
                    c = QLaurent.const(c)
                if not c.is_zero():
                    if n < 1:
                        raise ValueError("chi index must be >= 1")
                    self.coeffs[n] = c

    @classmethod
    def chi(cls, n: int, coeff=1):
        return cls({n: coeff})

    @classmethod
    def one(cls):
        return cls({1: 1})

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, RChiElement) and self.coeffs == other.coeffs

    def __add__(self, other):
        t = dict(self.coeffs)
        for n, c in other.coeffs.items():
            s = t.get(n, QLaurent.zero()) + c
            if s.is_zero():
                t.pop(n, None)
            else:
                t[n] = s
        return RChiElement(t)

    def __neg__(self):
        return RChiElement({n: -c for n, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        """Product in the chi basis via chi_m chi_n = sum chi_{n-m+1+2j}."""
        if isinstance(other, (int, Fraction, QLaurent)):
            return RChiElement({n: c * other for n, c in self.coeffs.items()})
        t: dict[int, QLaurent] = {}
        for m, cm in self.coeffs.items():
            for n, cn in other.coeffs.items():
                lo, hi = abs(n - m) + 1, n + m - 1
                c = cm * cn
                for k in range(lo, hi + 1, 2):
                    s = t.get(k, QLaurent.zero()) + c
                    if s.is_zero():
                        t.pop(k, None)
                    else:
                        t[k] = s
        return RChiElement(t)

    def realize(self) -> XSeries:
        """Laurent-polynomial realization sum c_n chi_n(x)."""
        out = XSeries({}, INF)
        for n, c in self.coeffs.items():
            out = out + chi_x(n).scale(c)
        return out

    def __repr__(self):
        bits = [f"({c!r})*chi_{n}" for n, c in sorted(self.coeffs.items())]
        return " + ".join(bits) or "0"


def rchi_decompose(candidate: XSeries, basis: list[XSeries], chi_bound: int):
    """Solve candidate = sum_i r_i . basis_i with r_i in R_chi.

    Triangular elimination on leading (most negative) x-exponents: at each
    step the surviving lowest term must be matched by some basis element
    times a character within the chi-degree bound.  Exact verification to
    the common completeness order; returns (coefficients, residual) where
    residual is the unmatched remainder (zero on success) -- failure inside
    the bound is reported, not a disproof.
    """
    coeffs = [RChiElement() for _ in basis]
    rem = candidate
    order = rem.complete_to
    for b in basis:
        order = order if b.complete_to is INF else (
            b.complete_to if order is INF else min(order, b.complete_to))
    guard = 0
    while not rem.is_zero() and guard < 10 * chi_bound + 20:
        guard += 1
        e = rem.min_exp4()
        if e is INF:
            break
        progressed = False
        for bi, b in enumerate(basis):
            if b.is_zero():
                continue
            be = b.min_exp4()
            # chi_n shifts the lowest exponent by (n-1)/2: need n-1 = (be-e)/2
            diff4 = be - e
            if diff4 < 0 or diff4 % 2:
                continue
            n = diff4 // 2 + 1
            if n > chi_bound:
                continue
            c = rem.terms[e].exact_div(b.terms[be]) if _divisible(rem.terms[e], b.terms[be]) else None
            if c is None:
                continue
            coeffs[bi] = coeffs[bi] + RChiElement({n: c})
            rem = rem - (chi_x(n) * b).scale(c)
            rem = rem.truncate(order)
            progressed = True
            break
        if not progressed:
            break
    return coeffs, rem


def _divisible(a: QLaurent, b: QLaurent) -> bool:
    try:
        a.exact_div(b)
        return True
    except (ValueError, ZeroDivisionError):
        return False
