"""Exact arithmetic core: Laurent polynomials in q^(1/4), truncated series in
x^(1/4) and in q, quantum integers/binomials and q-Pochhammer symbols.

All coefficients are exact rationals (``fractions.Fraction``); floats never
enter this module.  Exponents of q are stored as integers scaled by 4
(quarter units) and exponents of x as integers scaled by 4 as well, so that
the mixed-crossing prefactors x^(m/4) and the balanced quantum weights
q^(1/4) stay integer-keyed.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator


def qq(e) -> Fraction:
    """Coerce an exponent-like value to an exact Fraction."""
    return e if isinstance(e, Fraction) else Fraction(e)


def quarter(e) -> int:
    """Convert a rational exponent to quarter units; reject non-quarter input."""
    f = qq(e) * 4
    if f.denominator != 1:
        raise ValueError(f"exponent {e} is not a multiple of 1/4")
    return f.numerator


class QLaurent:
    """Sparse Laurent polynomial in q^(1/4) with Fraction coefficients.

    ``terms`` maps quarter-exponents (int, meaning exponent*4) to nonzero
    Fractions.  Instances are treated as immutable.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict[int, Fraction] = {}
        if terms:
            for e, c in terms.items():
                c = Fraction(c)
                if c:
                    self.terms[int(e)] = c

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "QLaurent":
        return cls()

    @classmethod
    def one(cls) -> "QLaurent":
        return cls({0: 1})

    @classmethod
    def const(cls, c) -> "QLaurent":
        return cls({0: Fraction(c)})

    @classmethod
    def q_power(cls, e, coeff=1) -> "QLaurent":
        """Monomial coeff * q^e, e any rational with denominator dividing 4."""
        return cls({quarter(e): Fraction(coeff)})

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int) or isinstance(other, Fraction):
            other = QLaurent.const(other)
        return isinstance(other, QLaurent) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def min_exp4(self) -> int:
        return min(self.terms)

    def max_exp4(self) -> int:
        return max(self.terms)

    def coeff(self, e) -> Fraction:
        """Coefficient of q^e."""
        return self.terms.get(quarter(e), Fraction(0))

    # -- ring operations ----------------------------------------------------

    def __add__(self, other) -> "QLaurent":
        if isinstance(other, (int, Fraction)):
            other = QLaurent.const(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = t.get(e, Fraction(0)) + c
            if s:
                t[e] = s
            else:
                t.pop(e, None)
        out = QLaurent.__new__(QLaurent)
        out.terms = t
        return out

    __radd__ = __add__

    def __neg__(self) -> "QLaurent":
        out = QLaurent.__new__(QLaurent)
        out.terms = {e: -c for e, c in self.terms.items()}
        return out

    def __sub__(self, other) -> "QLaurent":
        if isinstance(other, (int, Fraction)):
            other = QLaurent.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "QLaurent":
        return (-self) + other

    def __mul__(self, other) -> "QLaurent":
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return QLaurent.zero()
            out = QLaurent.__new__(QLaurent)
            out.terms = {e: cc * c for e, cc in self.terms.items()}
            return out
        t: dict[int, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                s = t.get(e, Fraction(0)) + c1 * c2
                if s:
                    t[e] = s
                else:
                    t.pop(e, None)
        out = QLaurent.__new__(QLaurent)
        out.terms = t
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QLaurent":
        if n < 0:
            if len(self.terms) == 1:
                ((e, c),) = self.terms.items()
                return QLaurent({e * n: Fraction(1) / c ** (-n)})
            raise ValueError("negative power of a non-monomial")
        out = QLaurent.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def exact_div(self, other: "QLaurent") -> "QLaurent":
        """Exact division; raises ValueError if not divisible."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero QLaurent")
        rem = dict(self.terms)
        lo = other.min_exp4()
        lc = other.terms[lo]
        quot: dict[int, Fraction] = {}
        while rem:
            e = min(rem)
            qe = e - lo
            qc = rem[e] / lc
            quot[qe] = qc
            for e2, c2 in other.terms.items():
                ee = qe + e2
                s = rem.get(ee, Fraction(0)) - qc * c2
                if s:
                    rem[ee] = s
                else:
                    rem.pop(ee, None)
        return QLaurent(quot)

    # -- substitutions -------------------------------------------------------

    def subs_q_inv(self) -> "QLaurent":
        """q -> q^(-1)."""
        return QLaurent({-e: c for e, c in self.terms.items()})

    def at_q1(self) -> Fraction:
        """Specialize q = 1."""
        return sum(self.terms.values(), Fraction(0))

    def eval_root(self, s: Fraction) -> Fraction:
        """Evaluate at q^(1/4) = s exactly."""
        tot = Fraction(0)
        for e, c in self.terms.items():
            tot += c * (s ** e if e >= 0 else Fraction(1) / (s ** (-e)))
        return tot

    def eval_complex(self, q14):
        """Evaluate at a numeric value of q^(1/4) (complex/mpmath)."""
        tot = 0
        for e, c in self.terms.items():
            tot += (Fraction(c).numerator / Fraction(c).denominator) * q14 ** e
        return tot

    def shift_q4(self, d4: int) -> "QLaurent":
        """Multiply by q^(d4/4)."""
        return QLaurent({e + d4: c for e, c in self.terms.items()})

    # -- io -------------------------------------------------------------------

    def to_json(self) -> list:
        """Records [exp_num, exp_den, coeff_num, coeff_den], ascending exponents."""
        out = []
        for e in sorted(self.terms):
            ex = Fraction(e, 4)
            c = self.terms[e]
            out.append([ex.numerator, ex.denominator, c.numerator, c.denominator])
        return out

    @classmethod
    def from_json(cls, data) -> "QLaurent":
        t = {}
        for en, ed, cn, cd in data:
            t[quarter(Fraction(en, ed))] = Fraction(cn, cd)
        return cls(t)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms):
            c = self.terms[e]
            ex = Fraction(e, 4)
            if ex == 0:
                bits.append(f"{c}")
            else:
                bits.append(f"{c}*q^({ex})")
        return " + ".join(bits)


class QRationalFn:
    """Quotient of two polynomial-like values with cross-multiplication equality.

    Numerator/denominator may be QLaurent or any ring element supporting
    ``*`` and ``==``; no reduction to lowest terms is attempted.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        if hasattr(den, "is_zero") and den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num = num
        self.den = den

    def __eq__(self, other):
        if not isinstance(other, QRationalFn):
            return self.num == other * self.den if other is not None else False
        return self.num * other.den == other.num * self.den

    def __mul__(self, other):
        if isinstance(other, QRationalFn):
            return QRationalFn(self.num * other.num, self.den * other.den)
        return QRationalFn(self.num * other, self.den)

    __rmul__ = __mul__

    def __repr__(self):
        return f"({self.num!r}) / ({self.den!r})"


# ---------------------------------------------------------------------------
# quantum combinatorics
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def quantum_int(n: int, balanced: bool = True) -> QLaurent:
    """Quantum integer [n] (balanced) or [n]_q (unbalanced).

    Balanced: (q^(n/2) - q^(-n/2)) / (q^(1/2) - q^(-1/2)).
    Unbalanced: (1 - q^n) / (1 - q).
    """
    if n == 0:
        return QLaurent.zero()
    if balanced:
        m = abs(n)
        # q^((m-1)/2) + q^((m-3)/2) + ... + q^(-(m-1)/2)
        t = {2 * (m - 1 - 2 * j): Fraction(1) for j in range(m)}
        out = QLaurent(t)
        return out if n > 0 else -out
    if n > 0:
        return QLaurent({4 * j: Fraction(1) for j in range(n)})
    m = -n
    return QLaurent({4 * (j - m): Fraction(-1) for j in range(m)})


@lru_cache(maxsize=None)
def qfact(k: int) -> QLaurent:
    """Unbalanced quantum factorial [k]_q!."""
    out = QLaurent.one()
    for j in range(1, k + 1):
        out = out * quantum_int(j, balanced=False)
    return out


@lru_cache(maxsize=None)
def qbinom(n: int, k: int) -> QLaurent:
    """Unbalanced quantum binomial [n choose k]_q for any integer n, k >= 0.

    Product formula [n]_q [n-1]_q ... [n-k+1]_q / [k]_q!; a Laurent
    polynomial in q for all integers n.
    """
    if k < 0:
        return QLaurent.zero()
    num = QLaurent.one()
    for l in range(k):
        num = num * quantum_int(n - l, balanced=False)
    return num.exact_div(qfact(k))


@lru_cache(maxsize=None)
def qbinom_gamma(i: int, jp: int) -> QLaurent:
    """The q-binomial [i choose j']_q continued to all integer (i, j').

    Continuation through the ratio of q-Gamma factors [i]!/([j']! [i-j']!):
    vanishes when the denominator has more poles than the numerator, and is
    otherwise given by one of the two finite product forms.  Needed for the
    inverted state sum, where spins can be negative.
    """
    k = i - jp
    if jp >= 0 and k >= 0:
        return qbinom(i, jp)
    if i >= 0:
        # one of j', k negative while [i]! is finite: zero
        return QLaurent.zero()
    if jp >= 0 and k < 0:
        # product over j' factors [k+l]_q/[l]_q, none of k+1..i vanishing
        num = QLaurent.one()
        for l in range(1, jp + 1):
            num = num * quantum_int(k + l, balanced=False)
        return num.exact_div(qfact(jp))
    if k >= 0 and jp < 0:
        num = QLaurent.one()
        for l in range(1, k + 1):
            num = num * quantum_int(jp + l, balanced=False)
        return num.exact_div(qfact(k))
    # i <= -1 with both j', k negative: double pole downstairs, zero
    return QLaurent.zero()


def pochhammer(a: QLaurent, n: int):
    """q-Pochhammer (a; q)_n = prod_{0<=l<=n-1} (1 - a q^l) for n >= 0.

    For n < 0 uses (a;q)_{-m} = 1/((a q^{-m}; q)_m) and returns a
    QRationalFn.  Raises ZeroDivisionError when a factor of the inverse
    vanishes identically.
    """
    if n >= 0:
        out = QLaurent.one()
        for l in range(n):
            out = out * (QLaurent.one() - a.shift_q4(4 * l))
        return out
    m = -n
    den = QLaurent.one()
    for l in range(1, m + 1):
        f = QLaurent.one() - a.shift_q4(-4 * l)
        if f.is_zero():
            raise ZeroDivisionError("vanishing factor in (a;q)_n with n<0")
        den = den * f
    return QRationalFn(QLaurent.one(), den)


@lru_cache(maxsize=None)
def poch_qexp(c4: int, n: int) -> QLaurent:
    """(q^(c4/4); q)_n for n >= 0 as an exact QLaurent."""
    out = QLaurent.one()
    for l in range(n):
        out = out * (QLaurent.one() - QLaurent({c4 + 4 * l: Fraction(1)}))
    return out


# ---------------------------------------------------------------------------
# truncated Laurent series in x^(1/4) with QLaurent coefficients
# ---------------------------------------------------------------------------

INF = None  # sentinel: complete to all orders (exact Laurent polynomial)


def _min_order(a, b):
    if a is INF:
        return b
    if b is INF:
        return a
    return min(a, b)


class XSeries:
    """Truncated Laurent-tail series in x^(1/4) with QLaurent coefficients.

    ``terms`` maps quarter x-exponents (int) to QLaurent.  ``complete_to``
    is a quarter-unit bound: every coefficient with exponent <= complete_to
    is exact; ``None`` means the series is exact at all orders (a Laurent
    polynomial).  Terms above complete_to are dropped on construction.

    All stored exponents must lie in one class mod 2 (half-integer coset),
    matching the parity grading of the series the engines produce.
    """

    __slots__ = ("terms", "complete_to")

    def __init__(self, terms=None, complete_to=INF, check_coset: bool = True):
        self.complete_to = complete_to
        self.terms: dict[int, QLaurent] = {}
        if terms:
            for e, c in terms.items():
                if isinstance(c, (int, Fraction)):
                    c = QLaurent.const(c)
                if c.is_zero():
                    continue
                if complete_to is not INF and e > complete_to:
                    continue
                self.terms[int(e)] = c
        if check_coset:
            residues = {e % 2 for e in self.terms}
            if len(residues) > 1:
                raise ValueError(f"mixed x-exponent coset: residues {residues}")

    # -- queries -------------------------------------------------------------

    def coset(self):
        """Residue class mod 1 of the x-exponents ({0, 1/4, 1/2, 3/4})."""
        residues = {Fraction(e % 4, 4) for e in self.terms}
        return residues.pop() if len(residues) == 1 else (residues or None)

    def is_zero(self) -> bool:
        return not self.terms

    def min_exp4(self):
        return min(self.terms) if self.terms else INF

    def coeff(self, e) -> QLaurent:
        """Coefficient of x^e."""
        return self.terms.get(quarter(e), QLaurent.zero())

    def known_eq(self, other: "XSeries") -> bool:
        """Equality up to min(complete_to) of the operands."""
        n = _min_order(self.complete_to, other.complete_to)
        keys = set(self.terms) | set(other.terms)
        for e in keys:
            if n is not INF and e > n:
                continue
            if self.terms.get(e, QLaurent.zero()) != other.terms.get(e, QLaurent.zero()):
                return False
        return True

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other: "XSeries") -> "XSeries":
        n = _min_order(self.complete_to, other.complete_to)
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = t.get(e, QLaurent.zero()) + c
            if s.is_zero():
                t.pop(e, None)
            else:
                t[e] = s
        return XSeries(t, n)

    def __neg__(self) -> "XSeries":
        return XSeries({e: -c for e, c in self.terms.items()}, self.complete_to,
                       check_coset=False)

    def __sub__(self, other: "XSeries") -> "XSeries":
        return self + (-other)

    def _lo_eff(self):
        """Least exponent that any (known or unknown) term could carry."""
        lo = min(self.terms) if self.terms else None
        if self.complete_to is INF:
            return lo  # exact: support is exactly the known one
        return self.complete_to + 1 if lo is None else min(lo, self.complete_to + 1)

    def __mul__(self, other) -> "XSeries":
        if isinstance(other, (int, Fraction, QLaurent)):
            return self.scale(other)
        # unknown terms of one factor (above its complete_to) pollute the
        # product from complete_to + lo_eff(other factor) upward
        lo_s, lo_o = self._lo_eff(), other._lo_eff()
        if self.complete_to is INF and not self.terms:
            return XSeries({}, INF)
        if other.complete_to is INF and not other.terms:
            return XSeries({}, INF)
        n1 = INF if other.complete_to is INF else (
            INF if lo_s is None else lo_s + other.complete_to)
        n2 = INF if self.complete_to is INF else (
            INF if lo_o is None else lo_o + self.complete_to)
        n = _min_order(n1, n2)
        t: dict[int, QLaurent] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                if n is not INF and e > n:
                    continue
                s = t.get(e, QLaurent.zero()) + c1 * c2
                if s.is_zero():
                    t.pop(e, None)
                else:
                    t[e] = s
        return XSeries(t, n, check_coset=False)

    def scale(self, c) -> "XSeries":
        if isinstance(c, (int, Fraction)):
            c = QLaurent.const(c)
        return XSeries({e: cc * c for e, cc in self.terms.items()},
                       self.complete_to, check_coset=False)

    def shift_x4(self, d4: int) -> "XSeries":
        """Multiply by x^(d4/4)."""
        n = INF if self.complete_to is INF else self.complete_to + d4
        return XSeries({e + d4: c for e, c in self.terms.items()}, n,
                       check_coset=False)

    def truncate(self, n4) -> "XSeries":
        n = _min_order(self.complete_to, n4)
        return XSeries({e: c for e, c in self.terms.items()},
                       n, check_coset=False)

    def mul_chi(self, m: int) -> "XSeries":
        """Multiply by the character chi_m(x)."""
        return self * chi_x(m)

    def divide_ascending(self, divisor: "XSeries") -> "XSeries":
        """Divide by an exact Laurent polynomial, expanding in ascending x."""
        if divisor.is_zero():
            raise ZeroDivisionError
        lo = divisor.min_exp4()
        lc = divisor.terms[lo]
        n = INF if self.complete_to is INF else self.complete_to - lo
        if n is INF and self.terms:
            # quotient of exact polynomials need not terminate; cap generously
            raise ValueError("ascending division needs a finite completeness order")
        rem = dict(self.terms)
        quot: dict[int, QLaurent] = {}
        while rem:
            e = min(rem)
            qe = e - lo
            if n is not INF and qe > n:
                break
            qc = rem[e].exact_div(lc)
            quot[qe] = qc
            for e2, c2 in divisor.terms.items():
                ee = qe + e2
                s = rem.get(ee, QLaurent.zero()) - qc * c2
                if s.is_zero():
                    rem.pop(ee, None)
                else:
                    rem[ee] = s
        return XSeries(quot, n, check_coset=False)

    # -- substitutions ----------------------------------------------------------

    def at_q1(self) -> "XSeries":
        return XSeries({e: QLaurent.const(c.at_q1()) for e, c in self.terms.items()},
                       self.complete_to, check_coset=False)

    def subs_q_inv(self) -> "XSeries":
        return XSeries({e: c.subs_q_inv() for e, c in self.terms.items()},
                       self.complete_to, check_coset=False)

    # -- io -----------------------------------------------------------------------

    def to_json(self) -> dict:
        ct = None if self.complete_to is INF else [Fraction(self.complete_to, 4).numerator,
                                                   Fraction(self.complete_to, 4).denominator]
        terms = []
        for e in sorted(self.terms):
            ex = Fraction(e, 4)
            terms.append([ex.numerator, ex.denominator, self.terms[e].to_json()])
        return {"complete_to": ct, "terms": terms}

    @classmethod
    def from_json(cls, data) -> "XSeries":
        ct = data.get("complete_to")
        ct4 = INF if ct is None else quarter(Fraction(ct[0], ct[1]))
        t = {}
        for en, ed, ql in data["terms"]:
            t[quarter(Fraction(en, ed))] = QLaurent.from_json(ql)
        return cls(t, ct4)

    def __repr__(self):
        bits = []
        for e in sorted(self.terms):
            bits.append(f"({self.terms[e]!r})*x^({Fraction(e,4)})")
        tail = "" if self.complete_to is INF else f" + O(x^>{Fraction(self.complete_to,4)})"
        return (" + ".join(bits) or "0") + tail


def x_monomial(e4: int, coeff=None) -> XSeries:
    """Monomial coeff * x^(e4/4) as an exact XSeries."""
    return XSeries({e4: coeff if coeff is not None else QLaurent.one()}, INF)


def chi_x(m: int) -> XSeries:
    """Character chi_m(x) = (x^(m/2)-x^(-m/2))/(x^(1/2)-x^(-1/2)) as Laurent poly."""
    if m == 0:
        return XSeries({}, INF)
    s = 1 if m > 0 else -1
    mm = abs(m)
    t = {2 * (mm - 1 - 2 * j): QLaurent.const(s) for j in range(mm)}
    return XSeries(t, INF)


def x_half_diff() -> XSeries:
    """x^(1/2) - x^(-1/2) as an exact XSeries."""
    return XSeries({2: QLaurent.one(), -2: -QLaurent.one()}, INF)


# ---------------------------------------------------------------------------
# truncated q-series with rational exponents
# ---------------------------------------------------------------------------


class QSeriesTrunc:
    """Truncated q-series with exact rational exponents and coefficients.

    ``terms`` maps Fraction exponents to Fractions; ``order`` is a Fraction
    bound: coefficients with exponent <= order are exact, larger ones are
    dropped.  The normalized view (offset + uniform-step coefficient list)
    is available through :meth:`normalized`.
    """

    __slots__ = ("terms", "order")

    def __init__(self, terms=None, order=Fraction(0)):
        self.order = qq(order)
        self.terms: dict[Fraction, Fraction] = {}
        if terms:
            for e, c in terms.items():
                e = qq(e)
                c = Fraction(c)
                if c and e <= self.order:
                    self.terms[e] = c

    @classmethod
    def zero(cls, order) -> "QSeriesTrunc":
        return cls({}, order)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        """Exact equality of terms up to min(order)."""
        n = min(self.order, other.order)
        keys = set(self.terms) | set(other.terms)
        return all(self.terms.get(e, Fraction(0)) == other.terms.get(e, Fraction(0))
                   for e in keys if e <= n)

    def __add__(self, other) -> "QSeriesTrunc":
        n = min(self.order, other.order)
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = t.get(e, Fraction(0)) + c
            if s:
                t[e] = s
            else:
                t.pop(e, None)
        return QSeriesTrunc(t, n)

    def __neg__(self) -> "QSeriesTrunc":
        return QSeriesTrunc({e: -c for e, c in self.terms.items()}, self.order)

    def __sub__(self, other) -> "QSeriesTrunc":
        return self + (-other)

    def __mul__(self, other) -> "QSeriesTrunc":
        if isinstance(other, (int, Fraction)):
            return QSeriesTrunc({e: c * other for e, c in self.terms.items()}, self.order)
        lo1 = min(self.terms) if self.terms else Fraction(0)
        lo2 = min(other.terms) if other.terms else Fraction(0)
        n = min(self.order + lo2, other.order + lo1)
        t: dict[Fraction, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                if e > n:
                    continue
                s = t.get(e, Fraction(0)) + c1 * c2
                if s:
                    t[e] = s
                else:
                    t.pop(e, None)
        return QSeriesTrunc(t, n)

    __rmul__ = __mul__

    def shift(self, e) -> "QSeriesTrunc":
        """Multiply by q^e."""
        e = qq(e)
        return QSeriesTrunc({ee + e: c for ee, c in self.terms.items()}, self.order + e)

    def scale(self, c) -> "QSeriesTrunc":
        return self * c

    def min_exp(self):
        return min(self.terms) if self.terms else None

    def coeff(self, e) -> Fraction:
        return self.terms.get(qq(e), Fraction(0))

    def normalized(self):
        """Return (offset, step, coeffs) with coeffs[0] != 0, integer-indexed."""
        if not self.terms:
            return Fraction(0), Fraction(1), []
        exps = sorted(self.terms)
        off = exps[0]
        step = Fraction(0)
        for e in exps[1:]:
            d = e - off
            step = d if step == 0 else Fraction(
                _fr_gcd(step, d))
        if step == 0:
            step = Fraction(1)
        n = int((self.order - off) / step)
        coeffs = [self.terms.get(off + k * step, Fraction(0)) for k in range(n + 1)]
        return off, step, coeffs

    def eval_complex(self, qval):
        tot = 0
        for e, c in self.terms.items():
            tot += (c.numerator / c.denominator) * qval ** (e.numerator / e.denominator)
        return tot

    def to_json(self) -> dict:
        off, step, coeffs = self.normalized()
        return {
            "offset": [off.numerator, off.denominator],
            "step": [step.numerator, step.denominator],
            "order": [self.order.numerator, self.order.denominator],
            "coeffs": [[c.numerator, c.denominator] for c in coeffs],
        }

    def __repr__(self):
        bits = [f"{c}*q^({e})" for e, c in sorted(self.terms.items())]
        return (" + ".join(bits) or "0") + f" + O(q^>{self.order})"


def _fr_gcd(a: Fraction, b: Fraction) -> Fraction:
    from math import gcd
    num = gcd(a.numerator * b.denominator, b.numerator * a.denominator)
    den = a.denominator * b.denominator
    return Fraction(num, den)


def qlaurent_to_qseries(ql: QLaurent, order) -> QSeriesTrunc:
    return QSeriesTrunc({Fraction(e, 4): c for e, c in ql.terms.items()}, order)


# ---------------------------------------------------------------------------
# exact geometric tails: expansion of products of (1 - q^c)^(-1) etc.
# ---------------------------------------------------------------------------


def geom_inverse_qseries(c: Fraction, order, sign=1) -> QSeriesTrunc:
    """1/(1 - sign*q^c) as an ascending q-series, c > 0 exact."""
    c = qq(c)
    if c <= 0:
        raise ValueError("geometric expansion needs positive exponent")
    t = {}
    k = 0
    while k * c <= order:
        t[k * c] = Fraction(sign ** k if sign == -1 else 1)
        k += 1
    return QSeriesTrunc(t, order)


# ---------------------------------------------------------------------------
# hbar-expansion helpers (q = e^hbar, exact truncated series)
# ---------------------------------------------------------------------------


def hseries_exp(rate: Fraction, order: int) -> tuple:
    """Truncated series of exp(rate * hbar) as a tuple of Fractions."""
    out = [Fraction(1)]
    term = Fraction(1)
    for d in range(1, order + 1):
        term = term * rate / d
        out.append(term)
    return tuple(out)


def hseries_mul(a: tuple, b: tuple) -> tuple:
    n = min(len(a), len(b))
    out = [Fraction(0)] * n
    for i, ai in enumerate(a[:n]):
        if not ai:
            continue
        for j in range(n - i):
            bj = b[j]
            if bj:
                out[i + j] += ai * bj
    return tuple(out)


def hseries_add(a: tuple, b: tuple) -> tuple:
    n = min(len(a), len(b))
    return tuple(a[i] + b[i] for i in range(n))


def qlaurent_hexpand(ql: QLaurent, order: int) -> tuple:
    """Expand a QLaurent at q = e^hbar to the given hbar order."""
    out = [Fraction(0)] * (order + 1)
    for e4, c in ql.terms.items():
        rate = Fraction(e4, 4)
        term = Fraction(c)
        out[0] += term
        for d in range(1, order + 1):
            term = term * rate / d
            out[d] += term
    return tuple(out)
