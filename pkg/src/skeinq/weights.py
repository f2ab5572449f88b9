"""Crossing and extremum weights for the Verma/finite state sums.

Implements the quantum sl2 R-matrix entries

    R(x1, x2, q)_{i,j}^{i',j'} = delta_{i+j,i'+j'} x1^{-k/4-j/2-1/4}
        x2^{k/4-j'/2-1/4} q^{(j+1/2)(j'+1/2)} [i choose j']_q (q^{j+1} x2^{-1}; q)_k

with k = i - j', together with R^{-1}(x1,x2,q)_{i,j}^{i',j'} =
R(x2^{-1}, x1^{-1}, q^{-1})_{j,i}^{j',i'}, continued to all integer spins:
the q-binomial through its Gamma-ratio continuation and the Pochhammer with
negative index through (a;q)_{-m} = 1/((a q^{-m}; q)_m).  Per-crossing
monomial prefactors follow the convention in which the Gaussian
exponential prefactor is omitted for crossings of identically-colored Verma
strands (so the Verma component is Seifert-framed automatically) while
finite-color and mixed prefactors are kept.

Entries carry unresolved rational factors (1 - q^c x^(+-1))^(+-1); the state
sum engines expand those in ascending powers of x.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .qalg import QLaurent, XSeries, INF, qbinom_gamma

VERMA = ("verma",)


def fin(m: int):
    return ("fin", m)


@dataclass
class WEntry:
    """One crossing (or extremum) weight in factored form.

    weight = coeff * q^(q_exp4/4) * x^(x_exp4/4)
             * prod (1 - q^(c4/4) x^(xeps))^(-1 if inv else 1)
    """

    coeff: QLaurent
    q_exp4: int
    x_exp4: int
    factors: tuple

    def is_zero(self) -> bool:
        return self.coeff.is_zero()

    def substitute_x(self, n: int) -> "WEntry":
        """Specialize x = q^n exactly."""
        q4 = self.q_exp4 + n * self.x_exp4
        coeff = self.coeff
        fs = []
        for c4, xeps, inv in self.factors:
            if xeps == 0:
                fs.append((c4, 0, inv))
                continue
            fs.append((c4 + 4 * n * xeps, 0, inv))
        return WEntry(coeff, q4, 0, tuple(fs))

    def to_qlaurent(self) -> QLaurent:
        """Collapse to an exact QLaurent; requires x-free polynomial factors."""
        out = self.coeff.shift_q4(self.q_exp4)
        if self.x_exp4 != 0:
            raise ValueError("entry still carries x")
        for c4, xeps, inv in self.factors:
            if xeps != 0:
                raise ValueError("entry still carries x factors")
            f = QLaurent.one() - QLaurent({c4: Fraction(1)})
            if inv:
                raise ZeroDivisionError("scalar inverse factor in polynomial context")
            out = out * f
        return out

    def min_x_exp4(self) -> int:
        """Least x-exponent any expansion term can carry."""
        lo = self.x_exp4
        for c4, xeps, inv in self.factors:
            if inv:
                lo += 4 if xeps < 0 else 0
            else:
                lo += min(0, 4 * xeps)
        return lo

    def to_xseries(self, order4: int) -> XSeries:
        """Expand exactly in ascending x up to quarter-order ``order4``."""
        out = XSeries({self.x_exp4: self.coeff.shift_q4(self.q_exp4)}, INF)
        # polynomial factors first (exact)
        inv_factors = []
        for c4, xeps, inv in self.factors:
            if inv:
                inv_factors.append((c4, xeps))
                continue
            if xeps == 0:
                out = out.scale(QLaurent.one() - QLaurent({c4: Fraction(1)}))
            else:
                out = out * XSeries(
                    {0: QLaurent.one(), 4 * xeps: QLaurent({c4: Fraction(-1)})}, INF)
        if not inv_factors:
            return out.truncate(order4)
        # each inverse factor expands from x^1 (xeps=-1) or x^0 (xeps=+1)
        base_min = (out.min_exp4() if out.terms else 0) + sum(
            4 if xe < 0 else 0 for _, xe in inv_factors)
        for c4, xe in inv_factors:
            own_min = 4 if xe < 0 else 0
            horizon = order4 - (base_min - own_min)
            t = {}
            if xe < 0:
                # 1/(1 - q^c x^-1) = -sum_{t>=1} q^(-c t) x^t
                k = 1
                while 4 * k <= horizon:
                    t[4 * k] = QLaurent({-c4 * k: Fraction(-1)})
                    k += 1
            else:
                # 1/(1 - q^c x) = sum_{t>=0} q^(c t) x^t
                k = 0
                while 4 * k <= horizon:
                    t[4 * k] = QLaurent({c4 * k: Fraction(1)})
                    k += 1
            out = out * XSeries(t, horizon, check_coset=False)
        return out.truncate(order4)


def _zero_entry():
    return WEntry(QLaurent.zero(), 0, 0, ())


def generic_r(x1, x2, eta: int, I: int, J: int, IP: int, JP: int) -> WEntry:
    """Entry of R(X1, X2, Q) at Q = q^eta with colors X1, X2.

    Colors are ("x", eps) for the Verma parameter x^eps or ("qm", m, eps)
    for q^(eps m).  Returns a factored WEntry (zero coeff when the entry
    vanishes identically).
    """
    if I + J != IP + JP:
        return _zero_entry()
    K = I - JP
    binom = qbinom_gamma(I, JP)
    if eta == -1:
        binom = binom.subs_q_inv()
    if binom.is_zero():
        return _zero_entry()
    q4 = eta * (4 * J * JP + 2 * J + 2 * JP + 1)
    x4 = 0
    a1_4 = -K - 2 * J - 1
    a2_4 = K - 2 * JP - 1
    for spec, a4 in ((x1, a1_4), (x2, a2_4)):
        if spec[0] == "x":
            x4 += spec[1] * a4
        else:
            q4 += spec[2] * spec[1] * a4
    # Pochhammer (Q^{J+1} X2^{-1}; Q)_K
    factors = []
    coeff = binom
    if x2[0] == "x":
        xeps = -x2[1]
        base = 4 * eta * (J + 1)
        if K >= 0:
            for l in range(K):
                factors.append((base + 4 * eta * l, xeps, False))
        else:
            for l in range(1, -K + 1):
                factors.append((base - 4 * eta * l, xeps, True))
    else:
        m, e2 = x2[1], x2[2]
        base = 4 * (eta * (J + 1) - e2 * m)
        if K >= 0:
            for l in range(K):
                c4 = base + 4 * eta * l
                if c4 == 0:
                    return _zero_entry()
                coeff = coeff * (QLaurent.one() - QLaurent({c4: Fraction(1)}))
        else:
            for l in range(1, -K + 1):
                c4 = base - 4 * eta * l
                if c4 == 0:
                    raise ZeroDivisionError("vanishing scalar inverse factor")
                factors.append((c4, 0, True))
    return WEntry(coeff, q4, x4, tuple(factors))


def _color_spec(kind, eps: int):
    if kind == VERMA:
        return ("x", eps)
    return ("qm", kind[1], eps)


_CROSSING_CACHE: dict = {}


def crossing_weight(sign: int, bl_kind, br_kind, i: int, j: int, ip: int, jp: int) -> WEntry:
    """Full crossing weight including the monomial prefactor.

    ``sign`` +1 means the over-strand runs bottom-left to top-right; kinds
    are VERMA or ("fin", m) for the bottom-left/bottom-right strands; spins
    (i, j, ip, jp) label (bl, br, tl, tr).
    """
    key = (sign, bl_kind, br_kind, i, j, ip, jp)
    got = _CROSSING_CACHE.get(key)
    if got is not None:
        return got
    got = _crossing_weight(sign, bl_kind, br_kind, i, j, ip, jp)
    if len(_CROSSING_CACHE) < 200000:
        _CROSSING_CACHE[key] = got
    return got


def _crossing_weight(sign, bl_kind, br_kind, i, j, ip, jp) -> WEntry:
    if sign == +1:
        e = generic_r(_color_spec(bl_kind, +1), _color_spec(br_kind, +1), +1, i, j, ip, jp)
    else:
        e = generic_r(_color_spec(br_kind, -1), _color_spec(bl_kind, -1), -1, j, i, jp, ip)
    if e.is_zero():
        return e
    q4, x4 = e.q_exp4, e.x_exp4
    if bl_kind == VERMA and br_kind == VERMA:
        q4 += sign
    elif bl_kind == VERMA or br_kind == VERMA:
        m = (bl_kind if bl_kind != VERMA else br_kind)[1]
        x4 += sign * m
    else:
        q4 += sign * bl_kind[1] * br_kind[1]
    return WEntry(e.coeff, q4, x4, e.factors)


def cupcap_weight(is_max: bool, enters_left: bool, kind, spin: int) -> WEntry:
    """Weight of a cup (min) or cap (max) with the given incoming leg."""
    clockwise = (is_max and enters_left) or ((not is_max) and (not enters_left))
    if kind == VERMA:
        if clockwise:
            return WEntry(QLaurent.one(), -1 - 2 * spin, 1, ())
        return WEntry(QLaurent.one(), 1 + 2 * spin, -1, ())
    m = kind[1]
    if clockwise:
        return WEntry(QLaurent.one(), (m - 1) - 2 * spin, 0, ())
    return WEntry(QLaurent.one(), -(m - 1) + 2 * spin, 0, ())


# ---------------------------------------------------------------------------
# crossing typing and the x-degree functional (linear data for enumeration)
# ---------------------------------------------------------------------------


class LinForm:
    """Integer linear form const + sum coeff_v * var_v (quarter units)."""

    __slots__ = ("const", "coeffs")

    def __init__(self, const=0, coeffs=None):
        self.const = const
        self.coeffs: dict = dict(coeffs or {})

    def add_var(self, v, c):
        if v is None:
            return
        self.coeffs[v] = self.coeffs.get(v, 0) + c
        if not self.coeffs[v]:
            del self.coeffs[v]

    def plus(self, other: "LinForm") -> "LinForm":
        out = LinForm(self.const + other.const, self.coeffs)
        for v, c in other.coeffs.items():
            out.add_var(v, c)
        return out

    def scaled(self, c: int) -> "LinForm":
        return LinForm(self.const * c, {v: cc * c for v, cc in self.coeffs.items()})

    def eval(self, values: dict) -> int:
        return self.const + sum(c * values[v] for v, c in self.coeffs.items())


def crossing_case(sign: int, over_in_negative: bool, over_out_negative: bool) -> str:
    """Support case of a crossing given inversion signs on its over-strand arcs.

    'a'/'c' enforce jump >= 0; 'b' has automatically negative jump and
    produces rational x-factors; 'zero' kills every state of the datum.
    """
    if not over_in_negative and not over_out_negative:
        return "a"
    if over_in_negative and over_out_negative:
        return "c"
    if over_in_negative and not over_out_negative:
        return "b"
    return "zero"


def crossing_x_monomial_form(sign, bl_kind, br_kind, vi, vj, vip, vjp) -> LinForm:
    """Linear form (quarter units) of the crossing's x-monomial exponent.

    ``vi, vj, vip, vjp`` are variable ids (None for spins pinned to 0).
    """
    f = LinForm()
    if sign == +1:
        I, J, JP = vi, vj, vjp
        x1v = bl_kind == VERMA
        x2v = br_kind == VERMA
        e1 = e2 = +1
        eta = 1
    else:
        I, J, JP = vj, vi, vip
        x1v = br_kind == VERMA
        x2v = bl_kind == VERMA
        e1 = e2 = -1
        eta = -1
    # a1 = -K - 2J - 1 with K = I - JP ; a2 = K - 2JP - 1
    if x1v:
        f.const += -e1
        f.add_var(I, -e1)
        f.add_var(JP, e1)
        f.add_var(J, -2 * e1)
    if x2v:
        f.const += -e2
        f.add_var(I, e2)
        f.add_var(JP, -e2)
        f.add_var(JP, -2 * e2)
    # mixed prefactor x^(sign*m/4)
    if (bl_kind == VERMA) != (br_kind == VERMA):
        m = (bl_kind if bl_kind != VERMA else br_kind)[1]
        f.const += sign * m
    return f


def crossing_factor_min_form(sign, bl_kind, br_kind, case, vi, vj, vip, vjp,
                             direction: int = +1) -> LinForm:
    """Linear form of the factor part of the extremal x-degree.

    ``direction`` +1 gives the minimal degree of an ascending-x expansion,
    -1 the maximal degree of a descending one (inverse factors expand toward
    x^(direction) powers).
    """
    if sign == +1:
        I, JP = vi, vjp
        x2v = br_kind == VERMA
        xeps = -1
    else:
        I, JP = vj, vip
        x2v = bl_kind == VERMA
        xeps = +1
    f = LinForm()
    if not x2v:
        return f
    k = LinForm()
    k.add_var(I, 1)
    k.add_var(JP, -1)
    if direction == +1:
        poly_extreme = min(0, 4 * xeps)
        inv_extreme = 4 if xeps < 0 else 0
    else:
        poly_extreme = max(0, 4 * xeps)
        inv_extreme = -4 if xeps > 0 else 0
    if case in ("a", "c"):
        return k.scaled(poly_extreme)        # K >= 0 polynomial factors
    if case == "b":
        return k.scaled(-inv_extreme)        # -K inverse factors
    return f


def crossing_over_legs(sign: int):
    """(over_in, over_out) corner names for a crossing of given sign."""
    return ("bl", "tr") if sign == +1 else ("br", "tl")


def scalar_vanishing_bound(sign, bl_kind, br_kind):
    """Whether the crossing has scalar Pochhammer factors that can vanish.

    Returns the finite color m when the constraint K + J <= m - 1 applies
    (J the R-entry's second lower index), else None.
    """
    x2_kind = br_kind if sign == +1 else bl_kind
    if x2_kind != VERMA:
        return x2_kind[1]
    return None
