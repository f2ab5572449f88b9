"""State-sum engines: finite colored Jones, Verma-truncated, and inverted.

The finite engine contracts the sliced diagram row by row with the Verma
weights specialized at x = q^n (so the long component is Seifert-framed by
construction; finite-color components are corrected to their declared
framing by an explicit monomial).  The inverted engine enumerates the
admissible spin lattice of an inversion datum up to a certified x-degree
and expands each state's rational weight in ascending powers of x (or of
x^(-1); presenting a descending-convergent sum in the positive variable is
the Weyl flip of the two-variable series).
"""

from __future__ import annotations

from fractions import Fraction

from .diagram import InversionDatum, SlicedDiagram, _build_inversion_system, \
    nice_datum_search, validate_inversion, DiagramError
from .lattice import Ineq, enumerate_lattice, solve_integer_affine
from .qalg import (
    INF,
    QLaurent,
    XSeries,
    qlaurent_hexpand,
    quarter,
    x_half_diff,
)
from .weights import VERMA, WEntry, crossing_weight, cupcap_weight, fin


class ConvergenceError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# coefficient rings for the finite transfer engine
# ---------------------------------------------------------------------------


class ExactRing:
    """Coefficients are exact QLaurent polynomials in q^(1/4)."""

    def one(self):
        return QLaurent.one()

    def mul(self, a, b):
        return a * b

    def add(self, a, b):
        return a + b

    def from_qlaurent(self, ql):
        return ql


class HbarRing:
    """Coefficients are hbar-expansions at q = e^hbar.

    Internally an element is the integer tuple (v_0, ..., v_D) with
    v_d = 4^d d! c_d, which is integral for anything in Z[q^(+-1/4)];
    products are binomial-weighted convolutions, so everything stays in
    (fast) integer arithmetic.  ``to_fractions`` recovers the Taylor
    coefficients.
    """

    def __init__(self, order: int):
        self.order = order
        self._one = tuple([1] + [0] * order)
        self._binom = [[1] * (d + 1) for d in range(order + 1)]
        for d in range(order + 1):
            for i in range(1, d):
                self._binom[d][i] = self._binom[d - 1][i - 1] + self._binom[d - 1][i]

    def one(self):
        return self._one

    def mul(self, a, b):
        n = self.order + 1
        out = [0] * n
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j in range(n - i):
                bj = b[j]
                if bj:
                    out[i + j] += self._binom[i + j][i] * ai * bj
        return tuple(out)

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def from_qlaurent(self, ql):
        out = [0] * (self.order + 1)
        for e, c in ql.terms.items():
            if c.denominator != 1:
                return self._from_qlaurent_slow(ql)
            cc = c.numerator
            p = 1
            for d in range(self.order + 1):
                out[d] += cc * p
                p *= e
        return tuple(out)

    def _from_qlaurent_slow(self, ql):
        fr = qlaurent_hexpand(ql, self.order)
        fact = 1
        out = []
        for d, c in enumerate(fr):
            v = c * fact * 4 ** d
            if v.denominator != 1:
                raise ValueError("non-integral hbar expansion")
            out.append(v.numerator)
            fact *= d + 1
        return tuple(out)

    def to_fractions(self, v):
        fact = 1
        out = []
        for d, x in enumerate(v):
            out.append(Fraction(x, fact * 4 ** d))
            fact *= d + 1
        return tuple(out)

    def monomial(self, e4: int):
        out = [1] * (self.order + 1)
        p = 1
        for d in range(self.order + 1):
            out[d] = p
            p *= e4
        return tuple(out)


# ---------------------------------------------------------------------------
# finite transfer engine
# ---------------------------------------------------------------------------


def _row_pieces(d: SlicedDiagram):
    """Per-row piece descriptors with crossing/extremum record references."""
    by_row_cross = {}
    for idx, cr in enumerate(d.crossings_raw):
        by_row_cross.setdefault(cr.row, []).append(cr)
    by_row_ext = {}
    for ext in d.extrema_raw:
        by_row_ext.setdefault(ext.row, []).append(ext)
    rows = []
    for ri, row in enumerate(d.rows):
        crs = list(by_row_cross.get(ri, []))
        exts = list(by_row_ext.get(ri, []))
        pieces = []
        for kind in row:
            if kind == "id":
                pieces.append(("id", None))
            elif kind in ("x+", "x-"):
                pieces.append(("x", crs.pop(0)))
            elif kind == "cup":
                pieces.append(("cup", exts.pop(0)))
            else:
                pieces.append(("cap", exts.pop(0)))
        rows.append(pieces)
    return rows


def finite_state_sum(d: SlicedDiagram, n: int, ring=None, spin_cap=None):
    """(1/[n]) J_{(K,n),(L,m)}(q) as an exact QLaurent (or ring element).

    The long component is colored V_n (Verma weights at x = q^n, spins
    capped below ``spin_cap``, default n); defects keep their finite colors
    and declared framings.
    """
    ring = ring or ExactRing()
    cap = spin_cap if spin_cap is not None else n
    if cap < n:
        raise ValueError("spin cap below the color dimension")
    return _transfer(d, n, cap, ring)


def verma_truncated_sum(d: SlicedDiagram, n: int, spin_cap: int, ring=None):
    """Verma state sum at x = q^n with spins capped below ``spin_cap``."""
    ring = ring or ExactRing()
    return _transfer(d, n, spin_cap, ring)


def _transfer(d: SlicedDiagram, n: int, cap: int, ring):
    rows = _row_pieces(d)
    comp_kind = [c.kind for c in d.components]
    caps = [cap if k == VERMA else k[1] for k in comp_kind]

    def leg_kind(arc):
        return comp_kind[d.arc_component(arc)]

    entry_cache = {}
    fast_hbar = isinstance(ring, HbarRing)
    if fast_hbar:
        # binomial and Pochhammer vectors via recurrences, avoiding the
        # construction of huge exact Laurent polynomials at large color
        qbin_tab = {}
        poch_tab = {}

        def qbin_vec(nn, k, eta):
            # [nn choose k]_{q^eta} vector; nn, k >= 0 in the finite engine
            if k < 0 or k > nn:
                return None
            key = (nn, k, eta)
            got = qbin_tab.get(key)
            if got is None:
                if k == 0 or k == nn:
                    got = ring.one()
                else:
                    a = qbin_vec(nn - 1, k, eta)
                    b = qbin_vec(nn - 1, k - 1, eta)
                    t1 = ring.mul(ring.monomial(4 * k * eta), a) if a else None
                    got = t1 if b is None else (
                        b if t1 is None else ring.add(t1, b))
                qbin_tab[key] = got
            return got

        def poch_vec(c4, step4, k):
            # prod_{l=0}^{k-1} (1 - q^((c4 + l*step4)/4)); zero factor -> None
            if k == 0:
                return ring.one()
            key = (c4, step4, k)
            got = poch_tab.get(key)
            if got is None:
                prev = poch_vec(c4, step4, k - 1)
                if prev is None:
                    got = None
                else:
                    cc = c4 + (k - 1) * step4
                    if cc == 0:
                        got = None
                    else:
                        # vector of (1 - q^(cc/4)): zero constant term
                        fac = tuple(0 if dd == 0 else -cc ** dd
                                    for dd in range(ring.order + 1))
                        got = ring.mul(prev, fac)
                poch_tab[key] = got
            return got

        def entry_vec(sign, bk, rk, i, j, ip, jp):
            if i + j != ip + jp:
                return None
            if sign == +1:
                I, J, JP = i, j, jp
                eta = 1
                x1e = n if bk == VERMA else bk[1]
                x2e = n if rk == VERMA else rk[1]
            else:
                I, J, JP = j, i, ip
                eta = -1
                x1e = -(n if rk == VERMA else rk[1])
                x2e = -(n if bk == VERMA else bk[1])
            K = I - JP
            bv = qbin_vec(I, JP, eta)
            if bv is None:
                return None
            q4 = eta * (4 * J * JP + 2 * J + 2 * JP + 1)
            q4 += x1e * (-K - 2 * J - 1) + x2e * (K - 2 * JP - 1)
            # prefactor
            if bk == VERMA and rk == VERMA:
                q4 += sign
            elif bk == VERMA or rk == VERMA:
                m = (bk if bk != VERMA else rk)[1]
                q4 += sign * n * m
            else:
                q4 += sign * bk[1] * rk[1]
            if K < 0:
                return None
            pv = poch_vec(4 * eta * (J + 1) - 4 * x2e, 4 * eta, K)
            if pv is None:
                return None
            return ring.mul(ring.mul(bv, pv), ring.monomial(q4))
    else:
        def wentry_ring(w):
            return ring.from_qlaurent(w.to_qlaurent())

    def cross_elem(cr, i, j, ip, jp):
        """Ring element of the crossing entry, or None when it vanishes."""
        bk = leg_kind(cr.arcs["bl"])
        rk = leg_kind(cr.arcs["br"])
        key = (cr.sign, bk, rk, i, j, ip, jp)
        if key in entry_cache:
            return entry_cache[key]
        if fast_hbar:
            got = entry_vec(cr.sign, bk, rk, i, j, ip, jp)
            entry_cache[key] = got
            return got
        w = crossing_weight(cr.sign, bk, rk, i, j, ip, jp)
        if w.is_zero():
            entry_cache[key] = None
            return None
        w = w.substitute_x(n)
        if any(inv for _c4, _xe, inv in w.factors):
            raise ConvergenceError("inverse scalar factor in the finite sum")
        if any(c4 == 0 for c4, _xe, _inv in w.factors):
            got = None
        else:
            got = ring.from_qlaurent(w.to_qlaurent())
        entry_cache[key] = got
        return got

    frontier = {(0,): ring.one()}
    for pieces in rows:
        new = {}
        # compute layout: for each key, process pieces left-to-right
        for spins, val in frontier.items():
            partial = [((), val)]
            pos = 0
            for kind, rec in pieces:
                nxt = []
                if kind == "id":
                    for acc, v in partial:
                        nxt.append((acc + (spins[pos],), v))
                    pos += 1
                elif kind == "x":
                    i, j = spins[pos], spins[pos + 1]
                    comp_tl = d.arc_component(rec.arcs["tl"])
                    comp_tr = d.arc_component(rec.arcs["tr"])
                    cap_tl, cap_tr = caps[comp_tl], caps[comp_tr]
                    for ip in range(0, cap_tl):
                        jp = i + j - ip
                        if jp < 0 or jp >= cap_tr:
                            continue
                        w = cross_elem(rec, i, j, ip, jp)
                        if w is None:
                            continue
                        for acc, v in partial:
                            nxt.append((acc + (ip, jp), ring.mul(v, w)))
                    pos += 2
                elif kind == "cup":
                    comp = d.arc_component(d.arc_of_point[rec.points[0]])
                    kindc = comp_kind[comp]
                    for s in range(0, caps[comp]):
                        w = cupcap_weight(False, rec.enters_left, kindc, s)
                        w = ring.from_qlaurent(w.substitute_x(n).to_qlaurent())
                        for acc, v in partial:
                            nxt.append((acc + (s, s), ring.mul(v, w)))
                else:  # cap
                    i, j = spins[pos], spins[pos + 1]
                    if i != j:
                        partial = []
                        break
                    comp = d.arc_component(d.arc_of_point[rec.points[0]])
                    kindc = comp_kind[comp]
                    w = cupcap_weight(True, rec.enters_left, kindc, i)
                    w = ring.from_qlaurent(w.substitute_x(n).to_qlaurent())
                    nxt = [(acc, ring.mul(v, w)) for acc, v in partial]
                    pos += 2
                partial = nxt
                if not partial:
                    break
            for acc, v in partial:
                if acc in new:
                    new[acc] = ring.add(new[acc], v)
                else:
                    new[acc] = v
        frontier = new
    total = None
    zero = ring.from_qlaurent(QLaurent.zero())
    for spins, val in frontier.items():
        if spins != (0,):
            continue
        total = val if total is None else ring.add(total, val)
    if total is None:
        total = zero
    # framing corrections for finite-colored components
    w, _lk = d.writhe_and_linking()
    corr = QLaurent.one()
    for c in d.components[1:]:
        m = c.kind[1]
        corr = corr * QLaurent.q_power(Fraction((c.framing - w[c.index]) * (m * m - 1), 4))
    return ring.mul(total, ring.from_qlaurent(corr))


# ---------------------------------------------------------------------------
# inverted state sum
# ---------------------------------------------------------------------------


def inverted_state_sum(d: SlicedDiagram, inv: InversionDatum | None = None,
                       order=Fraction(21, 2), direction: int | None = None,
                       normalized: bool = True, unsafe_cap: int | None = None) -> XSeries:
    """BPS q-series of the decorated complement, Z-hat(x, q).

    ``order`` bounds the certified x-degree (complete_to).  With
    ``normalized`` the output is the (x^(1/2)-x^(-1/2)) multiple of the bare
    (1,1)-tangle sum, which is the convention of the printed series.  When
    no direction is given the engine tries the ascending-x expansion first
    and falls back to the descending one; a descending-convergent sum is
    emitted in the positive variable (the Weyl flip of the series).
    """
    if inv is None:
        found = None
        for dirn in (+1, -1) if direction is None else (direction,):
            cand = nice_datum_search_directed(d, dirn)
            if cand is not None:
                found = (cand, dirn)
                break
        if found is None:
            raise ConvergenceError("no certified inversion datum found")
        inv, direction = found
    elif direction is None:
        direction = +1
    rep = validate_inversion(d, inv, direction)
    if not rep["parity_ok"]:
        raise DiagramError(f"inversion parity fails at crossings {rep['offending_crossings']}")
    if not rep["convergence_certificate"] and unsafe_cap is None:
        raise ConvergenceError("convergence certificate missing and no cap provided")

    order4 = quarter(order)
    bare_order4 = order4 + 2 if normalized else order4
    bare = _inverted_bare(d, inv, bare_order4, direction, unsafe_cap)
    if not normalized:
        return bare
    return (x_half_diff() * bare).truncate(order4)


def nice_datum_search_directed(d: SlicedDiagram, direction: int):
    """First certified nonempty datum in the given expansion direction."""
    k_arcs = [a.index for a in d.arcs
              if a.component == 0 and a.index not in d.external_arcs]
    for mask in range(2 ** len(k_arcs) - 1, 0, -1):
        signs = {a: -1 for i, a in enumerate(k_arcs) if mask >> i & 1}
        inv = InversionDatum(signs)
        rep = validate_inversion(d, inv, direction)
        if rep["parity_ok"] and not rep["trivial_zero"] and rep["convergence_certificate"]:
            return inv
    return None


def _inverted_bare(d: SlicedDiagram, inv: InversionDatum, order4: int,
                   direction: int, unsafe_cap=None) -> XSeries:
    sysd = _build_inversion_system(d, inv, direction)
    if any(c == "zero" for c in sysd["cases"].values()):
        return XSeries({}, order4)
    vars_ = sysd["vars"]
    vidx = {v: i for i, v in enumerate(vars_)}
    nv = len(vars_)

    # integer solutions of the delta system
    eq_rows, eq_rhs = [], []
    for coeffs, const in sysd["eqs"]:
        row = [0] * nv
        for v, c in coeffs.items():
            row[vidx[v]] += c
        eq_rows.append(row)
        eq_rhs.append(-const)
    if eq_rows:
        sol = solve_integer_affine(eq_rows, eq_rhs)
        if sol is None:
            return XSeries({}, order4)
        part, kern = sol
    else:
        part, kern = [0] * nv, [[1 if i == j else 0 for j in range(nv)]
                                for i in range(nv)]
    nz = len(kern)

    # inequalities in the z coordinates
    ineqs = []

    class _Empty(Exception):
        pass

    def push(coeffs_dict, const):
        # sum(coeffs*s) + const <= 0 pulled back through s = part + kern z
        base = Fraction(const)
        zco = [Fraction(0)] * nz
        for v, c in coeffs_dict.items():
            i = vidx[v]
            base += c * part[i]
            for k in range(nz):
                zco[k] += c * kern[k][i]
        if all(c == 0 for c in zco):
            if base > 0:
                raise _Empty()
            return
        ineqs.append(Ineq(zco, -base))

    deg = sysd["degree"]
    try:
        for coeffs, const in sysd["ineqs"]:
            push(coeffs, const)
        if unsafe_cap is not None:
            for v in vars_:
                push({v: 1}, -unsafe_cap)
                push({v: -1}, -unsafe_cap)
        # degree cut: direction-adjusted functional <= order
        cut = {v: c * (1 if direction > 0 else -1) for v, c in deg.coeffs.items()}
        push(cut, deg.const * (1 if direction > 0 else -1) - order4)
    except _Empty:
        return XSeries({}, order4)

    comp_kind = [c.kind for c in d.components]

    def leg_kind(arc):
        return comp_kind[d.arc_component(arc)]

    total = XSeries({}, order4)
    for z in enumerate_lattice(ineqs, nz):
        spins = {}
        for v in vars_:
            i = vidx[v]
            spins[v] = part[i] + sum(kern[k][i] * z[k] for k in range(nz))
        coeff = QLaurent.one()
        q4 = 0
        x4 = 0
        factors = []
        ok = True
        for cr in d.crossings:
            legs = cr.arcs
            sp = {c: spins.get(legs[c], 0) for c in ("bl", "br", "tl", "tr")}
            w = crossing_weight(cr.sign, leg_kind(legs["bl"]), leg_kind(legs["br"]),
                                sp["bl"], sp["br"], sp["tl"], sp["tr"])
            if w.is_zero():
                ok = False
                break
            coeff = coeff * w.coeff
            q4 += w.q_exp4
            x4 += w.x_exp4
            factors.extend(w.factors)
        if not ok:
            continue
        for ext in d.extrema_raw:
            s = spins.get(ext.arc, 0)
            w = cupcap_weight(ext.is_max, ext.enters_left, leg_kind(ext.arc), s)
            q4 += w.q_exp4
            x4 += w.x_exp4
        entry = WEntry(coeff, q4, x4, tuple(factors))
        if direction < 0:
            entry = WEntry(entry.coeff, entry.q_exp4, -entry.x_exp4,
                           tuple((c4, -xe, iv) for c4, xe, iv in entry.factors))
        total = total + entry.to_xseries(order4)
    # declared framings of the defects
    w, _lk = d.writhe_and_linking()
    corr = QLaurent.one()
    for c in d.components[1:]:
        m = c.kind[1]
        corr = corr * QLaurent.q_power(Fraction((c.framing - w[c.index]) * (m * m - 1), 4))
    total = total.scale(corr)
    return total.scale(_classical_sign(d, total))


def _classical_sign(d: SlicedDiagram, bare: XSeries) -> int:
    """Overall sign of the inverted sum, pinned by its classical limit.

    At q = 1 the bare sum must agree with the ascending expansion of
    prod chi_{m_i}(x^{lk_i}) / Delta_K(x) (the leading term of the
    large-color asymptotics); the inversion convention only determines the
    series up to one global sign, which this comparison fixes.
    """
    from .alexander import classical_bare_expansion
    if bare.is_zero():
        return 1
    at1 = bare.at_q1()
    if at1.is_zero():
        raise ConvergenceError("order too small to normalize the overall sign")
    order2 = (bare.complete_to // 2) if bare.complete_to is not INF else 40
    expected = classical_bare_expansion(d, order2)
    for flip in (1, -1):
        ok = True
        for e, c in at1.terms.items():
            if e % 2:
                ok = False
                break
            want = expected.get(e // 2, Fraction(0))
            if c.coeff(0) * flip != want:
                ok = False
                break
        if ok:
            for e2, want in expected.items():
                e4 = 2 * e2
                if bare.complete_to is not INF and e4 > bare.complete_to:
                    continue
                if at1.coeff(Fraction(e4, 4)).coeff(0) * flip != want:
                    ok = False
                    break
        if ok:
            return flip
    raise ConvergenceError(
        "classical limit of the inverted sum does not match chi/Delta")


# ---------------------------------------------------------------------------
# inverted Habiro expansion
# ---------------------------------------------------------------------------


def habiro_factor_series(n: int, order) -> XSeries:
    """1 / prod_{0<=j<=n} (x + x^(-1) - q^j - q^(-j)) in ascending x."""
    order4 = quarter(order)
    out = XSeries({0: QLaurent.one()}, INF)
    for j in range(0, n + 1):
        out = out * _inv_quad_factor(j, order4 + 4 * (n + 1))
    return out.truncate(order4)


def _inv_quad_factor(j: int, order4: int) -> XSeries:
    """1/(x + x^(-1) - q^j - q^(-j)) = x / ((1 - q^j x)(1 - q^(-j) x))."""
    horizon = order4
    if j == 0:
        # x/(1-x)^2 = sum_{t>=1} t x^t
        t = {}
        k = 1
        while 4 * k <= horizon:
            t[4 * k] = QLaurent.const(k)
            k += 1
        return XSeries(t, horizon, check_coset=False)
    t = {}
    k = 1
    while 4 * k <= horizon:
        # coefficient of x^k in x/((1-q^j x)(1-q^-j x)): balanced quantum [k]
        # sum_{a+b=k-1} q^(j a) q^(-j b)
        acc = QLaurent.zero()
        for a in range(k):
            acc = acc + QLaurent.q_power(Fraction(j * (2 * a - (k - 1)), 1))
        t[4 * k] = acc
        k += 1
    return XSeries(t, horizon, check_coset=False)


def inverted_habiro_expand(coeffs, order, normalized: bool = True) -> XSeries:
    """Expand -sum_n a_n(q) / prod_{0<=j<=n}(x+x^(-1)-q^j-q^(-j)).

    ``coeffs`` is a callable n -> QLaurent (or a finite list).  Each factor
    raises the minimal x-degree by one, so terms with n+1 > order stop
    contributing.  With ``normalized`` the result is multiplied by
    (x^(1/2) - x^(-1/2)), giving a Z-hat-convention series.
    """
    order4 = quarter(order)
    bare_order4 = order4 + 2 if normalized else order4
    if isinstance(coeffs, (list, tuple)):
        seq = list(coeffs)

        def an(n):
            return seq[n] if n < len(seq) else QLaurent.zero()
    else:
        an = coeffs
    total = XSeries({}, bare_order4)
    n = 0
    while 4 * (n + 1) <= bare_order4:
        a = an(n)
        if not a.is_zero():
            total = total + habiro_factor_series(n, Fraction(bare_order4, 4)).scale(a)
        n += 1
    total = -total
    if normalized:
        total = (x_half_diff() * total).truncate(order4)
    return total


# ---------------------------------------------------------------------------
# convenience wrappers
# ---------------------------------------------------------------------------


def zhat_from_braid(word, order, defects=(), inv=None, direction=None) -> XSeries:
    from .diagram import braid_closure_diagram
    d = braid_closure_diagram(list(word), defects=tuple(defects))
    return inverted_state_sum(d, inv=inv, order=order, direction=direction)
