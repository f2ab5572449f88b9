"""Small exact integer/rational linear algebra helpers.

Provides integer solutions of linear systems (particular solution plus
kernel basis), exact Fourier-Motzkin elimination for feasibility and bounds,
and lattice-point enumeration over rational polytopes.  Everything is exact;
sizes are tiny (diagram-scale), so no attempt is made at asymptotic cleverness.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, floor, gcd


def solve_integer_affine(rows: list[list[int]], rhs: list[int]):
    """Solve A s = b over the integers.

    Returns (particular, kernel_basis) with particular a list of ints and
    kernel_basis a list of integer vectors spanning ker(A) over Z, or None
    when no integer solution exists.
    """
    m = len(rows)
    n = len(rows[0]) if rows else 0
    # column-style echelon form A U = H, pivots compacted to leading columns
    a = [list(r) for r in rows]
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def col_swap(j, k):
        for r in a:
            r[j], r[k] = r[k], r[j]
        for r in u:
            r[j], r[k] = r[k], r[j]

    def col_addmul(j, k, c):
        for r in a:
            r[j] += c * r[k]
        for r in u:
            r[j] += c * r[k]

    pivots = []  # (row, col) pairs; cols are consecutive 0,1,2,...
    c = 0
    for r in range(m):
        if c >= n:
            break
        while True:
            nz = [j for j in range(c, n) if a[r][j] != 0]
            if not nz:
                break
            j0 = min(nz, key=lambda j: abs(a[r][j]))
            if j0 != c:
                col_swap(c, j0)
            reduced = True
            for j in range(c + 1, n):
                if a[r][j] != 0:
                    col_addmul(j, c, -(a[r][j] // a[r][c]))
                    if a[r][j] != 0:
                        reduced = False
            if reduced:
                break
        if a[r][c] != 0:
            pivots.append((r, c))
            c += 1
    npiv = len(pivots)
    # forward substitution; non-pivot rows only involve determined variables
    t = [0] * n
    pivot_of_row = dict(pivots)
    for r in range(m):
        acc = rhs[r] - sum(a[r][j] * t[j] for j in range(npiv))
        pc = pivot_of_row.get(r)
        if pc is None:
            if acc != 0:
                return None
            continue
        acc += a[r][pc] * t[pc]
        if acc % a[r][pc] != 0:
            return None
        t[pc] = acc // a[r][pc]
    for r in range(m):
        if sum(a[r][j] * t[j] for j in range(n)) != rhs[r]:
            return None
    particular = [sum(u[i][j] * t[j] for j in range(n)) for i in range(n)]
    # trailing columns of H are zero, so the matching columns of U span ker A
    basis = [[u[i][j] for i in range(n)] for j in range(npiv, n)]
    return particular, basis


def lp_feasible(eqs, ineqs, nvars: int) -> bool:
    """Exact feasibility of {z in R^n : eqs a.z = b, ineqs a.z <= b}.

    Phase-1 simplex over Fractions with Bland's rule (terminating); free
    variables are split into differences of nonnegatives.
    """
    rows = []
    for coeffs, b in eqs:
        rows.append((list(coeffs), Fraction(b), True))
    for coeffs, b in ineqs:
        rows.append((list(coeffs), Fraction(b), False))
    m = len(rows)
    nslack = sum(0 if is_eq else 1 for _, _, is_eq in rows)
    ncols = 2 * nvars + nslack + m   # z+/z-, slacks, artificials
    tab = []
    slack_i = 0
    for ri, (coeffs, b, is_eq) in enumerate(rows):
        row = [Fraction(0)] * (ncols + 1)
        for j, c in enumerate(coeffs):
            row[j] = Fraction(c)
            row[nvars + j] = -Fraction(c)
        if not is_eq:
            row[2 * nvars + slack_i] = Fraction(1)
            slack_i += 1
        row[-1] = b
        if b < 0:
            row = [-x for x in row]
        tab.append(row)
    art0 = 2 * nvars + nslack
    basis = []
    for ri in range(m):
        tab[ri][art0 + ri] = Fraction(1)
        basis.append(art0 + ri)
    # objective: minimize sum of artificials -> reduced cost row
    obj = [Fraction(0)] * (ncols + 1)
    for ri in range(m):
        for j in range(ncols + 1):
            obj[j] += tab[ri][j]
    # (cost of artificial basics accumulated; artificial columns net to 1-1=0
    # after subtraction, handled implicitly below)
    while True:
        enter = None
        for j in range(art0):     # never re-enter artificials
            if obj[j] > 0:
                enter = j
                break
        if enter is None:
            break
        leave, best = None, None
        for ri in range(m):
            a = tab[ri][enter]
            if a > 0:
                ratio = tab[ri][-1] / a
                if best is None or ratio < best or (ratio == best and basis[ri] < basis[leave]):
                    best, leave = ratio, ri
        if leave is None:
            break   # unbounded phase-1 objective cannot happen; defensive
        piv = tab[leave][enter]
        tab[leave] = [x / piv for x in tab[leave]]
        for ri in range(m):
            if ri != leave and tab[ri][enter]:
                f = tab[ri][enter]
                tab[ri] = [x - f * y for x, y in zip(tab[ri], tab[leave])]
        if obj[enter]:
            f = obj[enter]
            obj = [x - f * y for x, y in zip(obj, tab[leave])]
        basis[leave] = enter
    infeas = Fraction(0)
    for ri in range(m):
        if basis[ri] >= art0:
            infeas += tab[ri][-1]
    return infeas == 0


class Ineq:
    """Linear inequality sum_i c_i z_i <= b with exact rational data."""

    __slots__ = ("coeffs", "bound")

    def __init__(self, coeffs, bound):
        self.coeffs = tuple(Fraction(c) for c in coeffs)
        self.bound = Fraction(bound)

    def normalized(self):
        nz = [c for c in self.coeffs if c]
        if not nz:
            return self
        g = None
        for c in list(self.coeffs) + [self.bound]:
            if c:
                g = abs(c) if g is None else min(g, abs(c))
        scale = Fraction(1) / g
        return Ineq([c * scale for c in self.coeffs], self.bound * scale)

    def key(self):
        return (self.coeffs, self.bound)


def fm_eliminate(ineqs: list[Ineq], var: int) -> list[Ineq] | None:
    """Eliminate one variable by Fourier-Motzkin; None on detected infeasibility."""
    pos, neg, rest = [], [], []
    for iq in ineqs:
        c = iq.coeffs[var]
        if c > 0:
            pos.append(iq)
        elif c < 0:
            neg.append(iq)
        else:
            rest.append(iq)
    out = {}
    for iq in rest:
        if all(c == 0 for c in iq.coeffs) and iq.bound < 0:
            return None
        out[iq.key()] = iq
    for p in pos:
        for m in neg:
            cp, cm = p.coeffs[var], m.coeffs[var]
            coeffs = [c / cp + d / (-cm) for c, d in zip(p.coeffs, m.coeffs)]
            coeffs[var] = Fraction(0)
            bound = p.bound / cp + m.bound / (-cm)
            iq = Ineq(coeffs, bound).normalized()
            if all(c == 0 for c in iq.coeffs) and iq.bound < 0:
                return None
            out[iq.key()] = iq
    return list(out.values())


def fm_feasible(ineqs: list[Ineq], nvars: int) -> bool:
    """Exact feasibility of {z real : all inequalities} by full elimination."""
    cur = ineqs
    for v in range(nvars):
        cur = fm_eliminate(cur, v)
        if cur is None:
            return False
    for iq in cur:
        if iq.bound < 0:
            return False
    return True


def fm_var_bounds(ineqs: list[Ineq], nvars: int, var: int):
    """Exact (lo, hi) bounds of one variable over the polytope; None = unbounded."""
    cur = ineqs
    for v in range(nvars):
        if v == var:
            continue
        cur = fm_eliminate(cur, v)
        if cur is None:
            return Fraction(1), Fraction(0)  # empty: lo > hi
    lo, hi = None, None
    for iq in cur:
        c = iq.coeffs[var]
        if c > 0:
            b = iq.bound / c
            hi = b if hi is None else min(hi, b)
        elif c < 0:
            b = iq.bound / c
            lo = b if lo is None else max(lo, b)
        elif iq.bound < 0:
            return Fraction(1), Fraction(0)
    return lo, hi


def enumerate_lattice(ineqs: list[Ineq], nvars: int):
    """Yield all integer points of the polytope {z : C z <= b}.

    One Fourier-Motzkin sweep projects out variables back to front; the
    enumeration then walks the projection pyramid, reading exact bounds of
    z_k from the level-k system with z_1..z_{k-1} substituted.  Raises
    ValueError if some variable is unbounded (non-polytope input).
    """
    if nvars == 0:
        if all(iq.bound >= 0 for iq in ineqs):
            yield ()
        return
    levels = [None] * (nvars + 1)
    levels[nvars] = [iq.normalized() for iq in ineqs]
    for v in range(nvars - 1, 0, -1):
        nxt = fm_eliminate(levels[v + 1], v)
        if nxt is None:
            return
        levels[v] = nxt

    def bounds_at(level, prefix):
        lo, hi = None, None
        for iq in levels[level]:
            c = iq.coeffs[level - 1]
            rest = iq.bound - sum(iq.coeffs[i] * prefix[i] for i in range(level - 1))
            if c > 0:
                b = rest / c
                hi = b if hi is None else min(hi, b)
            elif c < 0:
                b = rest / c
                lo = b if lo is None else max(lo, b)
            elif rest < 0:
                return Fraction(1), Fraction(0)
        return lo, hi

    def rec(level, prefix):
        if level > nvars:
            yield prefix
            return
        lo, hi = bounds_at(level, prefix)
        if lo is None or hi is None:
            raise ValueError("unbounded enumeration domain")
        for z in range(ceil(lo), floor(hi) + 1):
            yield from rec(level + 1, prefix + (z,))

    yield from rec(1, ())


def solve_rational(rows, rhs):
    """Solve A x = b exactly over the rationals (least structure: None if
    inconsistent; free variables set to 0)."""
    from fractions import Fraction
    m = len(rows)
    n = len(rows[0]) if rows else 0
    a = [[Fraction(c) for c in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    piv = []
    r = 0
    for c in range(n):
        p = None
        for rr in range(r, m):
            if a[rr][c]:
                p = rr
                break
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        lead = a[r][c]
        a[r] = [x / lead for x in a[r]]
        for rr in range(m):
            if rr != r and a[rr][c]:
                f = a[rr][c]
                a[rr] = [x - f * y for x, y in zip(a[rr], a[r])]
        piv.append(c)
        r += 1
        if r == m:
            break
    for rr in range(r, m):
        if a[rr][n]:
            return None
    x = [Fraction(0)] * n
    for i, c in enumerate(piv):
        x[c] = a[i][n]
    return x
