"""Alexander polynomial from the arc random walk of a sliced diagram.

The walk's nodes are the internal segments of K between crossings and
extrema; transition weights at a crossing are the classical-limit values of
the parametrized R-matrix entries (x^(-1/2) along either strand and 1-x^(-1)
for the jump at a positive crossing, x^(1/2) and 1-x at a negative one),
extrema count 1.  det(I - B) is the Alexander polynomial up to a unit
+-x^(k/2), normalized here by symmetry and Delta(1) = 1.

Also hosts the small exact Laurent-in-x^(1/2) arithmetic used for it and the
one-sided expansion of  prod chi / Delta  that pins the overall sign of the
inverted state sum (the classical limit of the two-variable series).
"""

from __future__ import annotations

from fractions import Fraction

from .weights import VERMA, crossing_over_legs

# Laurent polynomials in x^(1/2): dict half-exponent -> Fraction


def xl_add(a, b):
    out = dict(a)
    for e, c in b.items():
        s = out.get(e, Fraction(0)) + c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def xl_mul(a, b):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            s = out.get(e, Fraction(0)) + c1 * c2
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return out


XL_ONE = {0: Fraction(1)}


def build_k_chain(d, edge_value, jump_value=None):
    """Markov chain on internal K-segments.

    ``edge_value(kind, crossing, mixed)`` supplies the through-weights with
    kind in {"under", "over", "ext_cw", "ext_ccw"} and ``mixed`` true when
    the other strand of the crossing is a defect; gamma jump edges at K-K
    crossings use ``jump_value(crossing)`` and are skipped when None.
    Returns (n_nodes, edges) with edges (i, j, value); external segments are
    excluded, and node indices follow the walk order along K.
    """
    segments, seg_of_point = d.k_segments()
    nseg = len(segments)
    internal = list(range(1, nseg - 1))
    node_of_seg = {s: i for i, s in enumerate(internal)}
    edges = []

    def seg_node(p):
        return node_of_seg.get(seg_of_point[p])

    for cr in d.crossings_raw:
        kinds = {c: d.arc_kind(cr.arcs[c]) for c in ("bl", "br", "tl", "tr")}
        mixed = any(k != VERMA for k in kinds.values())
        for via, out, role in (("bl", "tr", "over"), ("br", "tl", "under")):
            r = role
            if cr.sign < 0:
                r = "under" if role == "over" else "over"
            if kinds[via] != VERMA:
                continue
            a, b = seg_node(cr.legs[via]), seg_node(cr.legs[out])
            if a is None or b is None:
                continue
            edges.append((a, b, edge_value(r, cr, mixed)))
        if jump_value is not None and not mixed:
            o_in, _ = crossing_over_legs(cr.sign)
            u_out = "tl" if cr.sign > 0 else "tr"
            a, b = seg_node(cr.legs[o_in]), seg_node(cr.legs[u_out])
            if a is not None and b is not None:
                edges.append((a, b, jump_value(cr)))
    for ext in d.extrema_raw:
        if d.arc_kind(ext.arc) != VERMA:
            continue
        p_in = ext.points[0] if ext.enters_left else ext.points[1]
        p_out = ext.points[1] if ext.enters_left else ext.points[0]
        a, b = seg_node(p_in), seg_node(p_out)
        if a is None or b is None:
            continue
        clockwise = (ext.is_max and ext.enters_left) or \
                    ((not ext.is_max) and (not ext.enters_left))
        edges.append((a, b, edge_value("ext_cw" if clockwise else "ext_ccw", None, False)))
    return len(internal), edges


def det_i_minus_b(n, edges, ring_add, ring_mul, one, neg):
    """det(I - B) as the signed sum over simple multi-cycles of the walk.

    Exact over any commutative ring; the graph is tiny and out-degrees are
    at most 2, so plain enumeration is fine.
    """
    adj = [[] for _ in range(n)]
    for i, j, v in edges:
        adj[i].append((j, v))
    cycles = []   # (frozenset of nodes, weight)

    def dfs(start, cur, mask, weight):
        for j, v in adj[cur]:
            if j == start:
                cycles.append((mask, ring_mul(weight, v)))
            elif j > start and not (mask >> j) & 1:
                dfs(start, j, mask | (1 << j), ring_mul(weight, v))

    for s in range(n):
        dfs(s, s, 1 << s, one)
    total = one   # empty multicycle
    chosen = []

    def pick(idx, mask, weight, count):
        nonlocal total
        for k in range(idx, len(cycles)):
            cmask, cw = cycles[k]
            if cmask & mask:
                continue
            w = ring_mul(weight, cw)
            t = w if (count + 1) % 2 == 0 else neg(w)
            total = ring_add(total, t)
            pick(k + 1, mask | cmask, w, count + 1)

    pick(0, 0, one, 0)
    return total


def walk_cycles_and_paths(n, edges):
    """All simple cycles, and a path enumerator, for the oracle tests."""
    adj = [[] for _ in range(n)]
    for i, j, v in edges:
        adj[i].append((j, v))
    return adj


def alexander(d) -> dict:
    """Normalized Alexander polynomial Delta_K(x) as {half-exponent: Fraction}.

    Normalization: Delta(x) = Delta(x^(-1)) and Delta(1) = 1; the raw unit
    relating det(I-B) to Delta is available via :func:`alexander_raw`.
    """
    det = alexander_raw(d)
    exps = sorted(det)
    span = exps[0] + exps[-1]
    if span % 2:
        raise RuntimeError("walk determinant has asymmetric support")
    shifted = {e - span // 2: c for e, c in det.items()}
    if any(shifted.get(-e) != c for e, c in shifted.items()):
        raise RuntimeError("walk determinant fails x <-> 1/x symmetry")
    at1 = sum(shifted.values())
    if at1 == 0:
        raise RuntimeError("walk determinant vanishes at x = 1")
    if abs(at1) != 1:
        raise RuntimeError("walk determinant is off by a non-unit at x = 1")
    return {e: c * at1 for e, c in shifted.items()}


def alexander_raw(d) -> dict:
    def edge_value(kind, cr, mixed):
        if mixed or kind in ("ext_cw", "ext_ccw"):
            return dict(XL_ONE)
        if cr.sign > 0:
            return {-1: Fraction(1)}     # x^(-1/2)
        return {1: Fraction(1)}          # x^(1/2)

    def jump_value(cr):
        if cr.sign > 0:
            return {0: Fraction(1), -2: Fraction(-1)}   # 1 - x^(-1)
        return {0: Fraction(1), 2: Fraction(-1)}        # 1 - x

    n, edges = build_k_chain(d, edge_value, jump_value)
    return det_i_minus_b(n, edges, xl_add, xl_mul, dict(XL_ONE),
                         lambda v: {e: -c for e, c in v.items()})


def classical_bare_expansion(d, order2: int) -> dict:
    """Ascending x-expansion of prod_i chi_{m_i}(x^{lk_i}) / Delta_K(x).

    This is the q = 1 limit of the bare inverted state sum; used to pin its
    overall sign.  Returns {half-exponent: Fraction} complete through order2
    (half units).
    """
    delta = alexander(d)
    num = dict(XL_ONE)
    _w, lk = d.writhe_and_linking()
    for c in d.components[1:]:
        m = c.kind[1]
        raw = lk.get((0, c.index), Fraction(0))
        li = int(abs(raw))
        chi = {}
        if m and li == 0:
            chi = {0: Fraction(m)}    # chi_m(1) = m
        else:
            for jj in range(m):
                e = li * (m - 1 - 2 * jj)
                chi[e] = chi.get(e, Fraction(0)) + 1
        num = xl_mul(num, chi)
    # ascending division num / delta
    lo = min(delta)
    lc = delta[lo]
    rem = dict(num)
    quot = {}
    while rem:
        e = min(rem)
        qe = e - lo
        if qe > order2:
            break
        qc = rem[e] / lc
        quot[qe] = qc
        for e2, c2 in delta.items():
            ee = qe + e2
            s = rem.get(ee, Fraction(0)) - qc * c2
            if s:
                rem[ee] = s
            else:
                rem.pop(ee, None)
    return quot
