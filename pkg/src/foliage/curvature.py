"""Curvature of the Riemannian and basic connections, and the transverse
curvature derived from the latter.

Index conventions: the four-tensor pairing is R(A, B, C, D) = <R(e_C, e_D)
e_A, e_B>, and operator tables are stored as ``op[C][D][B][A]`` = coefficient
of ``e_A`` in R(e_C, e_D) e_B.  The transverse Ricci matrix is
Ric[al][be] = <R^T(e_al, e_ga) e_ga, e_be> summed over horizontal ga.
"""

from __future__ import annotations

import numpy as np

from . import expr as ex
from .chart import frame_at
from .connection import connection_table, _frame_values
from .errors import DegeneratePlane
from .jets import fd_derivative


def _christoffel_values_and_gradient(tab):
    m = tab.chart.m
    gamma = tab.christoffel()
    val = np.zeros((m, m, m))
    grad = np.zeros((m, m, m, m))
    unit = [tuple(1 if t == a else 0 for t in range(m)) for a in range(m)]
    for c in range(m):
        for a in range(m):
            for b in range(m):
                j = gamma[c][a][b]
                val[c, a, b] = j.value
                for d in range(m):
                    grad[d, c, a, b] = j.derivative(unit[d])
    return val, grad


def _riemann_coordinates(gamma_val, gamma_grad):
    """R^a_{bcd} with R(d_c, d_d) d_b = R^a_{bcd} d_a.

    ``gamma_val[c][a][b]`` is Gamma^c_{ab} and ``gamma_grad[d][c][a][b]`` its
    partial derivative along coordinate d.
    """
    R = np.einsum("cadb->abcd", gamma_grad)
    R = R - np.einsum("dacb->abcd", gamma_grad)
    R = R + np.einsum("ace,edb->abcd", gamma_val, gamma_val)
    R = R - np.einsum("ade,ecb->abcd", gamma_val, gamma_val)
    return R


def riemann_frame(chart, point, order=3):
    """Frame components R[A][B][C][D] = <R^M(e_C, e_D) e_A, e_B>."""
    key = ("riemann", tuple(float(v) for v in point), order)
    hit = chart._cache.get(key)
    if hit is not None:
        return hit
    tab = connection_table(chart, point, order)
    gv, gg = _christoffel_values_and_gradient(tab)
    Rc = _riemann_coordinates(gv, gg)
    ev = _frame_values(tab.pf)
    gval = np.array([[e.value for e in row] for row in tab.pf.g])
    low = np.einsum("xbcd,xy->ybcd", Rc, gval)
    R4 = np.einsum("ybcd,By,Ab,Cc,Dd->ABCD", low, ev, ev, ev, ev)
    chart._cache[key] = R4
    return R4


def riemann_fd(chart, point, step=2e-3):
    """Frame components of R^M with all metric derivatives taken by central
    finite differences; independent oracle for the jet pathway."""
    m = chart.m
    coords = chart.coords

    def metric_at(pt):
        env = dict(zip(coords, pt))
        return np.array([[ex.eval_real(chart.metric[a][b], env)
                          for b in range(m)] for a in range(m)])

    def christoffel_at(pt):
        g = metric_at(pt)
        ginv = np.linalg.inv(g)
        dg = np.zeros((m, m, m))
        for c in range(m):
            for a in range(m):
                for b in range(a, m):
                    mi = tuple(1 if t == c else 0 for t in range(m))
                    dg[c, a, b] = dg[c, b, a] = fd_derivative(
                        lambda q, _a=a, _b=b: metric_at(q)[_a, _b],
                        pt, mi, step)
        gamma = np.zeros((m, m, m))
        for c in range(m):
            for a in range(m):
                for b in range(m):
                    s = 0.0
                    for d in range(m):
                        s += ginv[c, d] * (dg[a, b, d] + dg[b, a, d] - dg[d, a, b])
                    gamma[c, a, b] = 0.5 * s
        return gamma

    gv = christoffel_at(point)
    gg = np.zeros((m, m, m, m))
    for d in range(m):
        up = tuple(point[t] + (step if t == d else 0.0) for t in range(m))
        dn = tuple(point[t] - (step if t == d else 0.0) for t in range(m))
        gg[d] = (christoffel_at(up) - christoffel_at(dn)) / (2.0 * step)
    Rc = _riemann_coordinates(gv, gg)
    pf = frame_at(chart, point, 2)
    ev = _frame_values(pf)
    gval = np.array([[e.value for e in row] for row in pf.g])
    low = np.einsum("xbcd,xy->ybcd", Rc, gval)
    return np.einsum("ybcd,By,Ab,Cc,Dd->ABCD", low, ev, ev, ev, ev)


def bott_curvature_op(chart, point, order=3):
    """op[C][D][B][A]: coefficient of e_A in the basic-connection curvature
    R(e_C, e_D) e_B, from the frame structure equations."""
    key = ("bott_curv", tuple(float(v) for v in point), order)
    hit = chart._cache.get(key)
    if hit is not None:
        return hit
    tab = connection_table(chart, point, order)
    pf = tab.pf
    m = chart.m
    bott = tab.bott()
    bv = tab.bott_values()
    cv = tab.cstr_values()
    ev = _frame_values(pf)
    grad = np.zeros((pf.dim, m, m, m))
    unit = [tuple(1 if t == a else 0 for t in range(pf.dim))
            for a in range(pf.dim)]
    for D in range(m):
        for B in range(m):
            for A in range(m):
                j = bott[D][B][A]
                for a in range(pf.dim):
                    grad[a, D, B, A] = j.derivative(unit[a])
    dirderiv = np.einsum("ca,adbe->cdbe", ev, grad)  # e_C(bott[D][B][E])
    op = np.zeros((m, m, m, m))
    op += np.einsum("cdba->cdba", dirderiv)
    op -= np.einsum("dcba->cdba", dirderiv)
    op += np.einsum("dbe,cea->cdba", bv, bv)
    op -= np.einsum("cbe,dea->cdba", bv, bv)
    op -= np.einsum("cde,eba->cdba", cv, bv)
    chart._cache[key] = op
    return op


def transverse_curvature(chart, point, order=3):
    """Transverse four-tensor, Ricci matrix, and the invariance residual.

    Returns RT4 over full slot ranges (only horizontal entries meaningful),
    the q x q transverse Ricci, and the residual of the statement that the
    curvature of a horizontal field ignores vertical plane components.
    """
    op = bott_curvature_op(chart, point, order)
    m, p = chart.m, chart.p
    # RT4[A][B][C][D] = <R^T(e_C, e_D) e_A, e_B> for horizontal A, B
    RT4 = np.zeros((m, m, m, m))
    RT4[p:, p:, :, :] = np.einsum("cdab->abcd", op)[p:, p:, :, :]
    ric = np.zeros((chart.q, chart.q))
    for al in range(p, m):
        for be in range(p, m):
            ric[al - p, be - p] = sum(op[al, ga, ga, be] for ga in range(p, m))
    invariance = 0.0
    for C in range(m):
        for D in range(m):
            if C >= p and D >= p:
                continue
            block = np.abs(op[C, D, p:, p:])
            if block.size:
                invariance = max(invariance, float(np.max(block)))
    return {"RT4": RT4, "ric": ric, "invariance": invariance}


def transverse_sectional(chart, point, Z, W, order=3):
    """Sectional curvature of the horizontal plane spanned by Z and W,
    given as frame-coefficient vectors over the horizontal slots."""
    q = chart.q
    Z = np.asarray(Z, dtype=float)
    W = np.asarray(W, dtype=float)
    denom = (Z @ Z) * (W @ W) - (Z @ W) ** 2
    if denom <= 1e-12:
        raise DegeneratePlane(f"plane spanned by {Z} and {W} is degenerate")
    data = transverse_curvature(chart, point, order)
    H = data["RT4"][chart.p:, chart.p:, chart.p:, chart.p:]
    num = np.einsum("abcd,a,b,c,d->", H, Z, W, W, Z)
    return float(num / denom)


def sectional(chart, point, A, B, order=3):
    """Full sectional curvature through two frame slots (convenience)."""
    R = riemann_frame(chart, point, order)
    return float(R[A, B, B, A])


def curvature_symmetry_residuals(chart, point, order=3):
    """Pair antisymmetries, first Bianchi, pair symmetry of the transverse
    four-tensor, and the vertical-slot block vanishing of the basic curvature."""
    m, p = chart.m, chart.p
    op = bott_curvature_op(chart, point, order)
    data = transverse_curvature(chart, point, order)
    T = data["RT4"][p:, p:, p:, p:]
    res = {}
    res["antisym_last"] = float(np.max(np.abs(T + np.transpose(T, (0, 1, 3, 2))))) if T.size else 0.0
    res["antisym_first"] = float(np.max(np.abs(T + np.transpose(T, (1, 0, 2, 3))))) if T.size else 0.0
    if T.size:
        bianchi = T + np.transpose(T, (0, 2, 3, 1)) + np.transpose(T, (0, 3, 1, 2))
        res["bianchi"] = float(np.max(np.abs(bianchi)))
        res["pair_symmetry"] = float(np.max(np.abs(T - np.transpose(T, (2, 3, 0, 1)))))
    else:
        res["bianchi"] = 0.0
        res["pair_symmetry"] = 0.0
    res["vertical_plane_block"] = data["invariance"]
    # splitting blocks: curvature output stays in the argument's block
    cross = 0.0
    for B in range(m):
        for A in range(m):
            if (A < p) != (B < p):
                cross = max(cross, float(np.max(np.abs(op[:, :, B, A]))))
    res["splitting_block"] = cross
    # the Riemannian four-tensor satisfies the same symmetries; probe pair sym
    R = riemann_frame(chart, point, order)
    res["riemann_pair_symmetry"] = float(np.max(np.abs(R - np.transpose(R, (2, 3, 0, 1)))))
    res["riemann_bianchi"] = float(np.max(np.abs(
        R + np.transpose(R, (0, 2, 3, 1)) + np.transpose(R, (0, 3, 1, 2)))))
    return res


def oneill_identity_residuals(chart, point, order=3):
    """Curvature comparison identities on horizontal slots.

    (a) <R^M(X,Y)Z,W> = <R^T(X,Y)Z,W> + 2<A(X,Y),A(Z,W)> + <A(Y,W),A(X,Z)>
        - <A(Y,Z),A(X,W)>
    (b) <R^M(X,e_ga)e_ga,Y> = Ric^T(X,Y) + 3 <A(X,e_ga), A(e_ga,Y)>
    """
    tab = connection_table(chart, point, order)
    m, p = chart.m, chart.p
    R = riemann_frame(chart, point, order)
    data = transverse_curvature(chart, point, order)
    op = bott_curvature_op(chart, point, order)
    Av = tab.oneill_A_values()
    H = range(p, m)
    res_full = 0.0
    for al in H:
        for be in H:
            for ga in H:
                for de in H:
                    lhs = R[ga, de, al, be]
                    rhs = op[al, be, ga, de]
                    for i in range(p):
                        rhs += 2.0 * Av[i, al, be] * Av[i, ga, de]
                        rhs += Av[i, be, de] * Av[i, al, ga]
                        rhs -= Av[i, be, ga] * Av[i, al, de]
                    res_full = max(res_full, abs(lhs - rhs))
    res_ric = 0.0
    for al in H:
        for be in H:
            lhs = sum(R[ga, be, al, ga] for ga in H)
            rhs = data["ric"][al - p, be - p]
            for ga in H:
                for i in range(p):
                    rhs += 3.0 * Av[i, al, ga] * Av[i, ga, be]
            res_ric = max(res_ric, abs(lhs - rhs))
    return {"curvature_identity": res_full, "ricci_identity": res_ric}
