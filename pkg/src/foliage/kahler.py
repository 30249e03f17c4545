"""Transverse complex structure: validation, unitary frames, holomorphic
curvature quantities.

Complex quantities are pairs/arrays of complex numbers over the *real*
adapted frame; there is no complex jet type.  The (1,0) frame vectors are
eta_a = (v_a - i J v_a)/sqrt(2) for an orthonormal pairing basis
(v_1, J v_1, v_2, J v_2, ...) of the horizontal block, built deterministically
by Gram-Schmidt inside the horizontal frame coefficients.
"""

from __future__ import annotations

import numpy as np

from . import expr as ex
from .chart import frame_at
from .connection import connection_table
from .curvature import transverse_curvature
from .errors import MissingJ, ZeroVector


def _require_J(chart):
    if chart.J is None:
        raise MissingJ(f"chart {chart.name} has no complex structure")


def j_values(chart, point):
    """J as a q x q value matrix in the adapted horizontal frame."""
    _require_J(chart)
    env = {c: float(v) for c, v in zip(chart.coords, point)}
    q = chart.q
    return np.array([[ex.eval_real(chart.J[a][b], env) for b in range(q)]
                     for a in range(q)])


def unitary_frame(chart, point, order=3):
    """Complex (1,0) frame coefficients over the horizontal slots.

    Returns a (q x q/2) complex matrix N with N[:, a] the coefficients of
    eta_a in the real horizontal frame.
    """
    _require_J(chart)
    q = chart.q
    J = j_values(chart, point)
    basis = []
    for cand in np.eye(q):
        v = cand.copy()
        for b in basis:
            v -= (b @ v) * b
        if np.linalg.norm(v) < 1e-9:
            continue
        v /= np.linalg.norm(v)
        w = J @ v
        w -= (v @ w) * v
        w /= np.linalg.norm(w)
        basis.extend([v, w])
        if len(basis) == q:
            break
    pairs = [(basis[2 * a], basis[2 * a + 1]) for a in range(q // 2)]
    N = np.zeros((q, q // 2), dtype=complex)
    for a, (v, w) in enumerate(pairs):
        N[:, a] = (v - 1j * w) / np.sqrt(2.0)
    return N


def unitary_frame_residuals(chart, point, order=3):
    """Hermitian orthonormality and J-eigenvector residuals of the frame."""
    N = unitary_frame(chart, point, order)
    J = j_values(chart, point)
    gram = N.conj().T @ N
    herm = float(np.max(np.abs(gram - np.eye(N.shape[1]))))
    eig = float(np.max(np.abs(J @ N - 1j * N)))
    return {"hermitian_orthonormality": herm, "eigenvector": eig}


def validate_kahler(chart, points, order=3):
    """Metric invariance of J, flatness of J under the transverse connection,
    and invariance of J along the leaves."""
    _require_J(chart)
    m, p, q = chart.m, chart.p, chart.q
    res = {"metric_invariance": 0.0, "parallel": 0.0, "leafwise": 0.0}
    for point in points:
        pf = frame_at(chart, point, order)
        tab = connection_table(chart, point, order)
        Jjet = [[ex.eval_jet(chart.J[a][b], pf.env) for b in range(q)]
                for a in range(q)]
        Jval = np.array([[Jjet[a][b].value for b in range(q)] for a in range(q)])
        res["metric_invariance"] = max(
            res["metric_invariance"],
            float(np.max(np.abs(Jval.T @ Jval - np.eye(q)))))
        bott = tab.bott_values()
        ev = np.array([[c.value for c in e] for e in pf.frame])
        unit = [tuple(1 if t == a else 0 for t in range(pf.dim))
                for a in range(pf.dim)]
        Jgrad = np.zeros((pf.dim, q, q))
        for a in range(q):
            for b in range(q):
                for d in range(pf.dim):
                    Jgrad[d, a, b] = Jjet[a][b].derivative(unit[d])
        for A in range(m):
            dJ = np.einsum("a,agb->gb", ev[A], Jgrad)
            block = bott[A, p:, p:]   # block[x, y]: e_{p+y} part of D_A e_{p+x}
            corr = (np.einsum("db,dg->gb", Jval, block)
                    - np.einsum("bd,gd->gb", block, Jval))
            res["parallel"] = max(res["parallel"],
                                  float(np.max(np.abs(dJ + corr))))
        # leafwise invariance: pi_H [U, J X] - J pi_H [U, X] for vertical U
        k = order - 1
        for i in range(p):
            U = pf.frame[i]
            for be in range(q):
                X = pf.frame[p + be]
                JX = [sum((Jjet[de][be].truncate(order) * pf.frame[p + de][a]
                           for de in range(q)), start=pf._zero())
                      for a in range(m)]
                br_jx = pf.bracket(U, JX)
                br_x = pf.bracket(U, X)
                frame_k = [[c.truncate(k) for c in e] for e in pf.frame]
                for ga in range(q):
                    lhs = pf.inner(br_jx, frame_k[p + ga], order=k).value
                    rhs = sum(Jval[ga, de]
                              * pf.inner(br_x, frame_k[p + de], order=k).value
                              for de in range(q))
                    res["leafwise"] = max(res["leafwise"], abs(lhs - rhs))
    return res


def complex_curvature(chart, point, order=3):
    """Components R[a][b][c][d] = R^T(eta_a, conj eta_b, eta_c, conj eta_d)."""
    N = unitary_frame(chart, point, order)
    T = transverse_curvature(chart, point, order)["RT4"]
    H = T[chart.p:, chart.p:, chart.p:, chart.p:].astype(complex)
    return np.einsum("ABCD,Aa,Bb,Cc,Dd->abcd", H, N, N.conj(), N, N.conj())


def complex_transverse_ricci(chart, point, order=3):
    """Hermitian matrix R[a][b] = sum_g R^T(eta_g, conj eta_g, eta_a, conj eta_b)."""
    Rc = complex_curvature(chart, point, order)
    ric = np.einsum("ggab->ab", Rc)
    herm = float(np.max(np.abs(ric - ric.conj().T)))
    return {"ric": ric, "hermitian_residual": herm}


def bisectional(chart, point, Z, W, order=3):
    """Holomorphic bisectional curvature of two (1,0) directions given in the
    unitary frame."""
    Z = np.asarray(Z, dtype=complex)
    W = np.asarray(W, dtype=complex)
    nz = float(np.real(np.vdot(Z, Z)))
    nw = float(np.real(np.vdot(W, W)))
    if nz < 1e-24 or nw < 1e-24:
        raise ZeroVector("bisectional curvature needs nonzero directions")
    Rc = complex_curvature(chart, point, order)
    num = np.einsum("abcd,a,b,c,d->", Rc, Z, Z.conj(), W, W.conj())
    return float(np.real(num)) / (nz * nw)


def kahler_curvature_residuals(chart, point, order=3):
    """J-invariance of the transverse curvature and Ricci, and the complex
    pair/exchange symmetries of the holomorphic components."""
    T = transverse_curvature(chart, point, order)
    H = T["RT4"][chart.p:, chart.p:, chart.p:, chart.p:]
    J = j_values(chart, point)
    res = {}
    TJ12 = np.einsum("ABcd,Aa,Bb->abcd", H, J, J)
    TJ34 = np.einsum("abCD,Cc,Dd->abcd", H, J, J)
    res["j_invariance_first_pair"] = float(np.max(np.abs(H - TJ12)))
    res["j_invariance_second_pair"] = float(np.max(np.abs(H - TJ34)))
    ric = T["ric"]
    res["ricci_j_invariance"] = float(np.max(np.abs(ric - J.T @ ric @ J)))
    Rc = complex_curvature(chart, point, order)
    res["complex_exchange"] = float(np.max(np.abs(
        Rc - np.transpose(Rc, (2, 1, 0, 3)))))
    res["complex_pair"] = float(np.max(np.abs(
        Rc - np.transpose(Rc, (2, 3, 0, 1)))))
    res["ricci_hermitian"] = complex_transverse_ricci(chart, point, order)[
        "hermitian_residual"]
    return res
