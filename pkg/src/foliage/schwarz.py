"""Curvature-bound estimation, transversal Schwarz inequality checks, and the
horizontal-Laplacian comparison check on charts with a closed-form distance.

Bounds are sampled estimates, not certified extrema; reports carry the sample
metadata so runs are reproducible.  The comparison bound's structural constant
is user-supplied: the report always includes the minimal empirical constant
that would make the bound hold on the sampled points.
"""

from __future__ import annotations

import math

import numpy as np

from . import expr as ex
from .chart import frame_at
from .connection import c1_norms, connection_table
from .curvature import transverse_curvature
from .errors import (AssumptionViolated, EikonalViolation, MissingDistance,
                     UnboundedDilatation)
from .kahler import complex_curvature
from .maps import map_jet
from .sampling import sample_box, unit


def estimate_bounds(source, target, source_points, target_points,
                    mode="sectional", order=3, extra_directions=6, seed=42):
    """Sampled transverse curvature bounds for the two Schwarz hypotheses.

    K1 bounds the source transverse Ricci from below (clamped nonnegative),
    K2 = -sup of the target transverse sectional (or holomorphic bisectional)
    curvature; the hypothesis needs K2 > 0.  The first-tensor and leafwise
    second-fundamental-form norms of both charts are reported alongside.
    """
    ric_min = math.inf
    for pt in source_points:
        ric = transverse_curvature(source, pt, order)["ric"]
        if ric.size:
            ric_min = min(ric_min, float(np.linalg.eigvalsh(ric)[0]))
    K1 = max(0.0, -ric_min) if ric_min < math.inf else 0.0

    sup = -math.inf
    if mode == "sectional":
        if target.q < 2:
            raise AssumptionViolated(
                f"{target.name}: sectional bound needs codimension >= 2")
        q = target.q
        for idx, pt in enumerate(target_points):
            H = transverse_curvature(target, pt, order)["RT4"][
                target.p:, target.p:, target.p:, target.p:]
            planes = [(_unit_vec(q, a), _unit_vec(q, b))
                      for a in range(q) for b in range(a + 1, q)]
            for k in range(extra_directions):
                planes.append((_random_dir(q, seed, 2 * (idx * extra_directions + k)),
                               _random_dir(q, seed, 2 * (idx * extra_directions + k) + 1)))
            for Z, W in planes:
                denom = (Z @ Z) * (W @ W) - (Z @ W) ** 2
                if denom <= 1e-9:
                    continue
                num = float(np.einsum("abcd,a,b,c,d->", H, Z, W, W, Z))
                sup = max(sup, num / denom)
    elif mode == "bisectional":
        for idx, pt in enumerate(target_points):
            Rc = complex_curvature(target, pt, order)
            k = Rc.shape[0]
            dirs = [_unit_vec(k, a).astype(complex) for a in range(k)]
            for j in range(extra_directions):
                re = _random_dir(k, seed, 3 * (idx * extra_directions + j))
                im = _random_dir(k, seed, 3 * (idx * extra_directions + j) + 1)
                dirs.append(re + 1j * im)
            for Z in dirs:
                for W in dirs:
                    nz = float(np.real(np.vdot(Z, Z)))
                    nw = float(np.real(np.vdot(W, W)))
                    num = float(np.real(np.einsum("abcd,a,b,c,d->",
                                                  Rc, Z, Z.conj(), W, W.conj())))
                    sup = max(sup, num / (nz * nw))
    else:
        raise ValueError(f"unknown bound mode {mode!r}")
    K2 = -sup if sup > -math.inf else 0.0
    norms_src = c1_norms(source, source_points, order)
    norms_tgt = c1_norms(target, target_points, order)
    return {"K1": K1, "K2": K2, "assumption_ok": K2 > 1e-10,
            "source_norms": norms_src, "target_norms": norms_tgt, "mode": mode}


def _unit_vec(n, a):
    v = np.zeros(n)
    v[a] = 1.0
    return v


def _random_dir(n, seed, counter):
    return np.array([2.0 * unit(seed, 0x5EED, counter * 16 + c) - 1.0
                     for c in range(n)])


def schwarz_check(fmap, points, variant="riemannian", beta="auto", order=3,
                  bounds=None, constant_tol=1e-10):
    """Pointwise comparison of the pulled-back horizontal metric against the
    curvature bound.

    riemannian: largest dilatation eigenvalue vs beta^2 K1/K2 (Shen-type);
    kahler: transversal energy density vs K1/K2 (Yau-type).  K1 = 0 switches
    to the horizontally-constant conclusion.
    """
    source, target = fmap.source, fmap.target
    if bounds is None:
        tgt_points = sample_box(target.domain, max(8, len(points) // 2), 42,
                                f"bounds:{target.name}")
        bounds = estimate_bounds(
            source, target, points, tgt_points,
            mode="sectional" if variant == "riemannian" else "bisectional",
            order=order)
    if not bounds["assumption_ok"]:
        raise AssumptionViolated(
            f"target transverse curvature bound K2 = {bounds['K2']:.3e} "
            "is not positive")
    K1, K2 = bounds["K1"], bounds["K2"]

    rows = []
    beta_needed = 0.0
    sup_f = 0.0
    for pt in points:
        mj = map_jet(fmap, pt, order)
        sup_f = max(sup_f, float(np.max(np.abs(
            mj.fAB_values[target.p:, source.p:]), initial=0.0)))
        if variant == "riemannian":
            d = mj.dilatation()
            lam = d["eigenvalues"]
            value = float(lam[0]) if lam.size else 0.0
            if beta == "auto":
                if d["beta_min"] == "unbounded":
                    raise UnboundedDilatation(pt, lam)
                beta_needed = max(beta_needed, d["beta_min"])
            rows.append({"point": list(pt), "value": value,
                         "eigenvalues": [float(v) for v in lam]})
        elif variant == "kahler":
            rows.append({"point": list(pt), "value": mj.energy_density()})
        else:
            raise ValueError(f"unknown Schwarz variant {variant!r}")

    if variant == "riemannian":
        beta_used = beta_needed if beta == "auto" else float(beta)
        bound = beta_used ** 2 * K1 / K2
    else:
        beta_used = None
        bound = K1 / K2

    horizontally_constant = None
    if K1 <= constant_tol:
        horizontally_constant = sup_f < 1e-10
    max_ratio = 0.0
    for row in rows:
        row["bound"] = bound
        row["ratio"] = row["value"] / bound if bound > 0.0 else (
            0.0 if row["value"] < 1e-10 else math.inf)
        max_ratio = max(max_ratio, row["ratio"])
    passed = (horizontally_constant if horizontally_constant is not None
              else max_ratio <= 1.0 + 1e-6)
    return {"variant": variant, "K1": K1, "K2": K2, "beta": beta_used,
            "bound": bound, "rows": rows, "max_ratio": max_ratio,
            "horizontally_constant": horizontally_constant,
            "sup_differential": sup_f, "passed": bool(passed),
            "bounds": bounds}


def comparison_check(chart, points, C_candidate=1.0, order=3,
                     laplacian_model=None):
    """Horizontal Laplacian of the distance function against the structural
    bound q (1/r + sqrt(C (K1 + k1 + k2 + k1 k2 + k1^2 + k2^2))).

    Sample points with r below 1e-3 are rejected; |grad r| must be 1 within
    1e-6 at every sample (the distance expression is otherwise wrong or used
    beyond its validity).  ``laplacian_model`` optionally compares the
    computed Laplacian against a closed form ("coth" or "1/r").
    """
    if chart.distance is None:
        raise MissingDistance(f"chart {chart.name} has no distance field")
    dist_expr, basepoint = chart.distance
    m, p, q = chart.m, chart.p, chart.q
    norms = c1_norms(chart, points, order)
    k1, k2 = norms["A_C1"], norms["h_C1"]

    ric_low = 0.0
    rows = []
    eik_max = 0.0
    model_max = 0.0
    for pt in points:
        pf = frame_at(chart, pt, order)
        tab = connection_table(chart, pt, order)
        r = ex.eval_jet(dist_expr, pf.env)
        rval = r.value
        if rval < 1e-3:
            continue
        ginv = [[e.value for e in row] for row in pf.ginv()]
        unitv = [tuple(1 if t == a else 0 for t in range(m)) for a in range(m)]
        dr = np.array([r.derivative(unitv[a]) for a in range(m)])
        grad2 = float(dr @ np.array(ginv) @ dr)
        gradnorm = math.sqrt(max(grad2, 0.0))
        eik_max = max(eik_max, abs(gradnorm - 1.0))
        if abs(gradnorm - 1.0) > 1e-6:
            raise EikonalViolation(pt, gradnorm)
        # frame coefficients of the horizontal gradient: <grad r, e_al> = dr(e_al)
        coef = np.array([
            sum(pf.frame[al][a].value * dr[a] for a in range(m))
            for al in range(p, m)])
        ric = transverse_curvature(chart, pt, order)["ric"]
        c2 = float(coef @ coef)
        if c2 > 1e-12:
            ric_low = min(ric_low, float(coef @ ric @ coef) / c2)
        # horizontal Laplacian of r
        bott = tab.bott_values()
        first = [pf.frame_direction(B, r) for B in range(m)]
        lap = 0.0
        for al in range(p, m):
            lap += pf.frame_direction(al, first[al]).value
            for be in range(p, m):
                lap -= bott[al, al, be] * first[be].value
        row = {"point": list(pt), "r": rval, "laplacian": lap,
               "grad_norm": gradnorm}
        if laplacian_model == "coth":
            row["model"] = math.cosh(rval) / math.sinh(rval)
        elif laplacian_model == "1/r":
            row["model"] = (q - 1.0) / rval if q > 1 else 0.0
        if "model" in row:
            model_max = max(model_max, abs(lap - row["model"]))
        rows.append(row)

    K1 = max(0.0, -ric_low)
    S = K1 + k1 + k2 + k1 * k2 + k1 ** 2 + k2 ** 2
    passes = True
    empirical_C = 0.0
    for row in rows:
        bound = q * (1.0 / row["r"] + math.sqrt(max(C_candidate, 0.0) * S))
        row["bound"] = bound
        excess = (row["laplacian"] - q / row["r"]) / q
        if S > 1e-15:
            row["C_needed"] = max(0.0, excess) ** 2 / S
            empirical_C = max(empirical_C, row["C_needed"])
        else:
            row["C_needed"] = 0.0 if excess <= 1e-9 else math.inf
            empirical_C = max(empirical_C, row["C_needed"])
        if row["laplacian"] > bound + 1e-9:
            passes = False
    return {"rows": rows, "K1": K1, "k1": k1, "k2": k2,
            "C_candidate": C_candidate, "empirical_C": empirical_C,
            "passed": passes, "eikonal_residual": eik_max,
            "model_residual": model_max if laplacian_model else None,
            "codimension": q}
