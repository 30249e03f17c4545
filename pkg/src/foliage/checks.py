"""Named verification checks over charts and maps.

Each handler produces one report row: the residual (or ratio) it measured,
the tolerance it was held to, and a pass flag.  Expected-outcome checks
(`expect: unbounded` and friends) pass exactly when the stated behavior
occurs.  Sampling is deterministic per (seed, scenario object, check name).
"""

from __future__ import annotations

import math

import numpy as np

from . import chart as chart_mod
from . import connection as conn_mod
from . import curvature as curv_mod
from . import kahler as kahler_mod
from . import maps as maps_mod
from . import schwarz as schwarz_mod
from .errors import (AssumptionViolated, FoliageError, SchemaError,
                     UnboundedDilatation)
from .jets import fd_derivative
from .sampling import sample_box
from . import expr as ex

DEFAULTS = {"samples": 50, "seed": 42, "order": 3, "tolerance": 1e-6}


class CheckContext:
    def __init__(self, scenario_name, charts, maps, overrides=None):
        self.scenario = scenario_name
        self.charts = charts
        self.maps = maps
        self.overrides = overrides or {}

    def setting(self, spec, key):
        if key in self.overrides and self.overrides[key] is not None:
            return self.overrides[key]
        return spec.get(key, DEFAULTS.get(key))

    def chart_points(self, spec, chart, label):
        # one sample stream per chart: checks at equal or smaller sample
        # counts reuse cached frames and connection tables at shared points
        n = int(self.setting(spec, "samples"))
        seed = int(self.setting(spec, "seed"))
        pts = sample_box(chart.domain, n, seed,
                         f"{self.scenario}:{chart.name}")
        extra = spec.get("extra_points") or []
        return pts + [tuple(float(v) for v in p) for p in extra]


def _row(name, target, verifies, residual, tolerance, passed, spec, ctx,
         **extra):
    row = {
        "name": name,
        "target": target,
        "verifies": verifies,
        "residual": residual,
        "tolerance": tolerance,
        "pass": bool(passed),
        "samples": int(ctx.setting(spec, "samples")),
        "seed": int(ctx.setting(spec, "seed")),
        "order": int(ctx.setting(spec, "order")),
    }
    row.update(extra)
    return row


def _get_chart(ctx, spec):
    name = spec.get("chart")
    if name not in ctx.charts:
        raise SchemaError(f"check {spec.get('check')!r}: unknown chart {name!r}")
    return name, ctx.charts[name]


def _get_map(ctx, spec, key="map"):
    name = spec.get(key)
    if name not in ctx.maps:
        raise SchemaError(f"check {spec.get('check')!r}: unknown map {name!r}")
    return name, ctx.maps[name]


# ---- chart checks -------------------------------------------------------------


def check_frame(ctx, spec):
    name, chart = _get_chart(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    worst = 0.0
    for pt in ctx.chart_points(spec, chart, f"frame:{name}"):
        fr = chart_mod.frame_residuals(chart, pt, order)
        pr = chart_mod.projection_residuals(chart, pt, order)
        worst = max(worst, *fr.values(), *pr.values())
    return _row("frame", name,
                "adapted frame orthonormality, coframe duality, vertical "
                "span, projector algebra",
                worst, tol, worst < tol, spec, ctx)


def check_integrability(ctx, spec):
    name, chart = _get_chart(ctx, spec)
    res = chart_mod.check_integrability(
        chart, ctx.chart_points(spec, chart, f"integrability:{name}"),
        int(ctx.setting(spec, "order")))
    tol = float(ctx.setting(spec, "tolerance"))
    return _row("integrability", name,
                "vertical distribution closes under brackets",
                res["residual"], tol, res["residual"] < tol, spec, ctx,
                trivial=res["trivial"])


def check_riemannian(ctx, spec):
    name, chart = _get_chart(ctx, spec)
    res = chart_mod.check_riemannian(
        chart, ctx.chart_points(spec, chart, f"riemannian:{name}"),
        int(ctx.setting(spec, "order")))
    tol = float(ctx.setting(spec, "tolerance"))
    worst = max(res.values())
    return _row("riemannian", name,
                "bundle-like metric: antisymmetric horizontal tensor and "
                "leafwise-invariant horizontal metric",
                worst, tol, worst < tol, spec, ctx, details=res)


def check_levi_civita(ctx, spec):
    name, chart = _get_chart(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    worst = 0.0
    for pt in ctx.chart_points(spec, chart, f"lc:{name}"):
        res = conn_mod.levi_civita_residuals(chart, pt, order)
        worst = max(worst, *res.values())
    return _row("levi-civita", name,
                "Riemannian connection is metric and torsion-free in the "
                "adapted frame",
                worst, tol, worst < tol, spec, ctx)


def check_bott(ctx, spec):
    name, chart = _get_chart(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    worst = 0.0
    for pt in ctx.chart_points(spec, chart, f"bott:{name}"):
        worst = max(worst, conn_mod.bott_block_residuals(chart, pt, order)[
            "mixed_blocks"])
    return _row("bott-blocks", name,
                "basic connection preserves the vertical-horizontal splitting",
                worst, tol, worst < tol, spec, ctx)


def check_transverse(ctx, spec):
    name, chart = _get_chart(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    worst = 0.0
    for pt in ctx.chart_points(spec, chart, f"transverse:{name}"):
        res = conn_mod.transverse_connection_residuals(chart, pt, order)
        worst = max(worst, *res.values())
    return _row("transverse-connection", name,
                "transverse connection is metric and torsion-free",
                worst, tol, worst < tol, spec, ctx)


def check_torsion(ctx, spec):
    name, chart = _get_chart(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    worst = 0.0
    component_err = 0.0
    expect = spec.get("expect_component")
    for pt in ctx.chart_points(spec, chart, f"torsion:{name}"):
        res = conn_mod.torsion(chart, pt, order)
        worst = max(worst, res["disagreement"], res["antisymmetry"])
        if expect:
            i, b, c = expect["slot"]
            component_err = max(component_err,
                                abs(res["components"][i, b, c]
                                    - float(expect["value"])))
    passed = worst < tol and component_err < float(
        expect.get("tolerance", tol)) if expect else worst < tol
    return _row("torsion", name,
                "basic-connection torsion equals minus the vertical part of "
                "horizontal brackets",
                max(worst, component_err), tol, passed, spec, ctx)


def check_curvature_symmetry(ctx, spec):
    name, chart = _get_chart(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    worst = 0.0
    for pt in ctx.chart_points(spec, chart, f"symmetry:{name}"):
        res = curv_mod.curvature_symmetry_residuals(chart, pt, order)
        worst = max(worst, *res.values())
    return _row("curvature-symmetry", name,
                "transverse curvature symmetries and vertical-slot block "
                "vanishing",
                worst, tol, worst < tol, spec, ctx)


def check_oneill(ctx, spec):
    name, chart = _get_chart(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    worst = 0.0
    extra = 0.0
    sec_spec = spec.get("expect_sectional")
    for pt in ctx.chart_points(spec, chart, f"oneill:{name}"):
        res = curv_mod.oneill_identity_residuals(chart, pt, order)
        worst = max(worst, *res.values())
        if sec_spec:
            a, b = sec_spec["slots"]
            got = curv_mod.sectional(chart, pt, a, b, order)
            extra = max(extra, abs(got - float(sec_spec["value"])))
        if spec.get("expect_transverse_flat"):
            rt = curv_mod.transverse_curvature(chart, pt, order)["RT4"]
            extra = max(extra, float(np.max(np.abs(rt))))
    passed = worst < tol and extra < tol
    return _row("oneill-identity", name,
                "horizontal curvature comparison identities for the two "
                "fundamental tensors",
                max(worst, extra), tol, passed, spec, ctx)


def check_sectional(ctx, spec):
    name, chart = _get_chart(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    expected = float(spec["expected"])
    worst = 0.0
    for pt in ctx.chart_points(spec, chart, f"sectional:{name}"):
        p = chart.p
        for a in range(p, chart.m):
            for b in range(a + 1, chart.m):
                got = curv_mod.sectional(chart, pt, a, b, order)
                worst = max(worst, abs(got - expected))
    return _row("sectional", name,
                f"constant transverse sectional curvature {expected}",
                worst, tol, worst < tol, spec, ctx)


def check_nakagawa_takagi(ctx, spec):
    name, chart = _get_chart(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    worst = 0.0
    for pt in ctx.chart_points(spec, chart, f"nt:{name}"):
        res = conn_mod.nakagawa_takagi_residuals(chart, pt, order)
        worst = max(worst, *res.values())
    row = _row("nakagawa-takagi", name,
               "first-order covariant-derivative identities of the "
               "fundamental tensors against full curvature",
               worst, tol, worst < tol, spec, ctx)
    second = spec.get("second_order")
    if second:
        tol2 = float(second.get("tolerance", 1e-5))
        order2 = int(second.get("order", 4))
        cap = int(second.get("samples", 10))
        worst2 = 0.0
        for pt in ctx.chart_points(spec, chart, f"nt2:{name}")[:cap]:
            worst2 = max(worst2, conn_mod.ricci_identity_residual(
                chart, pt, order2))
        row["second_order_residual"] = worst2
        row["second_order_tolerance"] = tol2
        row["pass"] = bool(row["pass"] and worst2 < tol2)
        row["residual"] = max(row["residual"], worst2)
    return row


def check_c1_norms(ctx, spec):
    name, chart = _get_chart(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    res = conn_mod.c1_norms(
        chart, ctx.chart_points(spec, chart, f"c1:{name}"), order)
    expected = spec.get("expected") or {}
    tol = float(ctx.setting(spec, "tolerance"))
    worst = 0.0
    for key, val in expected.items():
        worst = max(worst, abs(res[key] - float(val)))
    return _row("c1-norms", name,
                "sampled first-derivative norms of the fundamental tensors",
                worst, tol, worst < tol, spec, ctx, norms=res)


def check_kahler(ctx, spec):
    name, chart = _get_chart(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    pts = ctx.chart_points(spec, chart, f"kahler:{name}")
    res = kahler_mod.validate_kahler(chart, pts, order)
    worst = max(res.values())
    for pt in pts[: max(1, len(pts) // 8)]:
        fr = kahler_mod.unitary_frame_residuals(chart, pt, order)
        worst = max(worst, *fr.values())
    return _row("kahler", name,
                "complex structure is metric-compatible, transversally "
                "parallel and leafwise invariant",
                worst, tol, worst < tol, spec, ctx, details=res)


def check_kahler_curvature(ctx, spec):
    name, chart = _get_chart(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    worst = 0.0
    for pt in ctx.chart_points(spec, chart, f"kahler-curv:{name}"):
        res = kahler_mod.kahler_curvature_residuals(chart, pt, order)
        worst = max(worst, *res.values())
    return _row("kahler-curvature", name,
                "J-invariance and holomorphic-component symmetries of the "
                "transverse curvature",
                worst, tol, worst < tol, spec, ctx)


def check_comparison(ctx, spec):
    name, chart = _get_chart(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    pts = ctx.chart_points(spec, chart, f"comparison:{name}")
    rep = schwarz_mod.comparison_check(
        chart, pts, C_candidate=float(spec.get("constant", 1.0)),
        order=order, laplacian_model=spec.get("model"))
    eik_tol = float(spec.get("eikonal_tolerance", 1e-6))
    passed = rep["passed"] and rep["eikonal_residual"] < eik_tol
    residual = rep["eikonal_residual"]
    if rep["model_residual"] is not None:
        passed = passed and rep["model_residual"] < tol
        residual = max(residual, rep["model_residual"])
    return _row("comparison", name,
                "horizontal Laplacian of the distance function obeys the "
                "structural bound",
                residual, tol, passed, spec, ctx,
                bound_holds=rep["passed"], constant=rep["C_candidate"],
                empirical_constant=rep["empirical_C"], K1=rep["K1"],
                k1=rep["k1"], k2=rep["k2"],
                radii=[round(r["r"], 6) for r in rep["rows"]])


# ---- map checks ---------------------------------------------------------------


def _map_points(ctx, spec, fmap, label):
    return ctx.chart_points(spec, fmap.source, label)


def check_foliated(ctx, spec):
    name, fmap = _get_map(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    res = maps_mod.check_structure(
        fmap, _map_points(ctx, spec, fmap, f"foliated:{name}"), order)
    worst = max(res.values())
    return _row("foliated", name,
                "differential maps leaves to leaves; horizontal derivative "
                "symmetry and mixed-slot vanishing",
                worst, tol, worst < tol, spec, ctx, details=res)


def check_harmonic(ctx, spec):
    name, fmap = _get_map(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    res = maps_mod.check_harmonic(
        fmap, _map_points(ctx, spec, fmap, f"harmonic:{name}"),
        spec.get("convention", "bott"), order)
    return _row("harmonic", name, "transverse tension field vanishes",
                res["residual"], tol, res["residual"] < tol, spec, ctx)


def check_conventions(ctx, spec):
    name, fmap = _get_map(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    expected = spec.get("expected_df_kappa")
    worst = 0.0
    for pt in _map_points(ctx, spec, fmap, f"conventions:{name}"):
        mj = maps_mod.map_jet(fmap, pt, order)
        t1 = mj.tension("bott")
        t2 = mj.tension("barletta_dragomir")
        dfk = mj.df_kappa()
        worst = max(worst, float(np.max(np.abs((t1 - t2) - dfk),
                                        initial=0.0)))
        if expected is not None:
            worst = max(worst, abs(float(np.linalg.norm(dfk))
                                   - float(expected)))
    return _row("tension-conventions", name,
                "the two tension conventions differ exactly by the "
                "differential of the mean curvature",
                worst, tol, worst < tol, spec, ctx)


def check_holomorphic(ctx, spec):
    name, fmap = _get_map(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    res = maps_mod.check_holomorphic(
        fmap, _map_points(ctx, spec, fmap, f"holomorphic:{name}"), order)
    return _row("holomorphic", name,
                "differential intertwines the transverse complex structures",
                res["residual"], tol, res["residual"] < tol, spec, ctx)


def check_dilatation(ctx, spec):
    name, fmap = _get_map(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    expected = spec.get("expected_eigenvalues")
    worst = 0.0
    for pt in _map_points(ctx, spec, fmap, f"dilatation:{name}"):
        d = maps_mod.map_jet(fmap, pt, order).dilatation()
        worst = max(worst, d["trace_residual"])
        lam = d["eigenvalues"]
        if lam.size:
            worst = max(worst, max(0.0, -float(lam[-1])))
        if expected is not None:
            worst = max(worst, float(np.max(np.abs(
                lam - np.asarray(expected, dtype=float)))))
    return _row("dilatation", name,
                "pullback spectrum is positive semidefinite with trace twice "
                "the energy density",
                worst, tol, worst < tol, spec, ctx)


def check_bochner(ctx, spec):
    name, fmap = _get_map(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    variant = spec.get("variant", "riemannian")
    worst = 0.0
    form = "harmonic"
    for pt in _map_points(ctx, spec, fmap, f"bochner:{variant}:{name}"):
        res = maps_mod.map_jet(fmap, pt, order).bochner(variant)
        worst = max(worst, res["residual"])
        if res["form"] != "harmonic":
            form = res["form"]
    return _row(f"bochner-{variant}", name,
                "horizontal Laplacian of the energy density equals the "
                "curvature-corrected gradient terms",
                worst, tol, worst < tol, spec, ctx, form=form)


def check_commutation(ctx, spec):
    name, fmap = _get_map(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    worst = 0.0
    for pt in _map_points(ctx, spec, fmap, f"commutation:{name}"):
        worst = max(worst, maps_mod.commutation_residual(fmap, pt, order))
    return _row("commutation", name,
                "second covariant derivative commutator of the differential "
                "equals curvature contractions",
                worst, tol, worst < tol, spec, ctx)


def check_schwarz(ctx, spec):
    name, fmap = _get_map(ctx, spec)
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    variant = spec.get("variant", "riemannian")
    beta = spec.get("beta", "auto")
    expect = spec.get("expect", "bound")
    pts = _map_points(ctx, spec, fmap, f"schwarz:{variant}:{name}")
    verifies = "pulled-back horizontal metric bounded by the curvature ratio"
    try:
        rep = schwarz_mod.schwarz_check(fmap, pts, variant, beta, order)
    except UnboundedDilatation as err:
        passed = expect == "unbounded"
        return _row(f"schwarz-{variant}", name, verifies,
                    math.inf if not passed else 0.0, tol, passed, spec, ctx,
                    outcome="unbounded-dilatation", detail=str(err))
    except AssumptionViolated as err:
        passed = expect == "assumption-violated"
        return _row(f"schwarz-{variant}", name, verifies,
                    math.inf if not passed else 0.0, tol, passed, spec, ctx,
                    outcome="assumption-violated", detail=str(err))
    if expect == "sharp":
        residual = abs(rep["max_ratio"] - 1.0)
        passed = residual <= tol
    elif expect == "horizontally-constant":
        passed = rep["horizontally_constant"] is True
        residual = rep["sup_differential"]
    elif expect == "bound":
        passed = rep["passed"]
        residual = max(0.0, rep["max_ratio"] - 1.0)
    else:
        raise SchemaError(f"unknown schwarz expectation {expect!r}")
    return _row(f"schwarz-{variant}", name, verifies, residual, tol, passed,
                spec, ctx, max_ratio=rep["max_ratio"], K1=rep["K1"],
                K2=rep["K2"], beta=rep["beta"],
                horizontally_constant=rep["horizontally_constant"],
                outcome="bounded")


def check_chain_rule(ctx, spec):
    names = spec.get("maps")
    if not names or len(names) != 3:
        raise SchemaError("chain-rule check needs maps: [first, second, "
                          "composite]")
    fmaps = []
    for n in names:
        if n not in ctx.maps:
            raise SchemaError(f"chain-rule: unknown map {n!r}")
        fmaps.append(ctx.maps[n])
    first, second, composite = fmaps
    order = int(ctx.setting(spec, "order"))
    tol = float(ctx.setting(spec, "tolerance"))
    worst = 0.0
    for pt in ctx.chart_points(spec, first.source,
                               f"chain:{'+'.join(names)}"):
        worst = max(worst, maps_mod.chain_rule_residual(
            first, second, composite, pt, order))
    return _row("chain-rule", "+".join(names),
                "differential of a composition is the product of "
                "differentials",
                worst, tol, worst < tol, spec, ctx)


# ---- finite-difference audit ----------------------------------------------------


def fd_audit(ctx, seed, order):
    """Cross-validate jet derivatives of every scenario expression (degree
    up to 3) against central finite differences, plus the frame components of
    the curvature tensor on each chart."""
    rows = []
    for name, chart in ctx.charts.items():
        exprs = [e for row in chart.metric for e in row]
        for field in chart.vertical:
            exprs.extend(field)
        if chart.distance is not None:
            exprs.append(chart.distance[0])
        worst = _fd_exprs(chart, exprs, chart.domain, seed, order,
                          label=f"fd:{name}")
        for pt in sample_box(chart.domain, 2, seed, f"fdriem:{name}"):
            diff = np.max(np.abs(curv_mod.riemann_frame(chart, pt, order)
                                 - curv_mod.riemann_fd(chart, pt)))
            worst = max(worst, float(diff))
        rows.append({
            "name": "fd-check", "target": name,
            "verifies": "jet derivatives agree with central finite "
                        "differences",
            "residual": worst, "tolerance": 1e-4, "pass": worst < 1e-4,
            "samples": 3, "seed": seed, "order": order})
    for name, fmap in ctx.maps.items():
        worst = _fd_exprs(fmap.source, list(fmap.components),
                          fmap.source.domain, seed, order,
                          label=f"fdmap:{name}")
        rows.append({
            "name": "fd-check", "target": name,
            "verifies": "jet derivatives agree with central finite "
                        "differences",
            "residual": worst, "tolerance": 1e-4, "pass": worst < 1e-4,
            "samples": 3, "seed": seed, "order": order})
    return rows


def _fd_exprs(chart, exprs, box, seed, order, label):
    from .chart import point_env

    worst = 0.0
    pts = sample_box(box, 3, seed, label)
    for tree in exprs:
        def call(pt, _tree=tree):
            return ex.eval_real(_tree, dict(zip(chart.coords, pt)))

        for pt in pts:
            env = point_env(chart, pt, min(order, 3))
            jet = ex.eval_jet(tree, env)
            for mi in jet.space.mindex:
                deg = sum(mi)
                if deg == 0 or deg > 3:
                    continue
                got = jet.derivative(mi)
                ref = fd_derivative(call, pt, mi)
                # |got - ref| < max(1e-4, 1e-4 |got|), normalized against 1e-4
                worst = max(worst, abs(got - ref) / max(1.0, abs(got)))
    return worst


REGISTRY = {
    "frame": check_frame,
    "integrability": check_integrability,
    "riemannian": check_riemannian,
    "levi-civita": check_levi_civita,
    "bott": check_bott,
    "transverse": check_transverse,
    "torsion": check_torsion,
    "curvature-symmetry": check_curvature_symmetry,
    "oneill": check_oneill,
    "sectional": check_sectional,
    "nakagawa-takagi": check_nakagawa_takagi,
    "c1-norms": check_c1_norms,
    "kahler": check_kahler,
    "kahler-curvature": check_kahler_curvature,
    "comparison": check_comparison,
    "foliated": check_foliated,
    "harmonic": check_harmonic,
    "conventions": check_conventions,
    "holomorphic": check_holomorphic,
    "dilatation": check_dilatation,
    "bochner": check_bochner,
    "commutation": check_commutation,
    "schwarz": check_schwarz,
    "chain-rule": check_chain_rule,
}


def run_check(ctx, spec):
    kind = spec.get("check")
    if kind not in REGISTRY:
        raise SchemaError(f"unknown check type {kind!r}")
    return REGISTRY[kind](ctx, spec)
