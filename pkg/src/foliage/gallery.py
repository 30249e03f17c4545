"""Built-in model charts, maps and verification scenarios.

Every entry is a complete scenario document (charts + maps + checks) in the
same JSON schema accepted by the command line runner, so `gallery --emit`
output can be edited and re-run by hand.
"""

from __future__ import annotations

import math

from .errors import UnknownGallery


def disc_chart(curvature=1.0, box=0.62, with_distance=False):
    """Conformal disc model with constant negative transverse curvature."""
    lam = f"4/({curvature}*(1 - x^2 - y^2)^2)"
    spec = {
        "dim": 2, "vertical_rank": 0, "coords": ["x", "y"],
        "metric": [[lam, "0"], ["0", lam]],
        "vertical": [],
        "J": [["0", "-1"], ["1", "0"]],
        "domain": [[-box, box], [-box, box]],
    }
    if with_distance:
        spec["distance"] = {
            "expr": "arccosh((1 + x^2 + y^2)/(1 - x^2 - y^2))",
            "basepoint": [0.0, 0.0]}
    return spec


def euclidean_chart():
    return {
        "dim": 2, "vertical_rank": 0, "coords": ["x", "y"],
        "metric": [["1", "0"], ["0", "1"]],
        "vertical": [],
        "distance": {"expr": "sqrt(x^2 + y^2)", "basepoint": [0.0, 0.0]},
        "domain": [[0.2, 1.0], [0.2, 1.0]],
    }


def heisenberg_chart():
    """Left-invariant metric making (d_x - y/2 d_t, d_y + x/2 d_t, d_t)
    orthonormal; the vertical line field is the group center."""
    return {
        "dim": 3, "vertical_rank": 1, "coords": ["x", "y", "t"],
        "metric": [["1 + y^2/4", "-x*y/4", "y/2"],
                   ["-x*y/4", "1 + x^2/4", "-x/2"],
                   ["y/2", "-x/2", "1"]],
        "vertical": [["0", "0", "1"]],
        "domain": [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]],
    }


def warped_chart():
    return {
        "dim": 2, "vertical_rank": 1, "coords": ["x", "y"],
        "metric": [["1", "0"], ["0", "exp(2*x)"]],
        "vertical": [["0", "1"]],
        "domain": [[-0.8, 0.8], [-0.8, 0.8]],
    }


def hyperbolic_distance_chart():
    # box chosen so sampled radii cover roughly [0.1, 5]
    spec = disc_chart(1.0, 0.62, with_distance=True)
    spec["domain"] = [[0.0499, 0.987], [-0.015, 0.015]]
    return spec


_SQUARE = ["x^2 - y^2", "2*x*y"]


def _radial_points(radii):
    return [[math.tanh(r / 2.0), 0.0] for r in radii]


def _scenario_euclidean():
    return {
        "name": "euclidean-trivial",
        "charts": {"euclidean": euclidean_chart()},
        "maps": {},
        "checks": [
            {"check": "frame", "chart": "euclidean", "tolerance": 1e-9},
            {"check": "integrability", "chart": "euclidean", "tolerance": 1e-8},
            {"check": "riemannian", "chart": "euclidean", "tolerance": 1e-9},
            {"check": "levi-civita", "chart": "euclidean", "tolerance": 1e-8},
            {"check": "bott", "chart": "euclidean", "tolerance": 1e-10},
            {"check": "transverse", "chart": "euclidean", "tolerance": 1e-8},
            {"check": "torsion", "chart": "euclidean", "tolerance": 1e-8},
            {"check": "curvature-symmetry", "chart": "euclidean",
             "tolerance": 1e-8},
            {"check": "oneill", "chart": "euclidean", "tolerance": 1e-8},
            {"check": "comparison", "chart": "euclidean", "constant": 0.0,
             "model": "1/r", "tolerance": 1e-6},
        ],
    }


def _scenario_disc():
    return {
        "name": "poincare-disc",
        "charts": {"disc": disc_chart(1.0, 0.62)},
        "maps": {},
        "checks": [
            {"check": "frame", "chart": "disc", "tolerance": 1e-9},
            {"check": "levi-civita", "chart": "disc", "tolerance": 1e-8},
            {"check": "bott", "chart": "disc", "tolerance": 1e-10},
            {"check": "transverse", "chart": "disc", "tolerance": 1e-8},
            {"check": "curvature-symmetry", "chart": "disc", "tolerance": 1e-8},
            {"check": "oneill", "chart": "disc", "tolerance": 1e-8},
            {"check": "sectional", "chart": "disc", "expected": -1.0,
             "tolerance": 1e-8},
            {"check": "kahler", "chart": "disc", "tolerance": 1e-8},
            {"check": "kahler-curvature", "chart": "disc", "tolerance": 1e-8},
        ],
    }


def _scenario_hyperbolic():
    radii = [0.1 + k * (5.0 - 0.1) / 40.0 for k in range(41)]
    return {
        "name": "hyperbolic-distance",
        "charts": {"hyperbolic": hyperbolic_distance_chart()},
        "maps": {},
        "checks": [
            {"check": "comparison", "chart": "hyperbolic", "constant": 1.0,
             "model": "coth", "tolerance": 1e-6, "eikonal_tolerance": 1e-7,
             "extra_points": _radial_points(radii)},
        ],
    }


def _scenario_heisenberg():
    return {
        "name": "heisenberg-3",
        "charts": {"heisenberg": heisenberg_chart()},
        "maps": {},
        "checks": [
            {"check": "frame", "chart": "heisenberg", "tolerance": 1e-9},
            {"check": "integrability", "chart": "heisenberg", "tolerance": 1e-8},
            {"check": "riemannian", "chart": "heisenberg", "tolerance": 1e-9},
            {"check": "levi-civita", "chart": "heisenberg", "tolerance": 1e-8},
            {"check": "bott", "chart": "heisenberg", "tolerance": 1e-10},
            {"check": "transverse", "chart": "heisenberg", "tolerance": 1e-8},
            {"check": "torsion", "chart": "heisenberg", "tolerance": 1e-8,
             "expect_component": {"slot": [0, 1, 2], "value": -1.0}},
            {"check": "curvature-symmetry", "chart": "heisenberg",
             "tolerance": 1e-8},
            {"check": "oneill", "chart": "heisenberg", "tolerance": 1e-8,
             "expect_sectional": {"slots": [1, 2], "value": -0.75},
             "expect_transverse_flat": True},
            {"check": "nakagawa-takagi", "chart": "heisenberg",
             "tolerance": 1e-6,
             "second_order": {"order": 4, "tolerance": 1e-5}},
            {"check": "c1-norms", "chart": "heisenberg",
             "expected": {"A_C1": math.sqrt(0.5), "h_C1": 0.0},
             "tolerance": 1e-9},
        ],
    }


def _scenario_warped():
    return {
        "name": "warped-product",
        "charts": {"warped": warped_chart()},
        "maps": {"warped-identity": {"source": "warped", "target": "warped",
                                     "components": ["x", "y"]}},
        "checks": [
            {"check": "frame", "chart": "warped", "tolerance": 1e-9},
            {"check": "riemannian", "chart": "warped", "tolerance": 1e-9},
            {"check": "torsion", "chart": "warped", "tolerance": 1e-8},
            {"check": "curvature-symmetry", "chart": "warped", "tolerance": 1e-8},
            {"check": "nakagawa-takagi", "chart": "warped", "tolerance": 1e-6,
             "second_order": {"order": 4, "tolerance": 1e-5}},
            {"check": "c1-norms", "chart": "warped",
             "expected": {"A_C1": 0.0, "h_C1": 1.0}, "tolerance": 1e-9},
            {"check": "conventions", "map": "warped-identity",
             "expected_df_kappa": 1.0, "tolerance": 1e-8},
        ],
    }


def _scenario_square():
    return {
        "name": "disc-holomorphic-square",
        "charts": {"disc-small": disc_chart(1.0, 0.55),
                   "disc": disc_chart(1.0, 0.61)},
        "maps": {"square": {"source": "disc-small", "target": "disc",
                            "components": _SQUARE}},
        "checks": [
            {"check": "foliated", "map": "square", "tolerance": 1e-7},
            {"check": "harmonic", "map": "square", "tolerance": 1e-6,
             "samples": 20},
            {"check": "holomorphic", "map": "square", "tolerance": 1e-9},
            {"check": "dilatation", "map": "square", "tolerance": 1e-9},
            {"check": "bochner", "map": "square", "variant": "riemannian",
             "tolerance": 1e-5, "samples": 20},
            {"check": "bochner", "map": "square", "variant": "kahler",
             "tolerance": 1e-5, "samples": 20},
            {"check": "commutation", "map": "square", "tolerance": 1e-5},
            {"check": "schwarz", "map": "square", "variant": "kahler",
             "tolerance": 1e-6, "expect": "bound"},
        ],
    }


def _scenario_sharpness(pairs=((2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (4.0, 1.0))):
    charts = {}
    maps = {}
    checks = []
    for K1, K2 in pairs:
        tag = f"{_fmt(K1)}-{_fmt(K2)}"
        src, tgt = f"disc-{_fmt(K1)}-src-{tag}", f"disc-{_fmt(K2)}-tgt-{tag}"
        charts[src] = disc_chart(K1, 0.55)
        charts[tgt] = disc_chart(K2, 0.6)
        maps[f"identity-{tag}"] = {"source": src, "target": tgt,
                                   "components": ["x", "y"]}
        checks.append({"check": "schwarz", "map": f"identity-{tag}",
                       "variant": "riemannian", "beta": 1.0,
                       "tolerance": 1e-6, "expect": "sharp"})
    return {"name": "sharpness-discs", "charts": charts, "maps": maps,
            "checks": checks}


def _fmt(v):
    return str(int(v)) if float(v).is_integer() else str(v).replace(".", "p")


def _scenario_geodesic():
    return {
        "name": "heisenberg-geodesic-map",
        "charts": {"heisenberg": heisenberg_chart(),
                   "disc": disc_chart(1.0, 0.62)},
        "maps": {
            "geodesic": {"source": "heisenberg", "target": "disc",
                         "components": ["tanh(x/2)", "0"]},
            "constant": {"source": "heisenberg", "target": "disc",
                         "components": ["0.3", "0"]},
        },
        "checks": [
            {"check": "foliated", "map": "geodesic", "tolerance": 1e-7},
            {"check": "harmonic", "map": "geodesic", "tolerance": 1e-6},
            {"check": "dilatation", "map": "geodesic", "tolerance": 1e-9,
             "expected_eigenvalues": [1.0, 0.0]},
            {"check": "schwarz", "map": "geodesic", "variant": "riemannian",
             "beta": "auto", "tolerance": 1e-6, "expect": "unbounded"},
            {"check": "schwarz", "map": "constant", "variant": "riemannian",
             "beta": "auto", "tolerance": 1e-6,
             "expect": "horizontally-constant"},
        ],
    }


def _scenario_composite():
    return {
        "name": "composite-map",
        "charts": {"disc-2": disc_chart(2.0, 0.55),
                   "disc-mid": disc_chart(1.0, 0.56),
                   "disc": disc_chart(1.0, 0.63)},
        "maps": {
            "inclusion": {"source": "disc-2", "target": "disc-mid",
                          "components": ["x", "y"]},
            "square": {"source": "disc-mid", "target": "disc",
                       "components": _SQUARE},
            "composite": {"source": "disc-2", "target": "disc",
                          "components": _SQUARE},
        },
        "checks": [
            {"check": "chain-rule", "maps": ["inclusion", "square", "composite"],
             "tolerance": 1e-8},
            {"check": "harmonic", "map": "inclusion", "tolerance": 1e-6},
            {"check": "dilatation", "map": "composite", "tolerance": 1e-9},
        ],
    }


_GALLERY = {
    "euclidean-trivial": (_scenario_euclidean,
                          "flat trivial foliation; frame, torsion and "
                          "comparison baselines"),
    "poincare-disc": (_scenario_disc,
                      "constant-curvature disc; curvature and complex "
                      "structure suites"),
    "hyperbolic-distance": (_scenario_hyperbolic,
                            "closed-form distance; horizontal Laplacian "
                            "comparison bound"),
    "heisenberg-3": (_scenario_heisenberg,
                     "nilpotent group foliated by its center; torsion, "
                     "curvature comparison and tensor-derivative identities"),
    "warped-product": (_scenario_warped,
                       "totally geodesic complement with mean curvature; "
                       "derivative identities and tension conventions"),
    "disc-holomorphic-square": (_scenario_square,
                                "holomorphic self-map; both energy-density "
                                "Laplacian formulas and the Yau-type bound"),
    "sharpness-discs": (_scenario_sharpness,
                        "identity maps between rescaled discs; the Shen-type "
                        "bound is attained"),
    "heisenberg-geodesic-map": (_scenario_geodesic,
                                "flat transverse geometry; degenerate "
                                "dilatation and horizontally constant maps"),
    "composite-map": (_scenario_composite,
                      "composition of a rescaling and a holomorphic square; "
                      "chain rule for differentials"),
}


def gallery_names():
    return list(_GALLERY)


def gallery_scenario(name):
    if name == "all":
        merged = {"name": "all", "charts": {}, "maps": {}, "checks": []}
        for key in _GALLERY:
            sc = gallery_scenario(key)
            for obj_name, obj in sc["charts"].items():
                merged["charts"][f"{key}/{obj_name}"] = obj
            for obj_name, obj in sc["maps"].items():
                obj = dict(obj)
                obj["source"] = f"{key}/{obj['source']}"
                obj["target"] = f"{key}/{obj['target']}"
                merged["maps"][f"{key}/{obj_name}"] = obj
            for chk in sc["checks"]:
                chk = dict(chk)
                for field in ("chart", "map"):
                    if field in chk:
                        chk[field] = f"{key}/{chk[field]}"
                if "maps" in chk:
                    chk["maps"] = [f"{key}/{v}" for v in chk["maps"]]
                merged["checks"].append(chk)
        return merged
    try:
        builder, _ = _GALLERY[name]
    except KeyError:
        raise UnknownGallery(f"no built-in scenario named {name!r}; "
                             f"known: {', '.join(gallery_names())}") from None
    return builder()


def gallery_listing():
    return [(name, desc) for name, (_, desc) in _GALLERY.items()]
