"""Foliated maps: differential components in adapted frames, covariant
derivatives with the pullback connection on the target index, tension fields,
transversal energy density and its horizontal Laplacian, dilatation spectra,
holomorphy checks, and the two Bochner-formula residuals.

Component layout: ``fAB[At][B]`` with ``At`` a target frame slot and ``B`` a
source frame slot (vertical slots first on both sides).  Derivative indices
are appended on the right, the outermost derivative last.
"""

from __future__ import annotations

import numpy as np

from . import expr as ex
from .chart import PointFrame, frame_at
from .connection import connection_table
from .curvature import transverse_curvature
from .errors import (ImageOutOfDomain, NotKahler, SchemaError, ZeroVector)
from .jets import Jet, jet_constant
from .kahler import complex_transverse_ricci, complex_curvature, j_values, unitary_frame
from .sampling import sample_box


class FoliatedMap:
    def __init__(self, name, source, target, components):
        self.name = name
        self.source = source
        self.target = target
        self.components = tuple(components)
        self._cache = {}

    def __repr__(self):
        return (f"FoliatedMap({self.name!r}, {self.source.name} -> "
                f"{self.target.name})")


def load_map(spec, charts, name="map", probe_seed=42, probe_count=32):
    """Build a map from its JSON description; the image of a probe sample must
    stay inside the target domain box."""
    for key in ("source", "target", "components"):
        if key not in spec:
            raise SchemaError(f"{name}: missing field {key!r}")
    try:
        source = charts[spec["source"]]
        target = charts[spec["target"]]
    except KeyError as err:
        raise SchemaError(f"{name}: unknown chart {err.args[0]!r}") from None
    if len(spec["components"]) != target.m:
        raise SchemaError(f"{name}: expected {target.m} components")
    comps = []
    for k, text in enumerate(spec["components"]):
        tree = ex.parse(text)
        unknown = ex.variables(tree) - set(source.coords)
        if unknown:
            raise SchemaError(f"{name}.components[{k}]: undeclared variables "
                              f"{sorted(unknown)}")
        comps.append(tree)
    fmap = FoliatedMap(name, source, target, comps)
    for point in sample_box(source.domain, probe_count, probe_seed,
                            f"probe:{name}"):
        env = dict(zip(source.coords, point))
        image = [ex.eval_real(c, env) for c in comps]
        _check_in_domain(fmap, point, image)
    return fmap


def _check_in_domain(fmap, point, image, slack=1e-9):
    for v, (lo, hi) in zip(image, fmap.target.domain):
        if not (lo - slack <= v <= hi + slack):
            raise ImageOutOfDomain(point, image)


def _compose(target_jet, deltas, powers):
    """Substitute map jets into a target-space jet (polynomial evaluation).

    ``deltas`` are the map jets minus their values; ``powers[a][k]`` caches
    deltas[a]**k in the source jet space.
    """
    space = target_jet.space
    out = None
    for mi, coeff in zip(space.mindex, target_jet.coeffs):
        if coeff == 0.0:
            continue
        term = None
        for axis, k in enumerate(mi):
            if k:
                factor = powers[axis][k]
                term = factor if term is None else term * factor
        if term is None:
            piece = jet_constant(coeff, powers[0][1].dim, powers[0][1].order)
        else:
            piece = term * coeff
        out = piece if out is None else out + piece
    if out is None:
        probe = powers[0][1]
        out = jet_constant(0.0, probe.dim, probe.order)
    return out


class MapJet:
    """Differential components of one map at one source point."""

    def __init__(self, fmap, point, order=3):
        if order < 3:
            raise ValueError("map jets need order >= 3 for second derivatives")
        self.fmap = fmap
        self.point = tuple(float(v) for v in point)
        self.order = order
        src, tgt = fmap.source, fmap.target
        self.src_tab = connection_table(src, self.point, order)
        pf = self.src_tab.pf
        self.pf = pf

        self.F = [ex.eval_jet(c, pf.env) for c in fmap.components]
        self.image = tuple(f.value for f in self.F)
        _check_in_domain(fmap, self.point, self.image)

        # target metric and frame evaluated along the map (exact source jets:
        # Gram-Schmidt is pointwise algebra in the composed metric)
        env_along = dict(zip(tgt.coords, self.F))
        self.tgt_along = PointFrame(tgt, env_along, order)
        self.tgt_tab = connection_table(tgt, self.image, order)

        m, n = src.m, tgt.m
        k1, k2 = order - 1, order - 2

        dF = [[sum((pf.frame[B][b].truncate(k1) * self.F[a].partial(b)
                    for b in range(m)), start=pf._zero(k1))
               for a in range(n)] for B in range(m)]
        gt = [[e.truncate(k1) for e in row] for row in self.tgt_along.g]
        et = [[c.truncate(k1) for c in e] for e in self.tgt_along.frame]
        self.fAB = [[sum((gt[a][b] * dF[B][a] * et[At][b]
                          for a in range(n) for b in range(n)),
                         start=pf._zero(k1))
                     for B in range(m)] for At in range(n)]

        # pullback of the target connection: compose intrinsic coefficients
        # with the map, then contract with the differential
        deltas, powers = [], []
        for f in self.F:
            d = Jet(f.space, f.coeffs.copy())
            d.coeffs[0] = 0.0
            d = d.truncate(k2)
            deltas.append(d)
            pw = {1: d}
            for kk in range(2, order + 1):
                pw[kk] = pw[kk - 1] * d
            powers.append(pw)
        bott_t = self.tgt_tab.bott()
        bott_along = [[[_compose(bott_t[Ct][Dt][Et].truncate(k2), deltas, powers)
                        for Et in range(n)] for Dt in range(n)]
                      for Ct in range(n)]
        f_k2 = [[self.fAB[At][B].truncate(k2) for B in range(m)]
                for At in range(n)]
        self.omhat = [[[sum((bott_along[Ct][Dt][At] * f_k2[Ct][C]
                             for Ct in range(n)), start=pf._zero(k2))
                        for At in range(n)] for Dt in range(n)]
                      for C in range(m)]

        bott_s = self.src_tab.bott()
        bott_s2 = [[[c.truncate(k2) for c in row] for row in plane]
                   for plane in bott_s]
        self.fAB1 = [[[None] * m for _ in range(m)] for _ in range(n)]
        for At in range(n):
            for B in range(m):
                for C in range(m):
                    acc = pf.frame_direction(C, self.fAB[At][B])
                    for D in range(m):
                        acc = acc - f_k2[At][D] * bott_s2[C][B][D]
                    for Dt in range(n):
                        acc = acc + f_k2[Dt][B] * self.omhat[C][Dt][At]
                    self.fAB1[At][B][C] = acc

        k3 = order - 3
        bott_sv = self.src_tab.bott_values()
        omhat_v = np.array([[[self.omhat[C][Dt][At].value for At in range(n)]
                             for Dt in range(n)] for C in range(m)])
        f1v = np.array([[[self.fAB1[At][B][C].value for C in range(m)]
                         for B in range(m)] for At in range(n)])
        self.fAB1_values = f1v
        self.fAB_values = np.array([[self.fAB[At][B].value for B in range(m)]
                                    for At in range(n)])
        fAB2 = np.zeros((n, m, m, m))
        for At in range(n):
            for B in range(m):
                for C in range(m):
                    j = self.fAB1[At][B][C]
                    for D in range(m):
                        acc = pf.frame_direction(D, j).value if k3 >= 0 else 0.0
                        acc -= float(np.dot(f1v[At, B, :], bott_sv[D, C, :]))
                        acc -= float(np.dot(f1v[At, :, C], bott_sv[D, B, :]))
                        acc += float(np.dot(f1v[:, B, C], omhat_v[D, :, At]))
                        fAB2[At, B, C, D] = acc
        self.fAB2 = fAB2

    # ---- index helpers ------------------------------------------------------

    def _src_h(self):
        return range(self.fmap.source.p, self.fmap.source.m)

    def _tgt_h(self):
        return range(self.fmap.target.p, self.fmap.target.m)

    # ---- derived quantities ---------------------------------------------------

    def foliated_residual(self):
        """max |f^At_i| over horizontal target slots and vertical source slots."""
        worst = 0.0
        for At in self._tgt_h():
            for i in range(self.fmap.source.p):
                worst = max(worst, abs(self.fAB_values[At, i]))
        return worst

    def structure_residuals(self):
        """Horizontal symmetry of the first covariant derivative and vanishing
        of its mixed horizontal-vertical components (foliated maps)."""
        sym = 0.0
        mixed = 0.0
        for At in self._tgt_h():
            for al in self._src_h():
                for be in self._src_h():
                    sym = max(sym, abs(self.fAB1_values[At, al, be]
                                       - self.fAB1_values[At, be, al]))
                for i in range(self.fmap.source.p):
                    mixed = max(mixed, abs(self.fAB1_values[At, al, i]))
        return {"symmetry": sym, "mixed": mixed}

    def tension(self, convention="bott"):
        """Transverse tension field in the target horizontal frame."""
        tau = np.array([sum(self.fAB1_values[At, ga, ga] for ga in self._src_h())
                        for At in range(self.fmap.target.m)])
        if convention == "barletta_dragomir":
            kappa = self.src_tab.mean_curvature()
            tau = tau - self.fAB_values @ kappa
        elif convention != "bott":
            raise ValueError(f"unknown tension convention {convention!r}")
        return tau[self.fmap.target.p:]

    def df_kappa(self):
        kappa = self.src_tab.mean_curvature()
        return (self.fAB_values @ kappa)[self.fmap.target.p:]

    def energy_density_jet(self):
        pf = self.pf
        k = self.order - 1
        acc = pf._zero(k)
        for At in self._tgt_h():
            for be in self._src_h():
                acc = acc + self.fAB[At][be] * self.fAB[At][be]
        return acc * 0.5

    def energy_density(self):
        return self.energy_density_jet().value

    def horizontal_laplacian(self, scalar):
        """Delta_H of a jet scalar: trace over horizontal frame directions of
        the second derivative corrected by the transverse connection."""
        pf = self.pf
        bott = self.src_tab.bott_values()
        p, m = self.fmap.source.p, self.fmap.source.m
        first = [pf.frame_direction(B, scalar) for B in range(m)]
        out = 0.0
        for al in range(p, m):
            out += pf.frame_direction(al, first[al]).value
            for be in range(p, m):
                out -= bott[al, al, be] * first[be].value
        return out

    def dilatation(self):
        """Eigenvalues of the pullback matrix and the minimal dilatation order."""
        q = self.fmap.source.q
        fh = self.fAB_values[self.fmap.target.p:, self.fmap.source.p:]
        A = fh.T @ fh
        lam = np.linalg.eigvalsh(A)[::-1]
        lam = np.clip(lam, 0.0, None)
        tail = float(np.sum(lam[1:]))
        if lam.size == 0 or lam[0] <= 1e-12:
            beta_min = 0.0
        elif tail <= 1e-12:
            beta_min = "unbounded"
        else:
            beta_min = float(np.sqrt(lam[0] / tail))
        trace_residual = abs(float(np.trace(A)) - 2.0 * self.energy_density())
        return {"matrix": A, "eigenvalues": lam, "beta_min": beta_min,
                "trace_residual": trace_residual}

    # ---- Bochner formulas ------------------------------------------------------

    def bochner(self, variant="riemannian", harmonic_tol=1e-5):
        """Left side (horizontal Laplacian of the energy density) against the
        curvature-corrected right side.  The simplified right side applies when
        the tension is numerically zero; otherwise the general form with the
        traced second derivative is used and reported as such."""
        src, tgt = self.fmap.source, self.fmap.target
        lhs = self.horizontal_laplacian(self.energy_density_jet())
        fh = self.fAB_values[tgt.p:, src.p:]
        grad2 = float(sum(self.fAB1_values[At, be, ga] ** 2
                          for At in self._tgt_h()
                          for be in self._src_h()
                          for ga in self._src_h()))
        ric_src = transverse_curvature(src, self.point, self.order)["ric"]
        ric_term = float(np.einsum("tb,td,bd->", fh, fh, ric_src))
        RT_t = transverse_curvature(tgt, self.image, self.order)["RT4"]
        Ht = RT_t[tgt.p:, tgt.p:, tgt.p:, tgt.p:]
        # <R~(df e_be, df e_ga) df e_ga, df e_be> summed; inner-product form
        curv_term = float(np.einsum("abcd,ag,bh,ch,dg->", Ht, fh, fh, fh, fh))
        # index-contraction form of the same term, kept as a consistency probe
        curv_index_form = float(np.einsum("baeg,ax,by,ex,gy->", Ht, fh, fh, fh, fh))
        tau = self.tension("bott")
        tau_norm = float(np.linalg.norm(tau))
        second_trace = 0.0
        for At in self._tgt_h():
            for be in self._src_h():
                second_trace += self.fAB_values[At, be] * sum(
                    self.fAB2[At, ga, ga, be] for ga in self._src_h())
        harmonic = tau_norm < harmonic_tol
        rhs = grad2 + ric_term - curv_term
        if not harmonic:
            rhs += second_trace
        detail = {
            "tension_norm": tau_norm, "form": "harmonic" if harmonic else "general",
            "grad2": grad2, "ric_term": ric_term, "curv_term": curv_term,
            "curv_form_difference": abs(curv_term - curv_index_form),
            "second_trace": second_trace,
        }
        if variant == "riemannian":
            return {"lhs": lhs, "rhs": rhs, "residual": abs(lhs - rhs), **detail}
        if variant != "kahler":
            raise ValueError(f"unknown Bochner variant {variant!r}")
        if src.J is None or tgt.J is None:
            raise NotKahler("both charts need a complex structure")
        a1, a2 = self._complex_components()
        ric_c = complex_transverse_ricci(src, self.point, self.order)["ric"]
        Rc_t = complex_curvature(tgt, self.image, self.order)
        grad2_c = float(np.sum(np.abs(a2) ** 2))
        ric_term_c = float(np.real(np.einsum("tb,tg,bg->", a1.conj(), a1, ric_c)))
        curv_term_c = float(np.real(np.einsum(
            "abcd,ax,bx,cy,dy->", Rc_t, a1, a1.conj(), a1, a1.conj())))
        rhs_c = grad2_c + ric_term_c - curv_term_c
        lhs_c = 0.5 * lhs
        detail.update({
            "grad2_complex": grad2_c, "ric_term_complex": ric_term_c,
            "curv_term_complex": curv_term_c,
            # the (1,0)-frame second fundamental form carries half the real
            # squared norm for transversally holomorphic maps
            "dictionary_residual": abs(grad2_c - 0.5 * grad2),
        })
        return {"lhs": lhs_c, "rhs": rhs_c, "residual": abs(lhs_c - rhs_c),
                **detail}

    def _complex_components(self):
        """(1,0)-frame components of df and of its covariant derivative."""
        src, tgt = self.fmap.source, self.fmap.target
        N = unitary_frame(src, self.point, self.order)
        Nt = unitary_frame(tgt, self.image, self.order)
        fh = self.fAB_values[tgt.p:, src.p:].astype(complex)
        a1 = Nt.conj().T @ fh @ N
        f1h = self.fAB1_values[tgt.p:, src.p:, src.p:].astype(complex)
        a2 = np.einsum("TA,TBC,Bb,Cc->Abc", Nt.conj(), f1h, N, N)
        return a1, a2

    def holomorphic_residual(self):
        """max |df o J - J~ o df| on horizontal frame vectors."""
        src, tgt = self.fmap.source, self.fmap.target
        if src.J is None or tgt.J is None:
            raise NotKahler("both charts need a complex structure")
        J = j_values(src, self.point)
        Jt = j_values(tgt, self.image)
        fh = self.fAB_values[tgt.p:, src.p:]
        return float(np.max(np.abs(fh @ J - Jt @ fh)))


def map_jet(fmap, point, order=3):
    key = (tuple(float(v) for v in point), order)
    hit = fmap._cache.get(key)
    if hit is None:
        hit = MapJet(fmap, point, order)
        fmap._cache[key] = hit
    return hit


# ---- sampled reports ----------------------------------------------------------


def check_foliated(fmap, points, order=3):
    return {"residual": max(map_jet(fmap, p, order).foliated_residual()
                            for p in points)}


def check_harmonic(fmap, points, convention="bott", order=3):
    worst = 0.0
    for p in points:
        worst = max(worst, float(np.linalg.norm(
            map_jet(fmap, p, order).tension(convention))))
    return {"residual": worst}


def check_holomorphic(fmap, points, order=3):
    return {"residual": max(map_jet(fmap, p, order).holomorphic_residual()
                            for p in points)}


def check_structure(fmap, points, order=3):
    out = {"foliated": 0.0, "symmetry": 0.0, "mixed": 0.0}
    for p in points:
        mj = map_jet(fmap, p, order)
        s = mj.structure_residuals()
        out["foliated"] = max(out["foliated"], mj.foliated_residual())
        out["symmetry"] = max(out["symmetry"], s["symmetry"])
        out["mixed"] = max(out["mixed"], s["mixed"])
    return out


def commutation_residual(fmap, point, order=3):
    """Antisymmetrized second covariant derivative against its curvature
    expression, on horizontal slots of a foliated map."""
    from .curvature import bott_curvature_op

    mj = map_jet(fmap, point, order)
    src, tgt = fmap.source, fmap.target
    op_s = bott_curvature_op(src, point, order)
    op_t = bott_curvature_op(tgt, mj.image, order)
    f = mj.fAB_values
    worst = 0.0
    for At in range(tgt.p, tgt.m):
        for be in range(src.p, src.m):
            for ga in range(src.p, src.m):
                for de in range(src.p, src.m):
                    lhs = mj.fAB2[At, be, ga, de] - mj.fAB2[At, be, de, ga]
                    rhs = sum(f[At, sg] * op_s[ga, de, be, sg]
                              for sg in range(src.p, src.m))
                    for Bt in range(tgt.p, tgt.m):
                        for Ct in range(tgt.p, tgt.m):
                            for Dt in range(tgt.p, tgt.m):
                                rhs -= (f[Bt, be] * f[Ct, de] * f[Dt, ga]
                                        * op_t[Dt, Ct, Bt, At])
                    worst = max(worst, abs(lhs - rhs))
    return worst


def chain_rule_residual(first, second, composite, point, order=3):
    """d(second o first) against the product of the two differentials."""
    mj_f = map_jet(first, point, order)
    mj_g = map_jet(second, mj_f.image, order)
    mj_c = map_jet(composite, point, order)
    prod = mj_g.fAB_values @ mj_f.fAB_values
    return float(np.max(np.abs(mj_c.fAB_values - prod)))
