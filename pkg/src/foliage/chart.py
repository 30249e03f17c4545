"""Foliated charts and adapted orthonormal frames.

A chart carries the metric, the vertical distribution spanning the leaves,
and optionally a transverse complex structure and a closed-form distance
field.  `adapted_frame` runs Gram-Schmidt in jet arithmetic (vertical fields
first, then coordinate fields in index order), so frame derivatives needed by
connection coefficients come from the same differentiation pathway as
everything else.

Frame index convention used throughout the package: slots 0..p-1 are
vertical, slots p..m-1 are horizontal.
"""

from __future__ import annotations

import numpy as np

from . import expr as ex
from .errors import (DegenerateFrame, DependentVerticalFrames, MetricNotSPD,
                     SchemaError)
from .jets import Jet, jet_constant, jet_variable
from .sampling import sample_box

SPD_FLOOR = 1e-10
GS_DISCARD = 1e-10


class FoliatedChart:
    """Immutable chart description with parsed expressions."""

    def __init__(self, name, coords, vertical_rank, metric, vertical,
                 J=None, distance=None, domain=None):
        self.name = name
        self.coords = tuple(coords)
        self.m = len(self.coords)
        self.p = int(vertical_rank)
        self.metric = metric          # m x m nested list of Expr
        self.vertical = vertical      # p vectors, each m Exprs
        self.J = J                    # q x q Exprs or None
        self.distance = distance      # (Expr, basepoint tuple) or None
        self.domain = tuple(tuple(float(v) for v in iv) for iv in domain)
        self._cache = {}

    @property
    def q(self):
        return self.m - self.p

    def vertical_slots(self):
        return range(self.p)

    def horizontal_slots(self):
        return range(self.p, self.m)

    def __repr__(self):
        return f"FoliatedChart({self.name!r}, m={self.m}, p={self.p})"


def _parse_field(text, coords, where):
    try:
        tree = ex.parse(text)
    except Exception as err:
        raise SchemaError(f"{where}: cannot parse {text!r}: {err}") from err
    unknown = ex.variables(tree) - set(coords)
    if unknown:
        raise SchemaError(f"{where}: undeclared variables {sorted(unknown)} "
                          f"in {text!r}")
    return tree


def load_chart(spec, name="chart", probe_seed=42, probe_count=64):
    """Build a chart from its JSON description and probe its invariants."""
    if not isinstance(spec, dict):
        raise SchemaError(f"{name}: chart description must be an object")
    for key in ("dim", "vertical_rank", "coords", "metric", "vertical", "domain"):
        if key not in spec:
            raise SchemaError(f"{name}: missing field {key!r}")
    m = int(spec["dim"])
    p = int(spec["vertical_rank"])
    coords = list(spec["coords"])
    if len(coords) != m or len(set(coords)) != m:
        raise SchemaError(f"{name}: need {m} distinct coordinate names")
    if not 0 <= p <= m:
        raise SchemaError(f"{name}: vertical rank {p} out of range")
    if len(spec["metric"]) != m or any(len(row) != m for row in spec["metric"]):
        raise SchemaError(f"{name}: metric must be {m}x{m}")
    metric = [[_parse_field(spec["metric"][a][b], coords, f"{name}.metric[{a}][{b}]")
               for b in range(m)] for a in range(m)]
    if len(spec["vertical"]) != p:
        raise SchemaError(f"{name}: expected {p} vertical fields")
    vertical = []
    for i, vec in enumerate(spec["vertical"]):
        if len(vec) != m:
            raise SchemaError(f"{name}: vertical[{i}] must have {m} components")
        vertical.append([_parse_field(c, coords, f"{name}.vertical[{i}]")
                         for c in vec])
    J = None
    if spec.get("J") is not None:
        q = m - p
        if q % 2 != 0:
            raise SchemaError(f"{name}: complex structure needs even codimension")
        rows = spec["J"]
        if len(rows) != q or any(len(r) != q for r in rows):
            raise SchemaError(f"{name}: J must be {q}x{q}")
        J = [[_parse_field(rows[a][b], coords, f"{name}.J[{a}][{b}]")
              for b in range(q)] for a in range(q)]
    distance = None
    if spec.get("distance") is not None:
        d = spec["distance"]
        if not isinstance(d, dict) or "expr" not in d or "basepoint" not in d:
            raise SchemaError(f"{name}: distance needs 'expr' and 'basepoint'")
        distance = (_parse_field(d["expr"], coords, f"{name}.distance"),
                    tuple(float(v) for v in d["basepoint"]))
    domain = spec["domain"]
    if len(domain) != m or any(len(iv) != 2 or iv[0] >= iv[1] for iv in domain):
        raise SchemaError(f"{name}: domain must be {m} nonempty intervals")

    chart = FoliatedChart(name, coords, p, metric, vertical, J, distance, domain)
    _probe_chart(chart, probe_seed, probe_count)
    return chart


def _probe_chart(chart, seed, count):
    for point in sample_box(chart.domain, count, seed, f"probe:{chart.name}"):
        env = {c: float(v) for c, v in zip(chart.coords, point)}
        g = np.array([[ex.eval_real(chart.metric[a][b], env)
                       for b in range(chart.m)] for a in range(chart.m)])
        smallest = float(np.linalg.eigvalsh(0.5 * (g + g.T))[0])
        if smallest <= SPD_FLOOR:
            raise MetricNotSPD(point, smallest)
        if chart.p:
            V = np.array([[ex.eval_real(comp, env) for comp in field]
                          for field in chart.vertical])
            sv = np.linalg.svd(V, compute_uv=False)
            if sv[-1] <= 1e-10 * max(1.0, sv[0]):
                raise DependentVerticalFrames(point)
        if chart.J is not None:
            q = chart.q
            Jm = np.array([[ex.eval_real(chart.J[a][b], env) for b in range(q)]
                           for a in range(q)])
            if np.max(np.abs(Jm @ Jm + np.eye(q))) > 1e-9:
                raise SchemaError(f"{chart.name}: J^2 != -I at {tuple(point)}")


class AdaptedFrame:
    """Jet-valued orthonormal frame and coframe near one evaluation point."""

    def __init__(self, point, frame, coframe):
        self.point = point     # tuple of floats (base point of the jets)
        self.frame = frame     # list of m vectors of jets, vertical first
        self.coframe = coframe # list of m covectors of jets


class PointFrame:
    """Everything jet-valued the geometry stack needs at one evaluation point.

    ``env`` maps coordinate names to jets; for a plain chart those are the
    coordinate jets at a point, for a target chart evaluated along a map they
    are the map-component jets.  All derived jets live in the env's jet space.
    """

    def __init__(self, chart, env, order):
        self.chart = chart
        self.order = order
        probe = next(iter(env.values()))
        self.dim = probe.dim          # dimension of the underlying jet space
        self.env = env
        self.point = tuple(env[c].value for c in chart.coords)
        m = chart.m
        self.g = [[ex.eval_jet(chart.metric[a][b], env) for b in range(m)]
                  for a in range(m)]
        self.frame, self.coframe = self._gram_schmidt()
        self._ginv = None

    # ---- small jet-linear-algebra helpers ---------------------------------

    def _zero(self, order=None):
        return jet_constant(0.0, self.dim, self.order if order is None else order)

    def inner(self, u, v, order=None):
        """g(u, v) for coordinate-component jet vectors."""
        g = self.g
        if order is not None:
            g = [[e.truncate(order) for e in row] for row in g]
            u = [c.truncate(order) for c in u]
            v = [c.truncate(order) for c in v]
        acc = self._zero(order)
        for a in range(self.chart.m):
            for b in range(self.chart.m):
                acc = acc + g[a][b] * u[a] * v[b]
        return acc

    def ginv(self):
        """Inverse metric as jets (Gauss-Jordan with value pivoting)."""
        if self._ginv is None:
            m = self.chart.m
            aug = [[self.g[a][b] for b in range(m)] +
                   [jet_constant(1.0 if b == a else 0.0, self.dim, self.order)
                    for b in range(m)] for a in range(m)]
            for col in range(m):
                pivot = max(range(col, m), key=lambda r: abs(aug[r][col].value))
                aug[col], aug[pivot] = aug[pivot], aug[col]
                inv = aug[col][col].reciprocal()
                aug[col] = [e * inv for e in aug[col]]
                for r in range(m):
                    if r != col:
                        f = aug[r][col]
                        aug[r] = [er - f * ec for er, ec in zip(aug[r], aug[col])]
            self._ginv = [row[m:] for row in aug]
        return self._ginv

    def _gram_schmidt(self):
        chart, m = self.chart, self.chart.m
        candidates = []
        for field in chart.vertical:
            candidates.append(("vertical",
                               [ex.eval_jet(c, self.env) for c in field]))
        for a in range(m):
            candidates.append(("coordinate",
                               [jet_constant(1.0 if b == a else 0.0,
                                             self.dim, self.order)
                                for b in range(m)]))
        frame = []
        for kind, vec in candidates:
            if len(frame) == m:
                break
            work = list(vec)
            for e in frame:
                proj = self.inner(work, e)
                work = [w - proj * c for w, c in zip(work, e)]
            norm2 = self.inner(work, work)
            if norm2.value <= GS_DISCARD ** 2:
                if kind == "vertical":
                    raise DegenerateFrame(
                        f"{chart.name}: vertical field degenerate at {self.point}")
                continue
            inv_norm = norm2.sqrt().reciprocal()
            frame.append([w * inv_norm for w in work])
        if len(frame) != m:
            raise DegenerateFrame(
                f"{chart.name}: only {len(frame)} independent directions "
                f"at {self.point}")
        coframe = [[sum((self.g[a][b] * e[b] for b in range(m)),
                        start=self._zero()) for a in range(m)] for e in frame]
        return frame, coframe

    # ---- frame calculus ----------------------------------------------------

    def direction(self, vec, scalar):
        """Directional derivative of a scalar jet along a coordinate-jet vector.

        Drops one jet order; the vector is truncated to match.
        """
        k = scalar.order - 1
        acc = self._zero(k)
        for a in range(self.dim):
            acc = acc + vec[a].truncate(k) * scalar.partial(a)
        return acc

    def frame_direction(self, slot, scalar):
        return self.direction(self.frame[slot], scalar)

    def bracket(self, u, v):
        """Coordinate components of [u, v]; drops one jet order."""
        k = u[0].order - 1
        out = []
        for a in range(self.dim):
            acc = self._zero(k)
            for b in range(self.dim):
                acc = acc + u[b].truncate(k) * v[a].partial(b)
                acc = acc - v[b].truncate(k) * u[a].partial(b)
            out.append(acc)
        return out

    def project_vertical(self, vec, order=None):
        """pi_V of a coordinate-component vector, assembled from the frame."""
        return self._project(vec, self.chart.vertical_slots(), order)

    def project_horizontal(self, vec, order=None):
        return self._project(vec, self.chart.horizontal_slots(), order)

    def _project(self, vec, slots, order):
        k = vec[0].order if order is None else order
        out = [self._zero(k) for _ in range(self.chart.m)]
        for s in slots:
            e = [c.truncate(k) for c in self.frame[s]]
            coef = self.inner(vec, e, order=k)
            for a in range(self.chart.m):
                out[a] = out[a] + coef * e[a]
        return out

    def adapted(self):
        return AdaptedFrame(self.point, self.frame, self.coframe)


def point_env(chart, point, order):
    """Coordinate jets at a point of the chart's own jet space."""
    if len(point) != chart.m:
        raise ValueError(f"{chart.name}: point has {len(point)} coordinates, "
                         f"expected {chart.m}")
    return {c: jet_variable(a, point, chart.m, order)
            for a, c in enumerate(chart.coords)}


def frame_at(chart, point, order):
    """Cached PointFrame of a chart at one of its own points."""
    key = ("frame", tuple(float(v) for v in point), order)
    hit = chart._cache.get(key)
    if hit is None:
        hit = PointFrame(chart, point_env(chart, point, order), order)
        chart._cache[key] = hit
    return hit


def adapted_frame(chart, point, order=3):
    """Public operation: jet-valued adapted orthonormal frame at a point."""
    return frame_at(chart, point, order).adapted()


# ---- residual reports -------------------------------------------------------


def frame_residuals(chart, point, order=3):
    """Orthonormality, coframe duality and vertical-span residuals (values)."""
    pf = frame_at(chart, point, order)
    m = chart.m
    ortho = 0.0
    dual = 0.0
    for A in range(m):
        for B in range(m):
            target = 1.0 if A == B else 0.0
            ortho = max(ortho, abs(pf.inner(pf.frame[A], pf.frame[B]).value - target))
            pairing = sum(pf.coframe[A][a].value * pf.frame[B][a].value
                          for a in range(m))
            dual = max(dual, abs(pairing - target))
    span = 0.0
    for field in chart.vertical:
        vec = [ex.eval_jet(c, pf.env) for c in field]
        hor = pf.project_horizontal(vec)
        span = max(span, abs(pf.inner(hor, hor).value) ** 0.5)
    return {"orthonormality": ortho, "coframe_duality": dual,
            "vertical_span": span}


def projection_residuals(chart, point, order=3):
    """pi_H idempotence and pi_V + pi_H = id, from the assembled projections."""
    pf = frame_at(chart, point, order)
    m = chart.m
    idem = 0.0
    part = 0.0
    for a in range(m):
        basis = [jet_constant(1.0 if b == a else 0.0, pf.dim, order)
                 for b in range(m)]
        h = pf.project_horizontal(basis)
        hh = pf.project_horizontal(h)
        v = pf.project_vertical(basis)
        for b in range(m):
            idem = max(idem, abs(hh[b].value - h[b].value))
            part = max(part, abs(v[b].value + h[b].value - basis[b].value))
    return {"idempotence": idem, "partition": part}


def check_integrability(chart, points, order=3):
    """max |pi_H [V_i, V_j]| over sample points; trivial pass for p <= 1."""
    worst = 0.0
    if chart.p >= 2:
        for point in points:
            pf = frame_at(chart, point, order)
            fields = [[ex.eval_jet(c, pf.env) for c in field]
                      for field in chart.vertical]
            for i in range(chart.p):
                for j in range(i + 1, chart.p):
                    br = pf.bracket(fields[i], fields[j])
                    hor = pf.project_horizontal(br)
                    norm2 = pf.inner(hor, hor, order=hor[0].order).value
                    worst = max(worst, abs(norm2) ** 0.5)
    return {"residual": worst, "trivial": chart.p <= 1}


def check_riemannian(chart, points, order=3):
    """Two independent probes of the bundle-like property.

    (a) antisymmetry of the second O'Neill tensor in its horizontal slots,
    (b) vanishing of the vertical Lie derivative of the horizontal metric.
    """
    from .connection import connection_table  # local import to avoid a cycle

    a_sym = 0.0
    lie = 0.0
    for point in points:
        tab = connection_table(chart, point, order)
        A = tab.oneill_A_values()
        for i in range(chart.p):
            for al in range(chart.q):
                for be in range(chart.q):
                    a_sym = max(a_sym, abs(A[i][al][be] + A[i][be][al]))
        pf = tab.pf
        for i in chart.vertical_slots():
            u = pf.frame[i]
            for aa in chart.horizontal_slots():
                for bb in chart.horizontal_slots():
                    x, y = pf.frame[aa], pf.frame[bb]
                    k = pf.order - 1
                    ux = pf.project_horizontal(pf.bracket(u, x), order=k)
                    uy = pf.project_horizontal(pf.bracket(u, y), order=k)
                    term = pf.direction(u, pf.inner(x, y))
                    term = term - pf.inner(ux, [c.truncate(k) for c in y], order=k)
                    term = term - pf.inner([c.truncate(k) for c in x], uy, order=k)
                    lie = max(lie, abs(term.value))
    return {"oneill_antisymmetry": a_sym, "lie_derivative": lie}
