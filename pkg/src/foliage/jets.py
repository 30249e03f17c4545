"""Truncated multivariate Taylor jets.

A ``Jet`` stores the Taylor coefficients (partial derivative divided by the
multi-index factorial) of a scalar field at a point, densely over all
multi-indices of total degree <= ``order``, in graded lexicographic order.
Composition with elementary functions is exact to the stored order, so every
derivative the geometry engine consumes comes from one code path.  A central
finite-difference oracle (`fd_derivative`) is provided for cross-checking.

Jets are immutable values and all operations are pure.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import DomainError

MAX_ORDER = 4


def _graded_multi_indices(dim, order):
    out = []
    for total in range(order + 1):
        level = []

        def rec(prefix, remaining, slots):
            if slots == 1:
                level.append(tuple(prefix) + (remaining,))
                return
            for k in range(remaining, -1, -1):
                rec(prefix + [k], remaining - k, slots - 1)

        # lexicographic within a degree level: largest first component first
        rec([], total, dim)
        level.sort(reverse=True)
        out.extend(level)
    return tuple(out)


class JetSpace:
    """Shared tables for all jets of a fixed (dim, order)."""

    def __init__(self, dim, order):
        if dim < 1:
            raise ValueError(f"jet dimension must be positive, got {dim}")
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"jet order must lie in [0, {MAX_ORDER}], got {order}")
        self.dim = dim
        self.order = order
        self.mindex = _graded_multi_indices(dim, order)
        self.size = len(self.mindex)
        self.position = {mi: k for k, mi in enumerate(self.mindex)}
        # sizes of the degree-(<= k) prefixes, used by truncate()
        self.prefix = [0] * (order + 1)
        for mi in self.mindex:
            d = sum(mi)
            for k in range(d, order + 1):
                self.prefix[k] += 1
        # multiplication table: coeffs[io] += a[ia] * b[ib]
        ia, ib, io = [], [], []
        for pa, a in enumerate(self.mindex):
            da = sum(a)
            for pb, b in enumerate(self.mindex):
                if da + sum(b) > order:
                    continue
                ia.append(pa)
                ib.append(pb)
                io.append(self.position[tuple(x + y for x, y in zip(a, b))])
        self._mul_a = np.asarray(ia, dtype=np.intp)
        self._mul_b = np.asarray(ib, dtype=np.intp)
        self._mul_o = np.asarray(io, dtype=np.intp)
        # long-division schedule: for output slot t, the (quotient, divisor)
        # coefficient pairs with divisor degree >= 1 that feed slot t
        terms = [([], []) for _ in range(self.size)]
        for pa, pb, po in zip(ia, ib, io):
            if pb != 0:
                terms[po][0].append(pa)
                terms[po][1].append(pb)
        self._div_terms = [(np.asarray(a, dtype=np.intp), np.asarray(b, dtype=np.intp))
                           for a, b in terms]
        # partial-derivative tables, one per axis, mapping into order-1 space
        self._partial = []
        if order >= 1:
            lower = _graded_multi_indices(dim, order - 1)
            for axis in range(dim):
                src, scale = [], []
                for mi in lower:
                    up = list(mi)
                    up[axis] += 1
                    src.append(self.position[tuple(up)])
                    scale.append(float(mi[axis] + 1))
                self._partial.append((np.asarray(src, dtype=np.intp),
                                      np.asarray(scale)))
        # factorials for raw-partial accessors
        self._factorial = np.asarray(
            [math.prod(math.factorial(k) for k in mi) for mi in self.mindex])

    def __repr__(self):
        return f"JetSpace(dim={self.dim}, order={self.order})"


@lru_cache(maxsize=None)
def jet_space(dim, order):
    return JetSpace(dim, order)


class Jet:
    """One truncated Taylor expansion.  Coefficients are derivative/factorial."""

    __slots__ = ("space", "coeffs")

    def __init__(self, space, coeffs):
        self.space = space
        self.coeffs = coeffs

    # ---- construction -----------------------------------------------------

    @staticmethod
    def constant(value, dim, order):
        sp = jet_space(dim, order)
        c = np.zeros(sp.size)
        c[0] = float(value)
        return Jet(sp, c)

    @staticmethod
    def variable(index, point, dim, order):
        if not 0 <= index < dim:
            raise IndexError(f"coordinate index {index} out of range for dim {dim}")
        sp = jet_space(dim, order)
        c = np.zeros(sp.size)
        c[0] = float(point[index])
        if order >= 1:
            unit = tuple(1 if k == index else 0 for k in range(dim))
            c[sp.position[unit]] = 1.0
        return Jet(sp, c)

    # ---- basic accessors --------------------------------------------------

    @property
    def dim(self):
        return self.space.dim

    @property
    def order(self):
        return self.space.order

    @property
    def value(self):
        return float(self.coeffs[0])

    def coefficient(self, mindex):
        """Taylor coefficient (derivative / factorial) at a multi-index."""
        return float(self.coeffs[self.space.position[tuple(mindex)]])

    def derivative(self, mindex):
        """Raw mixed partial derivative at a multi-index."""
        pos = self.space.position[tuple(mindex)]
        return float(self.coeffs[pos] * self.space._factorial[pos])

    def coefficients(self):
        return {mi: float(c) for mi, c in zip(self.space.mindex, self.coeffs)}

    def truncate(self, order):
        if order == self.order:
            return self
        if order > self.order:
            raise ValueError(f"cannot extend a jet of order {self.order} to {order}")
        sp = jet_space(self.dim, order)
        return Jet(sp, self.coeffs[: self.space.prefix[order]].copy())

    def partial(self, axis):
        """Partial derivative along one coordinate, as a jet of order-1."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        src, scale = self.space._partial[axis]
        return Jet(jet_space(self.dim, self.order - 1), self.coeffs[src] * scale)

    # ---- ring operations --------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.space is not self.space:
                raise ValueError(
                    f"jet mismatch: {self.space} vs {other.space}; "
                    "arithmetic requires equal dim and order")
            return other
        if isinstance(other, (int, float)):
            return Jet.constant(other, self.dim, self.order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Jet(self.space, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Jet(self.space, self.coeffs - other.coeffs)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Jet(self.space, other.coeffs - self.coeffs)

    def __neg__(self):
        return Jet(self.space, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Jet(self.space, self.coeffs * float(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        sp = self.space
        out = np.zeros(sp.size)
        np.add.at(out, sp._mul_o, self.coeffs[sp._mul_a] * other.coeffs[sp._mul_b])
        return Jet(sp, out)

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return Jet(self.space, self.coeffs * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            if other == 0.0:
                raise DomainError("division by zero")
            return Jet(self.space, self.coeffs / float(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return _divide(self, other)

    def __rtruediv__(self, other):
        if isinstance(other, (int, float)):
            return _divide(Jet.constant(other, self.dim, self.order), self)
        return NotImplemented

    def __repr__(self):
        return f"Jet(dim={self.dim}, order={self.order}, value={self.value!r})"

    # ---- composition with one-variable functions --------------------------

    def _compose(self, table):
        """Horner evaluation of sum_k table[k] * (self - value)^k."""
        du = Jet(self.space, self.coeffs.copy())
        du.coeffs[0] = 0.0
        out = Jet.constant(table[-1], self.dim, self.order)
        for k in range(len(table) - 2, -1, -1):
            out = out * du + table[k]
        return out

    def reciprocal(self):
        return _divide(Jet.constant(1.0, self.dim, self.order), self)

    def exp(self):
        e = math.exp(self.value)
        return self._compose([e / math.factorial(k) for k in range(self.order + 1)])

    def log(self):
        v = self.value
        if v <= 0.0:
            raise DomainError(f"log of nonpositive value {v}")
        table = [math.log(v)]
        for k in range(1, self.order + 1):
            table.append((-1.0) ** (k - 1) / (k * _powi(v, k)))
        return self._compose(table)

    def sqrt(self):
        v = self.value
        if v <= 0.0:
            raise DomainError(f"sqrt of nonpositive value {v}")
        return self._pow_real(0.5)

    def sin(self):
        s, c = math.sin(self.value), math.cos(self.value)
        cycle = [s, c, -s, -c]
        return self._compose([cycle[k % 4] / math.factorial(k)
                              for k in range(self.order + 1)])

    def cos(self):
        s, c = math.sin(self.value), math.cos(self.value)
        cycle = [c, -s, -c, s]
        return self._compose([cycle[k % 4] / math.factorial(k)
                              for k in range(self.order + 1)])

    def tanh(self):
        # derivative recurrence: (tanh)' = 1 - tanh^2
        y0 = math.tanh(self.value)
        y1 = 1.0 - y0 * y0
        y2 = -2.0 * y0 * y1
        y3 = -2.0 * (y1 * y1 + y0 * y2)
        y4 = -2.0 * (3.0 * y1 * y2 + y0 * y3)
        ds = [y0, y1, y2, y3, y4]
        return self._compose([ds[k] / math.factorial(k)
                              for k in range(self.order + 1)])

    def arccosh(self):
        u = self.value
        if u <= 1.0:
            raise DomainError(f"arccosh argument {u} not above 1")
        w = u * u - 1.0
        d0 = math.acosh(u)
        d1 = w ** -0.5
        d2 = -u * w ** -1.5
        d3 = (2.0 * u * u + 1.0) * w ** -2.5
        d4 = -(6.0 * u ** 3 + 9.0 * u) * w ** -3.5
        ds = [d0, d1, d2, d3, d4]
        return self._compose([ds[k] / math.factorial(k)
                              for k in range(self.order + 1)])

    def absolute(self):
        v = self.value
        if v == 0.0:
            raise DomainError("abs is not differentiable at 0")
        return self if v > 0.0 else -self

    def _pow_real(self, s):
        v = self.value
        if v <= 0.0:
            raise DomainError(f"nonpositive base {v} with non-integer exponent {s}")
        table, binom = [], 1.0
        for k in range(self.order + 1):
            table.append(binom * v ** (s - k))
            binom *= (s - k) / (k + 1)
        return self._compose(table)

    def pow(self, exponent):
        if isinstance(exponent, float) and exponent.is_integer():
            exponent = int(exponent)
        if isinstance(exponent, int):
            if exponent < 0:
                return self.pow(-exponent).reciprocal()
            result = Jet.constant(1.0, self.dim, self.order)
            base, n = self, exponent
            while n:
                if n & 1:
                    result = result * base
                base, n = (base * base, n >> 1) if n > 1 else (base, 0)
            return result
        return self._pow_real(float(exponent))

    __pow__ = pow


def _divide(num, den):
    """Power-series long division.  Each coefficient ends with one division by
    the divisor's value, so the order-0 case is exactly float division."""
    b0 = den.value
    if b0 == 0.0:
        raise DomainError("division by zero at base point")
    sp = num.space
    a, b = num.coeffs, den.coeffs
    c = np.zeros(sp.size)
    for t in range(sp.size):
        s = a[t]
        qa, qb = sp._div_terms[t]
        if len(qa):
            s = s - np.dot(c[qa], b[qb])
        c[t] = s / b0
    return Jet(sp, c)


def _powi(value, n):
    """Square-and-multiply integer power; shared with the scalar evaluator so
    order-0 jet evaluation is bit-identical to plain float evaluation."""
    if n < 0:
        return 1.0 / _powi(value, -n)
    result, base = 1.0, value
    while n:
        if n & 1:
            result = result * base
        base, n = (base * base, n >> 1) if n > 1 else (base, 0)
    return result


def jet_variable(index, point, dim, order):
    """Jet of the coordinate function x_index at a point."""
    return Jet.variable(index, point, dim, order)


def jet_constant(value, dim, order):
    return Jet.constant(value, dim, order)


_UNARY = {
    "exp": Jet.exp,
    "log": Jet.log,
    "sin": Jet.sin,
    "cos": Jet.cos,
    "sqrt": Jet.sqrt,
    "tanh": Jet.tanh,
    "arccosh": Jet.arccosh,
    "abs": Jet.absolute,
}


def jet_apply(fn, *args):
    """Apply an elementary-function tag to jet arguments.

    Binary tags: add, sub, mul, div.  pow takes (jet, constant exponent).
    Unary tags: exp, log, sin, cos, sqrt, tanh, arccosh, abs.
    """
    if fn == "add":
        return args[0] + args[1]
    if fn == "sub":
        return args[0] - args[1]
    if fn == "mul":
        return args[0] * args[1]
    if fn == "div":
        return args[0] / args[1]
    if fn == "pow":
        return args[0].pow(args[1])
    if fn in _UNARY:
        return _UNARY[fn](args[0])
    raise ValueError(f"unknown elementary function tag {fn!r}")


_FD_STEP = {0: 0.0, 1: 1e-5, 2: 1e-4, 3: 2e-3}


def fd_derivative(field, point, multi_index, step=None):
    """Central finite-difference mixed partial of a scalar field.

    ``field`` is a callable point -> float (expression source and parsed
    expressions are accepted too).  Total degree of ``multi_index`` must be
    at most 3; the default step is chosen per degree.
    """
    fn = _as_callable(field)
    mi = tuple(int(k) for k in multi_index)
    degree = sum(mi)
    if degree > 3:
        raise ValueError(f"finite differences support degree <= 3, got {degree}")
    if step is None:
        step = _FD_STEP[degree]
    elif step <= 0:
        raise ValueError("finite-difference step must be positive")
    point = tuple(float(x) for x in point)

    def rec(pt, rest):
        for axis, k in enumerate(rest):
            if k > 0:
                lower = rest[:axis] + (k - 1,) + rest[axis + 1:]
                up = pt[:axis] + (pt[axis] + step,) + pt[axis + 1:]
                dn = pt[:axis] + (pt[axis] - step,) + pt[axis + 1:]
                return (rec(up, lower) - rec(dn, lower)) / (2.0 * step)
        return fn(pt)

    return rec(point, mi)


def _as_callable(field):
    if callable(field):
        return field
    from .expr import parse, eval_real, Expr

    if isinstance(field, str):
        field = parse(field)
    if isinstance(field, Expr):
        tree = field

        def fn(pt, _tree=tree):
            names = _expr_var_names(_tree)
            return eval_real(_tree, dict(zip(names, pt)))

        return fn
    raise TypeError(f"cannot evaluate field of type {type(field)!r}")


def _expr_var_names(tree):
    from .expr import variables

    return sorted(variables(tree))
