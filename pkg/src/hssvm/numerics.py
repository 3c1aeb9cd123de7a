"""Scalar fields, q-series primitives, and circular-contour quadrature.

Everything here is generic over the scalar type: exact rationals
(``fractions.Fraction``), floats, complex numbers, and numpy arrays all work,
because only field arithmetic (+, -, *, /, integer **) is used.
"""

import math
from fractions import Fraction

import numpy as np

INF = math.inf


def exact_div(a, b):
    """Division that keeps int/int exact (Fraction) instead of float."""
    if isinstance(a, int) and isinstance(b, int):
        return Fraction(a, b)
    return a / b


class ScalarField:
    """A pluggable coefficient field.

    mode is one of 'exact-rational', 'real64', 'complex64'.  The field object
    only coerces values and exposes constants; all algebra downstream is done
    with the native Python / numpy operators, which satisfy the field axioms
    exactly for Fraction and approximately for the float modes.
    """

    MODES = ("exact-rational", "real64", "complex64")

    def __init__(self, mode="exact-rational"):
        if mode not in self.MODES:
            raise ValueError("unknown scalar field mode: %r" % (mode,))
        self.mode = mode

    @property
    def exact(self):
        return self.mode == "exact-rational"

    def coerce(self, x):
        if self.mode == "exact-rational":
            if isinstance(x, Fraction):
                return x
            if isinstance(x, int):
                return Fraction(x)
            if isinstance(x, float):
                return Fraction(x).limit_denominator(10**12)
            raise TypeError("cannot coerce %r to exact rational" % (x,))
        if self.mode == "real64":
            return float(x)
        return complex(x)

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)


EXACT = ScalarField("exact-rational")
REAL = ScalarField("real64")
COMPLEX = ScalarField("complex64")


def is_exact(x):
    """True when x participates in exact rational arithmetic."""
    return isinstance(x, (int, Fraction))


def q_pochhammer(z, q, n):
    """(z; q)_n for n a (signed) integer or math.inf.

    n >= 0: prod_{k=0}^{n-1} (1 - z q^k); n = 0 gives 1.
    n = -m < 0: prod_{k=0}^{m-1} 1/(1 - z q^{n+k}).
    n = inf: requires |q| < 1 and float scalars; multiplicative accumulation
    until the relative increment drops below 1e-16.
    """
    if n is INF or (isinstance(n, float) and math.isinf(n)):
        if is_exact(z) and is_exact(q):
            raise ValueError("(z;q)_infinity is not available in exact mode")
        if abs(q) >= 1:
            raise ValueError("(z;q)_infinity needs |q| < 1")
        result = 1.0 * (1 - z)
        zq = z * q
        while abs(zq) > 1e-16:
            result = result * (1 - zq)
            zq = zq * q
        return result
    n = int(n)
    if n >= 0:
        result = 1
        zq = z
        for _ in range(n):
            result = result * (1 - zq)
            zq = zq * q
        return result
    # negative n: (z;q)_{-m} = prod_{k=0}^{m-1} (1 - z q^{-m+k})^{-1}
    m = -n
    result = 1
    for k in range(m):
        factor = 1 - z * q ** (n + k)
        if isinstance(factor, (int, Fraction, float, complex)) and factor == 0:
            raise ZeroDivisionError("vanishing factor in (z;q)_{%d}" % n)
        result = exact_div(result, factor)
    return result


def q_binomial(n, k, q):
    """Gaussian binomial [n choose k]_q, cancellation-free.

    Returns 0 when k < 0 or k > n (documented convention).
    """
    if k < 0 or k > n:
        return 0
    k = min(k, n - k)
    result = 1
    for i in range(1, k + 1):
        result = exact_div(result * (1 - q ** (n - k + i)), 1 - q**i)
    return result


def q_hyp_4phi3_bar(n, a, b, q, z):
    """Regularized terminating basic hypergeometric sum.

    Sum_{k=0}^{n} z^k (q^{-n};q)_k / (q;q)_k
        * prod_{i=1}^{3} (a_i;q)_k (b_i q^k;q)_{n-k}.

    The regularization keeps all b-Pochhammers in the numerator, so there are
    no denominator poles for any scalar inputs.
    """
    a1, a2, a3 = a
    b1, b2, b3 = b
    total = 0
    qmn = q ** (-n) if n else 1
    # running products, updated per k
    zk = 1  # z^k
    qmn_poch = 1  # (q^{-n};q)_k
    qq_poch = 1  # (q;q)_k
    a_poch = [1, 1, 1]
    for k in range(n + 1):
        term = exact_div(zk * qmn_poch, qq_poch)
        term = term * a_poch[0] * a_poch[1] * a_poch[2]
        for bi in (b1, b2, b3):
            term = term * q_pochhammer(bi * q**k, q, n - k)
        total = total + term
        if k < n:
            zk = zk * z
            qmn_poch = qmn_poch * (1 - qmn * q**k)
            qq_poch = qq_poch * (1 - q ** (k + 1))
            for i, ai in enumerate((a1, a2, a3)):
                a_poch[i] = a_poch[i] * (1 - ai * q**k)
    return total


class Circle:
    """A circular contour: center, radius > 0, orientation +1/-1."""

    __slots__ = ("center", "radius", "orientation")

    def __init__(self, center, radius, orientation="positive"):
        if radius <= 0:
            raise ValueError("circle radius must be positive")
        if orientation in (1, "positive"):
            orientation = 1
        elif orientation in (-1, "negative"):
            orientation = -1
        else:
            raise ValueError("orientation must be positive or negative")
        self.center = complex(center)
        self.radius = float(radius)
        self.orientation = orientation

    def __repr__(self):
        return "Circle(%r, %r, %+d)" % (self.center, self.radius, self.orientation)

    def contains(self, point):
        return abs(complex(point) - self.center) < self.radius

    def nodes_weights(self, n_points):
        """Quadrature nodes w_k and weights for ∮ dw/(2πi) on this circle.

        Trapezoid rule: w = c + r e^{iθ}, dw/(2πi) -> (r/N) e^{iθ_k}.
        """
        theta = 2.0 * np.pi * np.arange(n_points) / n_points
        e = np.exp(1j * theta)
        nodes = self.center + self.radius * e
        weights = self.orientation * (self.radius / n_points) * e
        return nodes, weights


def _variable_nodes(circles, n_points):
    """Nodes/weights for one integration variable (a circle or a union)."""
    if isinstance(circles, Circle):
        circles = [circles]
    nodes = []
    weights = []
    for c in circles:
        nd, wt = c.nodes_weights(n_points)
        nodes.append(nd)
        weights.append(wt)
    return np.concatenate(nodes), np.concatenate(weights)


# Largest number of grid points evaluated in one vectorized call.
_CHUNK_LIMIT = 1 << 21


def contour_integrate(f, circles, points_per_circle=64):
    """Tensor-product trapezoid quadrature of ∮...∮ dw_1/(2πi)...dw_d/(2πi) f.

    circles: sequence of d entries; each entry is a Circle or a list of
    Circles (union of components for that variable).  f must accept d
    broadcastable numpy arrays and evaluate elementwise.
    """
    if points_per_circle < 16:
        raise ValueError("points_per_circle must be >= 16")
    per_var = [_variable_nodes(c, points_per_circle) for c in circles]
    d = len(per_var)
    if d == 0:
        return complex(f())
    sizes = [len(nd) for nd, _ in per_var]
    total = 1
    for s in sizes:
        total *= s

    def evaluate(nodes_list):
        # nodes_list: full grids for trailing axes; broadcast and sum.
        grids = []
        wprod = 1.0
        for axis, (nd, wt) in enumerate(nodes_list):
            shape = [1] * len(nodes_list)
            shape[axis] = len(nd)
            grids.append(nd.reshape(shape))
            wprod = wprod * wt.reshape(shape)
        vals = f(*grids)
        return np.sum(np.asarray(vals, dtype=complex) * wprod)

    if total <= _CHUNK_LIMIT or d == 1:
        return complex(evaluate(per_var))
    # chunk along the first axis to bound memory
    nd0, wt0 = per_var[0]
    rest = total // sizes[0]
    chunk = max(1, _CHUNK_LIMIT // max(rest, 1))
    acc = 0j
    for start in range(0, sizes[0], chunk):
        sub = [(nd0[start : start + chunk], wt0[start : start + chunk])] + per_var[1:]
        acc += evaluate(sub)
    return complex(acc)
