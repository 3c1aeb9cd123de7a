"""Vertex weight families: basic, conjugated, stochastic, fused (general J),
the q-deformed Beta-binomial law, six-vertex reduction, and the two-vertex
Yang-Baxter check.

Vertex patterns are (i1, j1; i2, j2) with i = vertical arrow counts
(incoming below / outgoing above) and j = horizontal counts (incoming left /
outgoing right).  Every weight vanishes unless i1 + j1 = i2 + j2.
"""

import math
from fractions import Fraction

from .numerics import INF, exact_div, q_binomial, q_hyp_4phi3_bar, q_pochhammer


class SingularWeightError(ZeroDivisionError):
    pass


def _check_denominator(d):
    if d == 0:
        raise SingularWeightError("vanishing weight denominator")
    return d


def w_weight(i1, j1, i2, j2, u, s, q):
    """The four-branch basic vertex weight table; w(0,0;0,0) = 1."""
    if j1 not in (0, 1) or j2 not in (0, 1):
        return 0
    if i1 < 0 or i2 < 0 or i1 + j1 != i2 + j2:
        return 0
    den = _check_denominator(1 - s * u)
    if j1 == 0 and j2 == 0:
        g = i1
        return (1 - s * q**g * u) / den
    if j1 == 0 and j2 == 1:
        g = i2  # pattern (g+1, 0; g, 1)
        return (1 - s * s * q**g) * u / den
    if j1 == 1 and j2 == 1:
        g = i1
        return (u - s * q**g) / den
    # j1 == 1, j2 == 0: pattern (g, 1; g+1, 0)
    g = i1
    return (1 - q ** (g + 1)) / den


def _conj_factor(i1, i2, s, q):
    return exact_div(q_pochhammer(s * s, q, i2) * q_pochhammer(q, q, i1),
                     q_pochhammer(q, q, i2) * q_pochhammer(s * s, q, i1))


def w_conj_weight(i1, j1, i2, j2, u, s, q):
    """Conjugated weights: (s^2;q)_{i2}(q;q)_{i1}/((q;q)_{i2}(s^2;q)_{i1}) w."""
    w = w_weight(i1, j1, i2, j2, u, s, q)
    if w == 0:
        return w
    return _conj_factor(i1, i2, s, q) * w


def L_weight(i1, j1, i2, j2, u, s, q):
    """Stochastic weights L = (-s)^{j2} w^c; rows sum to one.

    i1 = i2 = INF is accepted (the infinite-stack limit): the outcome then
    depends only on j2, with P(j2=1) = -su/(1-su).
    """
    if i1 is INF or (isinstance(i1, float) and math.isinf(i1)):
        if not (i2 is INF or (isinstance(i2, float) and math.isinf(i2))):
            return 0
        if j1 not in (0, 1) or j2 not in (0, 1):
            return 0
        den = _check_denominator(1 - s * u)
        return (-s * u) / den if j2 == 1 else 1 / den
    w = w_conj_weight(i1, j1, i2, j2, u, s, q)
    if w == 0:
        return w
    return (-s) ** j2 * w


def L_row_distribution(i1, j1, u, s, q):
    """All nonzero outcomes [(i2, j2, probability)] for the input (i1, j1)."""
    out = []
    for j2 in (0, 1):
        i2 = i1 + j1 - j2
        if i2 < 0:
            continue
        p = L_weight(i1, j1, i2, j2, u, s, q)
        if p != 0:
            out.append((i2, j2, p))
    return out


def LJ_weight(i1, j1, i2, j2, u, s, q, qJ):
    """Fused stochastic weights L^{(J)} in closed hypergeometric form.

    qJ plays the role of q^J and may be any scalar (analytic continuation).
    Evaluated cancellation-free: the only q^J-dependent Pochhammer that could
    vanish for integral J sits in a signed-index factor handled by
    q_pochhammer's negative branch.
    """
    if i1 < 0 or i2 < 0 or j1 < 0 or j2 < 0 or i1 + j1 != i2 + j2:
        return 0
    exponent = i1 * (i1 + 2 * j1 - 1)
    assert exponent % 2 == 0
    pref = ((-1) ** i1 * q ** (exponent // 2) * u**i1
            * s ** (j1 + j2 - i2)
            * q_pochhammer(u / s, q, j2 - i1))
    den = (q_pochhammer(q, q, i2)
           * q_pochhammer(s * u, q, i2 + j2)
           * q_pochhammer(qJ * q ** (1 - j1), q, j1 - j2))
    _check_denominator(den)
    hyp = q_hyp_4phi3_bar(
        i2,
        (q ** (-i1) if i1 else 1, s * u * qJ, q * s / u),
        (s * s, q ** (1 + j2 - i1), qJ * q ** (1 - i2 - j2)),
        q, q)
    return exact_div(pref, den) * hyp


def LJ_simplified(i1, j1, i2, j2, s, q, J):
    """Product form of L^{(J)} at u = s (parallel-update degeneration)."""
    if i1 + j1 != i2 + j2 or j2 > i1:
        return 0
    s2 = s * s
    return ((s2 * q**J) ** j2 * q_pochhammer(q ** (-J), q, j2)
            * q_pochhammer(s2 * q**J, q, i1 - j2) / q_pochhammer(s2, q, i1)
            * q_binomial(i1, j2, q))


def LJ_recursive(i1, j1, i2, j2, u, s, q, J):
    """Recursion in J for the fused weights; the independent fusion oracle.

    One L-row at spectral parameter u is split off; the remaining J-1 rows
    carry qu.  The incoming j1 arrows are distributed q-exchangeably, giving
    P(first row carries an arrow) = (1 - q^{j1})/(1 - q^J).
    """
    if J < 1 or int(J) != J:
        raise ValueError("J must be a positive integer")
    if i1 < 0 or i2 < 0 or j1 < 0 or j2 < 0 or i1 + j1 != i2 + j2:
        return 0
    if j1 > J or j2 > J:
        return 0
    if J == 1:
        return L_weight(i1, j1, i2, j2, u, s, q)
    den = 1 - q**J
    total = 0
    for a in (0, 1):
        if a > j1:
            continue
        p = (1 - q**j1) / den if a == 1 else (q**j1 - q**J) / den
        if p == 0:
            continue
        for b in (0, 1):
            l = i1 + a - b
            if l < 0 or j2 - b < 0:
                continue
            first = L_weight(i1, a, l, b, u, s, q)
            if first == 0:
                continue
            rest = LJ_recursive(l, j1 - a, i2, j2 - b, q * u, s, q, J - 1)
            total = total + p * first * rest
    return total


def WJ_weight(i1, j1, i2, j2, u, s, q, qJ):
    """General-J version of the basic weights: inverse conjugation of L^{(J)}."""
    lj = LJ_weight(i1, j1, i2, j2, u, s, q, qJ)
    if lj == 0:
        return lj
    factor = exact_div(q_pochhammer(q, q, i2) * q_pochhammer(s * s, q, i1),
                       q_pochhammer(s * s, q, i2) * q_pochhammer(q, q, i1))
    return (-s) ** (-j2) * factor * lj


def phi_weight(j, m, q, mu, nu):
    """q-deformed Beta-binomial law phi_{q,mu,nu}(j | m); sums to 1 over j.

    m may be INF (then float scalars and |q| < 1 are required):
    phi(j | inf) = mu^j (nu/mu;q)_j/(q;q)_j * (mu;q)_inf/(nu;q)_inf.
    """
    if j < 0:
        return 0
    if m is INF or (isinstance(m, float) and math.isinf(m)):
        return (mu**j * q_pochhammer(nu / mu, q, j) / q_pochhammer(q, q, j)
                * q_pochhammer(mu, q, INF) / q_pochhammer(nu, q, INF))
    if j > m:
        return 0
    den = q_pochhammer(nu, q, m)
    _check_denominator(den)
    return exact_div(mu**j * q_pochhammer(nu / mu, q, j)
                     * q_pochhammer(mu, q, m - j), den) * q_binomial(m, j, q)


def six_vertex_params(u, q):
    """(b1, b2) of the six-vertex reduction s = q^{-1/2}.

    b1 = L(1,0;1,0), b2 = L(0,1;0,1).  Warns (returns anyway) outside the
    nonnegativity regimes 0<q<1, u >= q^{-1/2} or q>1, 0 <= u <= q^{-1/2}.
    """
    import warnings

    rq = math.sqrt(q)
    ok = (0 < q < 1 and u >= 1 / rq) or (q > 1 and 0 <= u <= 1 / rq)
    if not ok:
        warnings.warn("six-vertex parameters outside the nonnegative regime")
    b1 = (1 - u * rq) / (1 - u / rq)
    b2 = (-u / rq + 1 / q) / (1 - u / rq)
    return b1, b2


def six_vertex_solve(b1, b2):
    """Invert (b1, b2) -> (q, u): q = b1/b2, u = sqrt(q)(1-b1)/(q-b1)."""
    q = b1 / b2
    u = math.sqrt(q) * (1 - b1) / (q - b1)
    return q, u


_PAIR_ORDER = ((0, 0), (0, 1), (1, 0), (1, 1))


def two_vertex_matrix(m, n, u1, u2, s, q):
    """4x4 matrix of two stacked vertices sharing a vertical edge.

    Entry [(k1,k2), (k1p,k2p)] = sum_l w_{u1}(m,k1;l,k1p) w_{u2}(l,k2;n,k2p);
    arrow preservation leaves at most one l.  Row/column order:
    (0,0),(0,1),(1,0),(1,1).
    """
    mat = [[0] * 4 for _ in range(4)]
    for r, (k1, k2) in enumerate(_PAIR_ORDER):
        for c, (k1p, k2p) in enumerate(_PAIR_ORDER):
            l = m + k1 - k1p
            if l < 0 or l + k2 != n + k2p:
                continue
            mat[r][c] = (w_weight(m, k1, l, k1p, u1, s, q)
                         * w_weight(l, k2, n, k2p, u2, s, q))
    return mat


def _yb_conjugator(u1, u2, q):
    return [
        [u1 - q * u2, 0, 0, 0],
        [0, q * (u1 - u2), (1 - q) * u1, 0],
        [0, (1 - q) * u2, u1 - u2, 0],
        [0, 0, 0, u1 - q * u2],
    ]


def _mat_mul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(4)) for j in range(4)]
            for i in range(4)]


def yang_baxter_check(m, n, u1, u2, s, q):
    """Max entrywise residual of w~^{(m,n)}_{u2,u1} X = X w^{(m,n)}_{u1,u2}.

    w~ swaps the roles of the two horizontal lines: w~(k1,k2;k1',k2') =
    w^{(m,n)}(k2,k1;k2',k1').  Exact zero is expected in rational mode.
    """
    if u1 == u2 or u1 == q * u2:
        raise SingularWeightError("conjugating matrix X is singular")
    W = two_vertex_matrix(m, n, u1, u2, s, q)
    Wsw = two_vertex_matrix(m, n, u2, u1, s, q)
    perm = [0, 2, 1, 3]  # swap (0,1) <-> (1,0)
    Wt = [[Wsw[perm[i]][perm[j]] for j in range(4)] for i in range(4)]
    X = _yb_conjugator(u1, u2, q)
    lhs = _mat_mul(Wt, X)
    rhs = _mat_mul(X, W)
    return max(abs(lhs[i][j] - rhs[i][j]) for i in range(4) for j in range(4))
