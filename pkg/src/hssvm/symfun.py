"""Symmetric rational functions attached to the inhomogeneous vertex model.

Two dual families are implemented:

* ``skew_F`` / ``skew_G``: transfer-matrix partition functions over up-right
  path collections in a horizontal strip, one strip row per spectral variable
  (the defining construction; exact in rational arithmetic);
* ``F_symm`` / ``G_symm``: explicit sums over permutations of the variables
  (the symmetrization formulas), which also accept numpy arrays and therefore
  drive the contour quadrature.

Both are kept as independent routes on purpose: agreement between them is one
of the machine checks.  ``bar=True`` everywhere means "evaluate with all
column inhomogeneities xi_x inverted", the convention used for the dual (G)
variables.
"""

import itertools
from fractions import Fraction

from .model import Signature, WindowOverflowError
from .numerics import exact_div, q_pochhammer
from .weights import WJ_weight, w_weight


def _parts(sig):
    return tuple(sig.parts) if isinstance(sig, Signature) else tuple(sig)


def _xi(params, x, bar):
    v = params.xi[x]
    return exact_div(1, v) if bar else v


def _check_window(k, params):
    if k > params.X_max:
        raise WindowOverflowError(
            "column index %d exceeds the working window X_max=%d"
            % (k, params.X_max))


def pow_k(k, u, params, bar=False):
    """Single-variable, single-part building block:

    pow_k(u) = (1-q)/(1 - s_k xi_k u) * prod_{j<k} (xi_j u - s_j)/(1 - s_j xi_j u).

    Equals F_{(k)}(u).  u may be a scalar or a numpy array.
    """
    _check_window(k, params)
    q, s = params.q, params.s
    res = exact_div(1 - q, 1 - s[k] * _xi(params, k, bar) * u)
    for j in range(k):
        xj = _xi(params, j, bar)
        res = res * (xj * u - s[j]) / (1 - s[j] * xj * u)
    return res


def cross_ratio(us, q):
    """prod_{a<b} (u_a - q u_b)/(u_a - u_b); the symmetrization cross term."""
    res = 1
    for a in range(len(us)):
        for b in range(a + 1, len(us)):
            res = res * (us[a] - q * us[b]) / (us[a] - us[b])
    return res


def F_symm(mu, us, params, bar=False):
    """F_mu(u_1..u_M) as the M!-term sum over permuted variables.

    Requires pairwise distinct u's (the cross term has simple poles on the
    diagonals that cancel only in the full sum).
    """
    parts = _parts(mu)
    M = len(parts)
    if len(us) != M:
        raise ValueError("number of variables must equal the signature length")
    q = params.q
    total = 0
    for perm in itertools.permutations(range(M)):
        p = [us[i] for i in perm]
        term = cross_ratio(p, q)
        for i, m in enumerate(parts):
            term = term * pow_k(m, p[i], params, bar)
        total = total + term
    return total


def G_symm(nu, vs, params, bar=False):
    """G_nu(v_1..v_N) by the explicit symmetrization formula.

    n = len(nu) may be smaller than N = len(vs); k is the number of zero
    parts of nu.  Vanishes for N < n - k.
    """
    parts = _parts(nu)
    n = len(parts)
    k = sum(1 for p in parts if p == 0)
    N = len(vs)
    if N < n - k:
        return 0
    q, s0 = params.q, params.s[0]
    xi0 = _xi(params, 0, bar)
    pref = exact_div(
        q_pochhammer(s0 * s0, q, n),
        q_pochhammer(q, q, N - n + k) * q_pochhammer(s0 * s0, q, k))
    padded = parts + (0,) * (N - n)
    total = 0
    for perm in itertools.permutations(range(N)):
        p = [vs[i] for i in perm]
        term = cross_ratio(p, q)
        for j, m in enumerate(padded):
            term = term * pow_k(m, p[j], params, bar)
        for i in range(n - k):
            term = term * xi0 * p[i] / (xi0 * p[i] - s0)
        for j in range(n - k, N):
            term = term * (1 - s0 * q**k * xi0 * p[j])
        total = total + term
    return pref * total


# ---------------------------------------------------------------------------
# Transfer-matrix (path partition function) route
# ---------------------------------------------------------------------------


def _occupancy(parts):
    occ = {}
    for p in parts:
        occ[p] = occ.get(p, 0) + 1
    return occ


def row_amplitude(top, bottom, u, params, enter, bar=False):
    """Weight of the unique one-row path configuration bottom -> top.

    ``enter`` is the number (0 or 1) of paths entering the row from the left
    edge.  Each column x carries the vertex weight w with spectral parameter
    xi_x u and spin parameter s_x; the horizontal flow is determined by arrow
    conservation, and the amplitude is zero unless it stays in {0,1} and
    terminates at 0 past the last occupied column.
    """
    top = _parts(top)
    bottom = _parts(bottom)
    if len(top) != len(bottom) + enter:
        return 0
    occ_t = _occupancy(top)
    occ_b = _occupancy(bottom)
    X = max([p for p in top + bottom] or [-1])
    _check_window(X, params)
    h = enter
    amp = 1
    for x in range(X + 1):
        i1 = occ_b.get(x, 0)
        i2 = occ_t.get(x, 0)
        j2 = i1 + h - i2
        if j2 not in (0, 1):
            return 0
        w = w_weight(i1, h, i2, j2, _xi(params, x, bar) * u, params.s[x],
                     params.q)
        if w == 0:
            return 0
        amp = amp * w
        h = j2
    return amp if h == 0 else 0


def _signatures(length, max_part):
    """All weakly decreasing tuples of the given length with parts <= max_part."""
    if length == 0:
        return [()]
    return [tuple(reversed(c)) for c in
            itertools.combinations_with_replacement(range(max_part + 1), length)]


def _transfer(mu, la, us, params, enter, bar):
    mu = _parts(mu)
    la = _parts(la)
    if len(mu) != len(la) + enter * len(us):
        return 0
    if not us:
        return 1 if mu == la else 0
    cap = mu[0] if mu else 0
    if la and la[0] > cap:
        return 0
    dist = {la: 1}
    for y, u in enumerate(us):
        new = {}
        size = len(la) + enter * (y + 1)
        tops = [mu] if y == len(us) - 1 else _signatures(size, cap)
        for kappa, amp in dist.items():
            for top in tops:
                a = row_amplitude(top, kappa, u, params, enter, bar)
                if a != 0:
                    new[top] = new.get(top, 0) + amp * a
        dist = new
    return dist.get(mu, 0)


def skew_F(la, mu, us, params, bar=False):
    """F_{mu/la}(u_1..u_n): each variable adds one left-entering path."""
    return _transfer(mu, la, us, params, 1, bar)


def skew_G(la, mu, vs, params, bar=False, max_mu1=None):
    """G_{mu/la}(v_1..v_n): path-conserving rows (no left-entering paths)."""
    if max_mu1 is not None:
        mu_parts = _parts(mu)
        if mu_parts and mu_parts[0] > max_mu1:
            raise ValueError("mu exceeds the declared part bound")
    return _transfer(mu, la, vs, params, 0, bar)


# ---------------------------------------------------------------------------
# Conjugation, shifts, principal specializations, degenerate specializations
# ---------------------------------------------------------------------------


def c_conj(nu, params):
    """Multiplicity normalization prod_x (s_x^2;q)_{m_x}/(q;q)_{m_x}."""
    q = params.q
    res = 1
    for x, m in _occupancy(_parts(nu)).items():
        _check_window(x, params)
        sx = params.s[x]
        res = res * exact_div(q_pochhammer(sx * sx, q, m),
                              q_pochhammer(q, q, m))
    return res


def skew_F_conj(la, mu, us, params, bar=False):
    """F^c_{mu/la} = c(mu)/c(la) F_{mu/la}."""
    f = skew_F(la, mu, us, params, bar)
    if f == 0:
        return f
    return exact_div(c_conj(mu, params), c_conj(la, params)) * f


def skew_G_conj(la, mu, vs, params, bar=False):
    """G^c_{mu/la} = c(mu)/c(la) G_{mu/la}."""
    g = skew_G(la, mu, vs, params, bar)
    if g == 0:
        return g
    return exact_div(c_conj(mu, params), c_conj(la, params)) * g


def F_symm_conj(mu, us, params, bar=False):
    """c(mu)/c(empty-profile) times F_symm; the quadrature-side conjugate.

    The reference state has all multiplicities zero, so the ratio is just
    c(mu) itself.
    """
    return c_conj(mu, params) * F_symm(mu, us, params, bar)


def minus_S_pow(nu, params):
    """(-S)^nu = prod_i prod_{j<nu_i} (-s_j)."""
    res = 1
    for p in _parts(nu):
        if p:
            _check_window(p - 1, params)
        for j in range(p):
            res = res * (-params.s[j])
    return res


def F_zero(M, us, params):
    """F at the zero signature 0^M: (q;q)_M / prod_i (1 - s_0 xi_0 u_i)."""
    q = params.q
    res = q_pochhammer(q, q, M)
    for u in us:
        res = exact_div(res, 1 - params.s[0] * params.xi[0] * u)
    return res


def principal_F(mu, u, M, params, bar=False):
    """F_mu(u, qu, ..., q^{M-1}u); only the identity permutation survives."""
    parts = _parts(mu)
    if M != len(parts):
        raise ValueError("M must equal the signature length")
    q = params.q
    res = q_pochhammer(q, q, M)
    for i, m in enumerate(parts):
        res = res * exact_div(pow_k(m, q**i * u, params, bar), 1 - q)
    return res


def principal_G(nu, v, N, params, bar=False):
    """G_nu(v, qv, ..., q^{N-1}v) in closed product form."""
    parts = _parts(nu)
    n = len(parts)
    k = sum(1 for p in parts if p == 0)
    if N < n - k:
        return 0
    q, s0 = params.q, params.s[0]
    xi0 = _xi(params, 0, bar)
    sv = s0 * xi0 * v
    pref = exact_div(q_pochhammer(q, q, N), q_pochhammer(q, q, N - n + k))
    pref = pref * exact_div(q_pochhammer(sv, q, N + k), q_pochhammer(sv, q, n))
    pref = pref * exact_div(q_pochhammer(s0 * s0, q, n),
                            q_pochhammer(s0 * s0, q, k))
    pref = exact_div(pref,
                     q_pochhammer(exact_div(s0, xi0 * v), exact_div(1, q),
                                  n - k))
    padded = parts + (0,) * (N - n)
    for j, m in enumerate(padded):
        pref = pref * exact_div(pow_k(m, q**j * v, params, bar), 1 - q)
    return pref


def rho_G(nu, params):
    """G_nu at the limiting (principal N -> infinity) specialization:

    1_{nu_n >= 1} (-S)^nu (s_0^2;q)_n s_0^{-2n}.
    """
    parts = _parts(nu)
    n = len(parts)
    if n and parts[-1] < 1:
        return 0
    s0 = params.s[0]
    return (minus_S_pow(parts, params) * q_pochhammer(s0 * s0, params.q, n)
            * exact_div(1, (s0 * s0) ** n))


def G_rho_w(nu, ws, params):
    """G_nu at the limiting specialization extended by k extra variables w.

    Closed double sum: G_nu(rho) times
        sum_{l=0}^k q^{-l(2k+1-l)/2 + n(k-l)} (1-q)^{k-l}/(q;q)_{k-l}
        sum_{I = {i_1<...<i_l}} q^{|I|_sum} prod_{i in I} (-S)^{-nu_i}
        sum_{sigma in S_k} sigma( cross(w)
            prod_{p<=l} (1-s_0 xi_0^{-1} w_p)/(1-s_0^{-1} xi_0^{-1} w_p)
                        pow_{nu_{i_p}}(w_p, bar) ).
    """
    parts = _parts(nu)
    n = len(parts)
    k = len(ws)
    if n < k:
        raise ValueError("needs len(nu) >= number of extra variables")
    base = rho_G(parts, params)
    if base == 0:
        return 0
    q, s0 = params.q, params.s[0]
    xi0_inv = _xi(params, 0, True)
    total = 0
    for ell in range(k + 1):
        expo = -ell * (2 * k + 1 - ell)
        assert expo % 2 == 0
        coeff = (q ** (expo // 2 + n * (k - ell)) * (1 - q) ** (k - ell))
        coeff = exact_div(coeff, q_pochhammer(q, q, k - ell))
        for I in itertools.combinations(range(1, n + 1), ell):
            w1 = q ** sum(I)
            for i in I:
                w1 = exact_div(w1, minus_S_pow((parts[i - 1],), params))
            symsum = 0
            for perm in itertools.permutations(range(k)):
                p = [ws[i] for i in perm]
                term = cross_ratio(p, q)
                for pidx, i in enumerate(I):
                    wv = p[pidx]
                    term = term * (1 - s0 * xi0_inv * wv) \
                        / (1 - exact_div(1, s0) * xi0_inv * wv)
                    term = term * pow_k(parts[i - 1], wv, params, bar=True)
                symsum = symsum + term
            total = total + coeff * w1 * symsum
    return base * total


def admissibility_margin(u, v, params):
    """max_x |(xi_x u - s_x)(v/xi_x - s_x) / ((1-s_x xi_x u)(1-s_x v/xi_x))|.

    The pair (u, v) is admissible (Cauchy-type sums converge geometrically)
    when this is < 1; the margin certifies the truncation tail.
    """
    worst = 0
    for x in range(params.X_max + 1):
        xi, s = params.xi[x], params.s[x]
        r = abs((xi * u - s) * (v / xi - s)
                / ((1 - s * xi * u) * (1 - s * v / xi)))
        worst = max(worst, r)
    return worst


def fused_row_amplitude(la, mu, v, params, J, enter=0, bar=False):
    """Weight of the unique J-fused row la -> mu built from WJ_weight values.

    Equals the J-row transfer amplitude at the geometric spectral point
    (v, qv, ..., q^{J-1} v); the horizontal counts now range over 0..J.
    """
    top = _parts(mu)
    bottom = _parts(la)
    if len(top) != len(bottom) + enter:
        return 0
    occ_t = _occupancy(top)
    occ_b = _occupancy(bottom)
    X = max([p for p in top + bottom] or [-1])
    _check_window(X, params)
    qJ = params.q ** J
    h = enter
    amp = 1
    for x in range(X + 1):
        i1 = occ_b.get(x, 0)
        i2 = occ_t.get(x, 0)
        j2 = i1 + h - i2
        if j2 < 0 or j2 > J:
            return 0
        w = WJ_weight(i1, h, i2, j2, _xi(params, x, bar) * v, params.s[x],
                      params.q, qJ)
        if w == 0:
            return 0
        amp = amp * w
        h = j2
    return amp if h == 0 else 0


def G_integral(mu, vs, params, contours, points_per_circle=256):
    """G_mu(v_1..v_N | xi-bar, S) as a len(mu)-fold nested contour integral.

    contours: one positively oriented Circle (or union) per integration
    variable, encircling the cluster {s_x / xi_x} and leaving the points
    {1/(s_x xi_x)} and all 1/v_j outside.  Quadrature route; float params.
    """
    from .numerics import contour_integrate

    parts = _parts(mu)
    k = len(parts)
    if k == 0:
        return 1.0 + 0.0j
    if len(contours) != k:
        raise ValueError("need one contour per signature part")
    for c in contours:
        for circ in (c if isinstance(c, (list, tuple)) else [c]):
            for v in vs:
                if circ.contains(1.0 / complex(v)):
                    raise ValueError("1/v_j must lie outside every contour")
    q = float(params.q)
    s0, xi0 = float(params.s[0]), float(params.xi[0])
    pref = complex(q_pochhammer(s0 * s0, q, k)) / (1.0 - q) ** k

    def integrand(*us):
        val = 1.0
        for a in range(k):
            for b in range(a + 1, k):
                val = val * (us[a] - us[b]) / (us[a] - q * us[b])
        for i in range(k):
            val = val * pow_k(parts[i], 1.0 / us[i], params, bar=True) \
                / (us[i] * (1.0 - s0 * xi0 * us[i]))
            for v in vs:
                val = val * (1.0 - q * us[i] * v) / (1.0 - us[i] * v)
        return val

    return pref * contour_integrate(integrand, contours, points_per_circle)
