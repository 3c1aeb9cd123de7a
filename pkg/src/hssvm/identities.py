"""Machine checks of the algebraic identities satisfied by the symmetric
rational functions: branching, skew and non-skew Cauchy summation, Pieri
rules, spatial biorthogonality, fusion of stochastic weights, and the
commutation relations between the four Markov kernels.

Each verifier returns a residual (exact zero is expected in rational mode;
a float bounded by the requested tolerance otherwise).  Verifiers that
truncate an infinite signature sum also return a certificate dict recording
the geometric ratio, the truncation point, and the certified tail bound.
"""

import itertools
import math

from .model import WindowOverflowError
from .numerics import Circle, contour_integrate, exact_div, q_binomial, \
    q_pochhammer
from .symfun import F_symm, F_zero, G_symm, _parts, _signatures, \
    admissibility_margin, c_conj, cross_ratio, pow_k, skew_F, skew_F_conj, \
    skew_G, skew_G_conj
from .weights import L_weight, LJ_weight


def _float_params(params):
    from .model import ParameterSet
    return ParameterSet(float(params.q),
                        tuple(float(v) for v in params.xi),
                        tuple(float(v) for v in params.s),
                        tuple(float(v) for v in params.u_schedule),
                        params.X_max)


def _sum_tail_certified(term_of_sig, length, floor_cap, rho, tol, params):
    """Sum term_of_sig(kappa) over all signatures of the given length,
    grouped by largest part, with a rho-geometric tail certificate.

    Terms are summed for largest part P = 0, 1, 2, ... ; once P exceeds
    floor_cap and the running increment certifies tail <= tol, stop.
    """
    if rho >= 1:
        raise ValueError("admissibility ratio >= 1; sum need not converge")
    total = 0
    P = 0
    prev = None
    while True:
        if P > params.X_max:
            raise WindowOverflowError(
                "signature sum not certified within the window")
        increment = 0
        if length == 0:
            increment = term_of_sig(()) if P == 0 else 0
        elif P == 0:
            increment = term_of_sig((0,) * length)
        else:
            for rest in itertools.combinations_with_replacement(
                    range(P + 1), length - 1):
                kappa = (P,) + tuple(reversed(rest))
                increment = increment + term_of_sig(kappa)
        total = total + increment
        # two consecutive shells guard against an accidental zero shell
        width = max(abs(increment), abs(prev) if prev is not None else 0)
        tail = width * rho / (1 - rho)
        if P >= floor_cap and prev is not None and tail <= tol:
            cert = {"rho": float(rho), "cutoff": P, "tail_bound": float(tail)}
            return total, cert
        prev = increment
        P += 1
        if length == 0:
            # only the empty signature exists; tail is exactly zero
            return total, {"rho": float(rho), "cutoff": 0, "tail_bound": 0.0}


def verify_branching(la, mu, split, us, params, kind="F"):
    """Residual of the branching rule under splitting the variables.

    F_{mu/la}(u_1..u_{n1+n2}) = sum_kappa F_{mu/kappa}(u_{n1+1..}) *
    F_{kappa/la}(u_1..u_{n1}); same shape for G.  Exact zero expected; the
    kappa-sum is finite (parts bounded by mu_1).
    """
    n1, n2 = split
    us = tuple(us)
    if len(us) != n1 + n2:
        raise ValueError("split must partition the variable list")
    la, mu = _parts(la), _parts(mu)
    if kind == "F":
        fn, step = skew_F, 1
    elif kind == "G":
        fn, step = skew_G, 0
    else:
        raise ValueError("kind must be 'F' or 'G'")
    lhs = fn(la, mu, us, params)
    cap = mu[0] if mu else 0
    mid_len = len(la) + step * n1
    rhs = 0
    for kappa in _signatures(mid_len, cap):
        a = fn(la, kappa, us[:n1], params)
        if a == 0:
            continue
        b = fn(kappa, mu, us[n1:], params)
        if b != 0:
            rhs = rhs + a * b
    return abs(lhs - rhs)


def verify_skew_cauchy(la, nu, u, v, params, tol=1e-9):
    """Residual + tail certificate for the one-variable skew Cauchy identity:

    sum_kappa G^c_{kappa/la}(v | xi-bar, S) F_{kappa/nu}(u)
      = (1-quv)/(1-uv) sum_mu F_{la/mu}(u) G^c_{nu/mu}(v | xi-bar, S).

    Nontrivial when len(la) = len(nu) + 1; the kappa sum is infinite and is
    truncated with a geometric certificate based on the admissibility ratio.
    """
    la, nu = _parts(la), _parts(nu)
    q = params.q
    rho = admissibility_margin(u, v, params)
    if rho >= 1:
        raise ValueError("pair (u, v) is not admissible: ratio %s >= 1" % rho)

    cap = min(la[0] if la else 0, nu[0] if nu else 0)
    rhs = 0
    for mu in _signatures(len(nu), cap):
        a = skew_F(mu, la, (u,), params)
        if a == 0:
            continue
        b = skew_G_conj(mu, nu, (v,), params, bar=True)
        if b != 0:
            rhs = rhs + a * b
    rhs = exact_div(1 - q * u * v, 1 - u * v) * rhs

    floor_cap = max(la[0] if la else 0, nu[0] if nu else 0)

    def term(kappa):
        a = skew_F(nu, kappa, (u,), params)
        if a == 0:
            return 0
        b = skew_G_conj(la, kappa, (v,), params, bar=True)
        return a * b if b != 0 else 0

    lhs, cert = _sum_tail_certified(term, len(la), floor_cap, rho, tol, params)
    return abs(lhs - rhs), cert


def verify_cauchy(M, N, us, vs, params, tol=1e-9):
    """Residual of the non-skew Cauchy identity:

    sum_{mu in Sign_M} F_mu(u) G^c_mu(v | xi-bar, S)
      = (q;q)_M prod_i (1-s_0 xi_0 u_i)^{-1} prod_{i,j} (1-q u_i v_j)/(1-u_i v_j).
    """
    us, vs = tuple(us), tuple(vs)
    if len(us) != M or len(vs) != N:
        raise ValueError("variable counts must match M and N")
    q = params.q
    rho = max([admissibility_margin(u, v, params)
               for u in us for v in vs] or [0])
    rhs = F_zero(M, us, params)
    for u in us:
        for v in vs:
            rhs = rhs * exact_div(1 - q * u * v, 1 - u * v)

    def term(mu):
        a = skew_F((), mu, us, params)
        if a == 0:
            return 0
        b = skew_G_conj((0,) * M, mu, vs, params, bar=True)
        return a * b if b != 0 else 0

    if M == 0:
        return abs(1 - rhs), {"rho": 0.0, "cutoff": 0, "tail_bound": 0.0}
    lhs, cert = _sum_tail_certified(term, M, 0, rho, tol, params)
    return abs(lhs - rhs), cert


def verify_pieri(which, data, params, tol=1e-9):
    """Residual of the Pieri rules.

    which=1, data=(la, us, v):
      sum_kappa G^c_{kappa/la}(v|xi-bar,S) F_kappa(u_1..u_N)
        = prod_i (1-q u_i v)/(1-u_i v) F_la(u_1..u_N),  len(kappa)=len(la)=N.
    which=2, data=(nu, u, vs):
      sum_kappa G^c_kappa(v_1..v_n|xi-bar,S) F_{kappa/nu}(u)
        = (1-q^{N+1})/(1-s_0 xi_0 u) prod_j (1-q u v_j)/(1-u v_j)
          G^c_nu(v_1..v_n|xi-bar,S),  len(kappa)=N+1=len(nu)+1.
    """
    q = params.q
    if which == 1:
        la, us, v = data
        la = _parts(la)
        us = tuple(us)
        N = len(us)
        if len(la) != N:
            raise ValueError("Pieri-1 needs len(la) == number of u variables")
        rho = max([admissibility_margin(u, v, params) for u in us] or [0])
        rhs = skew_F((), la, us, params)
        for u in us:
            rhs = rhs * exact_div(1 - q * u * v, 1 - u * v)

        def term(kappa):
            a = skew_G_conj(la, kappa, (v,), params, bar=True)
            if a == 0:
                return 0
            b = skew_F((), kappa, us, params)
            return a * b if b != 0 else 0

        if N == 0:
            return abs(1 - rhs), {"rho": 0.0, "cutoff": 0, "tail_bound": 0.0}
        lhs, cert = _sum_tail_certified(term, N, la[0] if la else 0,
                                        rho, tol, params)
        return abs(lhs - rhs), cert

    if which == 2:
        nu, u, vs = data
        nu = _parts(nu)
        vs = tuple(vs)
        N = len(nu)
        rho = max([admissibility_margin(u, v, params) for v in vs] or [0])
        rhs = exact_div(1 - q ** (N + 1), 1 - params.s[0] * params.xi[0] * u)
        for v in vs:
            rhs = rhs * exact_div(1 - q * u * v, 1 - u * v)
        rhs = rhs * skew_G_conj((0,) * N, nu, vs, params, bar=True)

        def term(kappa):
            a = skew_F(nu, kappa, (u,), params)
            if a == 0:
                return 0
            b = skew_G_conj((0,) * (N + 1), kappa, vs, params, bar=True)
            return a * b if b != 0 else 0

        lhs, cert = _sum_tail_certified(term, N + 1, nu[0] if nu else 0,
                                        rho, tol, params)
        return abs(lhs - rhs), cert

    raise ValueError("which must be 1 or 2")


def orthogonality_contours(params, k):
    """k equal positively oriented circles |u| = sqrt(M1 m2) enclosing the
    cluster {s_x/xi_x} and excluding {1/(s_x xi_x)}.

    Concentric equal circles satisfy the nesting requirements: q times any
    of them lies strictly inside each of them, and none meets q times
    itself.  Requires `contour_regime`-style separation; fails loudly
    otherwise.
    """
    M1 = max(abs(params.s[x]) / params.xi[x] for x in range(params.X_max + 1))
    m2 = min(1 / (params.xi[x] * abs(params.s[x]))
             for x in range(params.X_max + 1))
    if not m2 > M1:
        raise ValueError("contour construction failed: cluster not separated "
                         "from its reciprocal set")
    r = math.sqrt(float(M1) * float(m2))
    # slightly decreasing radii keep the quadrature grids disjoint (the
    # cross factor has removable diagonal singularities) while preserving
    # q-nesting: q * r_b < r_b < r_a for b > a.
    radii = [r * 1.03 ** (-j) for j in range(k)]
    if radii[-1] <= float(M1):
        raise ValueError("contour construction failed: radii collapsed onto "
                         "the pole cluster")
    return [Circle(0.0, rj) for rj in radii]


def verify_spatial_orthogonality(la, mu, params, N_quad=512):
    """Residual |integral - 1_{la=mu}| of the spatial biorthogonality:

    (1-q)^{-k} oint...oint prod_{a<b} (u_a-u_b)/(u_a-q u_b)
        F^c_la(u | xi, S) prod_i u_i^{-1} pow_{mu_i}(u_i^{-1} | xi-bar, S)
        du_i/(2 pi i)  =  1_{la = mu}.
    """
    la, mu = _parts(la), _parts(mu)
    k = len(la)
    if len(mu) != k:
        raise ValueError("signatures must have equal length")
    if k == 0:
        return 0.0
    p = _float_params(params)
    q = p.q
    contours = orthogonality_contours(p, k)
    cF = complex(c_conj(la, p))

    def integrand(*us):
        val = 1.0
        for a in range(k):
            for b in range(a + 1, k):
                val = val * (us[a] - us[b]) / (us[a] - q * us[b])
        val = val * F_symm(la, us, p)
        for i in range(k):
            val = val * pow_k(mu[i], 1.0 / us[i], p, bar=True) / us[i]
        return val

    result = cF * contour_integrate(integrand, contours, N_quad) / (1 - q) ** k
    expected = 1.0 if la == mu else 0.0
    return abs(result - expected)


def _q_exchangeable_law(J, j, q):
    """Distribution over binary J-tuples with j ones: P(a) proportional to
    q^{#(0 before 1 pairs)}, normalized by the Gaussian binomial."""
    den = q_binomial(J, j, q)
    out = []
    for ones in itertools.combinations(range(J), j):
        a = [0] * J
        for i in ones:
            a[i] = 1
        w = sum(1 for i in range(J) for l in range(i + 1, J)
                if a[i] == 0 and a[l] == 1)
        out.append((tuple(a), exact_div(q**w, den)))
    return out


def verify_fusion(J, i1, i2, j1, params, u=None):
    """Residual (exact zero expected) of the fused-weight identity.

    The left side collapses a stack of J single-arrow rows with spectral
    parameters u, qu, ..., q^{J-1}u, feeding in j1 arrows distributed by the
    q-exchangeable law on row subsets; the right side is the closed
    hypergeometric form LJ_weight at qJ = q^J.  Both are evaluated exactly.
    """
    if u is None:
        if not params.u_schedule:
            raise ValueError("provide u explicitly or via the schedule")
        u = params.u_schedule[0]
    q, s = params.q, params.s[0]
    u = params.xi[0] * u
    j2 = i1 + j1 - i2
    if j2 < 0 or j2 > J or j1 > J:
        return abs(LJ_weight(i1, j1, i2, j2, u, s, q, q**J))
    collapsed = 0
    for a, pa in _q_exchangeable_law(J, j1, q):
        # propagate the vertical state through the J rows, summing over
        # all output patterns b with the correct totals
        states = {(i1, 0): pa}  # (current vertical count, ones emitted so far)
        for t in range(J):
            new = {}
            for (m, emitted), w in states.items():
                for b in (0, 1):
                    m2 = m + a[t] - b
                    if m2 < 0:
                        continue
                    lw = L_weight(m, a[t], m2, b, q**t * u, s, q)
                    if lw == 0:
                        continue
                    key = (m2, emitted + b)
                    new[key] = new.get(key, 0) + w * lw
            states = new
        collapsed = collapsed + states.get((i2, j2), 0)
    return abs(collapsed - LJ_weight(i1, j1, i2, j2, u, s, q, q**J))


def verify_kernel_commutation(which, m, u_list, u, v, params, tol=1e-9,
                              nu=None, mu=None, la=None):
    """Residual of the Markov-kernel commutation relations.

    which=1: (Q_eq_{u_list+u; v} Lam_minus_{u | u_list})(nu -> mu)
           = (Lam_minus_{u | u_list} Q_eq_{u_list; v})(nu -> mu),
       nu in Sign_{m+1}, mu in Sign_m.
    which=2: (Q_plus_{u; v_list+v} Lam_eq_{v | v_list})(la -> nu)
           = (Lam_eq_{v | v_list} Q_plus_{u; v_list})(la -> nu),
       la in Sign_m, nu in Sign_{m+1}; here u_list plays the role of v_list.
    """
    from .dynamics import kernel_weight

    u_list = tuple(u_list)
    rho = admissibility_margin(u, v, params)
    if rho >= 1:
        raise ValueError("pair (u, v) is not admissible")

    if which == 1:
        if nu is None or mu is None:
            raise ValueError("which=1 needs nu (length m+1) and mu (length m)")
        nu, mu = _parts(nu), _parts(mu)
        floor_cap = max(nu[0] if nu else 0, mu[0] if mu else 0)

        def lhs_term(la_mid):
            a = kernel_weight("Q_eq", nu, la_mid, u_list + (u,), v, params)
            if a == 0:
                return 0
            b = kernel_weight("Lam_minus", la_mid, mu, u_list, u, params)
            return a * b if b != 0 else 0

        lhs, cert = _sum_tail_certified(lhs_term, m + 1, floor_cap, rho, tol,
                                        params)
        rhs = 0
        for kappa in _signatures(m, nu[0] if nu else 0):
            a = kernel_weight("Lam_minus", nu, kappa, u_list, u, params)
            if a == 0:
                continue
            b = kernel_weight("Q_eq", kappa, mu, u_list, v, params)
            if b != 0:
                rhs = rhs + a * b
        return abs(lhs - rhs), cert

    if which == 2:
        if la is None or nu is None:
            raise ValueError("which=2 needs la (length m) and nu (length m+1)")
        la, nu = _parts(la), _parts(nu)
        v_list = u_list  # the fixed family is a v-family in this case
        floor_cap = max(la[0] if la else 0, nu[0] if nu else 0)

        def lhs_term(kappa):
            a = kernel_weight("Q_plus", la, kappa, u, v_list + (v,), params)
            if a == 0:
                return 0
            b = kernel_weight("Lam_eq", kappa, nu, v_list, v, params)
            return a * b if b != 0 else 0

        lhs, cert = _sum_tail_certified(lhs_term, m + 1, floor_cap, rho, tol,
                                        params)
        rhs = 0
        for mu_mid in _signatures(m, la[0] if la else 0):
            a = kernel_weight("Lam_eq", la, mu_mid, v_list, v, params)
            if a == 0:
                continue
            b = kernel_weight("Q_plus", mu_mid, nu, u, v_list, params)
            if b != 0:
                rhs = rhs + a * b
        return abs(lhs - rhs), cert

    raise ValueError("which must be 1 or 2")
