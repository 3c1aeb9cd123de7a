"""Particle-system samplers, exact Markov-kernel evaluation and pushforward,
and the zero-range <-> exclusion coordinate maps.

Two families of discrete-time samplers are provided:

* sequential (left-to-right) sweeps driven by the one-row stochastic vertex
  weights L -- a fixed number of particles (``x_eq``), a source injecting one
  particle per step at column 1 (``x_plus``), the infinite-stack variant of
  the source (``x_plus_infinity``), and the 0/1-occupancy six-vertex
  reduction (``six_vertex``);
* parallel updates driven by the q-deformed Beta-binomial law phi
  (``q_hahn`` in three boundary variants, and ``q_hahn_tasep`` in exclusion
  coordinates).

Continuous-time chains (q-TASEP / q-Boson / ASEP) run under a Gillespie
loop.  The same one-step laws are exposed exactly through ``kernel_weight``
(ratios of the symmetric rational functions) and ``exact_pushforward``.
"""

import math
import random

from .model import Configuration, RegimeError, Trajectory, WindowOverflowError
from .weights import L_row_distribution, phi_weight
from .symfun import (F_symm, _signatures, admissibility_margin, minus_S_pow,
                     skew_F, skew_F_conj, skew_G_conj)

SEQUENTIAL_KINDS = ("x_eq", "x_plus", "x_plus_infinity", "six_vertex")
PARALLEL_KINDS = ("q_hahn", "q_hahn_tasep")
CT_KINDS = ("q_tasep_ct", "q_boson_ct", "asep_ct")
KINDS = SEQUENTIAL_KINDS + PARALLEL_KINDS + CT_KINDS

QHAHN_VARIANTS = ("fixed_M", "boundary_J", "infinity")

KERNEL_KINDS = ("Q_eq", "Q_plus", "Lam_minus", "Lam_eq", "Q_eq_pi",
                "Q_plus_rho")


class KernelDenominatorError(ZeroDivisionError):
    """A kernel's normalizing symmetric function vanished."""


def _parts(sig):
    return tuple(sig.parts) if hasattr(sig, "parts") else tuple(sig)


def rng_for_sample(seed, sample_id):
    """An independent, reproducible RNG stream for one trajectory.

    The stream depends only on (seed, sample_id), so results do not change
    with the number of worker threads or the order samples are drawn in.
    """
    return random.Random("%d:%d" % (seed, sample_id))


class DynamicsSpec:
    """A particle system: kind, parameters, schedule, and kind-specific data.

    schedule   -- per-step spectral parameters (v_t or u_t) for the
                  discrete-time kinds;
    J          -- fused row count for the q-Hahn kinds (positive integer);
    rates      -- {a_i} list for q_tasep_ct / q_boson_ct, (r, l) pair for
                  asep_ct;
    variant    -- boundary variant for q_hahn: fixed_M / boundary_J /
                  infinity;
    initial    -- initial exclusion positions (strictly decreasing ints) for
                  q_hahn_tasep and the continuous-time kinds;
    s1_squared -- the real parameter s_1^2 < 0 of the infinite column for
                  x_plus_infinity (s_1 itself is never materialized).
    """

    def __init__(self, kind, params, schedule=(), J=None, rates=None,
                 variant=None, initial=None, s1_squared=None):
        if kind not in KINDS:
            raise ValueError("unknown dynamics kind %r" % (kind,))
        self.kind = kind
        self.params = params
        self.schedule = tuple(schedule)
        self.J = J
        self.rates = rates
        self.variant = variant
        self.initial = tuple(initial) if initial is not None else None
        self.s1_squared = s1_squared
        self._validate()

    def _validate(self):
        p = self.params
        if self.kind == "six_vertex":
            target = p.q ** -0.5
            for x, sx in enumerate(p.s):
                if abs(float(sx) - target) > 1e-9:
                    raise RegimeError(
                        "six_vertex needs s_%d = q^(-1/2); got %s" % (x, sx))
        if self.kind == "x_plus_infinity":
            s1sq = self.s1_squared
            if s1sq is None or not s1sq < 0:
                raise RegimeError("x_plus_infinity needs s1_squared < 0")
        if self.kind in PARALLEL_KINDS:
            if self.J is None:
                self.J = 1
            if int(self.J) != self.J or self.J < 1:
                raise RegimeError("q-Hahn kinds need integer J >= 1")
            if self.kind == "q_hahn" and self.variant is None:
                self.variant = "fixed_M"
            if self.kind == "q_hahn" and self.variant not in QHAHN_VARIANTS:
                raise RegimeError("unknown q_hahn variant %r" % (self.variant,))
            want_inverse = self.kind == "q_hahn" and self.variant == "fixed_M"
            for x in range(p.X_max + 1):
                nu = complex(p.s[x]) ** 2
                if not (nu.real < 0 and abs(nu.imag) < 1e-9):
                    raise RegimeError(
                        "q-Hahn kinds need s_%d^2 < 0; got %s" % (x, nu))
                target = 1 / complex(p.s[x]) if want_inverse else complex(p.s[x])
                if abs(complex(p.xi[x]) - target) > 1e-9:
                    raise RegimeError(
                        "q-Hahn column %d needs xi = %s" %
                        (x, "1/s" if want_inverse else "s"))
        if self.kind in CT_KINDS and self.initial is None:
            raise RegimeError("continuous-time kinds need initial positions")
        if self.kind == "q_hahn_tasep" and self.initial is None:
            raise RegimeError("q_hahn_tasep needs initial positions")
        if self.initial is not None:
            for a, b in zip(self.initial, self.initial[1:]):
                if a <= b:
                    raise RegimeError(
                        "exclusion positions must be strictly decreasing")

    def nu_site(self, x):
        """The real parameter nu_x = s_x^2 for the q-Hahn kinds."""
        return complex(self.params.s[x]).real ** 2 - complex(
            self.params.s[x]).imag ** 2


# ---------------------------------------------------------------------------
# Sampling helpers
# ---------------------------------------------------------------------------


def _sample_cdf(outcomes, rng):
    """CDF-inversion over an explicit finite outcome list [(..., p)]."""
    u = rng.random()
    acc = 0.0
    last = None
    for entry in outcomes:
        p = float(entry[-1].real if isinstance(entry[-1], complex)
                  else entry[-1])
        if p < -1e-12:
            raise RegimeError("negative transition probability %r" % (p,))
        acc += max(p, 0.0)
        last = entry
        if u < acc:
            return entry
    if acc < 1.0 - 1e-9:
        raise RegimeError("transition probabilities sum to %s < 1" % (acc,))
    return last


def _phi_real(j, m, q, mu, nu):
    val = phi_weight(j, m, q, mu, nu)
    if isinstance(val, complex):
        if abs(val.imag) > 1e-9 * (1 + abs(val)):
            raise RegimeError("phi weight is not real: %r" % (val,))
        val = val.real
    return val


def _sample_phi(m, q, mu, nu, rng):
    """Draw j ~ phi_{q,mu,nu}( . | m) for finite m by CDF inversion."""
    outcomes = [(j, _phi_real(j, m, q, mu, nu)) for j in range(m + 1)]
    return _sample_cdf(outcomes, rng)[0]


def _sample_phi_infinity(J, q, nu, rng):
    """Draw j ~ phi_{q, q^J nu, nu}( . | infinity) for integer J >= 1.

    The law factorizes over the J underlying rows: an infinite stack emits
    one arrow through row k independently with probability
    -nu q^k / (1 - nu q^k).  No truncation of the support is involved.
    """
    total = 0
    for k in range(J):
        p = (-nu * q**k) / (1 - nu * q**k)
        if rng.random() < p:
            total += 1
    return total


# ---------------------------------------------------------------------------
# Sequential (left-to-right) samplers
# ---------------------------------------------------------------------------


def step_sequential(config, spec, t, rng):
    """One discrete time step of a sequential-update dynamics.

    config is a Configuration; t indexes spec.schedule.  A horizontal arrow
    is threaded through columns left to right; at each column the outcome is
    drawn from the one-row stochastic weights L.  x_eq / six_vertex use the
    spectral parameter v_t with column factor 1/xi_x; x_plus and
    x_plus_infinity use u_t with column factor xi_x and inject the arrow at
    column 1.  The sweep stops at the first arrow-free column beyond every
    particle; reaching past the window raises WindowOverflowError.
    """
    if spec.kind not in SEQUENTIAL_KINDS:
        raise ValueError("step_sequential needs a sequential kind")
    params = spec.params
    q = params.q
    spectral = spec.schedule[t]
    occ = config.occupancy
    max_site = config.max_site()
    new_occ = {}

    if spec.kind in ("x_eq", "six_vertex"):
        h, x = 0, 0
    else:
        if occ.get(0):
            raise RegimeError("column 0 must be empty for source dynamics")
        if spec.kind == "x_plus":
            h, x = 1, 1
        else:  # x_plus_infinity: column 1 is an infinite stack
            s1sq = spec.s1_squared
            u = spectral
            p_emit = (-s1sq * u) / (1 - s1sq * u)
            h = 1 if rng.random() < p_emit else 0
            x = 2

    while True:
        m = occ.get(x, 0)
        if h == 0 and m == 0 and x > max_site:
            break
        if x > params.X_max:
            raise WindowOverflowError(
                "sweep reached column %d past the window" % (x,))
        if spec.kind == "six_vertex" and m > 1:
            raise RegimeError("six_vertex needs 0/1 occupancies")
        if spec.kind in ("x_eq", "six_vertex"):
            u_col = spectral / params.xi[x]
        else:
            u_col = spectral * params.xi[x]
        outcomes = L_row_distribution(m, h, u_col, params.s[x], q)
        i2, j2, _ = _sample_cdf(outcomes, rng)
        if i2:
            new_occ[x] = i2
        h = j2
        x += 1
    return Configuration(new_occ)


# ---------------------------------------------------------------------------
# Parallel q-Hahn samplers
# ---------------------------------------------------------------------------


def step_qhahn(config, spec, rng):
    """One parallel update of a q-Hahn system.

    Zero-range variants (kind ``q_hahn``): at every column x draw
    j_x ~ phi_{q, q^J nu_x, nu_x}( . | m_x) independently (nu_x = s_x^2),
    then move j_x particles from x to x+1 simultaneously.  Variants:
    fixed_M (plain), boundary_J (column 0 empty; J fresh particles join
    column 1 each step), infinity (column 1 holds an infinite stack, kept
    implicit, emitting j ~ phi( . | infinity)).

    Exclusion variant (kind ``q_hahn_tasep``): config is a tuple of strictly
    decreasing positions; particle i jumps right by
    j ~ phi_{q, q^J nu_i, nu_i}( . | gap_i) with gap_1 = infinity.
    """
    params = spec.params
    q = params.q
    qJ = q ** spec.J

    if spec.kind == "q_hahn_tasep":
        positions = tuple(config)
        new_positions = []
        for i, xi_pos in enumerate(positions, start=1):
            nu = spec.nu_site(i)
            mu = qJ * nu
            if i == 1:
                jump = _sample_phi_infinity(spec.J, q, nu, rng)
            else:
                gap = positions[i - 2] - xi_pos - 1
                jump = _sample_phi(gap, q, mu, nu, rng)
            new_positions.append(xi_pos + jump)
        return tuple(new_positions)

    if spec.kind != "q_hahn":
        raise ValueError("step_qhahn needs a q-Hahn kind")
    occ = config.occupancy
    variant = spec.variant
    if variant != "fixed_M" and occ.get(0):
        raise RegimeError("column 0 must be empty for source variants")
    max_site = config.max_site()
    if max_site + 1 > params.X_max:
        raise WindowOverflowError("a particle would cross the window")

    moves = {}
    first_col = {"fixed_M": 0, "boundary_J": 1, "infinity": 2}[variant]
    for x in range(first_col, max_site + 1):
        m = occ.get(x, 0)
        if m == 0:
            continue
        nu = spec.nu_site(x)
        moves[x] = _sample_phi(m, q, qJ * nu, nu, rng)
    if variant == "infinity":
        moves[1] = _sample_phi_infinity(spec.J, q, spec.nu_site(1), rng)

    new_occ = {}
    for x in range(first_col, max(max_site + 2, 3)):
        if variant == "infinity" and x < 2:
            continue  # the infinite stack stays implicit
        n = occ.get(x, 0) - moves.get(x, 0) + moves.get(x - 1, 0)
        if variant == "boundary_J" and x == 1:
            n += spec.J
        if n < 0:
            raise RegimeError("negative occupancy produced at column %d" % x)
        if n:
            new_occ[x] = n
    return Configuration(new_occ)


# ---------------------------------------------------------------------------
# Coordinate maps
# ---------------------------------------------------------------------------


def zero_range_to_exclusion(config, n=None, x1=-1):
    """Occupancies-of-gaps -> strictly decreasing particle positions.

    Column j >= 2 of config holds the gap between exclusion particles j-1
    and j: gap_j = x_{j-1} - x_j - 1.  x1 anchors the first particle
    (x1 = -1 reproduces the step initial data x_i = -i from the empty
    config).  n defaults to covering every occupied column.
    """
    occ = config.occupancy if isinstance(config, Configuration) else dict(config)
    if n is None:
        n = max([1] + list(occ))
    positions = [x1]
    for j in range(2, n + 1):
        positions.append(positions[-1] - 1 - occ.get(j, 0))
    return tuple(positions)


def exclusion_to_zero_range(positions):
    """Inverse of zero_range_to_exclusion: returns (Configuration, x1)."""
    positions = tuple(positions)
    occ = {}
    for j in range(2, len(positions) + 1):
        gap = positions[j - 2] - positions[j - 1] - 1
        if gap < 0:
            raise ValueError("positions must be strictly decreasing")
        if gap:
            occ[j] = gap
    x1 = positions[0] if positions else -1
    return Configuration(occ), x1


# ---------------------------------------------------------------------------
# Continuous-time chains (Gillespie)
# ---------------------------------------------------------------------------


def _ct_rates(kind, positions, q, rates):
    """Event list [(index, displacement, rate)] for the ct kinds."""
    events = []
    occupied = set(positions)
    if kind in ("q_tasep_ct", "q_boson_ct"):
        for i, x in enumerate(positions):
            a = rates[i] if i < len(rates) else rates[-1]
            gap = math.inf if i == 0 else positions[i - 1] - x - 1
            factor = 1.0 if gap is math.inf else 1.0 - q**gap
            if factor > 0:
                events.append((i, 1, a * factor))
    else:  # asep_ct
        r, l = rates
        for i, x in enumerate(positions):
            if x + 1 not in occupied:
                events.append((i, 1, r))
            if x - 1 not in occupied:
                events.append((i, -1, l))
    return events


def run_ctmc(spec, t_final, rng, seed=None):
    """Gillespie simulation of a continuous-time kind up to time t_final.

    q_tasep_ct / q_boson_ct: particle i jumps right by one at rate
    a_i (1 - q^{gap_i}) with gap_1 = infinity.  asep_ct: right rate r and
    left rate l per particle, blocked jumps suppressed.  The Trajectory logs
    every event; q_boson_ct records gap occupancies, the others positions.
    """
    if spec.kind not in CT_KINDS:
        raise ValueError("run_ctmc needs a continuous-time kind")
    q = float(spec.params.q)
    positions = list(spec.initial)
    if spec.kind == "asep_ct":
        rates = tuple(spec.rates) if spec.rates is not None else (1.0, q)
        if not (rates[0] > 0 and rates[1] >= 0):
            raise RegimeError("asep rates must be positive")
    else:
        rates = tuple(spec.rates) if spec.rates is not None else (1.0,)
        if any(a <= 0 for a in rates):
            raise RegimeError("jump rates must be positive")

    def record(traj, t):
        if spec.kind == "q_boson_ct":
            traj.append(t, exclusion_to_zero_range(positions)[0])
        else:
            traj.append(t, tuple(positions))

    traj = Trajectory(spec.kind, seed)
    t = 0.0
    record(traj, t)
    while True:
        events = _ct_rates(spec.kind, positions, q, rates)
        total = sum(e[2] for e in events)
        if total <= 0:
            break
        t += rng.expovariate(total)
        if t >= t_final:
            break
        pick = rng.random() * total
        acc = 0.0
        for i, d, rate in events:
            acc += rate
            if pick < acc:
                positions[i] += d
                break
        record(traj, t)
    record(traj, t_final)
    return traj


# ---------------------------------------------------------------------------
# Exact one-step kernels
# ---------------------------------------------------------------------------


def _F_family(mu, us, params):
    if not us:
        return 1 if not mu else 0
    return F_symm(mu, us, params)


def _G_conj_family(mu, vs, params):
    return skew_G_conj((0,) * len(_parts(mu)), mu, vs, params, bar=True)


def kernel_weight(kind, frm, to, a, b, params):
    """Exact transition weight of a one-step Markov kernel.

    kind / (a, b) / lengths (m = len(frm)):
      Q_eq       a = u-family, b = v;    to has length m
      Q_plus     a = u,        b = v-family; to has length m+1
      Lam_minus  a = u-family, b = u;    to has length m-1
      Lam_eq     a = v-family, b = v;    to has length m
      Q_eq_pi    a ignored,    b = v;    to has length m
      Q_plus_rho a = u,        b ignored; to has length m+1

    A vanishing normalizer (the symmetric function of the source state)
    raises KernelDenominatorError.
    """
    frm, to = _parts(frm), _parts(to)
    m = len(frm)
    q = params.q

    if kind == "Q_eq":
        us = tuple(a)
        if len(to) != m or len(us) != m:
            raise ValueError("Q_eq needs |to| = |from| = #variables")
        den = _F_family(frm, us, params)
        if den == 0:
            raise KernelDenominatorError("F of the source state vanishes")
        g = skew_G_conj(frm, to, (b,), params, bar=True)
        if g == 0:
            return 0
        pref = 1
        for u in us:
            pref = pref * (1 - u * b) / (1 - q * u * b)
        return pref * _F_family(to, us, params) / den * g

    if kind == "Q_plus":
        vs = tuple(b)
        if len(to) != m + 1:
            raise ValueError("Q_plus needs |to| = |from| + 1")
        den = _G_conj_family(frm, vs, params)
        if den == 0:
            raise KernelDenominatorError("G^c of the source state vanishes")
        f = skew_F(frm, to, (a,), params)
        if f == 0:
            return 0
        pref = (1 - params.s[0] * params.xi[0] * a) / (1 - q ** (m + 1))
        for v in vs:
            pref = pref * (1 - a * v) / (1 - q * a * v)
        return pref * _G_conj_family(to, vs, params) / den * f

    if kind == "Lam_minus":
        us = tuple(a)
        if len(to) != m - 1 or len(us) != m - 1:
            raise ValueError("Lam_minus needs |to| = |from| - 1 = #variables")
        den = _F_family(frm, us + (b,), params)
        if den == 0:
            raise KernelDenominatorError("F of the source state vanishes")
        f = skew_F(to, frm, (b,), params)
        if f == 0:
            return 0
        return _F_family(to, us, params) / den * f

    if kind == "Lam_eq":
        vs = tuple(a)
        if len(to) != m:
            raise ValueError("Lam_eq needs |to| = |from|")
        den = _G_conj_family(frm, vs + (b,), params)
        if den == 0:
            raise KernelDenominatorError("G^c of the source state vanishes")
        g = skew_G_conj(to, frm, (b,), params, bar=True)
        if g == 0:
            return 0
        return _G_conj_family(to, vs, params) / den * g

    if kind == "Q_eq_pi":
        if len(to) != m:
            raise ValueError("Q_eq_pi needs |to| = |from|")
        g = skew_G_conj(frm, to, (b,), params, bar=True)
        if g == 0:
            return 0
        den = minus_S_pow(frm, params)
        if den == 0:
            raise KernelDenominatorError("(-S)^mu vanishes")
        return minus_S_pow(to, params) / den * g

    if kind == "Q_plus_rho":
        if len(to) != m + 1:
            raise ValueError("Q_plus_rho needs |to| = |from| + 1")
        if any(p < 1 for p in frm):
            raise ValueError("Q_plus_rho needs all source parts >= 1")
        if any(p < 1 for p in to):
            return 0
        p1 = params.shift(1)
        frm1 = tuple(p - 1 for p in frm)
        to1 = tuple(p - 1 for p in to)
        f = skew_F_conj(frm1, to1, (a,), p1)
        if f == 0:
            return 0
        den = minus_S_pow(frm1, p1)
        if den == 0:
            raise KernelDenominatorError("(-S)^{la-1} vanishes")
        return minus_S_pow(to1, p1) / den * f

    raise ValueError("unknown kernel kind %r" % (kind,))


def passthrough_rho(params, spectral, bar=False):
    """sup_x |L_x(0,1;0,1)|: the per-column arrow pass-through bound."""
    worst = 0.0
    for x in range(params.X_max + 1):
        xi = 1 / params.xi[x] if bar else params.xi[x]
        s = params.s[x]
        u = xi * spectral
        worst = max(worst, abs(complex((-s) * (u - s) / (1 - s * u))))
    return worst


_KERNEL_BAR = {"Q_eq": True, "Lam_eq": True, "Q_eq_pi": True,
               "Q_plus": False, "Lam_minus": False, "Q_plus_rho": False}
_KERNEL_SHIFT = {"Q_eq": 0, "Lam_eq": 0, "Q_eq_pi": 0,
                 "Q_plus": 1, "Lam_minus": -1, "Q_plus_rho": 1}


def _kernel_spectral(kind, a, b):
    """The single spectral scalar that moves paths, per kernel kind."""
    if kind in ("Q_eq", "Lam_eq", "Q_eq_pi", "Lam_minus"):
        return b
    return a  # Q_plus, Q_plus_rho


def exact_pushforward(dist, kind, a, b, params, cutoff, tol=1e-12):
    """Push a distribution over signatures through one kernel, truncated.

    dist maps part-tuples to masses summing to 1.  Target signatures are
    enumerated with parts <= cutoff; the discarded tail is certified
    geometric with ratio rho = sup_x |L_x(0,1;0,1)| < 1 and must stay below
    tol.  Returns (dist', certificate).
    """
    if kind == "Q_eq":
        # weight = (F ratio) * (skew G): tails decay at the combined rate
        rho = max(admissibility_margin(u, b, params) for u in a)
    elif kind == "Q_plus":
        rho = max(admissibility_margin(a, v, params) for v in b)
    else:
        spectral = _kernel_spectral(kind, a, b)
        rho_params = params.shift(1) if kind == "Q_plus_rho" else params
        rho = passthrough_rho(rho_params, spectral, bar=_KERNEL_BAR[kind])
    if rho >= 1:
        raise ValueError("pass-through ratio rho = %s >= 1" % (rho,))

    out = {}
    max_src = 0
    for frm, mass in dist.items():
        frm = _parts(frm)
        if frm:
            max_src = max(max_src, frm[0])
        tgt_len = len(frm) + _KERNEL_SHIFT[kind]
        if tgt_len < 0:
            raise ValueError("kernel would produce negative-length states")
        for to in _signatures(tgt_len, cutoff):
            w = kernel_weight(kind, frm, to, a, b, params)
            if w != 0:
                out[to] = out.get(to, 0) + mass * w

    total = sum(out.values())
    deficit = abs(1 - complex(total)) if isinstance(total, complex) \
        else abs(1 - float(total))
    tail_bound = rho ** max(cutoff - max_src, 0) / (1 - rho)
    cert = {"rho": rho, "cutoff": cutoff, "mass": total,
            "deficit": deficit, "tail_bound": tail_bound}
    if deficit > max(tol, tail_bound):
        raise ValueError(
            "truncated mass %s exceeds both tol and the geometric bound %s"
            % (deficit, tail_bound))
    return out, cert
