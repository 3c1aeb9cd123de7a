"""Parameters, signatures, particle configurations, height function, and the
q-weighted correlation statistic."""

import itertools
import math
import random
import re
from fractions import Fraction

from .numerics import q_binomial, q_pochhammer


class RegimeError(ValueError):
    """A parameter set violates a declared regime flag."""


class WindowOverflowError(RuntimeError):
    """A path or particle attempted to cross the finite working window."""


class ParameterSet:
    """Global q plus column families xi_x, s_x and the row schedule u_y.

    xi and s are indexed by x = 0..X_max (the finite working window).
    """

    def __init__(self, q, xi, s, u_schedule=(), X_max=None,
                 stochastic_regime=False, contour_regime=False):
        if X_max is None:
            X_max = len(xi) - 1
        if len(xi) != X_max + 1 or len(s) != X_max + 1:
            raise ValueError("xi and s must populate indices 0..X_max")
        self.q = q
        self.xi = tuple(xi)
        self.s = tuple(s)
        self.u_schedule = tuple(u_schedule)
        self.X_max = X_max
        self.stochastic_regime = stochastic_regime
        self.contour_regime = contour_regime
        if stochastic_regime:
            self._check_stochastic()
        if contour_regime:
            self._check_contour()

    def _check_stochastic(self):
        if not 0 < self.q < 1:
            raise RegimeError("stochastic regime needs 0 < q < 1, got q=%s" % (self.q,))
        for x, v in enumerate(self.xi):
            if not v > 0:
                raise RegimeError("stochastic regime needs xi_%d > 0, got %s" % (x, v))
        for x, v in enumerate(self.s):
            if not -1 < v < 0:
                raise RegimeError("stochastic regime needs s_%d in (-1,0), got %s" % (x, v))
        for y, v in enumerate(self.u_schedule):
            if not v >= 0:
                raise RegimeError("stochastic regime needs u_%d >= 0, got %s" % (y, v))

    def _check_contour(self):
        inner = [abs(self.s[x]) / self.xi[x] for x in range(self.X_max + 1)]
        outer = [1 / (self.xi[x] * abs(self.s[x])) for x in range(self.X_max + 1)]
        if not min(inner) > self.q * max(inner):
            raise RegimeError(
                "contour regime violated: min|s/xi|=%s <= q*max|s/xi|=%s"
                % (min(inner), self.q * max(inner)))
        if not min(outer) > max(inner):
            raise RegimeError(
                "contour regime violated: min 1/(xi|s|)=%s <= max|s/xi|=%s"
                % (min(outer), max(inner)))

    def bar(self):
        """Same parameters with every xi_x inverted (the v-side convention)."""
        return ParameterSet(self.q, tuple(1 / v for v in self.xi), self.s,
                            self.u_schedule, self.X_max)

    def shift(self, r):
        """Drop the first r columns (the tau_r shift of both xi and s)."""
        if r > self.X_max:
            raise ValueError("cannot shift past the window")
        return ParameterSet(self.q, self.xi[r:], self.s[r:],
                            self.u_schedule, self.X_max - r)

    def __repr__(self):
        return "ParameterSet(q=%s, X_max=%d)" % (self.q, self.X_max)


class Signature:
    """Weakly decreasing tuple of nonnegative integers."""

    __slots__ = ("parts",)

    def __init__(self, parts=()):
        parts = tuple(int(p) for p in parts)
        for a, b in zip(parts, parts[1:]):
            if a < b:
                raise ValueError("signature parts must be weakly decreasing")
        if parts and parts[-1] < 0:
            raise ValueError("signature parts must be nonnegative")
        self.parts = parts

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def __eq__(self, other):
        if isinstance(other, Signature):
            return self.parts == other.parts
        return self.parts == tuple(other)

    def __hash__(self):
        return hash(self.parts)

    def __repr__(self):
        return "Signature%r" % (self.parts,)

    def multiplicity(self, x):
        return sum(1 for p in self.parts if p == x)

    def to_occupancy(self):
        occ = {}
        for p in self.parts:
            occ[p] = occ.get(p, 0) + 1
        return Configuration(occ)

    @classmethod
    def from_occupancy(cls, config):
        parts = []
        occ = config.occupancy if isinstance(config, Configuration) else config
        for x in sorted(occ, reverse=True):
            parts.extend([x] * occ[x])
        return cls(parts)


class Configuration:
    """Sparse occupancy map x -> m_x on Z_{>=0}."""

    __slots__ = ("occupancy",)

    def __init__(self, occupancy=None):
        occ = {}
        for x, m in (occupancy or {}).items():
            if m:
                if x < 0 or m < 0:
                    raise ValueError("occupancies live on Z_{>=0}")
                occ[int(x)] = m
        self.occupancy = occ

    @property
    def total(self):
        return sum(self.occupancy.values())

    def __eq__(self, other):
        return isinstance(other, Configuration) and self.occupancy == other.occupancy

    def __hash__(self):
        return hash(tuple(sorted(self.occupancy.items())))

    def __repr__(self):
        return "Configuration(%r)" % (self.occupancy,)

    def max_site(self):
        return max(self.occupancy) if self.occupancy else -1

    def to_signature(self):
        return Signature.from_occupancy(self)


class Trajectory:
    """Time-stamped list of configurations produced by one sampler run."""

    def __init__(self, model_tag, seed):
        self.model_tag = model_tag
        self.seed = seed
        self.times = []
        self.configs = []

    def append(self, t, config):
        self.times.append(t)
        self.configs.append(config)

    def __len__(self):
        return len(self.configs)


def height(nu, x):
    """Number of parts of nu that are >= x."""
    parts = nu.parts if isinstance(nu, Signature) else tuple(nu)
    return sum(1 for p in parts if p >= x)


def q_corr_statistic(nu, m, q):
    """Sum of q^{i_1+...+i_k} over index sets i_1<...<i_k with nu_{i_j} = m_j.

    Indices are 1-based.  Returns 1 for the empty m and 0 when no index set
    matches.
    """
    parts = nu.parts if isinstance(nu, Signature) else tuple(nu)
    targets = tuple(m.parts if isinstance(m, Signature) else m)
    k = len(targets)
    if k == 0:
        return q**0
    n = len(parts)
    if k > n:
        return 0
    # DP over positions: best expressed as f[j] = weighted count of ways to
    # match the first j targets using indices seen so far.
    f = [0] * (k + 1)
    f[0] = 1
    for i, p in enumerate(parts, start=1):
        for j in range(min(i, k), 0, -1):
            if p == targets[j - 1]:
                f[j] = f[j] + f[j - 1] * q**i
    return f[k]


def qmoment_from_correlations(nu, x, ell, q):
    """The correlation-sum expansion of q^{ell * height(nu, x)}.

    Sum_{k=0}^{ell} (-q)^{-k} [ell choose k]_q (q;q)_k
        Sum_{m_1 >= ... >= m_k >= x} q_corr_statistic(nu, m, q),
    with the inner sum truncated at m_1 <= nu_1 (larger parts never match).
    """
    if x < 1:
        raise ValueError("x must be >= 1")
    parts = nu.parts if isinstance(nu, Signature) else tuple(nu)
    top = parts[0] if parts else 0
    total = 0
    for k in range(ell + 1):
        coeff = (-q) ** (-k) if k else 1
        coeff = coeff * q_binomial(ell, k, q) * q_pochhammer(q, q, k)
        if k == 0:
            total = total + coeff
            continue
        if top < x:
            continue  # no admissible m: inner sum is empty
        inner = 0
        for combo in itertools.combinations_with_replacement(range(x, top + 1), k):
            m = tuple(sorted(combo, reverse=True))
            inner = inner + q_corr_statistic(parts, m, q)
        total = total + coeff * inner
    return total


# ---------------------------------------------------------------------------
# Config-file parsing (shared verbatim by the CLI and the tests)
# ---------------------------------------------------------------------------

_KNOWN_KEYS = {
    "q", "xi", "s", "u_schedule", "v_schedule", "X_max",
    "stochastic_regime", "contour_regime",
    "model", "J", "steps", "rates", "t_final",
}

_GEN_RE = re.compile(
    r"^uniform\(\s*([^,\s]+)\s*,\s*([^,\s]+)\s*,\s*seed\s*=\s*(\d+)\s*\)$")


class ConfigError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


def _parse_number(tok):
    tok = tok.strip()
    if "/" in tok:
        return Fraction(tok)
    if any(c in tok for c in ".eE") and not tok.lstrip("+-").isdigit():
        return float(tok)
    return int(tok)


def _parse_value(tok, lineno):
    tok = tok.strip()
    if tok.lower() in ("true", "false"):
        return tok.lower() == "true"
    gen = _GEN_RE.match(tok)
    if gen:
        return ("uniform", _parse_number(gen.group(1)),
                _parse_number(gen.group(2)), int(gen.group(3)))
    if tok.startswith("[") and tok.endswith("]"):
        inner = tok[1:-1].strip()
        if not inner:
            return []
        return [_parse_number(t) for t in inner.split(",")]
    if "," in tok:
        return [_parse_number(t) for t in tok.split(",")]
    try:
        return _parse_number(tok)
    except (ValueError, ZeroDivisionError):
        return tok  # bare string (model names)


def _materialize_family(value, X_max, lineno):
    """Expand constant / list / generator clause into X_max+1 values."""
    if isinstance(value, tuple) and value and value[0] == "uniform":
        _, a, b, seed = value
        rng = random.Random(seed)
        return tuple(float(a) + (float(b) - float(a)) * rng.random()
                     for _ in range(X_max + 1))
    if isinstance(value, list):
        if len(value) != X_max + 1:
            raise ConfigError(
                "family list has %d entries, window needs %d"
                % (len(value), X_max + 1), lineno)
        return tuple(value)
    return tuple([value] * (X_max + 1))


def parse_config_text(text):
    """Parse the structured key/value config format.

    Returns (ParameterSet, extras-dict).  Unknown keys are errors.
    """
    raw = {}
    lines = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError("expected 'key = value'", lineno)
        key, _, val = stripped.partition("=")
        key = key.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError("unknown key %r" % key, lineno)
        raw[key] = _parse_value(val, lineno)
        lines[key] = lineno
    if "q" not in raw:
        raise ConfigError("missing required key 'q'")
    X_max = int(raw.get("X_max", 10))
    xi = _materialize_family(raw.get("xi", 1), X_max, lines.get("xi"))
    s = _materialize_family(raw.get("s", Fraction(-1, 2)), X_max, lines.get("s"))
    u_sched = raw.get("u_schedule", raw.get("v_schedule", []))
    if not isinstance(u_sched, list):
        u_sched = [u_sched]
    params = ParameterSet(
        raw["q"], xi, s, tuple(u_sched), X_max,
        stochastic_regime=bool(raw.get("stochastic_regime", False)),
        contour_regime=bool(raw.get("contour_regime", False)))
    extras = {k: raw[k] for k in ("model", "J", "steps", "rates", "t_final",
                                  "v_schedule") if k in raw}
    return params, extras


def parse_config_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())
