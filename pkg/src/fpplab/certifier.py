"""Analytic bound engine: closed-form upper/lower bounds on the growth
constants with every precondition checked explicitly, parameter grid
search, and per-dimension shape certificates.

Everything here is a pure function of (d, law, parameters): no sampling.
Inequality gates must hold with relative margin 1e-12 — a certificate
never hinges on rounding.  Failed gates set named validity flags (or a
+inf sentinel for bounds) instead of raising, so a refused certificate is
auditable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy import optimize as sp_optimize

from .distributions import DistributionSpec, expected_min, gamma_cdf
from .errors import FppLabError, NoValidCertificate, UnsupportedRegime

TOOL_VERSION = "0.1.0"
GATE_MARGIN = 1e-12


class FDenominator(FppLabError):
    code = "precondition-f-denominator"


def _lt(a: float, b: float) -> bool:
    """Strict a < b with relative margin: gates must not hinge on rounding."""
    return bool(a < b - GATE_MARGIN * max(1.0, abs(a), abs(b)))


# ----------------------------------------------------------- parameters

@dataclass(frozen=True)
class BoundParams:
    d: int
    delta: float
    eta: float
    B: float
    n: int
    x: float
    p: int
    y: float
    A: float
    validity: Tuple[Tuple[str, bool], ...] = ()

    @property
    def all_valid(self) -> bool:
        return all(ok for _, ok in self.validity)


def bound_geometry(d: int, delta: float, eta: float, a: float) -> Tuple[int, float, int]:
    """(n, x, p) = (floor(log d), log d/(2(1-delta) a d), d - floor(d/(delta^(1+eta) log d)))."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta in (0,1) required")
    if eta <= 0.0:
        raise ValueError("eta > 0 required")
    ld = math.log(d)
    n = int(ld)
    x = ld / (2.0 * (1.0 - delta) * a * d)
    p = d - int(d / (delta ** (1.0 + eta) * ld))
    return n, x, p


# ------------------------------------------------------ f and g factors

def f_aC(delta: float, d: int, a: float, C: float) -> float:
    """2 n C / (|log x| - C), the price of the log-correction in the
    partial-sum bound ratios."""
    n, x, _ = bound_geometry(d, delta, 1.0, a)
    if C == 0.0:
        return 0.0
    denom = abs(math.log(x)) - C
    if denom <= 0.0:
        raise FDenominator(f"|log x|={abs(math.log(x)):.6g} <= C={C}")
    return 2.0 * n * C / denom


def g_eta(delta: float, eta: float, d: int) -> Tuple[float, float]:
    """(exact, display) forms of (n-1)(log(2p-1)+1)/(2p-1-log(2p-1))."""
    n, _, p = bound_geometry(d, delta, eta, 1.0)
    if p < 2:
        raise ValueError("p >= 2 required")
    l2p = math.log(2.0 * p - 1.0)
    exact = (n - 1) * (l2p + 1.0) / (2.0 * p - 1.0 - l2p)
    ld = math.log(d)
    display_den = 2.0 * d * (1.0 - 1.0 / (delta ** (1.0 + eta) * ld)) - 1.0 - math.log(2.0 * d)
    display = (ld * ld + math.log(2.0) * ld) / display_den
    return exact, display


# --------------------------------------------------- overlap correction

def overlap_correction(n: int, p: int, l: int) -> float:
    """Multiplicative factor (1+(I))+(II)+(III)+(IV)+(V) on (1/2p)^l for the
    probability that two independent walk pairs overlap in l vertices,
    split by the clustering pattern of the shared segments."""
    if not 1 <= l <= n - 1:
        raise ValueError("need 1 <= l <= n-1")
    if p < 1:
        raise ValueError("p >= 1 required")
    tp = 2.0 * p

    def ksum(choose_from: int, k_lo: int) -> float:
        s = 0.0
        for K in range(k_lo, l + 1):
            lg = (math.log(math.comb(choose_from, K - 1)) if math.comb(choose_from, K - 1) else -math.inf)
            if lg == -math.inf:
                continue
            lg += 2.0 * (math.log(math.comb(n - 1, K)) + math.lgamma(K + 1)) if math.comb(n - 1, K) else -math.inf
            if lg == -math.inf:
                continue
            lg -= K * math.log(p)
            s += math.exp(lg)
        return s

    term_i = (n - l - 1) ** 2 / p + tp * ksum(l - 1, 2)

    bubble = 2.0 * ((2.0 * (n - l) - 2.0) / tp) ** 2
    for m1 in range(1, n - l):
        for m1p in range(1, n - l):
            bubble += (((m1 + m1p - 2.0) / tp) ** 2
                       * ((2.0 * n - 2.0 * l - m1 - m1p - 2.0) / tp) ** 2)
    bubble += (n - l - 1) ** 2 / tp ** 2
    term_ii = tp * bubble

    if l >= 2:
        term_iii = tp * (l - 2) * (6.0 * ((n - l - 1.0) / tp) ** 2
                                   + 2.0 * (n - l - 1.0) ** 2 * (n - l - 2.0) ** 4 / tp ** 4
                                   + 4.0 * (n - 1.0) ** 2 * (n - l) ** 2 / tp ** 3)
        term_iii = max(term_iii, 0.0)
    else:
        term_iii = 0.0
    if l >= 4:
        term_iv = tp * math.comb(l - 2, 2) * (2.0 * (n - l) ** 2 / tp ** 2
                                              + 8.0 * (n - 1.0) ** 4 * (n - l) ** 2 / tp ** 3)
        term_v = tp * ksum(l - 2, 4)
    else:
        term_iv = 0.0
        term_v = 0.0
    return (1.0 + term_i) + term_ii + term_iii + term_iv + term_v


# ------------------------------------------------------- second moment A

def _en_lower(spec: DistributionSpec, n: int, x: float, p: int) -> float:
    """Certified lower bound on the expected number of cheap directed
    paths: path-count lower bound times the partial-sum CDF lower bound."""
    if p < 1:
        return 0.0
    path_factor = 2.0 * p - 1.0 - math.log(2.0 * p - 1.0)
    if path_factor <= 0.0:
        return 0.0
    log_paths = (n - 1) * math.log(path_factor)
    if spec.kind == "exponential":
        cdf_lower = gamma_cdf(n, spec.params[0] * x)
        return math.exp(log_paths) * cdf_lower if cdf_lower > 0 else 0.0
    corr = spec.C / abs(math.log(x)) if x != 1.0 else math.inf
    if corr >= 1.0:
        return 0.0
    log_cdf = (n * math.log(spec.a * x) - math.lgamma(n + 1)
               + n * math.log1p(-corr))
    return math.exp(log_paths + log_cdf)


def admissible_A(d: int, delta: float, eta: float,
                 spec: DistributionSpec) -> Tuple[float, BoundParams]:
    """Smallest certifiable second-moment ratio A with E N^2 <= A (E N)^2.

    Generic pipeline: A = 1 + e^(f+2g) * corr_max * sum_l ratio^l + 1/EN.
    Exponential pipeline replaces the sandwich ratios by exact gamma-CDF
    ratios: A = 1 + 1/EN + e^(2g) * sum_l [g(n-l,x)/g(n,x)] (1/2p)^l corr_l.
    Any failed precondition returns A = +inf with the flag named.
    """
    if not spec.has_positive_finite_a:
        raise UnsupportedRegime("second-moment bound needs a in (0, inf)")
    a, C = spec.a, spec.C
    n, x, p = bound_geometry(d, delta, eta, a)
    flags: List[Tuple[str, bool]] = []

    def flag(name: str, ok: bool) -> bool:
        flags.append((name, bool(ok)))
        return bool(ok)

    ok = flag("n-at-least-2", n >= 2)
    ok &= flag("p-at-least-2", p >= 2)
    denom_inner = 1.0 - 1.0 / (delta ** (1.0 + eta) * math.log(d))
    ok &= flag("ratio-denominator-positive", denom_inner > 0.0)
    ratio = (1.0 - delta) / denom_inner if denom_inner > 0.0 else math.inf
    ok &= flag("geometric-ratio-below-1", _lt(ratio, 1.0))
    ok &= flag("overlap-series-convergent", ok and (n - 1) * n * n < p)
    if not ok:
        return math.inf, BoundParams(d, delta, eta, 0.0, n, x, p, 0.0,
                                     math.inf, tuple(flags))
    en = _en_lower(spec, n, x, p)
    ok = flag("first-moment-positive", en > 0.0)
    g, _ = g_eta(delta, eta, d)
    corr = [overlap_correction(n, p, l) for l in range(1, n)]
    if spec.kind == "exponential":
        gn = gamma_cdf(n, a * x)
        total = 0.0
        for l in range(1, n):
            total += (gamma_cdf(n - l, a * x) / gn) * (0.5 / p) ** l * corr[l - 1]
        A = 1.0 + (1.0 / en if en > 0 else math.inf) + math.exp(2.0 * g) * total
    else:
        try:
            f = f_aC(delta, d, a, C)
        except FDenominator:
            flag("f-denominator-positive", False)
            return math.inf, BoundParams(d, delta, eta, 0.0, n, x, p, 0.0,
                                         math.inf, tuple(flags))
        flag("f-denominator-positive", True)
        corr_max = max(corr)
        geo = sum(ratio ** l for l in range(n))
        A = (1.0 + math.exp(f + 2.0 * g) * corr_max * geo
             + (1.0 / en if en > 0 else math.inf))
    if not ok:
        A = math.inf
    return A, BoundParams(d, delta, eta, 0.0, n, x, p, 0.0, A, tuple(flags))


# ------------------------------------------------------------- upsilon

def upsilon(d: int, delta: float, eta: float, B: float, A: float,
            spec: DistributionSpec) -> Tuple[float, Tuple[Tuple[str, bool], ...]]:
    """Upper bound on the e_1 time constant:

        (log d / 2ad)(B delta + 1/(1-delta)) + tail^m * E tau,

    tail = 1 - (B delta log d / 2Ad)(1 - C/|log y|) generically, or
    1 - (1 - e^(-B delta log d / 2d))/A for the exponential law;
    m = floor(d / (delta^(1+eta) log d)); y must sit in the CDF's
    certified small-x window."""
    if not spec.has_positive_finite_a:
        raise UnsupportedRegime("upper bound needs a in (0, inf)")
    a, C = spec.a, spec.C
    ld = math.log(d)
    y = B * delta * ld / (2.0 * a * d)
    flags: List[Tuple[str, bool]] = []
    y_ok = 0.0 < y and y <= min(spec.eps0, math.exp(-C))
    flags.append(("y-in-validity-window", y_ok))
    flags.append(("A-finite-above-1", math.isfinite(A) and A > 1.0))
    if not (y_ok and math.isfinite(A) and A > 1.0):
        return math.inf, tuple(flags)
    first = ld / (2.0 * a * d) * (B * delta + 1.0 / (1.0 - delta))
    m = int(d / (delta ** (1.0 + eta) * ld))
    if spec.kind == "exponential":
        base = 1.0 - (-math.expm1(-B * delta * ld / (2.0 * d))) / A
    else:
        base = 1.0 - (B * delta * ld / (2.0 * A * d)) * (1.0 - C / abs(math.log(y)))
    flags.append(("tail-base-below-1", base < 1.0))
    base = min(max(base, 0.0), 1.0)
    return first + base ** m * spec.mean, tuple(flags)


def optimize_upper(d: int, spec: DistributionSpec,
                   deltas: Optional[Iterable[float]] = None,
                   n_B: int = 61, etas: Tuple[float, ...] = (1e-3, 1e-2, 1e-1),
                   refine: bool = True) -> Tuple[float, BoundParams]:
    """Grid search over (delta, B, eta) with A = admissible_A at each
    (delta, eta); one 10x local refinement around the incumbent.  The
    infimum over a finite grid is always a valid upper bound."""
    if deltas is None:
        deltas = np.linspace(0.01, 0.99, 99)
    b_grid = np.exp(np.linspace(math.log(0.1), math.log(100.0), n_B))
    best = (math.inf, None)

    def sweep(dl_list, b_list, eta_list):
        nonlocal best
        for delta in dl_list:
            if not 0.0 < delta < 1.0:
                continue
            for eta in eta_list:
                try:
                    A, params = admissible_A(d, delta, eta, spec)
                except (ValueError, UnsupportedRegime):
                    continue
                if not math.isfinite(A):
                    continue
                for B in b_list:
                    val, yflags = upsilon(d, delta, eta, B, A, spec)
                    if not all(ok for _, ok in yflags):
                        continue
                    if val < best[0]:
                        full = BoundParams(d, float(delta), float(eta), float(B),
                                           params.n, params.x, params.p,
                                           B * delta * math.log(d) / (2 * spec.a * d),
                                           A, params.validity + yflags)
                        best = (val, full)

    sweep(deltas, b_grid, etas)
    if best[1] is None:
        raise NoValidCertificate(f"no admissible (delta, B, eta) at d={d}")
    if refine:
        p0 = best[1]
        dl = np.linspace(max(1e-3, p0.delta - 0.01), min(1 - 1e-9, p0.delta + 0.01), 21)
        bl = np.exp(np.linspace(math.log(p0.B) - 0.1, math.log(p0.B) + 0.1, 21))
        sweep(dl, bl, (p0.eta,))
    return best


# ----------------------------------------------------------- lower bound

def lower_bound_mu(d: int, spec: DistributionSpec,
                   delta: float) -> Tuple[float, Tuple[Tuple[str, bool], ...]]:
    """Certified lower bound x = (1-delta) log d / (2ad) on the e_1 time
    constant, valid when the union-bound series is summable:

        e^2 (1-delta) d^(-delta^2) log d < 1      (generic laws)
        e^2 (1-delta) d^(-delta)   log d < 1      (exponential: the
                                                   Chernoff step needs no
                                                   (1+delta) slack)

    Generic laws additionally need the Chernoff-substitution gates on
    sqrt(x)."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta in (0,1) required")
    if not spec.has_positive_finite_a:
        raise UnsupportedRegime("lower bound needs a in (0, inf)")
    a = spec.a
    ld = math.log(d)
    x = (1.0 - delta) * ld / (2.0 * a * d)
    flags: List[Tuple[str, bool]] = []
    expo = delta if spec.kind == "exponential" else delta * delta
    gate = math.exp(2.0) * (1.0 - delta) * d ** (-expo) * ld
    flags.append(("union-bound-summable", _lt(gate, 1.0)))
    if spec.kind != "exponential":
        sx = math.sqrt(x)
        t1 = sx * math.log(delta * a / 2.0)
        t2 = 2.0 * sx * math.log(sx)
        flags.append(("sqrt-x-in-window", sx <= min(spec.eps0, 1.0)))
        flags.append(("chernoff-term1", t1 >= -1.0 / 3.0))
        flags.append(("chernoff-term2", t2 >= -1.0 / 3.0))
        flags.append(("chernoff-sum", t1 + t2 >= -1.0))
    valid = all(ok for _, ok in flags)
    return (x if valid else 0.0), tuple(flags)


def best_lower_bound_mu(d: int, spec: DistributionSpec,
                        deltas: Optional[Iterable[float]] = None):
    """Largest valid lower bound over a delta grid, locally refined twice:
    the bound is maximized at the smallest delta passing the summability
    gate, which can sit between coarse grid points."""

    def scan(grid):
        best, best_delta, best_flags = 0.0, None, ()
        for delta in grid:
            if not 0.0 < delta < 1.0:
                continue
            b, flags = lower_bound_mu(d, spec, float(delta))
            if b > best:
                best, best_delta, best_flags = b, float(delta), flags
        return best, best_delta, best_flags

    coarse = np.linspace(0.01, 0.99, 99) if deltas is None else list(deltas)
    best, best_delta, best_flags = scan(coarse)
    if deltas is None and best_delta is not None:
        step = 0.01
        for _ in range(2):
            fine = np.linspace(best_delta - step, best_delta + step, 201)
            b, dl, fl = scan(fine)
            if b > best:
                best, best_delta, best_flags = b, dl, fl
            step /= 100.0
    return best, best_delta, best_flags


# ------------------------------------------------------------ alpha star

def alpha_star() -> Tuple[float, float]:
    """(alpha*, sqrt(alpha*^2 - 1)/2) with alpha* the nonzero root of
    coth(alpha) = alpha, by bisection to 1e-14."""
    h = lambda al: math.cosh(al) / math.sinh(al) - al
    lo, hi = 1.01, 2.0
    assert h(lo) > 0 > h(hi)
    while hi - lo > 1e-14:
        mid = 0.5 * (lo + hi)
        if h(mid) > 0:
            lo = mid
        else:
            hi = mid
    al = 0.5 * (lo + hi)
    return al, math.sqrt(al * al - 1.0) / 2.0


def inf_identity_residual() -> float:
    """| inf_{y>=1} (y+1)^((y+1)/2y) (y-1)^((y-1)/2y)  -  e sqrt(a*^2-1) |."""
    def obj(y: float) -> float:
        return ((y + 1.0) ** ((y + 1.0) / (2.0 * y))
                * (y - 1.0) ** ((y - 1.0) / (2.0 * y)))
    res = sp_optimize.minimize_scalar(obj, bounds=(1.0 + 1e-12, 10.0), method="bounded",
                                      options={"xatol": 1e-12})
    al, _ = alpha_star()
    return abs(res.fun - math.e * math.sqrt(al * al - 1.0))


# --------------------------------------------------------- mu star lower

def mu_star_lower(d: int, spec: DistributionSpec,
                  delta: float) -> Tuple[float, Tuple[Tuple[str, bool], ...]]:
    """Lower bound (1-delta) sqrt(a*^2-1) / (2 a sqrt(d)) on the diagonal
    time constant; for the exponential law the delta = 0 form holds for
    every d >= 2, so the returned bound is never worse than that."""
    if not 0.0 <= delta < 1.0:
        raise ValueError("delta in [0,1) required")
    if not spec.has_positive_finite_a:
        raise UnsupportedRegime("diagonal bound needs a in (0, inf)")
    a, C, eps0 = spec.a, spec.C, spec.eps0
    al, half = alpha_star()
    am1 = al * al - 1.0
    flags: List[Tuple[str, bool]] = []
    exp_floor = (math.sqrt(am1) / (2.0 * a * math.sqrt(d))
                 if spec.kind == "exponential" and d >= 2 else 0.0)
    if delta == 0.0:
        flags.append(("exponential-delta0", spec.kind == "exponential" and d >= 2))
        return exp_floor, tuple(flags)
    gate_a = d >= (am1 / (4.0 * a * a)) * max(eps0 ** -4.0,
                                              math.exp(8.0 * C / delta), 1.0)
    lhs_b = math.sqrt(2.0 * a) / am1 ** 0.25 * d ** 0.25 - 0.5 * math.log(d)
    rhs_b = math.log(4.0 / (delta * (1.0 - delta) * math.sqrt(am1)))
    gate_b = lhs_b >= rhs_b
    flags.append(("dimension-large-enough", gate_a))
    flags.append(("chernoff-window", gate_b))
    bound = (1.0 - delta) * math.sqrt(am1) / (2.0 * a * math.sqrt(d)) if (gate_a and gate_b) else 0.0
    if exp_floor > bound:
        flags.append(("exponential-delta0", True))
        return exp_floor, tuple(flags)
    return bound, tuple(flags)


def best_mu_star_lower(d: int, spec: DistributionSpec,
                       deltas: Optional[Iterable[float]] = None):
    if deltas is None:
        deltas = [0.0] + list(np.linspace(0.01, 0.99, 99))
    best, best_delta, best_flags = 0.0, None, ()
    for delta in deltas:
        if delta == 0.0 and spec.kind != "exponential":
            continue
        b, flags = mu_star_lower(d, spec, float(delta))
        if b > best:
            best, best_delta, best_flags = b, float(delta), flags
    return best, best_delta, best_flags


# ------------------------------------------------------------ certificate

@dataclass(frozen=True)
class ShapeCertificate:
    d: int
    spec_label: str
    mu_upper: float
    mu_lower: float
    mustar_lower: float
    mustar_upper: float
    ball_excluded: bool
    cube_strict: bool
    diamond_strict: bool
    witness_params: Optional[BoundParams]
    delta_mu_lower: Optional[float]
    delta_mustar_lower: Optional[float]
    all_preconditions: Tuple[Tuple[str, bool], ...]
    grid_spec: str = "delta:99x B:61x eta:3 +10x-refine"

    def to_json(self) -> str:
        def enc(v):
            if v is None:
                return None
            v = float(v)
            return None if math.isinf(v) else v
        payload = {
            "schema_version": 1,
            "tool_version": TOOL_VERSION,
            "d": self.d,
            "spec": self.spec_label,
            "verdicts": {
                "ball_excluded": bool(self.ball_excluded),
                "cube_strict": bool(self.cube_strict),
                "diamond_strict": bool(self.diamond_strict),
            },
            "witnesses": {
                "mu_upper": enc(self.mu_upper),
                "mu_lower": enc(self.mu_lower),
                "mustar_lower": enc(self.mustar_lower),
                "mustar_upper": enc(self.mustar_upper),
                "delta_mu_lower": enc(self.delta_mu_lower),
                "delta_mustar_lower": enc(self.delta_mustar_lower),
                "upper_params": None if self.witness_params is None else {
                    "delta": enc(self.witness_params.delta),
                    "eta": enc(self.witness_params.eta),
                    "B": enc(self.witness_params.B),
                    "A": enc(self.witness_params.A),
                    "n": self.witness_params.n,
                    "x": enc(self.witness_params.x),
                    "p": self.witness_params.p,
                    "y": enc(self.witness_params.y),
                },
            },
            "preconditions": [{"name": k, "satisfied": bool(v)}
                              for k, v in self.all_preconditions],
            "grid_spec": self.grid_spec,
        }
        return json.dumps(payload, indent=2)


def shape_certificate(d: int, spec: DistributionSpec,
                      compute_upper: bool = True) -> ShapeCertificate:
    if not spec.has_positive_finite_a:
        raise UnsupportedRegime("certificates need a in (0, inf)")
    preconds: List[Tuple[str, bool]] = []
    witness = None
    mu_up = math.inf
    if compute_upper:
        try:
            mu_up, witness = optimize_upper(d, spec)
            preconds.extend(witness.validity)
        except NoValidCertificate:
            preconds.append(("upper-bound-admissible-region-nonempty", False))
    mu_lo, dl_lo, lo_flags = best_lower_bound_mu(d, spec)
    preconds.extend(lo_flags)
    ms_lo, dl_ms, ms_flags = best_mu_star_lower(d, spec)
    preconds.extend(ms_flags)
    ms_up = math.sqrt(d) * expected_min(spec, d)
    ball = _lt(mu_up, ms_lo)
    diamond = _lt(ms_up, math.sqrt(d) * mu_lo) and mu_lo > 0.0
    return ShapeCertificate(
        d, spec.label, mu_up, mu_lo, ms_lo, ms_up,
        ball_excluded=ball, cube_strict=ball, diamond_strict=diamond,
        witness_params=witness, delta_mu_lower=dl_lo, delta_mustar_lower=dl_ms,
        all_preconditions=tuple(preconds),
    )


def diamond_strict_at(d: int, spec: DistributionSpec,
                      delta: Optional[float] = None) -> bool:
    """Cheap diamond test: E min < (1-delta) log d / (2ad) with a valid
    lower-bound gate (no grid search)."""
    if delta is not None:
        lo, flags = lower_bound_mu(d, spec, delta)
        if not all(ok for _, ok in flags):
            return False
    else:
        lo, _, flags = best_lower_bound_mu(d, spec)
        if lo <= 0.0:
            return False
    return _lt(expected_min(spec, d), lo)


def find_threshold(spec: DistributionSpec, verdict_kind: str,
                   delta: Optional[float] = None, d_max: int = 10 ** 7,
                   spot_checks: int = 20) -> int:
    """Smallest d at which the named verdict certifies, found by doubling
    then bisection; certification is re-confirmed at ``spot_checks``
    larger dimensions because monotonicity in d is not guaranteed."""

    def holds(d: int) -> bool:
        if d < 2:
            return False
        if verdict_kind == "diamond_strict":
            return diamond_strict_at(d, spec, delta)
        cert = shape_certificate(d, spec)
        return getattr(cert, verdict_kind)

    hi = 2
    while not holds(hi):
        hi *= 2
        if hi > d_max:
            raise NoValidCertificate(f"{verdict_kind} not certified for any d <= {d_max}")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if holds(mid):
            hi = mid
        else:
            lo = mid
    threshold = hi
    rng = np.random.Generator(np.random.PCG64(0))
    for dd in sorted(set(int(x) for x in
                         rng.integers(threshold, max(threshold + 2, min(4 * threshold, d_max)),
                                      size=spot_checks))):
        if not holds(dd):
            raise NoValidCertificate(
                f"{verdict_kind} fails at d={dd} above threshold {threshold}")
    return threshold
