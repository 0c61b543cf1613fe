"""Edge-weight laws.

A law is described by its CDF, its quantile, its mean, and the local
behavior of the CDF near 0: constants (a, C, eps0) such that

    |F(x)/x - a| <= C / |log x|    for all x in (0, eps0].

``a`` may be 0 (support bounded away from 0, or sub-linear mass at 0) or
``inf`` (super-linear mass at 0); both are carried as metadata only and
are rejected by the certificate pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.special import gammainc

from .errors import (
    LogSingularity,
    OutsideValidityInterval,
    UnsupportedRegime,
    UnverifiableLocalBehavior,
)

_SMALL_X_GRID = 10_000


@dataclass(frozen=True)
class DistributionSpec:
    """An edge-weight law together with its small-x constants.

    Immutable after construction; safe for concurrent reads.
    """

    kind: str                      # exponential | uniform | shifted | deterministic | custom
    params: Tuple[float, ...]
    a: float                       # small-x slope, may be 0 or math.inf
    C: float                       # log-correction constant
    eps0: float                    # right end of the validity interval
    mean: float
    cdf: Callable[[float], float] = field(compare=False, repr=False)
    quantile: Callable[[float], float] = field(compare=False, repr=False)
    label: str = ""
    base: Optional["DistributionSpec"] = field(default=None, compare=False, repr=False)

    def sf(self, x: float) -> float:
        return 1.0 - self.cdf(x)

    @property
    def has_positive_finite_a(self) -> bool:
        return 0.0 < self.a < math.inf

    def sample(self, n: int, seed: int) -> np.ndarray:
        """n quantile-transformed uniforms from a seeded PCG64 stream."""
        rng = np.random.Generator(np.random.PCG64(seed))
        u = rng.random(n)
        return np.array([self.quantile(ui) for ui in u])


def _check_small_x(cdf, a, C, eps0, *, grid=_SMALL_X_GRID) -> bool:
    """Numerically verify |F(x)/x - a| <= C/|log x| on a dense grid."""
    if not (0.0 < eps0 < 1.0):
        return False
    xs = np.linspace(eps0 / grid, eps0, grid)
    for x in xs:
        if abs(cdf(x) / x - a) > C / abs(math.log(x)) + 1e-12:
            return False
    return True


def exponential(rate: float = 1.0) -> DistributionSpec:
    if rate <= 0:
        raise ValueError("rate must be positive")
    cdf = lambda x: -math.expm1(-rate * x) if x > 0 else 0.0
    quantile = lambda u: -math.log1p(-u) / rate
    # C = 0.5 with the largest eps0 from a shrinking ladder that passes
    # the grid check; any consistent (C, eps0) pair is equally valid.
    C = 0.5
    eps0 = 0.1
    while eps0 > 1e-6 and not _check_small_x(cdf, rate, C, eps0):
        eps0 /= 2.0
    if not _check_small_x(cdf, rate, C, eps0):
        raise UnverifiableLocalBehavior("no validity interval for exponential")
    return DistributionSpec(
        kind="exponential", params=(rate,), a=rate, C=C, eps0=eps0,
        mean=1.0 / rate, cdf=cdf, quantile=quantile,
        label=f"exponential:{rate:g}",
    )


def uniform(s: float = 1.0) -> DistributionSpec:
    """Uniform on [0, s]."""
    if s <= 0:
        raise ValueError("upper endpoint must be positive")
    cdf = lambda x: min(max(x / s, 0.0), 1.0)
    quantile = lambda u: s * u
    eps0 = min(s, 0.5)   # keep away from the log singularity at x = 1
    return DistributionSpec(
        kind="uniform", params=(s,), a=1.0 / s, C=0.0, eps0=eps0,
        mean=s / 2.0, cdf=cdf, quantile=quantile, label=f"uniform:0:{s:g}",
    )


def deterministic(c: float) -> DistributionSpec:
    if c <= 0:
        raise ValueError("constant must be positive")
    cdf = lambda x: 1.0 if x >= c else 0.0
    quantile = lambda u: c
    return DistributionSpec(
        kind="deterministic", params=(c,), a=0.0, C=0.0, eps0=min(c / 2, 0.5),
        mean=c, cdf=cdf, quantile=quantile, label=f"deterministic:{c:g}",
    )


def shifted(offset: float, base: DistributionSpec) -> DistributionSpec:
    """base + offset; support in (offset, inf) forces a = 0."""
    if offset <= 0:
        raise ValueError("offset must be positive")
    cdf = lambda x, _b=base.cdf: _b(x - offset) if x > offset else 0.0
    quantile = lambda u, _q=base.quantile: offset + _q(u)
    return DistributionSpec(
        kind="shifted", params=(offset,) + base.params, a=0.0, C=0.0,
        eps0=min(offset / 2, 0.5), mean=offset + base.mean,
        cdf=cdf, quantile=quantile, label=f"shifted:{offset:g}:{base.label}",
        base=base,
    )


def custom(xs: Sequence[float], ps: Sequence[float]) -> DistributionSpec:
    """Piecewise-linear CDF through (xs, ps); (a, C, eps0) fitted numerically.

    Raises ``unverifiable-local-behavior`` when no consistent (a, C) exists
    on any candidate interval.
    """
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    if xs.ndim != 1 or xs.shape != ps.shape or len(xs) < 2:
        raise ValueError("need matching 1-d tables with >= 2 points")
    if np.any(np.diff(xs) <= 0) or np.any(np.diff(ps) < 0):
        raise ValueError("xs strictly increasing, ps non-decreasing")
    if xs[0] < 0 or ps[0] < 0 or not math.isclose(ps[-1], 1.0):
        raise ValueError("table must span a CDF on [0, inf)")

    def cdf(x: float) -> float:
        if x <= xs[0]:
            return float(ps[0]) if x >= xs[0] else 0.0
        if x >= xs[-1]:
            return 1.0
        return float(np.interp(x, xs, ps))

    def quantile(u: float) -> float:
        if u <= ps[0]:
            return float(xs[0])
        if u >= 1.0:
            return float(xs[-1])
        return float(np.interp(u, ps, xs))

    mean = float(np.trapezoid([1.0 - cdf(t) for t in np.linspace(0, xs[-1], 4096)],
                              np.linspace(0, xs[-1], 4096)))
    if ps[0] > 0:
        a, C, eps0 = math.inf, 0.0, min(xs[-1] / 2, 0.5)   # mass at the left endpoint
    else:
        a = cdf(xs[0] + 1e-9) / (xs[0] + 1e-9) if xs[0] == 0 else 0.0
        fitted = None
        for eps0 in (0.5, 0.2, 0.1, 0.05, 0.02, 0.01):
            if eps0 >= xs[-1]:
                continue
            for C in (0.0, 0.5, 1.0, 2.0, 5.0):
                if _check_small_x(cdf, a, C, eps0, grid=1000):
                    fitted = (a, C, eps0)
                    break
            if fitted:
                break
        if fitted is None:
            raise UnverifiableLocalBehavior("no consistent (a, C) on any interval")
        a, C, eps0 = fitted
    return DistributionSpec(
        kind="custom", params=tuple(xs) + tuple(ps), a=a, C=C, eps0=eps0,
        mean=mean, cdf=cdf, quantile=quantile, label="custom",
    )


def parse_distribution(text: str) -> DistributionSpec:
    """Parse CLI syntax: exponential:1.0, uniform:0:1, deterministic:1.0,
    shifted:0.5:exponential:1.0."""
    parts = text.split(":")
    kind = parts[0]
    try:
        if kind == "exponential":
            return exponential(float(parts[1]) if len(parts) > 1 else 1.0)
        if kind == "uniform":
            lo, hi = float(parts[1]), float(parts[2])
            if lo != 0.0:
                raise ValueError("uniform laws start at 0")
            return uniform(hi)
        if kind == "deterministic":
            return deterministic(float(parts[1]))
        if kind == "shifted":
            return shifted(float(parts[1]), parse_distribution(":".join(parts[2:])))
    except (IndexError, ValueError) as exc:
        raise ValueError(f"bad distribution spec {text!r}: {exc}") from exc
    raise ValueError(f"unknown distribution kind {kind!r}")


def small_x_params(spec: DistributionSpec) -> Tuple[float, float, float]:
    """(a, C, eps0) for the law; the invariant holds on (0, eps0]."""
    return spec.a, spec.C, spec.eps0


def expected_min(spec: DistributionSpec, d: int) -> float:
    """E min(t_1..t_d) = integral of P(tau > t)^d dt.

    Closed form for the built-in kinds, adaptive quadrature otherwise.
    """
    if d < 1:
        raise ValueError("d >= 1 required")
    if spec.kind == "exponential":
        return 1.0 / (spec.params[0] * d)
    if spec.kind == "uniform":
        return spec.params[0] / (d + 1)
    if spec.kind == "deterministic":
        return spec.params[0]
    if spec.kind == "shifted":
        return spec.params[0] + expected_min(spec.base, d)
    val, err = integrate.quad(lambda t: spec.sf(t) ** d, 0.0, math.inf,
                              epsabs=0.0, epsrel=1e-11, limit=500)
    if not math.isfinite(val):
        raise ArithmeticError("divergent expected-min integral")
    return val


def expected_min_split(spec: DistributionSpec, d: int) -> dict:
    """Certified three-term upper bound for E min(t_1..t_d), valid for a > 0.

    Splits the integral at (delta, m): a linear lower bound for the CDF on
    [0, delta], the raw survival power on [delta, m], and a Markov tail
    beyond m.  Every term is O(1/d), witnessing d * E Y <= c uniformly.
    """
    if not spec.has_positive_finite_a:
        raise UnsupportedRegime("three-term split needs a in (0, inf)")
    if d < 2:
        raise ValueError("d >= 2 required")
    a, C, eps0 = spec.a, spec.C, spec.eps0
    eps = 0.5
    # On (0, delta]: F(t) >= t a (1 - eps) as soon as C/|log t| <= a*eps.
    delta = min(eps0, math.exp(-C / (a * eps)) if C > 0 else eps0)
    m = max(2.0 * spec.mean, delta * 2.0)
    t1 = 1.0 / ((d + 1) * a * (1.0 - eps))
    t2 = (m - delta) * spec.sf(delta) ** d
    t3 = (spec.mean / m) ** d * m / (d - 1)
    return {
        "delta": delta, "m": m,
        "linear_part": t1, "middle_part": t2, "tail_part": t3,
        "bound": t1 + t2 + t3,
    }


def sn_cdf_bounds(spec: DistributionSpec, n: int, x: float) -> Tuple[float, float]:
    """Sandwich for P(X_1 + ... + X_n <= x) from the small-x constants:

        (a x)^n / n! * (1 -/+ C/|log x|)^n

    Factorials and powers are taken in log space; the lower bound is
    clamped at 0 when the correction factor goes negative.
    """
    if not spec.has_positive_finite_a:
        raise UnsupportedRegime("partial-sum bounds need a in (0, inf)")
    if n < 1 or x < 0:
        raise ValueError("need n >= 1 and x >= 0")
    if x > spec.eps0:
        raise OutsideValidityInterval(f"x={x} > eps0={spec.eps0}")
    if x == 1.0:
        raise LogSingularity("|log x| = 0")
    if x == 0.0:
        return 0.0, 0.0
    a, C = spec.a, spec.C
    log_base = n * math.log(a * x) - math.lgamma(n + 1)
    corr = C / abs(math.log(x))
    upper = math.exp(log_base + n * math.log1p(corr))
    if corr >= 1.0:
        lower = 0.0
    else:
        lower = math.exp(log_base + n * math.log1p(-corr))
    return lower, upper


def gamma_cdf(n: int, x: float) -> float:
    """CDF of a Gamma(shape=n, scale=1) variable: the regularized lower
    incomplete gamma function."""
    if n < 1 or int(n) != n:
        raise ValueError("integer n >= 1 required")
    if x < 0:
        raise ValueError("x >= 0 required")
    return float(gammainc(n, x))
