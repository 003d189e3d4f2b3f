"""Scalar special functions used by the projection scores.

Digamma and log-gamma are computed by upward recurrence into the asymptotic
(Stirling-type) regime, keeping the package free of heavyweight numeric
dependencies for two scalar functions. ``kappa`` maps t-distribution degrees
of freedom to the expected log-spread a user would state as a prior belief;
``kappa_inverse`` recovers the degrees of freedom from that expectation.
"""

from __future__ import annotations

import math

_ASYMPTOTIC_CUTOFF = 10.0

# psi(x) ~ log x - 1/(2x) + c1/x^2 + c2/x^4 + ...
_PSI_TAIL = (
    -1.0 / 12.0,
    1.0 / 120.0,
    -1.0 / 252.0,
    1.0 / 240.0,
    -1.0 / 132.0,
    691.0 / 32760.0,
)

# log Gamma(x) ~ (x - 1/2) log x - x + log(2 pi)/2 + b1/x + b2/x^3 + ...
_LGAMMA_TAIL = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
)

_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def digamma(x: float) -> float:
    """Digamma function psi(x) = d/dx log Gamma(x) for x > 0.

    Accurate to roughly 1e-12 absolute over [1e-3, 1e6].
    """
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"digamma requires x > 0, got {x!r}")
    acc = 0.0
    while x < _ASYMPTOTIC_CUTOFF:
        acc -= 1.0 / x
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    tail = 0.0
    for c in reversed(_PSI_TAIL):
        tail = (tail + c) * inv2
    return acc + math.log(x) - 0.5 * inv + tail


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0.

    Near machine accuracy in relative terms; absolute accuracy is bounded
    below by the float64 spacing of the result once log Gamma(x) is large.
    """
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x!r}")
    acc = 0.0
    while x < _ASYMPTOTIC_CUTOFF:
        acc -= math.log(x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    tail = 0.0
    for b in reversed(_LGAMMA_TAIL):
        tail = tail * inv2 + b
    return acc + (x - 0.5) * math.log(x) - x + _HALF_LOG_TWO_PI + tail * inv


def kappa(nu: float, d: int) -> float:
    """Expected log-spread map: psi((nu + d) / 2) - psi(nu / 2).

    Strictly decreasing in ``nu``, spanning (0, inf) as nu runs from inf
    down to 0.
    """
    nu = float(nu)
    if not nu > 0.0:
        raise ValueError(f"kappa requires nu > 0, got {nu!r}")
    d = int(d)
    if d < 1:
        raise ValueError(f"kappa requires d >= 1, got {d!r}")
    return digamma((nu + d) / 2.0) - digamma(nu / 2.0)


def kappa_inverse(c: float, d: int) -> float:
    """Degrees of freedom nu solving kappa(nu, d) = c, by bisection.

    The bracket starts at [1e-6, 1e8] and expands geometrically; bisection
    runs in log space because kappa is strictly decreasing and nu spans many
    orders of magnitude. Raises for c outside the attainable range (0, inf).
    """
    c = float(c)
    if not c > 0.0:
        raise ValueError(f"expected spread c is out of range: must be positive, got {c!r}")
    d = int(d)
    if d < 1:
        raise ValueError(f"kappa_inverse requires d >= 1, got {d!r}")
    lo, hi = 1e-6, 1e8
    while kappa(lo, d) < c:
        lo /= 10.0
        if lo < 1e-280:
            raise ValueError(f"expected spread c = {c!r} is out of the attainable range")
    while kappa(hi, d) > c:
        hi *= 10.0
        if hi > 1e280:
            raise ValueError(f"expected spread c = {c!r} is out of the attainable range")
    mid = math.sqrt(lo * hi)
    for _ in range(500):
        if kappa(mid, d) > c:
            lo = mid
        else:
            hi = mid
        mid = math.sqrt(lo * hi)
        if hi - lo <= 4e-16 * mid:
            break
    return mid
