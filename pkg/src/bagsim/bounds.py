"""Existence thresholds for approximate equilibria in share-bounded games.

For a share bound ``delta`` the package works with two scalar thresholds:

* :func:`alpha_upper` -- every game whose demands respect the bound reaches
  an approximate equilibrium through improving moves once the improvement
  factor is at least this value.  It equals the worst possible ratio between
  the potential a single demand adds to a resource and the utility that
  demand earns, maximised over the residual load; the maximiser is expressed
  through the lower real branch of the Lambert W function.
* :func:`alpha_lower` -- below this value the four-resource swap family from
  :func:`bagsim.constructions.build_b0` has no approximate equilibrium at
  all, so no general existence guarantee is possible.

Everything here is a pure scalar function, safe for unrestricted parallel
use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_BRANCH_POINT = -math.exp(-1.0)  # leftmost argument of the real W branches


@dataclass(frozen=True)
class Thresholds:
    """The threshold pair for one share bound, with the intermediate w.

    ``w`` is -W_{-1}(-2*exp(-delta-2))/2, the scaled root entering the
    closed form of ``alpha_upper``; it always exceeds 1.
    """

    delta: float
    w: float
    alpha_upper: float
    alpha_lower: float


def lambert_w_minus1(x: float) -> float:
    """Lower real branch W_{-1} of the Lambert W function.

    Solves w * exp(w) = x for w <= -1, defined for -1/e <= x < 0.  Uses the
    asymptotic initial guess ln(-x) - ln(-ln(-x)) refined by Halley's
    iteration; if the iterate ever leaves the branch (w > -1, where the
    derivative changes sign) it falls back to bisection, which is safe
    because w * exp(w) is monotone on (-inf, -1].  The returned root
    satisfies its defining equation to ~1e-14 relative.

    Raises ValueError outside the domain.
    """
    if not (x < 0.0):
        raise ValueError(f"lambert_w_minus1 requires x < 0, got {x}")
    if x < _BRANCH_POINT:
        raise ValueError(f"lambert_w_minus1 requires x >= -1/e, got {x}")
    if x == _BRANCH_POINT:
        return -1.0

    log_neg_x = math.log(-x)
    w = log_neg_x - math.log(-log_neg_x)
    if w > -1.0:  # guess can overshoot near the branch point
        w = -1.0000001

    for _ in range(100):
        e = math.exp(w)
        f = w * e - x
        # Halley step: f / (f' - f*f''/(2 f'))
        denom = e * (w + 1.0) - (w + 2.0) * f / (2.0 * (w + 1.0))
        if denom == 0.0 or not math.isfinite(denom):
            break
        dw = f / denom
        w -= dw
        if not math.isfinite(w) or w > -1.0:
            break
        if abs(dw) <= 1e-14 * (1.0 + abs(w)):
            return w

    # Bisection fallback on [-700, -1]: g(w) = w*e^w decreases from ~0- to -1/e.
    lo, hi = -700.0, -1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * math.exp(mid) > x:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, abs(lo)):
            break
    return 0.5 * (lo + hi)


def _w_of(delta: float) -> float:
    return -0.5 * lambert_w_minus1(-2.0 * math.exp(-delta - 2.0))


def alpha_upper(delta: float) -> float:
    """Improvement factor above which improving moves always terminate.

    Closed form w * (ln(w) - w + delta + 1) / delta with
    w = -W_{-1}(-2*exp(-delta-2)) / 2.  Monotone increasing in delta and
    tending to 1 as delta -> 0.
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    w = _w_of(delta)
    return w * (math.log(w) - w + delta + 1.0) / delta


def alpha_lower(delta: float) -> float:
    """Largest factor at which the swap family can be made equilibrium-free.

    Closed form (2*sqrt(delta^2*(delta+2)) + delta - 1) / (4*delta - 1).
    The denominator vanishes at delta = 1/4; the singularity is removable
    but this function reports it as a domain error rather than guessing a
    limit value.
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if abs(4.0 * delta - 1.0) < 1e-12:
        raise ValueError("alpha_lower is singular at delta = 1/4")
    return (2.0 * math.sqrt(delta * delta * (delta + 2.0)) + delta - 1.0) / (
        4.0 * delta - 1.0
    )


def thresholds(delta: float) -> Thresholds:
    """Both thresholds and the intermediate w for one share bound."""
    return Thresholds(delta, _w_of(delta), alpha_upper(delta), alpha_lower(delta))


def ratio_function_f(delta: float, gamma: float) -> float:
    """Utility ratio between the two main players of the swap family.

    Equals (gamma + delta*(gamma+1)) / (delta + gamma*(gamma+1)); the
    disadvantaged player improves by exactly this factor when she swaps, so
    it is the smallest improvement factor the family tolerates.
    """
    if delta <= 0 or gamma <= 0:
        raise ValueError("delta and gamma must be positive")
    return (gamma + delta * (gamma + 1.0)) / (delta + gamma * (gamma + 1.0))


def gamma_star(delta: float) -> float:
    """Side-demand value maximising :func:`ratio_function_f` for a given
    delta: (sqrt(delta^3 + 2*delta^2) - delta) / (delta + 1), always in
    (0, delta)."""
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    return (math.sqrt(delta**3 + 2.0 * delta**2) - delta) / (delta + 1.0)


def worst_case_ratio(
    delta: float, b: float, t_other: float, s_own: float
) -> float:
    """Ratio between the potential a demand adds to a resource and the
    utility it earns there.

    ``t_other`` is the demand everyone else places on the resource and
    ``s_own`` the player's own demand, constrained to (0, delta*b].  While
    the resource stays within capacity the ratio is 1 by definition.  Over
    capacity there are two regimes depending on whether the others alone
    already exceed the capacity.  The global maximum over (t_other, s_own)
    is :func:`alpha_upper`, attained at t_other = b*(w - delta),
    s_own = delta*b.
    """
    if delta <= 0 or b <= 0:
        raise ValueError("delta and b must be positive")
    if t_other < 0:
        raise ValueError(f"t_other must be nonnegative, got {t_other}")
    if not 0 < s_own <= delta * b * (1.0 + 1e-12):
        raise ValueError(f"s_own must lie in (0, delta*b], got {s_own}")
    t_plus_s = t_other + s_own
    if t_plus_s <= b:
        return 1.0
    if t_other < b:
        return t_plus_s * (b - t_other + b * math.log(t_plus_s / b)) / (b * s_own)
    return t_plus_s * math.log1p(s_own / t_other) / s_own


def ratio_grid_max(
    delta: float,
    b: float = 1.0,
    n_t: int = 2000,
    n_s: int = 500,
    t_max_factor: float = 5.0,
) -> float:
    """Maximum of :func:`worst_case_ratio` over a dense rectangular grid.

    Sweeps t_other over [0, t_max_factor*b] and s_own over (0, delta*b];
    with the defaults that is 10^6 evaluation points.  Used to certify
    numerically that nothing on the grid exceeds :func:`alpha_upper`.
    """
    if delta <= 0 or b <= 0:
        raise ValueError("delta and b must be positive")
    t = np.linspace(0.0, t_max_factor * b, n_t)[:, None]
    s = np.linspace(delta * b / n_s, delta * b, n_s)[None, :]
    total = t + s
    over = total > b
    below_cap = t < b
    ratio = np.ones_like(total)
    m1 = over & below_cap
    m2 = over & ~below_cap
    tt = np.broadcast_to(t, total.shape)
    ss = np.broadcast_to(s, total.shape)
    ratio[m1] = (
        total[m1]
        * (b - tt[m1] + b * np.log(total[m1] / b))
        / (b * ss[m1])
    )
    ratio[m2] = total[m2] * np.log1p(ss[m2] / tt[m2]) / ss[m2]
    return float(ratio.max())
