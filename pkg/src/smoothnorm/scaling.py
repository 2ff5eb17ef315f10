"""Certified bisection for Luxemburg-type scaling infima.

Several norms in this package have the form

    ||x|| = inf { rho > 0 : S(rho) <= 1 }

where S is continuous, nonincreasing in rho, S(rho) -> infinity as
rho -> 0+ for x != 0, and S(rho) -> 0 as rho -> infinity.  The infimum is
bracketed and bisected on the feasibility predicate S(rho) <= 1; the upper
bracket endpoint is returned so that S(result) <= 1 holds as computed,
with no tolerance.
"""

from dataclasses import dataclass

from .errors import NumericError

DEFAULT_TOL = 1e-10
MAX_BRACKET_STEPS = 2000
MAX_BISECT_STEPS = 500


@dataclass(frozen=True)
class ScalingBracket:
    """Final bracket of a scaling-infimum bisection.

    lo is infeasible (S(lo) > 1), hi is feasible (S(hi) <= 1), and
    hi - lo <= tol * hi on success.
    """

    lo: float
    hi: float
    s_hi: float
    iterations: int


def feasible_scale_inf(s_fn, hi0, tol=DEFAULT_TOL):
    """Bracket and bisect inf{rho > 0 : s_fn(rho) <= 1}.

    Parameters
    ----------
    s_fn : callable
        Nonincreasing map rho -> S(rho), rho > 0.
    hi0 : float
        Positive starting guess for the feasible side.
    tol : float
        Relative bracket width at which bisection stops.

    Returns
    -------
    ScalingBracket
        The certified final bracket; the norm value is ``bracket.hi``.

    Raises
    ------
    NumericError
        If bracketing or bisection exhausts its iteration budget.
    """
    hi = float(hi0)
    if not hi > 0.0:
        raise NumericError("starting guess must be positive", bracket=None)

    steps = 0
    while not s_fn(hi) <= 1.0:
        hi *= 2.0
        steps += 1
        if steps > MAX_BRACKET_STEPS:
            raise NumericError(
                "no feasible scale found while doubling",
                bracket=(hi / 2.0, hi),
            )

    lo = hi / 2.0
    steps = 0
    while s_fn(lo) <= 1.0:
        hi = lo
        lo /= 2.0
        steps += 1
        if steps > MAX_BRACKET_STEPS:
            raise NumericError(
                "no infeasible scale found while halving",
                bracket=(lo, hi),
            )

    # Invariant: s_fn(lo) > 1 >= s_fn(hi).
    it = 0
    while hi - lo > tol * hi:
        it += 1
        if it > MAX_BISECT_STEPS:
            raise NumericError(
                "bisection exceeded iteration budget", bracket=(lo, hi)
            )
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # bracket at float resolution
        if s_fn(mid) <= 1.0:
            hi = mid
        else:
            lo = mid

    return ScalingBracket(lo=lo, hi=hi, s_hi=float(s_fn(hi)), iterations=it)
