"""Smooth Orlicz functions and generalized Luxemburg norms.

The bump construction used throughout the package is

    value(t) = scale * int_a^t exp(-1/(s-a)) ds      for t > a,
    value(t) = 0                                     for 0 <= t <= a,

with ``a = zero_threshold`` and ``scale`` chosen so that
``value(exceed_threshold) = 1 + exceed_margin``.  The integrand is the
classic C-infinity flat bump, so value is smooth everywhere, convex,
identically zero on [0, a], and grows without bound (asymptotically
linearly).  Closed forms for the derivatives:

    value'(t)  = scale * exp(-1/(t-a))
    value''(t) = scale * exp(-1/(t-a)) / (t-a)^2

Everything is evaluated through G(x) = int_0^x exp(-1/u) du = x*E2(1/x)
in log space.  The pipelines in this package routinely produce widths
b - a ~ 1e-3, for which exp(-1/(s-a)) underflows float64 over the entire
integration range; the log-space exponential-integral form keeps the
ratio G(t-a)/G(b-a) accurate to ~1e-12 regardless of width.

A generalized Luxemburg norm over a finite index set B is

    ||c||_phi = inf { rho > 0 : sum_t phi_t(|c_t| / rho) <= 1 },

computed by certified bisection (the returned value is the upper bracket
endpoint, so the modular constraint holds at the result as computed).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expn

from .errors import NumericError, ParameterError
from .scaling import (DEFAULT_TOL, MAX_BISECT_STEPS, MAX_BRACKET_STEPS,
                      feasible_scale_inf)

__all__ = [
    "OrliczFunction",
    "OrliczFamily",
    "make_orlicz",
    "orlicz_eval",
    "luxemburg_norm",
    "luxemburg_norm_batch",
    "check_lemma1_bounds",
]

# Above this exponent, exp() would overflow float64; report infinity.
_LOG_HUGE = 709.0

# Switch point between the scipy expn branch and the asymptotic series.
# At x = 0.01 both agree to ~1e-13 on the log scale.
_ASYM_SWITCH = 0.01

# Coefficients of the asymptotic series E2(z) ~ e^-z/z * sum (-1)^k (k+1)!/z^k,
# written in powers of x = 1/z.  Truncation error at x <= 0.01 is < 1e-20.
_ASYM_COEF = tuple((-1.0) ** k * math.factorial(k + 1) for k in range(31))


def _log_g(x: np.ndarray) -> np.ndarray:
    """log of G(x) = int_0^x exp(-1/u) du, elementwise, for x > 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < _ASYM_SWITCH
    if np.any(small):
        xs = x[small]
        s = np.full_like(xs, _ASYM_COEF[-1])
        for c in _ASYM_COEF[-2::-1]:
            s = s * xs + c
        out[small] = -1.0 / xs + 2.0 * np.log(xs) + np.log(s)
    if np.any(~small):
        xl = x[~small]
        out[~small] = np.log(xl * expn(2, 1.0 / xl))
    return out


class OrliczFunction:
    """One smooth Orlicz function of the bump family.

    Attributes
    ----------
    zero_threshold : float
        Right edge of the flat region; the function vanishes on
        [0, zero_threshold].
    exceed_threshold : float
        Point where the function reaches 1 + exceed_margin.
    exceed_margin : float
        Overshoot above 1 at exceed_threshold (default 1/2).
    scale : float
        Normalization constant (may overflow to inf for very thin
        transitions; the function itself is always evaluated through
        log-space ratios and stays finite wherever its value is
        representable).
    """

    def __init__(self, zero_threshold, exceed_threshold, exceed_margin=0.5):
        if not (0.0 < zero_threshold < exceed_threshold):
            raise ParameterError(
                "need 0 < zero_threshold < exceed_threshold, got "
                f"({zero_threshold}, {exceed_threshold})"
            )
        if not exceed_margin > 0.0:
            raise ParameterError("exceed_margin must be positive")
        self.zero_threshold = float(zero_threshold)
        self.exceed_threshold = float(exceed_threshold)
        self.exceed_margin = float(exceed_margin)
        width = self.exceed_threshold - self.zero_threshold
        self._log_g_width = float(_log_g(np.asarray(width)))
        if not np.isfinite(self._log_g_width):
            raise NumericError(
                "normalization constant not representable for width "
                f"{width}", bracket=None,
            )
        self._peak = 1.0 + self.exceed_margin
        self._log_peak = math.log1p(self.exceed_margin)

    @property
    def scale(self) -> float:
        """(1 + exceed_margin) / G(width); inf if not representable."""
        log_scale = self._log_peak - self._log_g_width
        if log_scale > _LOG_HUGE:
            return math.inf
        return math.exp(log_scale)

    def _eval(self, t, order):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0.0):
            raise ParameterError("orlicz functions are defined for t >= 0")
        a = self.zero_threshold
        out = np.zeros_like(t)
        pos = t > a
        if np.any(pos):
            x = t[pos] - a
            # The peak factor multiplies outside the exponential so that
            # value(exceed_threshold) = 1 + exceed_margin exactly.
            if order == 0:
                logv = _log_g(x) - self._log_g_width
            elif order == 1:
                logv = -self._log_g_width - 1.0 / x
            elif order == 2:
                logv = -self._log_g_width - 1.0 / x - 2.0 * np.log(x)
            else:
                raise ParameterError(f"order must be 0, 1 or 2, got {order}")
            vals = np.where(logv + self._log_peak > _LOG_HUGE, np.inf,
                            self._peak * np.exp(np.minimum(logv, _LOG_HUGE)))
            out[pos] = vals
        return out

    def __call__(self, t, order=0):
        """Evaluate the function (or derivative) at scalar or array t."""
        scalar = np.isscalar(t) or getattr(t, "ndim", 1) == 0
        out = self._eval(t, order)
        return float(out) if scalar else out

    def __repr__(self):
        return (f"OrliczFunction(zero_threshold={self.zero_threshold!r}, "
                f"exceed_threshold={self.exceed_threshold!r}, "
                f"exceed_margin={self.exceed_margin!r})")


@functools.lru_cache(maxsize=None)
def make_orlicz(zero_threshold, exceed_threshold, exceed_margin=0.5):
    """Construct (and cache per threshold pair) a smooth Orlicz function.

    Parameters
    ----------
    zero_threshold, exceed_threshold : float
        0 < zero_threshold < exceed_threshold.
    exceed_margin : float
        value(exceed_threshold) = 1 + exceed_margin; default 1/2.
    """
    return OrliczFunction(zero_threshold, exceed_threshold, exceed_margin)


def orlicz_eval(f: OrliczFunction, t, order=0):
    """Evaluate ``f`` (order 0) or one of its closed-form derivatives.

    All orders return 0 on [0, zero_threshold]; t < 0 is a parameter
    error.
    """
    return f(t, order=order)


class OrliczFamily:
    """A finite indexed family of Orlicz functions.

    Functions must accept numpy arrays (all OrliczFunction instances do;
    plain vectorized callables such as ``lambda s: s**p`` also qualify).
    Evaluation groups coordinates by function identity so constant
    families cost one vectorized call.
    """

    def __init__(self, functions, labels=None):
        functions = tuple(functions)
        if not functions:
            raise ParameterError("family index set must be nonempty")
        if labels is None:
            labels = tuple(range(len(functions)))
        else:
            labels = tuple(labels)
            if len(labels) != len(functions):
                raise ParameterError("labels and functions length mismatch")
        self.functions = functions
        self.labels = labels
        groups: dict[int, list[int]] = {}
        for i, fn in enumerate(functions):
            groups.setdefault(id(fn), []).append(i)
        self._groups = [
            (functions[idx[0]], np.asarray(idx, dtype=int))
            for idx in groups.values()
        ]

    def __len__(self):
        return len(self.functions)

    def modular(self, args: np.ndarray) -> float:
        """sum_t phi_t(args_t) for an array aligned with the family."""
        args = np.asarray(args, dtype=float)
        if args.shape != (len(self.functions),):
            raise ParameterError(
                f"expected {len(self.functions)} coordinates, "
                f"got shape {args.shape}"
            )
        total = 0.0
        for fn, idx in self._groups:
            total += float(np.sum(fn(args[idx])))
        return total

    def modular_rows(self, rows: np.ndarray) -> np.ndarray:
        """Row-wise modular for a batch: (n, len(family)) -> (n,)."""
        rows = np.asarray(rows, dtype=float)
        if rows.ndim != 2 or rows.shape[1] != len(self.functions):
            raise ParameterError(
                f"expected (n, {len(self.functions)}) rows, got shape "
                f"{rows.shape}"
            )
        total = np.zeros(rows.shape[0])
        for fn, idx in self._groups:
            total += np.sum(fn(rows[:, idx]), axis=1)
        return total


@dataclass(frozen=True)
class LuxemburgResult:
    """Certified Luxemburg norm: value == hi, modular(coords/hi) <= 1."""

    value: float
    lo: float
    hi: float
    modular_at_value: float
    iterations: int


def luxemburg_norm(family: OrliczFamily, coords, tol=DEFAULT_TOL,
                   full_output=False):
    """Generalized Luxemburg norm of a finite coordinate vector.

    ||c||_phi = inf { rho > 0 : sum_t phi_t(|c_t|/rho) <= 1 }, computed
    by bisection on the monotone feasibility predicate.  The upper
    bracket endpoint is returned, so feasibility at the result is
    certified exactly as computed.

    Parameters
    ----------
    family : OrliczFamily
    coords : array_like
        Coordinates aligned with the family's index order.
    tol : float
        Relative final bracket width.
    full_output : bool
        If True, return a LuxemburgResult instead of a float.
    """
    coords = np.abs(np.asarray(coords, dtype=float))
    if coords.shape != (len(family),):
        raise ParameterError(
            f"coords shape {coords.shape} does not match family size "
            f"{len(family)}"
        )
    peak = float(np.max(coords)) if coords.size else 0.0
    if peak == 0.0:
        if full_output:
            return LuxemburgResult(0.0, 0.0, 0.0, 0.0, 0)
        return 0.0

    # Work on peak-normalized coordinates: keeps brackets O(1) even for
    # subnormal or huge inputs, and makes the result scale-equivariant.
    unit = coords / peak

    def s_fn(rho):
        return family.modular(unit / rho)

    bracket = feasible_scale_inf(s_fn, 1.0, tol=tol)

    # Certify feasibility on the unnormalized path: coords/value rounds
    # differently from (coords/peak)/hi, so absorb ulp-level disagreement
    # by nudging the value upward (stays inside the bracket width).
    value = peak * bracket.hi
    s_val = family.modular(coords / value)
    for _ in range(8):
        if s_val <= 1.0:
            break
        value = np.nextafter(value, np.inf)
        s_val = family.modular(coords / value)
    else:
        raise NumericError("could not certify feasibility at result",
                           bracket=(peak * bracket.lo, value))

    if full_output:
        return LuxemburgResult(
            value=value, lo=peak * bracket.lo, hi=value,
            modular_at_value=s_val, iterations=bracket.iterations,
        )
    return value


def luxemburg_norm_batch(family: OrliczFamily, rows,
                         tol=DEFAULT_TOL) -> np.ndarray:
    """Luxemburg norms of many coordinate vectors at once.

    Same contract as luxemburg_norm per row (upper bracket endpoint,
    feasibility certified on the returned values), but the bisection
    runs on all rows simultaneously, which is much faster for large
    sample pools.
    """
    rows = np.abs(np.atleast_2d(np.asarray(rows, dtype=float)))
    if rows.shape[1] != len(family):
        raise ParameterError(
            f"rows shape {rows.shape} does not match family size "
            f"{len(family)}"
        )
    values = np.zeros(rows.shape[0])
    alive = rows.max(axis=1) > 0.0
    if not np.any(alive):
        return values
    sub = rows[alive]
    peak = sub.max(axis=1)
    unit = sub / peak[:, None]

    def feasible(rho):
        return family.modular_rows(unit / rho[:, None]) <= 1.0

    hi = np.ones(len(unit))
    for _ in range(MAX_BRACKET_STEPS):
        grow = ~feasible(hi)
        if not grow.any():
            break
        hi[grow] *= 2.0
    else:
        raise NumericError("no feasible upper bracket found",
                           bracket=(None, float(hi.max())))
    lo = hi / 2.0
    for _ in range(MAX_BRACKET_STEPS):
        shrink = feasible(lo)
        if not shrink.any():
            break
        lo[shrink] /= 2.0
    else:
        raise NumericError("no infeasible lower bracket found",
                           bracket=(float(lo.min()), None))
    for _ in range(MAX_BISECT_STEPS):
        if np.all(hi - lo <= tol * hi):
            break
        mid = 0.5 * (lo + hi)
        feas = feasible(mid)
        hi = np.where(feas, mid, hi)
        lo = np.where(feas, lo, mid)

    out = peak * hi
    s = family.modular_rows(sub / out[:, None])
    for _ in range(8):
        bad = s > 1.0
        if not bad.any():
            break
        out = np.where(bad, np.nextafter(out, np.inf), out)
        s = family.modular_rows(sub / out[:, None])
    else:
        raise NumericError("could not certify feasibility at result",
                           bracket=None)
    values[alive] = out
    return values


@dataclass(frozen=True)
class Lemma1Report:
    """Result of a two-sided norm-equivalence check.

    For a family with phi_t(alpha) = 0 and phi_t(beta) >= 1 for all t,
    the sup norm is pinched:  alpha*||c||_phi <= ||c||_inf <= beta*||c||_phi.
    Slacks are measured at certified-bracket precision: the left-hand
    comparison is granted alpha * (bracket width) of slack because the
    certified value is the upper endpoint.
    """

    checked: int
    violations: int
    max_left_excess: float
    max_right_excess: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def check_lemma1_bounds(family: OrliczFamily, alpha, beta, vectors,
                        tol=DEFAULT_TOL) -> Lemma1Report:
    """Check alpha*||c||_phi <= ||c||_inf <= beta*||c||_phi on samples.

    Preconditions (validated): every family member vanishes at alpha and
    reaches at least 1 at beta.
    """
    alpha = float(alpha)
    beta = float(beta)
    if not (0.0 < alpha < beta):
        raise ParameterError("need 0 < alpha < beta")
    for fn in family.functions:
        if float(fn(np.asarray([alpha]))[0]) != 0.0:
            raise ParameterError(
                "family member does not vanish at alpha")
        if not float(fn(np.asarray([beta]))[0]) >= 1.0:
            raise ParameterError(
                "family member stays below 1 at beta")

    dust = 1e-12
    violations = 0
    max_left = 0.0
    max_right = 0.0
    checked = 0
    for c in vectors:
        c = np.asarray(c, dtype=float)
        res = luxemburg_norm(family, c, tol=tol, full_output=True)
        sup = float(np.max(np.abs(c))) if c.size else 0.0
        width = res.hi - res.lo
        left = alpha * res.value - sup - alpha * width - dust * max(sup, 1.0)
        right = sup - beta * res.value - dust * max(sup, 1.0)
        max_left = max(max_left, left)
        max_right = max(max_right, right)
        if left > 0.0 or right > 0.0:
            violations += 1
        checked += 1
    return Lemma1Report(
        checked=checked, violations=violations,
        max_left_excess=max_left, max_right_excess=max_right,
    )
