"""Bracketed root finding for monotone scalar equations.

Newton (or secant when no derivative is supplied) steps are accepted only when
they land strictly inside the current bracket and reduce the residual fast
enough; otherwise the step falls back to bisection.  The result is
deterministic for a given bracket.
"""
import math

from .errors import ConvergenceError

XTOL = 1e-12
FTOL = 1e-10
MAXITER = 200


def find_root(f, lo, hi, fprime=None, xtol=XTOL, ftol=FTOL, maxiter=MAXITER):
    """Return ``x`` in ``[lo, hi]`` with ``f(x) == 0``.

    ``f(lo)`` and ``f(hi)`` must have opposite signs.  Convergence requires the
    step (or bracket) to be below ``xtol`` and ``|f(x)| <= ftol``; the residual
    condition is waived once the bracket has collapsed to floating-point
    resolution.
    """
    if lo > hi:
        lo, hi = hi, lo
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.isnan(flo) or math.isnan(fhi) or (flo > 0) == (fhi > 0):
        raise ConvergenceError(
            "root not bracketed",
            {"lo": lo, "hi": hi, "f_lo": flo, "f_hi": fhi},
        )

    x = lo - flo * (hi - lo) / (fhi - flo)
    if not lo < x < hi:
        x = 0.5 * (lo + hi)
    fx_prev = math.inf
    for _ in range(maxiter):
        fx = f(x)
        if fx == 0.0:
            return x
        if (fx > 0) == (flo > 0):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx

        if fprime is not None:
            d = fprime(x)
            cand = x - fx / d if d != 0.0 else math.nan
        else:
            cand = lo - flo * (hi - lo) / (fhi - flo)
        step = abs(cand - x) if math.isfinite(cand) else math.inf

        resolution = 4.0 * math.ulp(max(abs(lo), abs(hi), 1e-300))
        small_residual = abs(fx) <= ftol
        if (step <= xtol or hi - lo <= xtol) and small_residual:
            return cand if lo <= cand <= hi else x
        if hi - lo <= resolution:
            return x

        slow = abs(fx) > 0.5 * abs(fx_prev)
        fx_prev = fx
        if not (lo < cand < hi) or slow:
            cand = 0.5 * (lo + hi)
        x = cand

    raise ConvergenceError(
        f"no convergence after {maxiter} iterations",
        {"lo": lo, "hi": hi, "f_lo": flo, "f_hi": fhi, "x": x},
    )


def bracket_increasing(f, center=0.0, step=1.0, limit=700.0):
    """Expand ``[center - step, center + step]`` until an increasing ``f`` changes sign."""
    lo, hi = center - step, center + step
    while f(lo) > 0.0:
        if step > limit:
            raise ConvergenceError("lower end of bracket not found", {"lo": lo})
        step *= 2.0
        lo = center - step
    while f(hi) < 0.0:
        if step > limit:
            raise ConvergenceError("upper end of bracket not found", {"hi": hi})
        step *= 2.0
        hi = center + step
    return lo, hi
