"""Maximum Lq-likelihood fitting by bounded derivative-free search.

The 3-parameter objective theta -> total_lq(reps, locs, theta, q) is
maximized inside a box by Nelder-Mead run in bound-scaled coordinates:
theta is mapped affinely to the unit cube u = (theta - lower) / width, the
simplex lives in [0, 1]^3, and convergence is declared when the simplex
diameter falls below ``tol`` in that scaled space.

Termination is driven by the simplex diameter alone (the objective-spread
test is disabled).  This matters beyond taste: Nelder-Mead steps depend only
on the ordering of objective values, and the underflow-safe scaled objective
is a strictly increasing transform of the exact one, so with diameter-only
termination the scale=True and scale=False searches follow identical
trajectories and return identical maximizers.  Restart decisions likewise
compare iterates, never objective values.

After the first run the search restarts from its own answer with a fresh
simplex (up to twice); a restart that moves less than ``tol`` confirms the
point.  Trial points with a non-positive-definite covariance score -inf and
are simply rejected; only failure at the initial point is an error.

``fit_profile`` runs a descending grid of q values starting at 1, warm-
starting each fit at the previous estimate.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .gauss_lik import NotSPDError, total_lq
from .matern import MaternParams

_METHODS = ("nelder-mead", "powell")


@dataclass(frozen=True)
class Bounds:
    """Box constraints on (sigma2, beta, nu); strict lower < upper."""

    lower: MaternParams
    upper: MaternParams

    def __post_init__(self):
        lo, hi = self.lower.as_array(), self.upper.as_array()
        if not np.all(lo < hi):
            raise ValueError("bounds require lower < upper componentwise")

    def as_arrays(self):
        return self.lower.as_array(), self.upper.as_array()

    def contains(self, theta):
        lo, hi = self.as_arrays()
        t = theta.as_array()
        return bool(np.all(t >= lo) and np.all(t <= hi))


@dataclass(frozen=True)
class FitResult:
    """One maximization outcome; objective is total_lq at theta_hat as evaluated."""

    theta_hat: MaternParams
    objective: float
    q: float
    iterations: int
    evaluations: int
    converged: bool
    init: MaternParams
    scale: bool = True
    restarts: int = 0


@dataclass(frozen=True)
class QProfile:
    """Fits along a descending q grid starting at 1."""

    grid: tuple
    fits: tuple

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.size == 0 or g[0] != 1.0:
            raise ValueError("q grid must start at 1")
        if np.any(g <= 0.0) or np.any(g > 1.0) or np.any(np.diff(g) >= 0.0):
            raise ValueError("q grid must be strictly decreasing within (0, 1]")

    def kappa_curve(self):
        from .qselect import kappa

        return np.array([kappa(f.theta_hat) for f in self.fits])


def default_bounds():
    """sigma2 in [1e-3, 1e3], beta in [1e-3, 10], nu in [0.05, 5]."""
    return Bounds(MaternParams(1e-3, 1e-3, 0.05), MaternParams(1e3, 10.0, 5.0))


def default_init(reps, bounds):
    """Pooled-variance sigma2 with the conventional (beta, nu) = (0.1, 0.5).

    The pooled variance is clipped into the open interior of the bounds.
    """
    lo, hi = bounds.as_arrays()
    start = np.array([np.var(reps.data), 0.1, 0.5])
    margin = 1e-6 * (hi - lo)
    start = np.clip(start, lo + margin, hi - margin)
    return MaternParams.from_array(start)


def fit(reps, locs, q, bounds=None, init=None, tol=1e-6, *,
        scale=True, method="nelder-mead", max_evals=5000):
    """Maximize the (scaled) Lq-likelihood inside a box.

    Parameters
    ----------
    reps, locs : ReplicateSet, LocationSet
        Data.
    q : float
        Distortion parameter in (0, 1]; q = 1 is the MLE.
    bounds : Bounds, optional
        Defaults to default_bounds().
    init : MaternParams, optional
        Must lie within bounds; defaults to default_init(reps, bounds).
    tol : float
        Simplex-diameter convergence threshold in bound-scaled coordinates.
    scale : bool
        Optimize the underflow-safe surrogate exp[(l+n)(1-q)] (default);
        argmax-equivalent to the exact Lq objective.
    method : {"nelder-mead", "powell"}
        Derivative-free search; Powell is the documented swap-in.
    max_evals : int
        Evaluation and iteration budget per optimizer run.

    Returns
    -------
    FitResult
    """
    if method not in _METHODS:
        raise ValueError("method must be one of %r" % (_METHODS,))
    if bounds is None:
        bounds = default_bounds()
    if init is None:
        init = default_init(reps, bounds)
    elif not bounds.contains(init):
        raise ValueError("init %r lies outside the bounds" % (init,))
    lo, hi = bounds.as_arrays()
    width = hi - lo

    def neg_obj(u):
        theta = MaternParams.from_array(lo + u * width)
        try:
            val = total_lq(reps, locs, theta, q, scale=scale)
        except NotSPDError:
            return np.inf
        if not np.isfinite(val):
            return np.inf
        return -val

    # a hard failure at the starting point is an error, not a rejection
    total_lq(reps, locs, init, q, scale=scale)

    u0 = (init.as_array() - lo) / width
    options = {"xatol": tol, "fatol": np.inf, "maxfev": max_evals, "maxiter": max_evals}
    if method == "powell":
        options = {"xtol": tol, "ftol": tol, "maxfev": max_evals, "maxiter": max_evals}

    n_it = n_ev = restarts = 0
    u_cur = u0
    res = None
    for attempt in range(3):
        res = minimize(neg_obj, u_cur, method=method,
                       bounds=[(0.0, 1.0)] * 3, options=options)
        n_it += int(res.nit)
        n_ev += int(res.nfev)
        moved = float(np.max(np.abs(res.x - u_cur)))
        u_cur = res.x
        if attempt > 0:
            restarts += 1
        if attempt > 0 and moved <= tol:
            break

    theta_hat = MaternParams.from_array(lo + u_cur * width)
    converged = bool(res.status == 0 and np.isfinite(res.fun))
    return FitResult(theta_hat=theta_hat, objective=float(-res.fun), q=float(q),
                     iterations=n_it, evaluations=n_ev, converged=converged,
                     init=init, scale=scale, restarts=restarts)


def fit_profile(reps, locs, grid, bounds=None, init=None, tol=1e-6, *,
                scale=True, method="nelder-mead", max_evals=5000):
    """Fit a descending q grid, warm-starting each fit at the previous theta_hat.

    A q value whose fit fails outright is recorded as a non-converged
    placeholder (objective NaN) and the profile continues from the last
    good estimate.
    """
    grid = tuple(float(v) for v in grid)
    if bounds is None:
        bounds = default_bounds()
    if init is None:
        init = default_init(reps, bounds)
    fits = []
    warm = init
    for q in grid:
        try:
            res = fit(reps, locs, q, bounds, warm, tol,
                      scale=scale, method=method, max_evals=max_evals)
        except (NotSPDError, np.linalg.LinAlgError):
            fits.append(FitResult(theta_hat=warm, objective=float("nan"), q=float(q),
                                  iterations=0, evaluations=0, converged=False,
                                  init=warm, scale=scale, restarts=0))
            continue
        fits.append(res)
        warm = res.theta_hat
    return QProfile(grid=grid, fits=tuple(fits))
