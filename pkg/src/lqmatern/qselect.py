"""Data-driven selection of the distortion parameter q.

Two coarse-to-fine grid selectors operate on fits computed along a
descending q grid that starts at 1.  The first watches the standardized
quadratic variation (SQV) of the estimate vector; the second watches the
relative variation of the identifiable quantity

    kappa = sigma2 * beta**(-2 nu),

which stays stable across q exactly when the fits have stabilized.  Each
pass either accepts the current leading q, or refines an equally spaced
grid from the last destabilized point down to q_min and repeats.  If the
series never stabilizes before the grid span is exhausted the selectors
fall back to q* = 1.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .asymptotics import sandwich, std_errs
from .estimate import default_bounds, default_init, fit

log = logging.getLogger(__name__)

DEFAULT_GRID = (1.0, 0.999, 0.99, 0.98, 0.97, 0.95, 0.925, 0.9)

# exceptions that drop a grid point instead of aborting the selector
_POINT_FAILURES = (np.linalg.LinAlgError, RuntimeError, ValueError,
                   FloatingPointError)


@dataclass(frozen=True)
class QGridSpec:
    """Grid and thresholds for the q selectors.

    ``L`` is the SQV threshold for the SQV selector and the ratio
    coefficient (> 1) for the kappa selector; ``K`` sets the number of
    intervals per refinement pass, so each refined grid has K + 1 points.
    """

    grid: tuple = DEFAULT_GRID
    eps: float = 0.005
    L: float = 0.05
    K: int = 7

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.size == 0 or g[0] != 1.0:
            raise ValueError("q grid must start at 1")
        if np.any(g <= 0.0) or np.any(g > 1.0) or np.any(np.diff(g) >= 0.0):
            raise ValueError("q grid must be strictly decreasing within (0, 1]")
        if not self.eps > 0.0:
            raise ValueError("eps must be positive")
        if not self.L > 0.0:
            raise ValueError("L must be positive")
        if int(self.K) != self.K or self.K < 1:
            raise ValueError("K must be a positive integer")
        object.__setattr__(self, "grid", tuple(float(v) for v in g))
        object.__setattr__(self, "K", int(self.K))


def default_kappa_spec():
    """Default grid with the ratio coefficient L = 4."""
    return QGridSpec(L=4.0)


@dataclass(frozen=True)
class PassRecord:
    """One selector pass: the usable grid, its series, and the pivot k*.

    ``grid`` holds the q values whose fits were usable; ``series`` has one
    value per consecutive pair (subscript k = 1..len(grid)-1); ``k_star``
    is the refinement subscript into ``grid``, or None when the pass
    accepted or terminated.
    """

    pass_index: int
    grid: tuple
    series: tuple
    k_star: object = None


@dataclass(frozen=True)
class SelectionResult:
    """Selected q with the full pass trace and a termination reason."""

    q_star: float
    trace: tuple
    reason: str

    def __post_init__(self):
        if not 0.0 < self.q_star <= 1.0:
            raise ValueError("q_star must lie in (0, 1]")
        if self.reason not in ("stabilized", "fallback-to-one", "span-exhausted"):
            raise ValueError("unknown reason %r" % (self.reason,))
        if len(self.trace) == 0:
            raise ValueError("trace must be non-empty")


def kappa(theta):
    """sigma2 * beta**(-2 nu), the quantity the data can actually pin down."""
    return float(theta.sigma2 * theta.beta ** (-2.0 * theta.nu))


def standardized(theta_hat, se, m):
    """Componentwise theta_hat / (sqrt(m) * se)."""
    if int(m) != m or m < 1:
        raise ValueError("m must be a positive integer")
    se_arr = np.asarray(getattr(se, "se", se), dtype=float)
    t = theta_hat.as_array()
    if se_arr.shape != t.shape:
        raise ValueError("se must have one entry per parameter")
    if np.any(se_arr <= 0.0) or not np.all(np.isfinite(se_arr)):
        raise ValueError("standard errors must be positive and finite")
    return t / (np.sqrt(float(m)) * se_arr)


def sqv(z_prev, z_cur, p=3):
    """Euclidean distance between consecutive standardized estimates over p."""
    a = np.asarray(z_prev, dtype=float)
    b = np.asarray(z_cur, dtype=float)
    if a.shape != b.shape:
        raise ValueError("z vectors must have equal length")
    return float(np.linalg.norm(a - b) / p)


def _walk(spec, run_pass):
    # shared refinement loop; run_pass(grid) -> (q_used, series, accepted, k*)
    q_min = spec.grid[-1]
    grid_cur = np.asarray(spec.grid, dtype=float)
    trace = []
    pass_idx = 0
    while grid_cur[0] - q_min > spec.eps:
        q_used, series, accepted, k_star = run_pass(grid_cur)
        if len(q_used) < 2:
            trace.append(PassRecord(pass_idx, tuple(q_used), tuple(series)))
            return SelectionResult(1.0, tuple(trace), "fallback-to-one")
        if accepted:
            trace.append(PassRecord(pass_idx, tuple(q_used), tuple(series)))
            return SelectionResult(q_used[0], tuple(trace), "stabilized")
        trace.append(PassRecord(pass_idx, tuple(q_used), tuple(series), int(k_star)))
        grid_cur = np.linspace(q_used[k_star], q_min, spec.K + 1)
        pass_idx += 1
    trace.append(PassRecord(pass_idx, tuple(float(v) for v in grid_cur), ()))
    return SelectionResult(1.0, tuple(trace), "span-exhausted")


def select_q_sqv(fit_fn, se_fn, spec=None, m=None):
    """Accept the leading q once all consecutive SQV values drop below L.

    On a destabilized pass the refinement pivot is the largest subscript k
    with SQV_k >= L.  ``m`` is the replicate count behind fit_fn, needed
    to standardize the estimates.  Grid points whose fit or standard
    errors fail are dropped from the pass and logged; a pass with fewer
    than two usable points falls back to q* = 1.
    """
    if spec is None:
        spec = QGridSpec()
    if m is None:
        raise TypeError("m (the replicate count) is required")

    def run_pass(grid_vals):
        q_used, zs = [], []
        for qv in grid_vals:
            try:
                th = fit_fn(float(qv))
                z = standardized(th, se_fn(th, float(qv)), m)
            except _POINT_FAILURES as exc:
                log.warning("dropping q=%.6g: %s", qv, exc)
                continue
            q_used.append(float(qv))
            zs.append(z)
        series = [sqv(zs[i - 1], zs[i]) for i in range(1, len(zs))]
        accepted = bool(series) and max(series) < spec.L
        k_star = None
        if series and not accepted:
            k_star = max(k for k in range(1, len(series) + 1)
                         if series[k - 1] >= spec.L)
        return q_used, series, accepted, k_star

    return _walk(spec, run_pass)


def select_q_kappa(fit_fn, spec=None):
    """Accept the leading q once max dkappa <= L * min dkappa.

    The series is dkappa_k = |kappa_{k-1}/kappa_k - 1| over consecutive
    usable fits; the non-strict comparison makes an exactly constant
    kappa (all-zero series) accept immediately.  Never touches the
    standard-error machinery, so each pass costs K + 1 fits.
    """
    if spec is None:
        spec = default_kappa_spec()
    if not spec.L > 1.0:
        raise ValueError("the kappa selector requires L > 1")

    def run_pass(grid_vals):
        q_used, kap = [], []
        for qv in grid_vals:
            try:
                kv = kappa(fit_fn(float(qv)))
            except _POINT_FAILURES as exc:
                log.warning("dropping q=%.6g: %s", qv, exc)
                continue
            if not np.isfinite(kv):
                log.warning("dropping q=%.6g: kappa is not finite", qv)
                continue
            q_used.append(float(qv))
            kap.append(kv)
        series = [abs(kap[i - 1] / kap[i] - 1.0) for i in range(1, len(kap))]
        accepted = False
        k_star = None
        if series:
            thr = spec.L * min(series)
            accepted = max(series) <= thr
            if not accepted:
                k_star = max(k for k in range(1, len(series) + 1)
                             if series[k - 1] >= thr)
        return q_used, series, accepted, k_star

    return _walk(spec, run_pass)


def make_fit_fn(reps, locs, bounds=None, init=None, tol=1e-6, *,
                scale=True, method="nelder-mead", max_evals=5000):
    """fit_fn(q) -> theta_hat, cached per q and warm-started across calls.

    Selectors revisit q values across passes (q_min appears in every
    refinement), so the cache keeps the advertised per-pass fit count
    honest.  Warm starts follow the most recent successful fit, which
    suits the descending walk the selectors perform.
    """
    if bounds is None:
        bounds = default_bounds()
    if init is None:
        init = default_init(reps, bounds)
    cache = {}
    warm = [init]

    def fit_fn(q):
        key = round(float(q), 12)
        if key not in cache:
            res = fit(reps, locs, float(q), bounds, warm[0], tol,
                      scale=scale, method=method, max_evals=max_evals)
            warm[0] = res.theta_hat
            cache[key] = res.theta_hat
        return cache[key]

    return fit_fn


def make_se_fn(reps, locs):
    """se_fn(theta_hat, q) -> StdErrs via the plug-in sandwich matrices."""

    def se_fn(theta_hat, q):
        return std_errs(sandwich(reps, locs, theta_hat, float(q)))

    return se_fn
