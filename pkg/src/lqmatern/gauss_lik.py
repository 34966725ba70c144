"""Gaussian log-likelihood and Lq-likelihood via Cholesky factorization.

The zero-mean Gaussian log density at one replicate z is

    l(z; theta) = -(n/2) log(2 pi) - (1/2) z' Sigma^-1 z - (1/2) log|Sigma|

computed from a single Cholesky factorization Sigma = L L': the quadratic
form is ||y||^2 with L y = z (one triangular solve), and log|Sigma| is twice
the log-sum of the diagonal of L.

The Lq transform of the density f = e^l:

    L_q(f) = log f = l                      if q = 1
    L_q(f) = (f^(1-q) - 1) / (1 - q)        if q < 1
           = expm1(l (1-q)) / (1-q)

For large n the exact value underflows (f^(1-q) = e^(l(1-q)) with l of order
-n), so optimization uses the strictly increasing surrogate

    exp[(l + n) (1-q)]

which drops the affine pieces (the -1, the 1/(1-q), and the constant e^(n(1-q))
factor); for fixed q these do not move the argmax.  The surrogate is selected
by ``scale=True`` and reported via the ``scaled`` flag.

``total_lq`` shares one factorization across all m replicates and sums the
per-replicate values in fixed column order, so results are reproducible.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .matern import build_cov

_LOG_2PI = np.log(2.0 * np.pi)

# Relative jitter magnitude for the one-shot Cholesky rescue.
JITTER_REL = 1e-10


class NotSPDError(np.linalg.LinAlgError):
    """Covariance failed Cholesky factorization even after jitter.

    Carries the offending parameter point in ``theta`` when raised from
    parameterized entry points.
    """

    def __init__(self, msg, theta=None):
        super().__init__(msg)
        self.theta = theta


@dataclass(frozen=True)
class ReplicateSet:
    """n x m data matrix; column i is replicate Z_i observed at n locations."""

    data: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.data, dtype=float)
        if d.ndim != 2:
            raise ValueError("data must be a 2-d array (n locations x m replicates)")
        if d.shape[1] < 1:
            raise ValueError("need at least one replicate")
        if not np.all(np.isfinite(d)):
            raise ValueError("data must be finite")
        object.__setattr__(self, "data", d)

    @property
    def n(self):
        return self.data.shape[0]

    @property
    def m(self):
        return self.data.shape[1]


@dataclass(frozen=True)
class CholFactor:
    """Lower Cholesky factor of a covariance with its log determinant."""

    L: np.ndarray
    log_det: float
    jittered: bool = False


@dataclass(frozen=True)
class LqValue:
    """An Lq-likelihood value tagged with q and the scaling flag."""

    value: float
    q: float
    scaled: bool = False

    def __post_init__(self):
        if self.q == 1.0 and self.scaled:
            raise ValueError("scaled flag is meaningless at q = 1")


def chol_factor(cov, jitter_scale=None):
    """Cholesky-factor an SPD covariance with a one-shot jitter rescue.

    On failure, 1e-10 * jitter_scale is added to the diagonal once (the
    scale defaults to the mean diagonal, i.e. sigma2 for a Matern matrix)
    and the event is reported through the ``jittered`` flag.  A second
    failure raises NotSPDError.
    """
    cov = np.asarray(cov, dtype=float)
    try:
        L = np.linalg.cholesky(cov)
        jittered = False
    except np.linalg.LinAlgError:
        scale = float(np.mean(np.diag(cov))) if jitter_scale is None else float(jitter_scale)
        bumped = cov + JITTER_REL * scale * np.eye(cov.shape[0])
        try:
            L = np.linalg.cholesky(bumped)
        except np.linalg.LinAlgError:
            raise NotSPDError("covariance is not positive definite (jitter rescue failed)")
        jittered = True
    log_det = 2.0 * float(np.sum(np.log(np.diag(L))))
    return CholFactor(L=L, log_det=log_det, jittered=jittered)


def log_likelihood(z, chol):
    """Exact Gaussian log-likelihood of one replicate from a Cholesky factor.

    The quadratic form z' Sigma^-1 z is evaluated as ||y||^2 with L y = z;
    one forward substitution, no explicit inverse.
    """
    z = np.asarray(z, dtype=float)
    n = chol.L.shape[0]
    if z.shape != (n,):
        raise ValueError("z has shape %s, expected (%d,)" % (z.shape, n))
    y = solve_triangular(chol.L, z, lower=True)
    return float(-0.5 * n * _LOG_2PI - 0.5 * (y @ y) - 0.5 * chol.log_det)


def loglik_columns(data, chol):
    """Per-replicate log-likelihoods for an n x m matrix, shared factor."""
    data = np.asarray(data, dtype=float)
    n = chol.L.shape[0]
    if data.ndim != 2 or data.shape[0] != n:
        raise ValueError("data has shape %s, expected (%d, m)" % (data.shape, n))
    Y = solve_triangular(chol.L, data, lower=True)
    quad = np.einsum("ij,ij->j", Y, Y)
    return -0.5 * n * _LOG_2PI - 0.5 * quad - 0.5 * chol.log_det


def lq_of_loglik(l, q, n, scale=False):
    """Lq value of a density given its log l; see the module notes.

    Parameters
    ----------
    l : float
        Log density value.
    q : float
        Distortion parameter in (0, 1].
    n : int
        Dimension; enters only the scale=True surrogate exp[(l+n)(1-q)].
    scale : bool
        Use the underflow-safe increasing surrogate (never at q = 1).

    Returns
    -------
    LqValue
    """
    if not 0.0 < q <= 1.0:
        raise ValueError("q must lie in (0, 1], got %r" % (q,))
    l = float(l)
    if q == 1.0:
        return LqValue(value=l, q=1.0, scaled=False)
    om = 1.0 - q
    if scale:
        return LqValue(value=float(np.exp((l + n) * om)), q=q, scaled=True)
    return LqValue(value=float(np.expm1(l * om) / om), q=q, scaled=False)


def total_lq(reps, locs, theta, q, scale=False):
    """Summed Lq-likelihood of all replicates at one parameter point.

    One covariance build and one Cholesky factorization are shared across
    the m replicates; the per-replicate values are summed in column order.
    Raises NotSPDError carrying theta if the factorization fails.
    """
    if not 0.0 < q <= 1.0:
        raise ValueError("q must lie in (0, 1], got %r" % (q,))
    cov = build_cov(locs, theta)
    try:
        chol = chol_factor(cov, jitter_scale=theta.sigma2)
    except NotSPDError as err:
        err.theta = theta
        raise
    lvec = loglik_columns(reps.data, chol)
    if q == 1.0:
        return float(np.sum(lvec))
    om = 1.0 - q
    if scale:
        return float(np.sum(np.exp((lvec + reps.n) * om)))
    return float(np.sum(np.expm1(lvec * om) / om))
