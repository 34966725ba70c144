"""Matern covariance function, parameter derivatives, and matrix builders.

The kernel in the (variance, range, smoothness) parametrisation:

    M(h; theta) = sigma2 * c(nu) * t^nu K_nu(t),   t = h / beta,
    c(nu) = 2^(1-nu) / Gamma(nu)

with K_nu the modified Bessel function of the second kind.  M(0) = sigma2
exactly (the h -> 0 limit), and M reduces to sigma2 * exp(-h/beta) at
nu = 1/2 and sigma2 * (1 + t) exp(-t) at nu = 3/2.

``matern_grad`` and ``matern_hess`` return the closed-form first and second
derivatives in theta = (sigma2, beta, nu).  Derivatives in the argument of
K_nu use exact recurrence/ODE identities; derivatives in the order nu fall
back to the central-difference helpers in :mod:`.specfun`.  At h = 0 all
derivatives vanish except dM/dsigma2 = 1, matching the analytic limit for
nu > 0 and keeping the diagonal of the covariance matrix exactly sigma2.

Matrix builders evaluate the kernel once per unique distance and scatter the
values back, which collapses the cost on lattice layouts where the distance
matrix has few distinct entries.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial.distance import pdist, squareform
# raw kv, bypassing specfun's saturation wrapper: the small-t limit patch in
# _xnu_k_safe wants to see the actual inf, not a MAX_REAL stand-in
from scipy.special import kv as special_kv

from . import specfun
from .specfun import digamma, log_gamma, trigamma

# Smoothness cap guarding against K_nu overflow at short distances; raise it
# before constructing MaternParams if a smoother model is really wanted.
NU_CAP = 5.0

_LN2 = np.log(2.0)


@dataclass(frozen=True)
class MaternParams:
    """Matern parameter triple (variance, range, smoothness).

    All three must be strictly positive and finite; nu must not exceed the
    module-level NU_CAP.
    """

    sigma2: float
    beta: float
    nu: float

    def __post_init__(self):
        for name in ("sigma2", "beta", "nu"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not np.isfinite(v) or v <= 0.0:
                raise ValueError("MaternParams.%s must be positive and finite, got %r" % (name, v))
        if self.nu > NU_CAP:
            raise ValueError("MaternParams.nu = %g exceeds NU_CAP = %g" % (self.nu, NU_CAP))

    def as_array(self):
        return np.array([self.sigma2, self.beta, self.nu])

    @classmethod
    def from_array(cls, arr):
        a = np.asarray(arr, dtype=float)
        if a.shape != (3,):
            raise ValueError("expected a length-3 array (sigma2, beta, nu)")
        return cls(a[0], a[1], a[2])


@dataclass(frozen=True, eq=False)
class LocationSet:
    """Planar locations in the unit square, with cached pairwise distances."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 2 or c.shape[1] != 2:
            raise ValueError("coords must have shape (n, 2)")
        if c.shape[0] < 1:
            raise ValueError("need at least one location")
        if not np.all(np.isfinite(c)):
            raise ValueError("coords must be finite")
        if c.min() < 0.0 or c.max() > 1.0:
            raise ValueError("coords must lie in the unit square [0,1]^2")
        object.__setattr__(self, "coords", c)

    @property
    def n(self):
        return self.coords.shape[0]

    @cached_property
    def dists(self):
        """Full Euclidean distance matrix; errors on coincident points."""
        if self.n == 1:
            return np.zeros((1, 1))
        d = squareform(pdist(self.coords))
        off = d[~np.eye(self.n, dtype=bool)]
        if off.min() <= 0.0:
            raise ValueError("duplicate locations: zero pairwise distance found")
        return d

    @cached_property
    def _dist_unique(self):
        # unique distances + inverse map; lattice layouts have O(n) uniques
        d = self.dists
        uniq, inv = np.unique(d.ravel(), return_inverse=True)
        return uniq, inv.reshape(d.shape)


# === kernel evaluation ======================================================


def _coef(nu):
    # c(nu) = 2^(1-nu) / Gamma(nu), evaluated in log space
    return np.exp((1.0 - nu) * _LN2 - log_gamma(nu))


def _xnu_k_safe(nu, t):
    """t^nu K_nu(t) on t > 0 with the t -> 0 overflow limit patched in.

    K_nu overflows to inf as t -> 0 for moderate nu while t^nu underflows,
    producing inf or nan; there the product's limit Gamma(nu) 2^(nu-1) is
    exact to double precision, so substitute it.
    """
    with np.errstate(invalid="ignore", over="ignore"):
        out = t ** nu * special_kv(nu, t)
    bad = ~np.isfinite(out)
    if np.any(bad):
        out = np.where(bad, np.exp(log_gamma(nu) + (nu - 1.0) * _LN2), out)
    return out


def _validate_h(h):
    ha = np.asarray(h, dtype=float)
    if np.any(~(ha >= 0.0)):
        raise ValueError("distance h must be nonnegative")
    return ha


def matern_cov(h, theta):
    """Matern covariance M(h; theta); accepts scalar or array h >= 0."""
    ha = _validate_h(h)
    t = np.atleast_1d(ha / theta.beta)
    out = np.ones_like(t)
    pos = t > 0.0
    if np.any(pos):
        out[pos] = _coef(theta.nu) * _xnu_k_safe(theta.nu, t[pos])
    out *= theta.sigma2
    if np.ndim(h) == 0:
        return float(out[0])
    return out.reshape(ha.shape)


def matern_grad(h, theta):
    """Gradient of M(h; theta) in theta = (sigma2, beta, nu).

    Returns shape (3,) for scalar h, (3,) + h.shape for arrays.  At h = 0
    the gradient is (1, 0, 0): M(0) = sigma2 identically, and the beta and
    nu derivatives vanish in the h -> 0 limit for nu > 0.
    """
    ha = _validate_h(h)
    s2, beta, nu = theta.sigma2, theta.beta, theta.nu
    t = np.atleast_1d(ha / beta)
    g = np.zeros((3,) + t.shape)
    zero = t == 0.0
    g[0][zero] = 1.0
    if np.any(~zero):
        tp = t[~zero]
        hp = tp * beta
        c = _coef(nu)
        k = special_kv(nu, tp)
        kp = -0.5 * (special_kv(nu - 1.0, tp) + special_kv(nu + 1.0, tp))
        tnu = tp ** nu
        gk = tnu * k                         # t^nu K_nu
        dgk = specfun.dnu_xnu_k(nu, tp, 1)   # d/dnu of t^nu K_nu
        g[0][~zero] = c * gk
        g[1][~zero] = -s2 * c * tnu * (nu / beta * k + hp / beta ** 2 * kp)
        g[2][~zero] = s2 * c * (dgk - (_LN2 + digamma(nu)) * gk)
    if np.ndim(h) == 0:
        return g[:, 0]
    return g.reshape((3,) + ha.shape)


def matern_hess(h, theta):
    """Hessian of M(h; theta) in theta; symmetric 3x3 per distance.

    Returns shape (3, 3) for scalar h, (3, 3) + h.shape for arrays.  The
    (sigma2, sigma2) entry is identically zero (M is linear in sigma2);
    cross terms are computed once and mirrored.  All entries vanish at
    h = 0 (derivatives of the constant diagonal).
    """
    ha = _validate_h(h)
    s2, beta, nu = theta.sigma2, theta.beta, theta.nu
    t = np.atleast_1d(ha / beta)
    hess = np.zeros((3, 3) + t.shape)
    nz = t != 0.0
    if np.any(nz):
        tp = t[nz]
        hp = tp * beta
        c = _coef(nu)
        psi = digamma(nu)
        k = special_kv(nu, tp)
        kp = -0.5 * (special_kv(nu - 1.0, tp) + special_kv(nu + 1.0, tp))
        kpp = ((tp * tp + nu * nu) * k - tp * kp) / (tp * tp)
        tnu = tp ** nu
        gk = tnu * k
        pk = tnu * kp
        dgk = specfun.dnu_xnu_k(nu, tp, 1)
        d2gk = specfun.dnu_xnu_k(nu, tp, 2)
        dpk = specfun.dnu_xnu_kprime(nu, tp)

        # d2M/dbeta2: differentiate -s2 c (h/beta^2)(nu t^(nu-1) K + t^nu K')
        # once more in beta; collecting powers of t gives
        #   s2 c / beta^2 * t^nu [ nu(nu+1) K + 2(nu+1) t K' + t^2 K'' ]
        d_bb = s2 * c / beta ** 2 * tnu * (
            nu * (nu + 1.0) * k + 2.0 * (nu + 1.0) * tp * kp + tp * tp * kpp
        )
        # d2M/dbeta dnu: nu-derivative of the beta-derivative; the c(nu)
        # factor contributes -(ln 2 + Psi), the bracket differentiates
        # termwise with t^nu K and t^nu K' replaced by their nu-stencils
        d_bn = -s2 * c * (
            -(_LN2 + psi) * (nu / beta * gk + hp / beta ** 2 * pk)
            + gk / beta + nu / beta * dgk + hp / beta ** 2 * dpk
        )
        # d2M/dnu2: second derivative of c(nu) g(nu) with
        # c'/c = -(ln 2 + Psi), c''/c = (ln 2 + Psi)^2 - Psi'
        lp = _LN2 + psi
        d_nn = s2 * c * ((lp * lp - trigamma(nu)) * gk - 2.0 * lp * dgk + d2gk)

        # mixed sigma2 terms: M is linear in sigma2, so these are the beta
        # and nu gradient components divided by sigma2
        hess[0, 1][nz] = hess[1, 0][nz] = -c * tnu * (nu / beta * k + hp / beta ** 2 * kp)
        hess[0, 2][nz] = hess[2, 0][nz] = c * (dgk - lp * gk)
        hess[1, 1][nz] = d_bb
        hess[1, 2][nz] = hess[2, 1][nz] = d_bn
        hess[2, 2][nz] = d_nn
    if np.ndim(h) == 0:
        return hess[:, :, 0]
    return hess.reshape((3, 3) + ha.shape)


# === matrix builders ========================================================


def build_cov(locs, theta):
    """Covariance matrix over a location set; evaluates once per unique distance."""
    uniq, inv = locs._dist_unique
    vals = matern_cov(uniq, theta)
    return vals[inv]


def build_cov_grad(locs, theta):
    """Entrywise kernel gradient over the distance matrix, shape (3, n, n)."""
    uniq, inv = locs._dist_unique
    g = matern_grad(uniq, theta)
    return g[:, inv]


def build_cov_hess(locs, theta):
    """Entrywise kernel Hessian over the distance matrix, shape (3, 3, n, n).

    Symmetric in the two parameter axes (cross terms mirrored) and in (i, j).
    """
    uniq, inv = locs._dist_unique
    hh = matern_hess(uniq, theta)
    return hh[:, :, inv]
