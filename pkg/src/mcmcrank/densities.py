"""Target and proposal densities.

All densities work in log space. Points are float64 arrays: a single state
has shape (s,), a batch has shape (n, s). Batch evaluation is the primitive;
single-point evaluation goes through the same code path so that scalar and
vectorized results agree bit for bit.

A target is known only up to a multiplicative constant. Constant rescaling
of the unnormalized density is carried symbolically (``log_scale``) instead
of being folded into evaluations: acceptance ratios and divergence
differences are then invariant under rescaling by construction, not merely
up to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "TargetDensity",
    "GaussianMixture",
    "ProposalDensity",
    "GaussianProposal",
    "StudentProposal",
    "UniformBoxProposal",
    "KdeProposal",
    "mixture_target",
    "trimodal_mixture_1d",
    "trimodal_mixture_2d",
    "bivariate_gaussian_target",
    "box_integral",
]

_LOG_2PI = math.log(2.0 * math.pi)


def _as_batch(x: np.ndarray, dimension: int, what: str = "point") -> np.ndarray:
    """Coerce ``x`` to a (n, s) float array, validating the dimension."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        # A 1-d array is a single s-dimensional point.
        arr = arr.reshape(1, -1)
    elif arr.ndim != 2:
        raise ValueError(f"{what} must be a vector or a matrix, got ndim={arr.ndim}")
    if arr.shape[1] != dimension:
        raise ValueError(
            f"{what} has dimension {arr.shape[1]}, expected {dimension}"
        )
    return arr


# --------------------------------------------------------------------------
# Gaussian mixtures
# --------------------------------------------------------------------------


class GaussianMixture:
    """Finite Gaussian mixture with full covariance components.

    Weights must be positive and sum to one; covariances must be symmetric
    positive definite. In one dimension scalar variances are accepted.
    """

    def __init__(
        self,
        weights: Sequence[float],
        means: Sequence,
        covariances: Sequence,
    ):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty 1-d sequence")
        if np.any(w <= 0.0):
            raise ValueError("mixture weights must be strictly positive")
        if abs(float(w.sum()) - 1.0) > 1e-9:
            raise ValueError(f"mixture weights sum to {w.sum()}, expected 1")

        mu = np.asarray(means, dtype=float)
        if mu.ndim == 1:
            mu = mu.reshape(-1, 1)
        if mu.shape[0] != w.size:
            raise ValueError("means and weights disagree on component count")
        s = mu.shape[1]

        cov = np.asarray(covariances, dtype=float)
        if cov.ndim == 1:  # per-component scalar variances, 1-d state space
            if s != 1:
                raise ValueError("scalar variances only make sense in 1-d")
            cov = cov.reshape(-1, 1, 1)
        if cov.shape != (w.size, s, s):
            raise ValueError(f"covariances must have shape ({w.size}, {s}, {s})")

        chols = np.empty_like(cov)
        for k in range(w.size):
            sym_gap = np.max(np.abs(cov[k] - cov[k].T))
            if sym_gap > 1e-10:
                raise ValueError(f"covariance {k} is not symmetric")
            try:
                chols[k] = np.linalg.cholesky(cov[k])
            except np.linalg.LinAlgError as exc:
                raise ValueError(f"covariance {k} is not positive definite") from exc

        self.weights = w
        self.means = mu
        self.covariances = cov
        self.dimension = s
        self._log_w = np.log(w)
        self._chols = chols
        # inv(L) per component, kept explicit so evaluation is solver-free
        self._inv_chols = np.stack([np.linalg.inv(L) for L in chols])
        self._log_det = np.array([2.0 * np.log(np.diag(L)).sum() for L in chols])

    def log_density_many(self, X: np.ndarray) -> np.ndarray:
        """Log mixture density at each row of X, via log-sum-exp."""
        X = _as_batch(X, self.dimension)
        diff = X[:, None, :] - self.means[None, :, :]  # (n, k, s)
        u = np.einsum("nks,kts->nkt", diff, self._inv_chols)  # whitened
        quad = np.einsum("nkt,nkt->nk", u, u)
        comp = self._log_w[None, :] - 0.5 * (
            quad + self._log_det[None, :] + self.dimension * _LOG_2PI
        )
        peak = comp.max(axis=1)
        return peak + np.log(np.exp(comp - peak[:, None]).sum(axis=1))

    def log_density(self, x: np.ndarray) -> float:
        return float(self.log_density_many(_as_batch(x, self.dimension))[0])

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        k = int(rng.choice(self.weights.size, p=self.weights))
        z = rng.standard_normal(self.dimension)
        return self.means[k] + np.einsum("ts,s->t", self._chols[k], z)


# --------------------------------------------------------------------------
# Targets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TargetDensity:
    """A target known up to a constant: f = C * exp(log_scale) * base.

    ``log_phi`` evaluates the base unnormalized log density on a (n, s)
    batch. ``log_scale`` is an additive constant on log phi that is never
    folded into evaluations (it cancels in every quantity the package
    computes; see module docstring). ``log_norm`` is log C relative to the
    base, present only when the normalized density is fully known.
    """

    dimension: int
    log_phi: Callable[[np.ndarray], np.ndarray]
    log_norm: Optional[float] = None
    log_scale: float = 0.0
    sampler: Optional[Callable[[np.random.Generator], np.ndarray]] = None
    label: str = "target"
    box: Optional[tuple] = field(default=None, repr=False)  # (lower, upper) arrays

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be a positive integer")

    def log_phi_many(self, X: np.ndarray) -> np.ndarray:
        """Base log phi at each row of X (excludes log_scale)."""
        X = _as_batch(X, self.dimension)
        out = np.asarray(self.log_phi(X), dtype=float)
        if out.shape != (X.shape[0],):
            raise ValueError("log_phi must map (n, s) to (n,)")
        return out

    def log_phi_at(self, x: np.ndarray) -> float:
        return float(self.log_phi_many(_as_batch(x, self.dimension, "state"))[0])

    def with_phi_scale(self, scale: float) -> "TargetDensity":
        """Same target with the unnormalized density multiplied by ``scale``."""
        if scale <= 0.0:
            raise ValueError("phi scale must be positive")
        return TargetDensity(
            dimension=self.dimension,
            log_phi=self.log_phi,
            log_norm=self.log_norm,
            log_scale=self.log_scale + math.log(scale),
            sampler=self.sampler,
            label=self.label,
            box=self.box,
        )


def mixture_target(mixture: GaussianMixture, label: str = "mixture") -> TargetDensity:
    """Wrap a fully known Gaussian mixture as a target (phi = f, C = 1)."""
    dev = np.sqrt(np.array([np.max(np.diag(c)) for c in mixture.covariances]))
    lower = (mixture.means - 12.0 * dev[:, None]).min(axis=0)
    upper = (mixture.means + 12.0 * dev[:, None]).max(axis=0)
    return TargetDensity(
        dimension=mixture.dimension,
        log_phi=mixture.log_density_many,
        log_norm=0.0,
        sampler=mixture.sample,
        label=label,
        box=(lower, upper),
    )


def trimodal_mixture_1d() -> GaussianMixture:
    """Built-in 1-d benchmark: three well separated Gaussian modes."""
    return GaussianMixture(
        weights=[0.5, 0.3, 0.2],
        means=[0.0, 9.0, -6.0],
        covariances=[2.0, 1.0, 1.0],
    )


def trimodal_mixture_2d() -> GaussianMixture:
    """Built-in 2-d benchmark with almost disconnected modes.

    The exact component values are this package's own choice, picked to
    give three clearly separated blobs of unequal mass.
    """
    eye = np.eye(2)
    return GaussianMixture(
        weights=[0.4, 0.35, 0.25],
        means=[[0.0, 0.0], [8.0, 8.0], [-6.0, 4.0]],
        covariances=[2.0 * eye, eye, eye],
    )


def bivariate_gaussian_target(rho: float, label: str = "bivariate_gaussian") -> TargetDensity:
    """Standard bivariate Gaussian with correlation rho, as a known target."""
    if not -1.0 < rho < 1.0:
        raise ValueError("correlation must lie strictly inside (-1, 1)")
    cov = np.array([[1.0, rho], [rho, 1.0]])
    return mixture_target(GaussianMixture([1.0], [[0.0, 0.0]], [cov]), label=label)


# --------------------------------------------------------------------------
# Proposal densities
# --------------------------------------------------------------------------


class ProposalDensity:
    """A density that can be evaluated in log space and sampled.

    Subclasses implement ``log_density_many`` over (n, s) batches and
    ``sample`` drawing one point from an exclusively owned generator.
    Values are immutable after construction; evaluation is reentrant.
    """

    dimension: int

    def log_density_many(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def log_density(self, x: np.ndarray) -> float:
        return float(self.log_density_many(_as_batch(x, self.dimension))[0])

    def density(self, x: np.ndarray) -> float:
        return math.exp(self.log_density(x))

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError


class GaussianProposal(ProposalDensity):
    """Gaussian with arbitrary mean and SPD covariance (scalar = isotropic)."""

    def __init__(self, mean, cov):
        mu = np.atleast_1d(np.asarray(mean, dtype=float))
        s = mu.size
        c = np.asarray(cov, dtype=float)
        if c.ndim == 0:
            c = float(c) * np.eye(s)
        elif c.ndim == 1:
            c = np.diag(c)
        if c.shape != (s, s):
            raise ValueError(f"covariance must be a scalar or ({s}, {s}) matrix")
        try:
            L = np.linalg.cholesky(c)
        except np.linalg.LinAlgError as exc:
            raise ValueError("covariance is not positive definite") from exc
        self.dimension = s
        self.mean = mu
        self.cov = c
        self._chol = L
        self._inv_chol = np.linalg.inv(L)
        self._log_det = 2.0 * np.log(np.diag(L)).sum()

    def log_density_many(self, X: np.ndarray) -> np.ndarray:
        X = _as_batch(X, self.dimension)
        u = np.einsum("ts,ns->nt", self._inv_chol, X - self.mean[None, :])
        quad = np.einsum("nt,nt->n", u, u)
        return -0.5 * (quad + self._log_det + self.dimension * _LOG_2PI)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        z = rng.standard_normal(self.dimension)
        return self.mean + np.einsum("ts,s->t", self._chol, z)


class StudentProposal(ProposalDensity):
    """One-dimensional Student t with location and scale, df >= 1."""

    def __init__(self, df: float, loc: float = 0.0, scale: float = 1.0):
        if df < 1.0:
            raise ValueError("Student degrees of freedom must be >= 1")
        if scale <= 0.0:
            raise ValueError("scale must be positive")
        self.dimension = 1
        self.df = float(df)
        self.loc = float(loc)
        self.scale = float(scale)
        d = self.df
        self._log_const = (
            math.lgamma((d + 1.0) / 2.0)
            - math.lgamma(d / 2.0)
            - 0.5 * math.log(d * math.pi)
            - math.log(self.scale)
        )

    def log_density_many(self, X: np.ndarray) -> np.ndarray:
        X = _as_batch(X, 1)
        z = (X[:, 0] - self.loc) / self.scale
        return self._log_const - 0.5 * (self.df + 1.0) * np.log1p(z * z / self.df)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return np.array([self.loc + self.scale * rng.standard_t(self.df)])


class UniformBoxProposal(ProposalDensity):
    """Uniform density on an axis-aligned box."""

    def __init__(self, lower, upper):
        lo = np.atleast_1d(np.asarray(lower, dtype=float))
        hi = np.atleast_1d(np.asarray(upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lower and upper must be vectors of equal length")
        if np.any(hi <= lo):
            raise ValueError("upper must exceed lower in every coordinate")
        self.dimension = lo.size
        self.lower = lo
        self.upper = hi
        self._log_dens = -float(np.log(hi - lo).sum())

    def log_density_many(self, X: np.ndarray) -> np.ndarray:
        X = _as_batch(X, self.dimension)
        inside = np.all((X >= self.lower) & (X <= self.upper), axis=1)
        return np.where(inside, self._log_dens, -np.inf)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lower, self.upper)


class KdeProposal(ProposalDensity):
    """Kernel density estimate over stored points, usable as an IS proposal.

    Product-form kernel with one bandwidth per coordinate:

        q(x) = (1/M) sum_i prod_d K((x_d - p_id) / h_d) / h_d

    ``kernel`` is "gaussian" (default; strictly positive everywhere, so the
    proposal never rules out a point) or "epanechnikov".
    """

    def __init__(self, points, bandwidth, kernel: str = "gaussian"):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("points must be a non-empty (m, s) matrix")
        h = np.atleast_1d(np.asarray(bandwidth, dtype=float))
        if h.size == 1:
            h = np.full(pts.shape[1], float(h[0]))
        if h.shape != (pts.shape[1],) or np.any(h <= 0.0):
            raise ValueError("bandwidth must be positive, one value per coordinate")
        if kernel not in ("gaussian", "epanechnikov"):
            raise ValueError(f"unknown kde kernel {kernel!r}")
        self.dimension = pts.shape[1]
        self.points = pts
        self.bandwidth = h
        self.kernel = kernel
        self._log_h_sum = float(np.log(h).sum())

    def log_density_many(self, X: np.ndarray) -> np.ndarray:
        X = _as_batch(X, self.dimension)
        u = (X[:, None, :] - self.points[None, :, :]) / self.bandwidth  # (n, m, s)
        m = self.points.shape[0]
        if self.kernel == "gaussian":
            logk = -0.5 * (np.einsum("nms,nms->nm", u, u) + self.dimension * _LOG_2PI)
            peak = logk.max(axis=1)
            out = peak + np.log(np.exp(logk - peak[:, None]).sum(axis=1))
            return out - math.log(m) - self._log_h_sum
        terms = np.prod(np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0), axis=2)
        dens = terms.sum(axis=1) / m
        with np.errstate(divide="ignore"):
            return np.log(dens) - self._log_h_sum

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        i = int(rng.integers(self.points.shape[0]))
        if self.kernel == "gaussian":
            eps = rng.standard_normal(self.dimension)
        else:
            # median of three uniforms draws from the parabolic kernel
            eps = np.median(rng.uniform(-1.0, 1.0, size=(3, self.dimension)), axis=0)
        return self.points[i] + self.bandwidth * eps


# --------------------------------------------------------------------------
# Quadrature check used by validation tests
# --------------------------------------------------------------------------


def box_integral(
    log_density: Callable[[np.ndarray], np.ndarray],
    lower,
    upper,
    n_points: int = 2001,
) -> float:
    """Trapezoid integral of exp(log_density) over a 1-d or 2-d box."""
    lo = np.atleast_1d(np.asarray(lower, dtype=float))
    hi = np.atleast_1d(np.asarray(upper, dtype=float))
    if lo.size == 1:
        xs = np.linspace(lo[0], hi[0], n_points)
        vals = np.exp(log_density(xs.reshape(-1, 1)))
        return float(np.trapz(vals, xs))
    if lo.size == 2:
        xs = np.linspace(lo[0], hi[0], n_points)
        ys = np.linspace(lo[1], hi[1], n_points)
        rows = np.empty(n_points)
        for i, x in enumerate(xs):
            grid = np.column_stack([np.full(n_points, x), ys])
            rows[i] = np.trapz(np.exp(log_density(grid)), ys)
        return float(np.trapz(rows, xs))
    raise ValueError("box_integral supports 1-d and 2-d boxes only")
