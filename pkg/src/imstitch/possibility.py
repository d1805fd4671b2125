"""Possibility contours, consonant set functions, and the Gaussian special case.

A possibility contour assigns each parameter value a plausibility in [0, 1],
with value 1 somewhere (at the best-supported parameter).  The induced upper
probability of a hypothesis is the supremum of the contour over that
hypothesis; the lower probability (necessity) follows by conjugacy.  This
module provides the contour containers used across the package, alpha-cuts,
Choquet upper expectations, and the closed-form Gaussian possibility whose
cuts are ellipsoids.

Chi-square distribution helpers live here because every Gaussian-possibility
computation is a monotone function of a chi-square tail probability.
"""

from __future__ import annotations

import io
import json
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.special import gammainc, gammaincinv

from .errors import InvalidInputError

__all__ = [
    "PossibilityContour",
    "ContourTable",
    "GaussianPossibility",
    "Ellipsoid",
    "chi2_cdf",
    "chi2_quantile",
    "gaussian_contour",
    "gaussian_alpha_cut",
    "hypothesis_possibility",
    "alpha_cut",
    "choquet_upper_expectation",
    "necessity",
]


# ---------------------------------------------------------------------------
# chi-square helpers

def chi2_cdf(d: int, x) -> np.ndarray | float:
    """Chi-square CDF with ``d`` degrees of freedom.

    Computed as the regularized lower incomplete gamma function
    ``P(d/2, x/2)``.  Vectorized in ``x``; negative arguments map to 0.
    """
    if d < 1 or int(d) != d:
        raise InvalidInputError(f"degrees of freedom must be a positive integer, got {d}")
    x = np.asarray(x, dtype=float)
    out = gammainc(d / 2.0, np.maximum(x, 0.0) / 2.0)
    return float(out) if out.ndim == 0 else out


def chi2_quantile(d: int, p) -> np.ndarray | float:
    """Chi-square quantile function, the inverse of :func:`chi2_cdf`.

    ``p`` may be any value in [0, 1]; ``p = 1`` returns ``inf``.  Raises
    :class:`InvalidInputError` outside [0, 1].
    """
    if d < 1 or int(d) != d:
        raise InvalidInputError(f"degrees of freedom must be a positive integer, got {d}")
    p = np.asarray(p, dtype=float)
    if np.any((p < 0.0) | (p > 1.0)):
        raise InvalidInputError("quantile level must lie in [0, 1]")
    out = 2.0 * gammaincinv(d / 2.0, p)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# containers

def _coerce_points(x, dim: int) -> np.ndarray:
    """Normalize parameter input to an (n, dim) array.

    A 1-d array of length ``dim`` is a single point; for ``dim == 1`` a 1-d
    array of any length is a column of points.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1, 1)
    elif x.ndim == 1:
        if dim == 1:
            x = x[:, None]
        else:
            x = x[None, :]
    if x.ndim != 2 or x.shape[1] != dim:
        raise InvalidInputError(
            f"expected points of dimension {dim}, got shape {x.shape}")
    return x


@dataclass
class PossibilityContour:
    """A contour as a plain function of the parameter.

    Parameters
    ----------
    fn : callable
        Maps an (n, dim) array of parameter points to an (n,) array of
        plausibilities in [0, 1].
    dim : int
        Parameter dimension.
    description : str
        Free-text label used in reports.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    dim: int
    description: str = ""

    def __call__(self, theta) -> np.ndarray | float:
        theta = _coerce_points(theta, self.dim)
        out = np.asarray(self.fn(theta), dtype=float)
        return float(out[0]) if out.size == 1 else out


@dataclass
class ContourTable:
    """A contour evaluated on a finite grid of parameter points.

    ``points`` has shape (K, dim) and ``values`` shape (K,) with entries in
    [0, 1].  ``meta`` carries provenance (model id, data id, replicate count,
    seed, failures) and survives CSV round trips.
    """

    points: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)
    param_names: list[str] | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        vals = np.asarray(self.values, dtype=float).ravel()
        if pts.ndim == 1:
            # length disambiguates: one row per value, or a single point
            pts = pts[:, None] if pts.shape[0] == vals.shape[0] else pts[None, :]
        self.points = pts
        self.values = vals
        if self.points.ndim != 2 or self.points.shape[0] != self.values.shape[0]:
            raise InvalidInputError("points and values must have matching length")
        if self.points.shape[0] == 0 or self.points.size == 0:
            raise InvalidInputError("contour table must contain at least one grid point")
        finite = self.values[np.isfinite(self.values)]
        if finite.size and (finite.min() < -1e-12 or finite.max() > 1.0 + 1e-12):
            raise InvalidInputError("contour values must lie in [0, 1]")
        if self.param_names is None:
            self.param_names = [f"theta{i + 1}" for i in range(self.points.shape[1])]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def alpha_cut(self, alpha_level: float) -> np.ndarray:
        """Grid points whose plausibility is at least ``alpha_level``."""
        return alpha_cut(self, alpha_level)

    def to_csv(self, path_or_buf) -> None:
        """Serialize as CSV: a ``# meta:`` comment line, a header row, then
        one row per grid point with the plausibility in the last column."""
        close = False
        if isinstance(path_or_buf, (str, bytes)):
            fh = open(path_or_buf, "w")
            close = True
        else:
            fh = path_or_buf
        try:
            fh.write("# meta: " + json.dumps(self.meta, sort_keys=True) + "\n")
            fh.write(",".join([*self.param_names, "plaus"]) + "\n")
            for row, val in zip(self.points, self.values):
                cells = [format(c, ".17g") for c in row] + [format(val, ".17g")]
                fh.write(",".join(cells) + "\n")
        finally:
            if close:
                fh.close()

    @classmethod
    def from_csv(cls, path_or_buf) -> "ContourTable":
        if isinstance(path_or_buf, (str, bytes)):
            with open(path_or_buf) as fh:
                text = fh.read()
        else:
            text = path_or_buf.read()
        meta = {}
        lines = [ln for ln in text.splitlines() if ln.strip()]
        while lines and lines[0].startswith("#"):
            comment = lines.pop(0)
            if comment.startswith("# meta:"):
                meta = json.loads(comment[len("# meta:"):])
        if not lines:
            raise InvalidInputError("contour CSV has no header row")
        header = [h.strip() for h in lines[0].split(",")]
        if header[-1] != "plaus":
            raise InvalidInputError("contour CSV header must end with 'plaus'")
        body = np.loadtxt(io.StringIO("\n".join(lines[1:])), delimiter=",", ndmin=2)
        return cls(points=body[:, :-1], values=body[:, -1], meta=meta,
                   param_names=header[:-1])


@dataclass
class Ellipsoid:
    """The region ``(x - center)' shape (x - center) <= radius2``."""

    center: np.ndarray
    shape: np.ndarray
    radius2: float

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).ravel()
        self.shape = np.asarray(self.shape, dtype=float)
        d = self.center.size
        if self.shape.shape != (d, d):
            raise InvalidInputError("ellipsoid shape matrix must be d x d")
        if self.radius2 < 0:
            raise InvalidInputError("ellipsoid squared radius must be nonnegative")

    def mahalanobis2(self, x) -> np.ndarray | float:
        x = _coerce_points(x, self.center.size)
        diff = x - self.center
        out = np.einsum("ni,ij,nj->n", diff, self.shape, diff)
        return float(out[0]) if out.size == 1 else out

    def contains(self, x, tol: float = 1e-12):
        return self.mahalanobis2(x) <= self.radius2 * (1.0 + tol) + tol

    def on_boundary(self, x, rtol: float = 1e-10):
        q = self.mahalanobis2(x)
        return np.abs(q - self.radius2) <= rtol * max(self.radius2, 1.0)


class GaussianPossibility:
    """Closed-form possibility contour of a Gaussian with mean ``m`` and
    covariance ``V``:  ``pi(theta) = 1 - F_d(q(theta))`` where ``q`` is the
    squared Mahalanobis distance and ``F_d`` the chi-square CDF.

    Alpha-cuts are ellipsoids; their boundaries carry the mass of the inner
    probabilistic approximation level by level.
    """

    def __init__(self, mean, cov):
        self.mean = np.asarray(mean, dtype=float).ravel()
        self.cov = np.atleast_2d(np.asarray(cov, dtype=float))
        d = self.mean.size
        if self.cov.shape != (d, d):
            raise InvalidInputError("covariance must be d x d")
        if not np.allclose(self.cov, self.cov.T, atol=1e-10):
            raise InvalidInputError("covariance must be symmetric")
        try:
            self._cho = cho_factor(self.cov, lower=True)
        except np.linalg.LinAlgError as exc:
            raise InvalidInputError("covariance must be positive definite") from exc

    @property
    def dim(self) -> int:
        return self.mean.size

    def mahalanobis2(self, theta) -> np.ndarray:
        theta = _coerce_points(theta, self.dim)
        diff = (theta - self.mean).T
        return np.sum(diff * cho_solve(self._cho, diff), axis=0)

    def contour(self, theta) -> np.ndarray | float:
        q = self.mahalanobis2(theta)
        out = 1.0 - chi2_cdf(self.dim, q)
        return float(out[0]) if out.size == 1 else out

    __call__ = contour

    def alpha_cut(self, alpha_level: float) -> Ellipsoid:
        if not 0.0 < alpha_level < 1.0:
            raise InvalidInputError("alpha level must lie in (0, 1)")
        prec = cho_solve(self._cho, np.eye(self.dim))
        r2 = chi2_quantile(self.dim, 1.0 - alpha_level)
        return Ellipsoid(center=self.mean.copy(), shape=prec, radius2=float(r2))

    def as_contour(self) -> PossibilityContour:
        return PossibilityContour(fn=lambda t: self.contour(t), dim=self.dim,
                                  description="gaussian possibility")


def gaussian_contour(theta, g: GaussianPossibility):
    """Plausibility of ``theta`` under the Gaussian possibility ``g``."""
    return g.contour(theta)


def gaussian_alpha_cut(alpha_level: float, g: GaussianPossibility) -> Ellipsoid:
    """Alpha-cut of a Gaussian possibility: an ellipsoid with squared radius
    equal to the chi-square quantile at ``1 - alpha_level``."""
    return g.alpha_cut(alpha_level)


# ---------------------------------------------------------------------------
# grid operations

def _predicate_mask(table: ContourTable, predicate) -> np.ndarray:
    if callable(predicate):
        mask = np.asarray(predicate(table.points), dtype=bool)
    else:
        mask = np.asarray(predicate, dtype=bool)
    if mask.shape != (table.points.shape[0],):
        raise InvalidInputError("predicate must produce one boolean per grid point")
    return mask


def hypothesis_possibility(table: ContourTable, predicate) -> float:
    """Upper probability of a hypothesis: the supremum of the contour over
    the grid points satisfying ``predicate``.

    ``predicate`` is either a vectorized callable on (K, dim) points or a
    boolean mask of length K.  If no grid point satisfies it, the supremum
    over the empty set is taken as 0 and a "hypothesis misses grid" warning
    is emitted.
    """
    mask = _predicate_mask(table, predicate)
    if not mask.any():
        warnings.warn("hypothesis misses grid; returning possibility 0",
                      stacklevel=2)
        return 0.0
    return float(np.max(table.values[mask]))


def necessity(table: ContourTable, predicate) -> float:
    """Lower probability of a hypothesis by conjugacy:
    ``1 - hypothesis_possibility(complement)``."""
    mask = _predicate_mask(table, predicate)
    comp = ~mask
    if not comp.any():
        return 1.0
    return 1.0 - float(np.max(table.values[comp]))


def alpha_cut(table: ContourTable, alpha_level: float) -> np.ndarray:
    """Points of the grid with plausibility ``>= alpha_level``.

    Cuts are nested: raising the level never adds a point.  ``alpha_level``
    may be 0 (the whole grid) up to 1.
    """
    if not 0.0 <= alpha_level <= 1.0:
        raise InvalidInputError("alpha level must lie in [0, 1]")
    return table.points[table.values >= alpha_level]


def choquet_upper_expectation(contour, h, domain=None, levels: int = 2001) -> float:
    """Choquet integral of a nonnegative function against the upper
    probability induced by a possibility contour.

    The integral is ``min(h) * sup(pi)`` plus the integral over
    ``s in [min(h), max(h)]`` of ``sup { pi(theta) : h(theta) > s }``,
    evaluated on a uniform grid of ``levels`` values of ``s`` with the
    trapezoid rule.  At the top level the strict inequality is relaxed to
    ``>=`` so that indicator functions integrate exactly to the hypothesis
    possibility on the same grid.

    The default level count is 2001: chi-square-flavored integrands have
    unbounded slope at the contour's mode, and a couple hundred trapezoid
    levels leave a visible (~1e-2) bias there.

    Parameters
    ----------
    contour : ContourTable or callable
        Either a contour already evaluated on its own grid, or a callable
        (e.g. :class:`PossibilityContour`) evaluated on ``domain``.
    h : array_like or callable
        Nonnegative integrand, given as values on the grid points or as a
        vectorized callable.
    domain : array_like, optional
        Grid of parameter points; required when ``contour`` is a callable,
        ignored when it is a :class:`ContourTable`.
    levels : int
        Number of quadrature levels (at least 2; default 2001).
    """
    if levels < 2:
        raise InvalidInputError("levels must be at least 2")
    if isinstance(contour, ContourTable):
        points = contour.points
        pi = contour.values
    else:
        if domain is None:
            raise InvalidInputError("a domain grid is required with a callable contour")
        points = np.asarray(domain, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        pi = np.asarray(contour(points), dtype=float).ravel()
    if callable(h):
        hv = np.asarray(h(points), dtype=float)
    else:
        hv = np.asarray(h, dtype=float)
    if hv.shape != (points.shape[0],):
        raise InvalidInputError("h must produce one value per grid point")
    if not np.all(np.isfinite(hv)):
        raise InvalidInputError("h must be finite on the grid")
    if hv.min() < 0:
        raise InvalidInputError("h must be nonnegative")

    sup_pi = float(np.max(pi))
    hmin = float(hv.min())
    hmax = float(hv.max())
    if hmax == hmin:
        return hmin * sup_pi

    # sup{pi : h > s} for every level at once: sort by h, then the suffix
    # maximum of pi in that order gives the level sups via binary search
    order = np.argsort(hv, kind="stable")
    h_sorted = hv[order]
    suffix_max = np.maximum.accumulate(pi[order][::-1])[::-1]
    s = np.linspace(hmin, hmax, levels)
    idx = np.searchsorted(h_sorted, s, side="right")
    integrand = np.where(idx < hv.size, suffix_max[np.minimum(idx, hv.size - 1)], 0.0)
    # top level: relax to h >= max(h) so indicators integrate exactly
    integrand[-1] = suffix_max[np.searchsorted(h_sorted, hmax, side="left")]
    if np.all(integrand == integrand[0]):
        # constant integrand (e.g. an indicator): skip quadrature rounding
        return hmin * sup_pi + float(integrand[0]) * (hmax - hmin)
    return hmin * sup_pi + float(np.trapezoid(integrand, s))
