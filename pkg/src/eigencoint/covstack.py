"""Demeaned lag-j sample autocovariances and their quadratic accumulation.

For an ``n x p`` panel ``y`` (rows are time points) the lag-``j``
autocovariance used throughout the package is

    S_j = (1/n) * sum_{t=1}^{n-j} (y_{t+j} - ybar)(y_t - ybar)'

Note the divisor is ``n`` for every lag, never ``n - j``; many libraries use
the latter, so the convention is stated here once and relied on everywhere.
The quadratic accumulation

    W = sum_{j=0}^{j0} S_j S_j'

is symmetric positive semidefinite by construction; its large eigenvalues
pick out nonstationary directions of the panel and its small ones the
stationary (cointegrated) directions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSeries, LagTooLarge
from .linalg import symmetrize

#: Default max lag for the quadratic accumulation.  Small values suffice for
#: integer-order integration; workflows targeting fractional orders should
#: raise this (20 is a reasonable default there) because low-order
#: autocovariances carry less of the long-memory signal.
DEFAULT_J0 = 5


def as_panel(data) -> np.ndarray:
    """Validate and return an observation panel as a float64 ``(n, p)`` array.

    Rows are time points, columns are component series.

    Raises
    ------
    InvalidSeries
        If the input is not 2-D with ``n >= 2`` and ``p >= 1``, or has
        non-finite entries.  Missing values are rejected, not imputed.
    """
    y = np.asarray(data, dtype=float)
    if y.ndim != 2:
        raise InvalidSeries(f"panel must be 2-D (time x series), got ndim={y.ndim}")
    n, p = y.shape
    if n < 2 or p < 1:
        raise InvalidSeries(f"panel needs n >= 2 and p >= 1, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise InvalidSeries("panel contains non-finite entries")
    return y


@dataclass(frozen=True)
class LagCovStack:
    """Lag covariances ``S_0 .. S_j0`` plus their quadratic accumulation.

    Attributes
    ----------
    j0 : int
        Largest lag included.
    sigmas : tuple of ndarray
        ``j0 + 1`` matrices of shape ``(p, p)``; ``sigmas[j]`` is ``S_j``.
    w : ndarray, shape (p, p)
        ``sum_j S_j S_j'``, symmetrized.
    mean : ndarray, shape (p,)
        The panel mean removed before lagging.
    """

    j0: int
    sigmas: tuple
    w: np.ndarray
    mean: np.ndarray

    @property
    def p(self) -> int:
        return self.w.shape[0]


def lag_cov(series, j: int) -> np.ndarray:
    """Demeaned lag-``j`` sample autocovariance with divisor ``n``.

    Parameters
    ----------
    series : array_like, shape (n, p)
        Observation panel, rows are time points.
    j : int
        Lag, ``0 <= j <= n - 2``.

    Returns
    -------
    ndarray, shape (p, p)
        ``(1/n) * sum_{t=1}^{n-j} (y_{t+j} - ybar)(y_t - ybar)'``.

    Raises
    ------
    LagTooLarge
        If ``j < 0`` or ``j >= n - 1`` (the defining sum would be empty or
        a single demeaned outer product).
    InvalidSeries
        Malformed panel.
    """
    y = as_panel(series)
    n = y.shape[0]
    j = int(j)
    if j < 0 or j >= n - 1:
        raise LagTooLarge(f"lag {j} out of range for n={n} (need 0 <= j <= n-2)")
    yc = y - y.mean(axis=0)
    return (yc[j:].T @ yc[: n - j]) / n


def build_stack(series, j0: int = DEFAULT_J0) -> LagCovStack:
    """Compute ``S_0 .. S_j0`` and ``W = sum_j S_j S_j'`` for a panel.

    ``W`` is symmetrized as ``(W + W') / 2`` after accumulation to remove
    floating-point asymmetry before any eigenanalysis.

    Parameters
    ----------
    series : array_like, shape (n, p)
    j0 : int, default DEFAULT_J0
        Largest lag, ``0 <= j0 <= n - 2``.

    Returns
    -------
    LagCovStack
    """
    y = as_panel(series)
    n, p = y.shape
    j0 = int(j0)
    if j0 < 0 or j0 >= n - 1:
        raise LagTooLarge(f"j0={j0} out of range for n={n} (need 0 <= j0 <= n-2)")
    yc = y - y.mean(axis=0)
    sigmas = []
    w = np.zeros((p, p))
    for j in range(j0 + 1):
        s = (yc[j:].T @ yc[: n - j]) / n
        sigmas.append(s)
        w += s @ s.T
    return LagCovStack(
        j0=j0,
        sigmas=tuple(sigmas),
        w=symmetrize(w),
        mean=y.mean(axis=0),
    )
