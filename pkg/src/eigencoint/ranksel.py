"""Eigenanalysis of the quadratic lag-covariance matrix and rank selection.

Pipeline: :func:`fit` builds ``W = sum_j S_j S_j'`` for a panel,
eigendecomposes it, and returns the full orthogonal transform ``A_hat``
(eigenvectors, descending eigenvalues) together with the transformed panel
``x_hat = y @ A_hat``.  The rank rules then read the number of stationary
(cointegrated) directions off the eigenvalue profile:

* :func:`rank_ratio`    -- largest ``j`` with ``lambda_{p+1-j} <= n * lambda_p``
* :func:`rank_ic`       -- minimizer of trailing-eigenvalue sum plus penalty
* :func:`rank_ratio_fractional` -- ratio rule with threshold
  ``n**(d_min + delta - 1) * lambda_p`` for fractionally integrated panels

``W`` is positive semidefinite in exact arithmetic, so its spectrum is
reported as ``lambda_1 >= ... >= lambda_p >= 0``.  In floating point the
trailing eigenvalues of strongly integrated panels sit at the eigensolver's
noise floor, where computed values can dip below zero; :func:`fit` therefore
takes eigenvalue magnitudes and re-sorts (the paired eigenvectors move with
their values).  The trailing eigenvector span is insensitive to this because
the spectral gap above it is many orders of magnitude wide.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .covstack import DEFAULT_J0, LagCovStack, as_panel, build_stack
from .errors import DegenerateSpectrum, InvalidRank
from .linalg import EigenSystem, eigh_desc

PENALTY_VARIANTS = ("omega1", "omega2", "omega3", "custom")

#: Exponent on n in the named penalties omega1/omega2/omega3.
_PENALTY_EXPONENTS = {"omega1": 1.25, "omega2": 1.5, "omega3": 2.0 / 3.0}


@dataclass(frozen=True)
class PenaltySpec:
    """Which penalty the information criterion uses.

    ``omega1``/``omega2``/``omega3`` scale the smallest eigenvalue by
    ``n**(5/4)``, ``n**(3/2)``, ``n**(2/3)`` respectively; ``custom`` uses
    ``custom_value`` as-is.
    """

    variant: str = "omega2"
    custom_value: Optional[float] = None

    def __post_init__(self):
        if self.variant not in PENALTY_VARIANTS:
            raise ValueError(
                f"unknown penalty variant {self.variant!r}; "
                f"expected one of {PENALTY_VARIANTS}"
            )
        if self.variant == "custom":
            if self.custom_value is None or not self.custom_value > 0:
                raise ValueError("custom penalty requires custom_value > 0")
        elif self.custom_value is not None:
            raise ValueError("custom_value only applies to the custom variant")


@dataclass(frozen=True)
class CointFit:
    """Eigenanalysis of a panel's quadratic lag-covariance matrix.

    Attributes
    ----------
    eigen : EigenSystem
        Spectrum of ``W``, descending, with paired orthonormal eigenvectors.
    a_hat : ndarray, shape (p, p)
        Orthogonal transform; column ``k`` is the eigenvector of the
        ``k``-th largest eigenvalue.  The trailing ``r`` columns span the
        estimated cointegration space once a rank ``r`` is chosen.
    x_hat : ndarray, shape (n, p)
        Transformed panel, row ``t`` equal to ``a_hat' y_t``.
    stack : LagCovStack
        The lag covariances and ``W`` the fit was computed from.
    n : int
        Sample size of the panel.
    r_hat : int or None
        Rank from the ratio rule, once :func:`with_ranks` has run it.
    r_tilde : int or None
        Rank from the information criterion, likewise.
    """

    eigen: EigenSystem
    a_hat: np.ndarray
    x_hat: np.ndarray
    stack: LagCovStack
    n: int
    r_hat: Optional[int] = None
    r_tilde: Optional[int] = None

    @property
    def p(self) -> int:
        return self.eigen.p


def fit(series, j0: int = DEFAULT_J0) -> CointFit:
    """Eigenanalyze a panel: build ``W``, decompose, transform.

    Parameters
    ----------
    series : array_like, shape (n, p)
        Observation panel, rows are time points.
    j0 : int, default DEFAULT_J0
        Largest lag entering ``W``.

    Returns
    -------
    CointFit
        With rank fields unset; apply :func:`rank_ratio` / :func:`rank_ic`
        (or :func:`with_ranks`) to choose ranks.
    """
    y = as_panel(series)
    stack = build_stack(y, j0)
    raw = eigh_desc(stack.w)
    # PSD reading of the spectrum: magnitudes, re-sorted descending, with
    # eigenvectors carried along.  See the module docstring.
    mags = np.abs(raw.values)
    order = np.argsort(-mags, kind="stable")
    eigen = EigenSystem(values=mags[order], vectors=raw.vectors[:, order])
    return CointFit(
        eigen=eigen,
        a_hat=eigen.vectors,
        x_hat=y @ eigen.vectors,
        stack=stack,
        n=y.shape[0],
    )


def _validate_spectrum(eigen: EigenSystem) -> np.ndarray:
    values = np.asarray(eigen.values, dtype=float)
    if values.size < 1:
        raise InvalidRank("empty spectrum")
    if values[-1] <= 0.0:
        raise DegenerateSpectrum(
            f"smallest eigenvalue {float(values[-1])!r} is not strictly positive; "
            "the quadratic covariance matrix is rank deficient"
        )
    return values


def rank_ratio(eigen: EigenSystem, n: int) -> int:
    """Ratio rule: largest ``j`` in ``1..p`` with ``lambda_{p+1-j} <= n * lambda_p``.

    The ``j``-th smallest eigenvalue is compared against ``n`` times the
    smallest one; the estimated rank is the longest run of trailing
    eigenvalues that stay below that threshold.  ``j = 1`` always qualifies,
    so the result is at least 1 — a zero rank cannot be detected by this
    rule and must be screened with the information criterion under a custom
    penalty, or with the unit-root baseline.

    Parameters
    ----------
    eigen : EigenSystem
        Descending spectrum with ``lambda_p > 0``.
    n : int
        Sample size the panel was observed over.

    Returns
    -------
    int
        Estimated rank in ``1..p``.

    Raises
    ------
    DegenerateSpectrum
        If ``lambda_p <= 0``.
    """
    values = _validate_spectrum(eigen)
    threshold = float(n) * values[-1]
    r = 1
    for j in range(2, values.size + 1):
        if values[values.size - j] <= threshold:
            r = j
    return r


def rank_ic(eigen: EigenSystem, omega: float) -> int:
    """Information criterion: minimize trailing-eigenvalue sum plus penalty.

    ``IC(l) = sum_{j=1}^{l} lambda_{p+1-j} + (p - l) * omega`` over
    ``l in 1..p``; ties go to the smallest ``l``.  Adding a direction to the
    stationary block costs its eigenvalue; leaving it out costs ``omega`` —
    so the minimizer counts the eigenvalues smaller than ``omega``.

    Parameters
    ----------
    eigen : EigenSystem
    omega : float
        Positive penalty; see :func:`penalty` for the named choices.

    Returns
    -------
    int
        Estimated rank in ``1..p``.
    """
    omega = float(omega)
    if not omega > 0:
        raise ValueError(f"penalty must be positive, got {omega}")
    values = np.asarray(eigen.values, dtype=float)
    p = values.size
    if p < 1:
        raise InvalidRank("empty spectrum")
    tail = np.cumsum(values[::-1])  # tail[l-1] = sum of l smallest
    ic = tail + (p - np.arange(1, p + 1)) * omega
    return int(np.argmin(ic)) + 1


def penalty(spec: PenaltySpec, n: int, lambda_p: float) -> float:
    """Evaluate a penalty specification at sample size ``n``.

    Named variants scale the smallest eigenvalue:
    ``omega1 = n**(5/4) * lambda_p``, ``omega2 = n**(3/2) * lambda_p``,
    ``omega3 = n**(2/3) * lambda_p``.  ``custom`` ignores both arguments.

    Raises
    ------
    DegenerateSpectrum
        A named variant with ``lambda_p <= 0``.
    """
    if spec.variant == "custom":
        return float(spec.custom_value)
    if not lambda_p > 0:
        raise DegenerateSpectrum(
            f"penalty {spec.variant} needs lambda_p > 0, got {lambda_p!r}"
        )
    return float(n) ** _PENALTY_EXPONENTS[spec.variant] * float(lambda_p)


def rank_ratio_fractional(
    eigen: EigenSystem, n: int, d_min: float, delta: float
) -> int:
    """Ratio rule with threshold ``n**(d_min + delta - 1) * lambda_p``.

    For panels whose nonstationary components are fractionally integrated of
    order at least ``d_min > 1/2``, the eigenvalue gap scales as a power of
    ``n`` determined by ``d_min``; ``delta`` is a slack exponent in
    ``[0, 1/2)``.  With ``d_min = 1, delta = 0`` the threshold degenerates
    to ``lambda_p`` itself and only eigenvalues tied with the smallest
    qualify.

    Raises
    ------
    DegenerateSpectrum
        If ``lambda_p <= 0``.
    ValueError
        Parameters outside ``d_min > 1/2`` or ``0 <= delta < 1/2``.
    """
    if not d_min > 0.5:
        raise ValueError(f"d_min must exceed 1/2, got {d_min}")
    if not (0.0 <= delta < 0.5):
        raise ValueError(f"delta must lie in [0, 1/2), got {delta}")
    values = _validate_spectrum(eigen)
    exponent = d_min + delta - 1.0
    threshold = float(n) ** exponent * values[-1]
    if exponent <= 0.0 and threshold < values[-1]:
        # Shrinking threshold: nothing below lambda_p can exist, so the rule
        # can only return 1.  Not an error, but worth a diagnostic.
        warnings.warn(
            "fractional ratio threshold n**(d_min + delta - 1) * lambda_p "
            f"= {threshold:.3e} falls below lambda_p; the rule degenerates",
            RuntimeWarning,
            stacklevel=2,
        )
    r = 1
    for j in range(2, values.size + 1):
        if values[values.size - j] <= threshold:
            r = j
    return r


def with_ranks(
    fit_result: CointFit,
    penalty_spec: PenaltySpec = PenaltySpec("omega2"),
) -> CointFit:
    """Return a copy of ``fit_result`` with both rank estimates filled in."""
    omega = penalty(penalty_spec, fit_result.n, fit_result.eigen.values[-1])
    return replace(
        fit_result,
        r_hat=rank_ratio(fit_result.eigen, fit_result.n),
        r_tilde=rank_ic(fit_result.eigen, omega),
    )


def split(fit_result: CointFit, r: int):
    """Split ``a_hat`` into leading and trailing blocks at rank ``r``.

    Parameters
    ----------
    fit_result : CointFit
    r : int
        Number of trailing (smallest-eigenvalue) columns, ``0 <= r <= p``.

    Returns
    -------
    (ndarray, ndarray)
        ``(a1, a2)`` with shapes ``(p, p-r)`` and ``(p, r)``: ``a2`` spans
        the estimated cointegration space, ``a1`` its orthocomplement.

    Raises
    ------
    InvalidRank
        ``r`` outside ``0..p``.
    """
    p = fit_result.p
    r = int(r)
    if r < 0 or r > p:
        raise InvalidRank(f"rank {r} out of range for p={p}")
    a = fit_result.a_hat
    return a[:, : p - r].copy(), a[:, p - r:].copy()
