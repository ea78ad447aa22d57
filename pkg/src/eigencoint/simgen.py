"""Seeded generation of simulation panels: ARIMA/ARFIMA latents mixed by A.

A panel is built as ``y_t = A x_t`` where the first ``p - r`` latent
components are integrated (ARIMA of order ``d >= 1``, or fractionally
integrated) and the last ``r`` are stationary AR(1).  The trailing rows of
``(A^-1)'`` then recover the stationary components from ``y``, which makes
their span the true cointegration space a benchmark compares against.

Conventions
-----------
* Pre-sample values are zero (truncated processes): the ARMA recursion
  starts from an all-zero state and integration is plain cumulative
  summation, with no burn-in discard.
* Innovations are i.i.d. standard normal.
* Randomness is driven by counter-based Philox streams derived from the
  scenario seed via ``SeedSequence(seed, spawn_key=...)``: spawn key
  ``(0,)`` draws coefficients, ``(1,)`` draws innovations (consumed one
  latent component at a time, in column order: nonstationary blocks first,
  then the stationary block), and ``(2, k)`` draws the ``k``-th attempt at
  a mixing matrix.  Identical specs therefore produce bit-identical panels,
  and distinct replicates may run in parallel on independent streams.

Coefficient laws are small dicts so scenario specs serialize to JSON:
``{"kind": "uniform", "low": a, "high": b}`` draws one coefficient per
component; ``{"kind": "grid", "values": [...]}`` assigns listed values in
component order; ``{"kind": "none"}`` means the block has no AR (or MA)
part.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import signal

from .errors import InvalidOrder, NonstationaryAR, SingularMixing
from .subspace import true_b2

#: Condition-number ceiling above which a drawn mixing matrix is rejected.
MIXING_COND_LIMIT = 1e10
#: How many deterministic redraws to attempt before giving up.
MIXING_RETRIES = 10


# ---------------------------------------------------------------------------
# elementary generators

def frac_coeffs(alpha: float, m: int) -> np.ndarray:
    """First ``m + 1`` coefficients of the truncated operator ``(1 - B)^-alpha``.

    ``a_0 = 1`` and ``a_j = a_{j-1} * (j - 1 + alpha) / j``, which equals the
    Gamma-ratio form ``Gamma(j + alpha) / (Gamma(alpha) * Gamma(j + 1))``.

    Parameters
    ----------
    alpha : float
        Any real except the negative integers (Gamma pole).  ``alpha = 0``
        returns ``(1, 0, 0, ...)`` — the identity filter — by convention.
    m : int
        Largest index, ``m >= 0``.

    Returns
    -------
    ndarray, shape (m + 1,)

    Raises
    ------
    InvalidOrder
        ``alpha`` a negative integer, or ``m < 0``.
    """
    alpha = float(alpha)
    m = int(m)
    if m < 0:
        raise InvalidOrder(f"need m >= 0, got {m}")
    if alpha.is_integer() and alpha < 0:
        raise InvalidOrder(f"alpha={alpha:g} is a pole of the coefficient formula")
    j = np.arange(m, dtype=float)
    factors = (j + alpha) / (j + 1.0)
    return np.concatenate(([1.0], np.cumprod(factors)))


def _check_stationary_ar(ar: np.ndarray) -> None:
    """Reject AR polynomials with roots on or inside the unit circle."""
    k = ar.size
    if k == 0:
        return
    if k == 1:
        ok = abs(ar[0]) < 1.0
    elif k == 2:
        phi1, phi2 = ar
        ok = abs(phi2) < 1.0 and phi2 + phi1 < 1.0 and phi2 - phi1 < 1.0
    else:
        companion = np.zeros((k, k))
        companion[0, :] = ar
        companion[1:, :-1] = np.eye(k - 1)
        ok = np.max(np.abs(np.linalg.eigvals(companion))) < 1.0
    if not ok:
        raise NonstationaryAR(f"AR coefficients {tuple(ar)} are not stationary")


def gen_arima(n: int, ar=(), d: int = 0, ma=(), rng=None) -> np.ndarray:
    """Simulate a truncated ARIMA(len(ar), d, len(ma)) path of length ``n``.

    The stationary ARMA core follows the recursion
    ``v_t = sum_i ar_i v_{t-i} + eps_t + sum_i ma_i eps_{t-i}`` with zero
    pre-sample values, then is integrated ``d`` times by cumulative
    summation.

    Parameters
    ----------
    n : int
        Length of the output series.
    ar, ma : sequence of float
        Autoregressive and moving-average coefficients.
    d : int
        Non-negative integration order.
    rng : numpy.random.Generator
        Innovation stream; consumes exactly ``n`` standard normals.

    Raises
    ------
    NonstationaryAR
        AR polynomial has a root on or inside the unit circle.
    InvalidOrder
        Negative or non-integer ``d``.
    """
    n = int(n)
    if n < 1:
        raise InvalidOrder(f"need n >= 1, got {n}")
    if int(d) != d or d < 0:
        raise InvalidOrder(f"integration order must be a non-negative integer, got {d}")
    ar = np.atleast_1d(np.asarray(ar, dtype=float))
    ma = np.atleast_1d(np.asarray(ma, dtype=float))
    _check_stationary_ar(ar)
    eps = rng.standard_normal(n)
    core = signal.lfilter(
        np.concatenate(([1.0], ma)), np.concatenate(([1.0], -ar)), eps
    )
    for _ in range(int(d)):
        core = np.cumsum(core)
    return core


def gen_arfima(n: int, d: float, ar=(), ma=(), rng=None) -> np.ndarray:
    """Simulate a truncated, possibly fractionally integrated ARMA path.

    The ARMA core is built exactly as in :func:`gen_arima`; the integration
    operator is then ``x_t = sum_{j=0}^{t-1} a_j(d) * core_{t-j}`` with the
    coefficients of :func:`frac_coeffs`.  Integer ``d`` in {0, 1, 2} takes
    the iterated-cumsum path instead, which the all-ones coefficient
    identity makes the exact same series — so ``d=1`` here reproduces
    ``gen_arima(..., d=1, ...)`` on the same stream bit-for-bit.

    Parameters
    ----------
    n : int
    d : float
        Integration order in ``(-1/2, 2]``, excluding half-integers (where
        the filter's normalizing Gamma factor has a pole).
    ar, ma : sequence of float
    rng : numpy.random.Generator

    Raises
    ------
    InvalidOrder
        ``d`` outside ``(-1/2, 2]`` or at a half-integer.
    """
    d = float(d)
    if not (-0.5 < d <= 2.0):
        raise InvalidOrder(f"fractional order must lie in (-1/2, 2], got {d}")
    if (d - 0.5).is_integer():
        raise InvalidOrder(f"order {d:g} is a half-integer pole")
    if d.is_integer():
        return gen_arima(n, ar=ar, d=int(d), ma=ma, rng=rng)
    n = int(n)
    core = gen_arima(n, ar=ar, d=0, ma=ma, rng=rng)
    coeffs = frac_coeffs(d, n - 1)
    return np.convolve(coeffs, core)[:n]


# ---------------------------------------------------------------------------
# scenario specification

_LAW_KINDS = ("uniform", "grid", "none")


def _validate_law(law, count: int, what: str, allow_none: bool) -> None:
    if law is None or (isinstance(law, dict) and law.get("kind") == "none"):
        if not allow_none:
            raise ValueError(f"{what} requires a coefficient law")
        return
    if not isinstance(law, dict) or "kind" not in law:
        raise ValueError(f"{what} must be a law dict with a 'kind' key, got {law!r}")
    kind = law["kind"]
    if kind == "uniform":
        if not ("low" in law and "high" in law and law["low"] < law["high"]):
            raise ValueError(f"{what}: uniform law needs low < high, got {law!r}")
    elif kind == "grid":
        values = law.get("values")
        if values is None or len(values) != count:
            raise ValueError(
                f"{what}: grid law needs exactly {count} values, got {law!r}"
            )
    else:
        raise ValueError(f"{what}: unknown law kind {kind!r} (expected {_LAW_KINDS})")


def _draw_coeffs(law, count: int, rng) -> Optional[np.ndarray]:
    """One coefficient per component, or None when the law is absent."""
    if law is None or law.get("kind") == "none":
        return None
    if law["kind"] == "uniform":
        return rng.uniform(law["low"], law["high"], size=count)
    return np.asarray(law["values"], dtype=float)


def _is_integer_order(d) -> bool:
    return float(d).is_integer()


@dataclass(frozen=True)
class ProcessBlock:
    """A group of latent components sharing one generating recipe.

    Attributes
    ----------
    count : int
        How many components the block contributes.
    d : float
        Integration order: an integer ``>= 1``, or a non-integer in
        ``(1/2, 2]`` for fractional scenarios.
    ar_law, ma_law : dict or None
        Per-component coefficient laws (each component gets one AR and/or
        one MA coefficient).
    """

    count: int
    d: float
    ar_law: Optional[dict] = None
    ma_law: Optional[dict] = None

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise ValueError(f"block count must be a positive integer, got {self.count}")
        d = float(self.d)
        if _is_integer_order(d):
            if d < 1:
                raise ValueError(f"integer block order must be >= 1, got {d:g}")
        elif not (0.5 < d <= 2.0):
            raise ValueError(
                f"fractional block order must lie in (1/2, 2], got {d:g}"
            )
        _validate_law(self.ar_law, self.count, "block ar_law", allow_none=True)
        _validate_law(self.ma_law, self.count, "block ma_law", allow_none=True)

    def to_dict(self) -> dict:
        return {
            "count": int(self.count),
            "d": float(self.d),
            "ar_law": self.ar_law,
            "ma_law": self.ma_law,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProcessBlock":
        return cls(
            count=data["count"],
            d=data["d"],
            ar_law=data.get("ar_law"),
            ma_law=data.get("ma_law"),
        )


DEFAULT_MIXING_LAW = {"kind": "uniform", "low": -3.0, "high": 3.0}


@dataclass(frozen=True)
class ScenarioSpec:
    """Complete, seeded description of one simulated panel.

    Attributes
    ----------
    p : int
        Panel dimension.
    r : int
        Number of stationary latent components (the true cointegration
        rank).
    n : int
        Sample size, at least 10.
    stationary_law : dict or None
        AR(1) coefficient law for the ``r`` stationary components.
    nonstationary_blocks : tuple of ProcessBlock
        Recipes for the ``p - r`` integrated components, used in order.
    mixing_law : dict
        ``{"kind": "uniform", "low": .., "high": ..}`` for i.i.d. entries,
        ``{"kind": "orthogonal"}`` for a random orthogonal matrix, or
        ``{"kind": "identity"}``.
    seed : int
        64-bit stream seed; fully determines the panel.
    """

    p: int
    r: int
    n: int
    stationary_law: Optional[dict] = None
    nonstationary_blocks: tuple = ()
    mixing_law: dict = field(default_factory=lambda: dict(DEFAULT_MIXING_LAW))
    seed: int = 0

    def __post_init__(self):
        if self.p < 1 or not (0 <= self.r <= self.p):
            raise ValueError(f"need p >= 1 and 0 <= r <= p, got p={self.p} r={self.r}")
        if self.n < 10:
            raise ValueError(f"need n >= 10, got {self.n}")
        blocks = tuple(
            b if isinstance(b, ProcessBlock) else ProcessBlock.from_dict(b)
            for b in self.nonstationary_blocks
        )
        object.__setattr__(self, "nonstationary_blocks", blocks)
        total = sum(b.count for b in blocks)
        if total != self.p - self.r:
            raise ValueError(
                f"block counts sum to {total}, expected p - r = {self.p - self.r}"
            )
        if self.r > 0:
            _validate_law(self.stationary_law, self.r, "stationary_law", allow_none=False)
        kind = self.mixing_law.get("kind")
        if kind == "uniform":
            _validate_law(self.mixing_law, 0, "mixing_law", allow_none=False)
        elif kind not in ("orthogonal", "identity"):
            raise ValueError(f"unknown mixing law {self.mixing_law!r}")

    @property
    def is_fractional(self) -> bool:
        """True when any block order is non-integer."""
        return any(not _is_integer_order(b.d) for b in self.nonstationary_blocks)

    @property
    def d_min(self) -> float:
        """Smallest nonstationary integration order (inf when r == p)."""
        orders = [float(b.d) for b in self.nonstationary_blocks]
        return min(orders) if orders else float("inf")

    def to_dict(self) -> dict:
        return {
            "p": int(self.p),
            "r": int(self.r),
            "n": int(self.n),
            "stationary_law": self.stationary_law,
            "nonstationary_blocks": [b.to_dict() for b in self.nonstationary_blocks],
            "mixing_law": self.mixing_law,
            "seed": int(self.seed),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioSpec":
        return cls(
            p=data["p"],
            r=data["r"],
            n=data["n"],
            stationary_law=data.get("stationary_law"),
            nonstationary_blocks=tuple(data.get("nonstationary_blocks", ())),
            mixing_law=data.get("mixing_law", dict(DEFAULT_MIXING_LAW)),
            seed=data.get("seed", 0),
        )

    @classmethod
    def from_json(cls, text: str) -> "ScenarioSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class GeneratedPanel:
    """A simulated panel together with its generating ground truth.

    Attributes
    ----------
    y : ndarray, shape (n, p)
        Observed panel, ``y_t = mixing @ x_t`` row by row.
    mixing : ndarray, shape (p, p)
    b2 : ndarray, shape (p, r)
        Last ``r`` columns of ``(mixing^-1)'`` — the true comparison basis.
    x : ndarray, shape (n, p)
        Latent components, nonstationary first.
    true_r : int
    """

    y: np.ndarray
    mixing: np.ndarray
    b2: np.ndarray
    x: np.ndarray
    true_r: int


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def _draw_mixing(spec: ScenarioSpec) -> np.ndarray:
    kind = spec.mixing_law["kind"]
    if kind == "identity":
        return np.eye(spec.p)
    if kind == "orthogonal":
        g = _stream(spec.seed, 2, 0).standard_normal((spec.p, spec.p))
        q, rmat = np.linalg.qr(g)
        return q * np.sign(np.diag(rmat))
    low, high = spec.mixing_law["low"], spec.mixing_law["high"]
    for attempt in range(MIXING_RETRIES):
        a = _stream(spec.seed, 2, attempt).uniform(low, high, size=(spec.p, spec.p))
        if np.linalg.cond(a) <= MIXING_COND_LIMIT:
            return a
    raise SingularMixing(
        f"no mixing draw with condition <= {MIXING_COND_LIMIT:g} in "
        f"{MIXING_RETRIES} attempts (seed {spec.seed})"
    )


def gen_panel(spec: ScenarioSpec) -> GeneratedPanel:
    """Generate the panel a :class:`ScenarioSpec` describes.

    Deterministic given the spec (including its seed); see the module
    docstring for the exact stream layout.

    Raises
    ------
    SingularMixing
        All redraw attempts for the mixing matrix were ill-conditioned.
    NonstationaryAR, InvalidOrder
        Propagated from the component generators.
    """
    coeff_rng = _stream(spec.seed, 0)
    innov_rng = _stream(spec.seed, 1)

    columns = []
    for block in spec.nonstationary_blocks:
        ar = _draw_coeffs(block.ar_law, block.count, coeff_rng)
        ma = _draw_coeffs(block.ma_law, block.count, coeff_rng)
        for i in range(block.count):
            ar_i = () if ar is None else (ar[i],)
            ma_i = () if ma is None else (ma[i],)
            if _is_integer_order(block.d):
                columns.append(
                    gen_arima(spec.n, ar=ar_i, d=int(block.d), ma=ma_i, rng=innov_rng)
                )
            else:
                columns.append(
                    gen_arfima(spec.n, float(block.d), ar=ar_i, ma=ma_i, rng=innov_rng)
                )
    if spec.r > 0:
        phis = _draw_coeffs(spec.stationary_law, spec.r, coeff_rng)
        for i in range(spec.r):
            columns.append(gen_arima(spec.n, ar=(phis[i],), d=0, ma=(), rng=innov_rng))

    x = np.column_stack(columns) if columns else np.empty((spec.n, 0))
    mixing = _draw_mixing(spec)
    y = x @ mixing.T
    b2 = true_b2(mixing, spec.r)
    return GeneratedPanel(y=y, mixing=mixing, b2=b2, x=x, true_r=spec.r)
