"""Finite-size crossings and data collapse.

Curves are given as ``{size: (x, samples)}`` where ``x`` is a sorted grid and
``samples[i]`` the raw per-realization (or per-block) values at ``x[i]``.  An
estimator turns a sample array into the plotted quantity (the mean by
default), so bootstrap resampling happens at the realization level.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq, minimize

from iesym import _random

Estimator = Callable[[np.ndarray], float]


def _mean(a: np.ndarray) -> float:
    return float(np.mean(a))


class OutOfRange(ValueError):
    """No crossing inside the swept range."""


@dataclass
class CrossingResult:
    """Combined crossing estimate.

    Attributes:
        estimate: median of the pairwise crossings, or ``None`` when out of range.
        error: bootstrap standard deviation of ``estimate``.
        pairwise: ``{(size_a, size_b): crossing}`` for pairs that cross.
        bootstrap: bootstrap replicas of ``estimate`` (NaN where none crossed).
        x_range: swept interval.
    """

    estimate: float | None
    error: float
    pairwise: dict
    bootstrap: np.ndarray = field(default_factory=lambda: np.zeros(0))
    x_range: tuple = (np.nan, np.nan)

    @property
    def in_range(self) -> bool:
        return self.estimate is not None

    @property
    def spread(self) -> float:
        """Width of the central 68% bootstrap interval divided by two."""
        b = self.bootstrap[np.isfinite(self.bootstrap)]
        if b.size < 2:
            return np.inf
        lo, hi = np.percentile(b, [16, 84])
        return float(hi - lo) / 2


def curve_values(x: Sequence[float], samples: Sequence, estimator: Estimator = _mean) -> np.ndarray:
    return np.array([estimator(np.asarray(s)) for s in samples], dtype=float)


def pair_crossing(x: np.ndarray, ya: np.ndarray, yb: np.ndarray) -> float | None:
    """First zero of ``ya - yb`` from monotone (PCHIP) interpolants, or ``None``.

    Only sign changes count.  Exact ties (saturated curves, say) are not
    crossings unless the sign differs on both sides of them; the first tied
    grid point is returned then.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(ya, dtype=float) - np.asarray(yb, dtype=float)
    if x.size < 2:
        return None
    fa, fb = PchipInterpolator(x, ya), PchipInterpolator(x, yb)

    def diff(v):
        return float(fa(v) - fb(v))

    nz = np.flatnonzero(d != 0.0)
    for i, j in zip(nz[:-1], nz[1:]):
        if d[i] * d[j] < 0:
            if j > i + 1:
                return float(x[i + 1])
            return float(brentq(diff, x[i], x[j], xtol=1e-12))
    return None


def _combined(x: np.ndarray, values: Mapping[int, np.ndarray]) -> tuple[float | None, dict]:
    pairs = {}
    for a, b in itertools.combinations(sorted(values), 2):
        c = pair_crossing(x, values[a], values[b])
        if c is not None:
            pairs[(a, b)] = c
    if not pairs:
        return None, pairs
    return float(np.median(list(pairs.values()))), pairs


def _check_grid(curves: Mapping) -> np.ndarray:
    grids = [np.asarray(v[0], dtype=float) for v in curves.values()]
    x = grids[0]
    for g in grids[1:]:
        if g.shape != x.shape or not np.allclose(g, x):
            raise ValueError("all sizes must share one x grid")
    if np.any(np.diff(x) <= 0):
        raise ValueError("x grid must be strictly increasing")
    return x


def crossing(curves: Mapping[int, tuple], estimator: Estimator = _mean, n_boot: int = 1000,
             seed: int = 0) -> CrossingResult:
    """Median pairwise crossing of size curves with a seeded bootstrap error."""
    if len(curves) < 2:
        raise ValueError("need at least two sizes")
    x = _check_grid(curves)
    samples = {L: [np.asarray(s) for s in curves[L][1]] for L in curves}
    values = {L: curve_values(x, samples[L], estimator) for L in samples}
    est, pairs = _combined(x, values)
    boots = np.full(n_boot, np.nan)
    if est is not None:
        for b in range(n_boot):
            res = {}
            for L in sorted(samples):
                vals = []
                for i, s in enumerate(samples[L]):
                    idx = _random.randint(len(s), seed, _random.BOOTSTRAP, b, L, i, np.arange(len(s)))
                    vals.append(estimator(s[idx]))
                res[L] = np.array(vals)
            c, _ = _combined(x, res)
            if c is not None:
                boots[b] = c
    finite = boots[np.isfinite(boots)]
    err = float(np.std(finite, ddof=1)) if finite.size > 1 else (0.0 if est is None else np.inf)
    return CrossingResult(est, err, pairs, boots, (float(x[0]), float(x[-1])))


# data collapse -----------------------------------------------------------------

@dataclass
class CollapseFit:
    """Fitted scaling form ``y = F((x - x_c) L^a)``.

    Attributes:
        x_c: critical point.
        inv_nu: exponent ``a``.
        objective: mean squared standardized residual against the master curve.
        ci_x_c, ci_inv_nu: bootstrap 68% intervals (``nan`` if not computed).
        sizes: sizes used.
    """

    x_c: float
    inv_nu: float
    objective: float
    ci_x_c: tuple = (np.nan, np.nan)
    ci_inv_nu: tuple = (np.nan, np.nan)
    sizes: tuple = ()


def _master_residuals(X: np.ndarray, y: np.ndarray, s: np.ndarray, size_id: np.ndarray, bw: float) -> np.ndarray:
    """Residuals of each point against a local linear fit to the other sizes."""
    res = np.full(X.size, np.nan)
    for i in range(X.size):
        other = size_id != size_id[i]
        dx = X[other] - X[i]
        w = np.exp(-0.5 * (dx / bw) ** 2) / s[other] ** 2
        if w.sum() < 1e-12 or np.count_nonzero(w > 1e-6 * w.max()) < 2:
            continue
        sw, swx, swxx = w.sum(), (w * dx).sum(), (w * dx * dx).sum()
        swy, swxy = (w * y[other]).sum(), (w * dx * y[other]).sum()
        det = sw * swxx - swx * swx
        if abs(det) < 1e-12 * max(sw * swxx, 1e-300):
            fit = swy / sw
        else:
            fit = (swxx * swy - swx * swxy) / det
        res[i] = (y[i] - fit) / s[i]
    return res


def collapse_objective(params, x, y, s, L, bw: float = 0.3) -> float:
    xc, a = params
    X = (x - xc) * L ** a
    scale = np.std(X) if np.std(X) > 0 else 1.0
    r = _master_residuals(X / scale, y, s, L, bw)
    r = r[np.isfinite(r)]
    if r.size < max(4, x.size // 2):
        return np.inf
    return float(np.mean(r**2))


def data_collapse(x, y, L, s=None, x_c0: float = None, inv_nu0: float = 1.0, n_boot: int = 0,
                  seed: int = 0, bw: float = 0.3) -> CollapseFit:
    """Fit ``x_c`` and ``1/nu`` by Nelder-Mead on the local-linear collapse quality.

    Args:
        x, y, L: flat arrays of control parameter, observable and size.
        s: standard errors (uniform weights if ``None``).
        x_c0: starting point (defaults to the middle of the range).
        n_boot: parametric bootstrap replicas (Gaussian noise of size ``s``).
    """
    x, y, L = (np.asarray(v, dtype=float) for v in (x, y, L))
    order = np.lexsort((x, L))
    x, y, L = x[order], y[order], L[order]
    s = np.ones_like(y) if s is None else np.maximum(np.asarray(s, dtype=float)[order], 1e-12)
    lo, hi = x.min(), x.max()
    x_c0 = 0.5 * (lo + hi) if x_c0 is None else x_c0

    def fit(yy):
        best = None
        for a0 in (inv_nu0, 0.5 * inv_nu0, 1.5 * inv_nu0):
            r = minimize(collapse_objective, [x_c0, a0], args=(x, yy, s, L, bw), method="Nelder-Mead",
                         options={"xatol": 1e-5, "fatol": 1e-8, "maxiter": 2000})
            if best is None or r.fun < best.fun:
                best = r
        return best

    best = fit(y)
    xc, a = (float(v) for v in best.x)
    out = CollapseFit(xc, a, float(best.fun), sizes=tuple(sorted(set(L.astype(int).tolist()))))
    if not lo <= xc <= hi:
        raise OutOfRange(f"collapse x_c = {xc:.4g} outside swept range [{lo}, {hi}]")
    if n_boot:
        reps = []
        for b in range(n_boot):
            noise = _random.generator(seed, _random.BOOTSTRAP, b).standard_normal(y.size)
            r = fit(y + noise * s)
            reps.append(r.x)
        reps = np.array(reps)
        out.ci_x_c = tuple(np.percentile(reps[:, 0], [16, 84]))
        out.ci_inv_nu = tuple(np.percentile(reps[:, 1], [16, 84]))
    return out


# streaming statistics -------------------------------------------------------------

class Welford:
    """One-pass mean and variance, mergeable."""

    def __init__(self):
        self.n = 0
        self.mean = 0.0
        self.m2 = 0.0

    def add(self, v: float) -> None:
        self.n += 1
        d = v - self.mean
        self.mean += d / self.n
        self.m2 += d * (v - self.mean)

    def merge(self, other: "Welford") -> "Welford":
        out = Welford()
        out.n = self.n + other.n
        if out.n == 0:
            return out
        d = other.mean - self.mean
        out.mean = self.mean + d * other.n / out.n
        out.m2 = self.m2 + other.m2 + d * d * self.n * other.n / out.n
        return out

    @property
    def var(self) -> float:
        return self.m2 / (self.n - 1) if self.n > 1 else 0.0

    @property
    def stderr(self) -> float:
        return float(np.sqrt(self.var / self.n)) if self.n > 1 else 0.0
