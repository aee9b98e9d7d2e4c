"""Chaos detection and embedding-parameter selection.

Covers autocorrelation-based delay selection, the minimum embedding
dimension from nearest-neighbor distance ratios, the largest Lyapunov
exponent from average divergence of neighboring trajectories, and the
delayed-coordinate reconstruction that turns a scalar series into a
multi-input single-output regression problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DataError,
    DegenerateError,
    LengthError,
    NeighborSearchError,
    NumericError,
)

LAG_METHODS = ("pacf_cutoff", "acf_1_over_e", "acf_first_zero")

_NN_CHUNK = 512  # query rows per distance block; bounds peak memory


def acf(series, max_lag: int) -> np.ndarray:
    """Autocorrelations rho(1..max_lag) with biased (1/N) normalization."""
    x = np.asarray(series, dtype=float)
    n = len(x)
    if max_lag < 1 or max_lag >= n:
        raise DataError(f"need 1 <= max_lag < n, got max_lag={max_lag}, n={n}")
    c = x - x.mean()
    denom = float(c @ c)
    if denom == 0.0:
        raise DegenerateError("constant series has no autocorrelation")
    return np.array([float(c[: n - k] @ c[k:]) / denom for k in range(1, max_lag + 1)])


def pacf(series, max_lag: int) -> np.ndarray:
    """Partial autocorrelations via the Durbin-Levinson recursion on the ACF."""
    rho = acf(series, max_lag)
    out = np.empty(max_lag)
    out[0] = rho[0]
    prev = np.array([rho[0]])
    for k in range(2, max_lag + 1):
        num = rho[k - 1] - prev @ rho[k - 2 :: -1][: k - 1]
        den = 1.0 - prev @ rho[: k - 1]
        if den == 0.0 or not np.isfinite(num / den):
            raise NumericError(f"Durbin-Levinson recursion degenerate at lag {k}")
        phi_kk = num / den
        if abs(phi_kk) >= 1.0 + 1e-10:
            raise NumericError(f"partial autocorrelation out of range at lag {k}")
        cur = np.empty(k)
        cur[: k - 1] = prev - phi_kk * prev[::-1]
        cur[k - 1] = phi_kk
        out[k - 1] = phi_kk
        prev = cur
    return out


def select_lag(series, method: str = "pacf_cutoff", max_lag: int | None = None) -> int:
    """Choose the embedding delay from autocorrelation structure.

    pacf_cutoff: largest k such that every PACF up to k clears the 95%
    significance band 1.96/sqrt(N); acf_1_over_e: first lag where the ACF
    drops below 1/e; acf_first_zero: first non-positive ACF. Always >= 1.
    """
    x = np.asarray(series, dtype=float)
    n = len(x)
    if n < 50:
        raise LengthError(f"lag selection needs at least 50 observations, got {n}")
    if method not in LAG_METHODS:
        raise DataError(f"unknown lag method {method!r}; expected one of {LAG_METHODS}")
    if max_lag is None:
        max_lag = min(n // 2 - 1, 200)
    if method == "pacf_cutoff":
        band = 1.96 / np.sqrt(n)
        phis = pacf(x, max_lag)
        k = 0
        while k < max_lag and abs(phis[k]) >= band:
            k += 1
        return max(k, 1)
    rho = acf(x, max_lag)
    if method == "acf_1_over_e":
        hits = np.nonzero(rho < 1.0 / np.e)[0]
    else:
        hits = np.nonzero(rho <= 0.0)[0]
    return int(hits[0]) + 1 if len(hits) else max_lag


def delay_embedding(series, tau: int, m: int) -> np.ndarray:
    """Delayed-coordinate vectors: row i is (x_i, x_{i+tau}, ..., x_{i+(m-1)tau})."""
    x = np.asarray(series, dtype=float)
    if tau < 1 or m < 1:
        raise DataError("tau and m must be >= 1")
    rows = len(x) - (m - 1) * tau
    if rows < 1:
        raise LengthError(f"series of length {len(x)} too short for tau={tau}, m={m}")
    return np.stack([x[j * tau : j * tau + rows] for j in range(m)], axis=1)


def reconstruct_phase_space(series, tau: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Reconstructed state vectors paired with their one-step-ahead targets.

    Row i of X is (x_i, ..., x_{i+(m-1)tau}); its target is the next
    observation x_{i+(m-1)tau+1}. Rows whose target would fall past the end
    of the series are dropped, so X has N - (m-1)*tau - 1 rows.
    """
    x = np.asarray(series, dtype=float)
    window = (m - 1) * tau
    if len(x) <= window + 1:
        raise LengthError(f"need more than {window + 1} observations for tau={tau}, m={m}")
    X = delay_embedding(x, tau, m)[:-1]
    y = x[window + 1 :]
    return X, y


def _nearest_neighbors(points: np.ndarray, metric: str, min_separation: int = 0):
    """Self-excluding nearest neighbor per row; lowest index wins ties.

    metric 'chebyshev' or 'euclidean'. Neighbors within min_separation
    steps in time are excluded. Returns (indices, distances).
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    idx = np.empty(n, dtype=np.int64)
    dist = np.empty(n)
    for s in range(0, n, _NN_CHUNK):
        e = min(s + _NN_CHUNK, n)
        block = np.zeros((e - s, n))
        if metric == "chebyshev":
            for c in range(pts.shape[1]):
                np.maximum(block, np.abs(pts[s:e, c : c + 1] - pts[None, :, c]), out=block)
        else:
            for c in range(pts.shape[1]):
                block += (pts[s:e, c : c + 1] - pts[None, :, c]) ** 2
        for r in range(e - s):
            i = s + r
            lo = max(0, i - min_separation)
            hi = min(n, i + min_separation + 1)
            block[r, lo:hi] = np.inf
        nearest = np.argmin(block, axis=1)
        idx[s:e] = nearest
        d = block[np.arange(e - s), nearest]
        dist[s:e] = np.sqrt(d) if metric == "euclidean" else d
    return idx, dist


@dataclass(frozen=True)
class CaoCurve:
    """E1/E2 ratio curves indexed by dimension 1..max_dim, plus the verdict."""

    E1: np.ndarray
    E2: np.ndarray
    m_min: int
    saturated: bool

    def to_dict(self) -> dict:
        return {
            "E1": [float(v) for v in self.E1],
            "E2": [float(v) for v in self.E2],
            "m_min": self.m_min,
            "saturated": self.saturated,
        }


def cao_min_embedding(
    series,
    tau: int,
    max_dim: int = 12,
    plateau: float = 0.95,
    band: float = 0.05,
    e2_band: float = 0.1,
) -> CaoCurve:
    """Minimum embedding dimension from nearest-neighbor distance ratios.

    E(d) is the mean ratio by which the distance from each point to its
    d-dimensional nearest neighbor (maximum norm, self excluded) grows when
    the embedding is extended to d+1 dimensions; E1(d) = E(d+1)/E(d).
    E2(d) is the analogous ratio built from the raw-value increments
    |x_{i+d*tau} - x_{n(i,d)+d*tau}|; it stays near 1 at every dimension
    for a stochastic series and deviates from 1 for a deterministic one.

    The embedding dimension d is accepted once the E1 curve has entered its
    plateau just above it: E1(d+1) >= plateau, confirmed by the following
    value staying within ``band`` below the plateau. ``saturated`` requires
    both an accepted dimension and determinism evidence
    max_d |E2(d) - 1| > e2_band; an unsaturated series reports
    m_min = max_dim with saturated = False.
    """
    x = np.asarray(series, dtype=float)
    if tau < 1:
        raise DataError("tau must be >= 1")
    if max_dim < 2:
        raise DataError("max_dim must be >= 2")
    needed = (max_dim + 1) * tau + 10
    if len(x) < needed:
        raise LengthError(f"need at least {needed} observations for max_dim={max_dim}, tau={tau}")
    if np.ptp(x) == 0.0:
        raise DegenerateError("constant series: all embedding distances are zero")

    # E[d] and Estar[d] for d = 1..max_dim+1 (index 0 unused)
    E = np.zeros(max_dim + 2)
    Estar = np.zeros(max_dim + 2)
    for d in range(1, max_dim + 2):
        emb_next = delay_embedding(x, tau, d + 1)
        n_pairs = len(emb_next)  # restrict to points whose (d+1)-dim vector exists
        emb = delay_embedding(x, tau, d)[:n_pairs]
        nn, dist = _nearest_neighbors(emb, "chebyshev")
        grown = np.max(np.abs(emb_next - emb_next[nn]), axis=1)
        ok = dist > 0.0
        if not ok.any():
            raise DegenerateError(f"all nearest-neighbor distances are zero at dimension {d}")
        E[d] = float(np.mean(grown[ok] / dist[ok]))
        Estar[d] = float(np.mean(np.abs(x[np.arange(n_pairs) + d * tau] - x[nn + d * tau])))
        if Estar[d] == 0.0:
            raise DegenerateError(f"raw-value increments all zero at dimension {d}")

    E1 = E[2 : max_dim + 2] / E[1 : max_dim + 1]
    E2 = Estar[2 : max_dim + 2] / Estar[1 : max_dim + 1]

    deterministic = bool(np.max(np.abs(E2 - 1.0)) > e2_band)
    accepted = None
    for d in range(1, max_dim):  # E1[d] is E1 at dimension d+1 (0-based array)
        at_plateau = E1[d] >= plateau
        confirmed = (d + 1 >= max_dim) or (E1[d + 1] >= plateau - band)
        if at_plateau and confirmed:
            accepted = d
            break
    if deterministic and accepted is not None:
        return CaoCurve(E1, E2, m_min=accepted, saturated=True)
    return CaoCurve(E1, E2, m_min=max_dim, saturated=False)


@dataclass(frozen=True)
class DivergenceCurve:
    """Mean log-divergence of initially-close trajectory pairs per step."""

    steps: np.ndarray
    mean_log_divergence: np.ndarray
    fit_range: tuple[int, int]
    slope: float
    r_squared: float

    def to_dict(self) -> dict:
        return {
            "steps": [int(s) for s in self.steps],
            "mean_log_divergence": [float(v) for v in self.mean_log_divergence],
            "fit_range": list(self.fit_range),
            "slope": self.slope,
            "r_squared": self.r_squared,
        }

    def to_csv(self) -> str:
        lines = ["step,mean_log_divergence"]
        for s, v in zip(self.steps, self.mean_log_divergence):
            lines.append(f"{int(s)},{'' if np.isnan(v) else repr(float(v))}")
        return "\n".join(lines) + "\n"


def lyapunov_rosenstein(
    series,
    tau: int,
    m: int,
    theiler: int | None = None,
    max_steps: int = 30,
    fit_range: tuple[int, int] = (1, 15),
) -> tuple[DivergenceCurve, float]:
    """Largest Lyapunov exponent from mean log-divergence of neighbor pairs.

    Each reconstructed point is paired with its Euclidean nearest neighbor
    at temporal separation greater than the Theiler window (default: the
    first zero crossing of the ACF). The pairs' distances are tracked for
    max_steps and the exponent is the least-squares slope of the mean
    log-distance curve over fit_range, in nats per sample step.
    """
    x = np.asarray(series, dtype=float)
    pts = delay_embedding(x, tau, m)
    n = len(pts)
    if n < 100:
        raise LengthError(f"need at least 100 reconstructed points, got {n}")
    if theiler is None:
        theiler = select_lag(x, method="acf_first_zero")
    if theiler < 0 or theiler >= n - 1:
        raise DataError(f"theiler window {theiler} leaves no admissible neighbors")
    lo, hi = fit_range
    if not (1 <= lo < hi <= max_steps):
        raise DataError(f"fit_range must satisfy 1 <= first < last <= max_steps, got {fit_range}")

    nn, d0 = _nearest_neighbors(pts, "euclidean", min_separation=theiler)
    if not np.all(np.isfinite(d0)):
        raise NeighborSearchError("no admissible neighbor pairs under the Theiler window")

    steps = np.arange(1, max_steps + 1)
    mld = np.full(max_steps, np.nan)
    any_positive = False
    for k in steps:
        base = np.arange(n - k)
        valid = nn[base] + k < n
        if not valid.any():
            break
        a = base[valid] + k
        b = nn[base][valid] + k
        d = np.sqrt(np.sum((pts[a] - pts[b]) ** 2, axis=1))
        d = d[d > 0.0]
        if len(d):
            any_positive = True
            mld[k - 1] = float(np.mean(np.log(d)))
    if not any_positive:
        raise DegenerateError("all pair divergences are zero")

    sel = (steps >= lo) & (steps <= hi) & np.isfinite(mld)
    if sel.sum() < 2:
        raise DegenerateError("fewer than two usable points in the fit range")
    t = steps[sel].astype(float)
    v = mld[sel]
    design = np.stack([t, np.ones_like(t)], axis=1)
    coef, _, _, _ = np.linalg.lstsq(design, v, rcond=None)
    fitted = design @ coef
    sse = float(np.sum((v - fitted) ** 2))
    sst = float(np.sum((v - v.mean()) ** 2))
    r2 = 1.0 - sse / sst if sst > 0 else 0.0
    slope = float(coef[0])
    curve = DivergenceCurve(steps, mld, (lo, hi), slope, max(0.0, min(1.0, r2)))
    return curve, slope


@dataclass(frozen=True)
class ChaosProfile:
    """Embedding delay, dimension, largest Lyapunov exponent, chaos verdict."""

    tau: int
    m: int
    lyapunov: float
    is_chaotic: bool

    def __post_init__(self):
        if self.tau < 1 or self.m < 1:
            raise DataError("tau and m must be >= 1")
        if self.is_chaotic != (self.lyapunov > 0):
            raise DataError("is_chaotic must equal (lyapunov > 0)")

    @classmethod
    def from_estimates(cls, tau: int, m: int, lyapunov: float) -> "ChaosProfile":
        return cls(tau=tau, m=m, lyapunov=float(lyapunov), is_chaotic=bool(lyapunov > 0))

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "m": self.m,
            "lyapunov": self.lyapunov,
            "is_chaotic": self.is_chaotic,
        }
