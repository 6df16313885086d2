"""Structure-function scaling and the multiscaling proxies.

For a demeaned daily return series, the q-th absolute moment at horizon tau
is fitted as a power law moment(q, tau) = K(q) * tau^zeta(q) by ordinary
least squares in log-log scale. The exponent curve is then fitted by the
intercept-free quadratic zeta(q) = A*q + B*q^2; B is the curvature
(multiscaling) proxy and A the linear one. A pure random walk gives
A = 0.5, B = 0.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EstimationError

DEFAULT_Q_GRID = np.round(np.arange(1, 11) * 0.1, 10)
DEFAULT_TAU_RANGE = np.arange(1, 20)
MIN_AGGREGATED_OBS = 30


@dataclass
class MomentCurve:
    """E[|r_tau|^q] as a function of the horizon tau, for one q."""

    q: float
    taus: np.ndarray
    moments: np.ndarray


@dataclass
class ScalingResult:
    """Per-series scaling estimates: zeta(q), ln K(q), and the proxies."""

    q_grid: np.ndarray
    zeta: np.ndarray
    lnK: np.ndarray
    per_q_r2: np.ndarray
    A_hat: float
    B_hat: float
    fit_rss: float


def aggregate_returns(returns, tau):
    """Overlapping tau-horizon returns: sliding sums of tau daily returns."""
    returns = np.asarray(returns, dtype=float)
    if tau < 1:
        raise EstimationError(f"horizon tau={tau} must be >= 1")
    if tau >= returns.shape[0]:
        raise EstimationError(
            f"horizon tau={tau} too long for series of length {returns.shape[0]}")
    if tau == 1:
        return returns.copy()
    c = np.concatenate([np.zeros((1,) + returns.shape[1:]), np.cumsum(returns, axis=0)])
    return c[tau:] - c[:-tau]


def structure_function(returns, q_grid=None, tau_range=None, ticker=None):
    """Sample moments E[|r_tau|^q] over the (q, tau) grid, one curve per q."""
    returns = np.asarray(returns, dtype=float)
    q_grid = DEFAULT_Q_GRID if q_grid is None else np.asarray(q_grid, dtype=float)
    tau_range = DEFAULT_TAU_RANGE if tau_range is None else np.asarray(tau_range)
    name = f" ({ticker})" if ticker else ""
    T = returns.shape[0]
    if T - tau_range.max() + 1 < MIN_AGGREGATED_OBS:
        raise EstimationError(
            f"series length {T}{name} leaves fewer than {MIN_AGGREGATED_OBS} "
            f"observations at tau={tau_range.max()}")
    moments = np.empty((len(q_grid), len(tau_range)))
    for j, tau in enumerate(tau_range):
        abs_agg = np.abs(aggregate_returns(returns, int(tau)))
        for i, q in enumerate(q_grid):
            moments[i, j] = np.mean(abs_agg ** q)
    for i, q in enumerate(q_grid):
        for j, tau in enumerate(tau_range):
            if moments[i, j] == 0.0:
                raise EstimationError(
                    f"zero moment at (q={q}, tau={tau}){name}: degenerate series")
    return [MomentCurve(q=float(q), taus=tau_range.astype(float), moments=moments[i])
            for i, q in enumerate(q_grid)]


def _loglog_slope(ln_tau, ln_moment):
    xc = ln_tau - ln_tau.mean()
    sxx = np.dot(xc, xc)
    if sxx == 0.0:
        raise EstimationError("singular log-log regression: all tau equal")
    slope = np.dot(xc, ln_moment) / sxx
    intercept = ln_moment.mean() - slope * ln_tau.mean()
    resid = ln_moment - slope * ln_tau - intercept
    tss = np.dot(ln_moment - ln_moment.mean(), ln_moment - ln_moment.mean())
    r2 = 1.0 - np.dot(resid, resid) / tss if tss > 0 else 1.0
    return slope, intercept, r2


def estimate_zeta(curves):
    """OLS of ln(moment) on ln(tau) per q: slopes zeta(q), intercepts ln K(q)."""
    zeta = np.empty(len(curves))
    lnK = np.empty(len(curves))
    r2 = np.empty(len(curves))
    for i, curve in enumerate(curves):
        if len(curve.taus) < 3:
            raise EstimationError(
                f"q={curve.q}: need at least 3 horizons, got {len(curve.taus)}")
        if np.any(curve.moments <= 0):
            raise EstimationError(f"q={curve.q}: non-positive moment")
        zeta[i], lnK[i], r2[i] = _loglog_slope(np.log(curve.taus),
                                               np.log(curve.moments))
    return zeta, lnK, r2


def fit_proxies(q_grid, zeta):
    """Least-squares fit of zeta(q) = A*q + B*q^2 with no constant term.

    Solves the 2x2 normal equations in closed form; returns (A, B, rss).
    """
    q = np.asarray(q_grid, dtype=float)
    z = np.asarray(zeta, dtype=float)
    if len(np.unique(q)) < 2:
        raise EstimationError("proxy fit needs at least 2 distinct q values")
    s2, s3, s4 = np.sum(q ** 2), np.sum(q ** 3), np.sum(q ** 4)
    b1, b2 = np.dot(q, z), np.dot(q ** 2, z)
    det = s2 * s4 - s3 * s3
    if det == 0.0:
        raise EstimationError("singular normal equations in proxy fit")
    A = (s4 * b1 - s3 * b2) / det
    B = (s2 * b2 - s3 * b1) / det
    resid = z - A * q - B * q ** 2
    return float(A), float(B), float(np.dot(resid, resid))


def estimate_scaling(returns, q_grid=None, tau_range=None, ticker=None):
    """Full per-series estimation: structure function -> zeta -> proxies."""
    curves = structure_function(returns, q_grid, tau_range, ticker=ticker)
    zeta, lnK, r2 = estimate_zeta(curves)
    q = np.array([c.q for c in curves])
    A, B, rss = fit_proxies(q, zeta)
    return ScalingResult(q_grid=q, zeta=zeta, lnK=lnK, per_q_r2=r2,
                         A_hat=A, B_hat=B, fit_rss=rss)


def estimate_scaling_panel(returns_matrix, q_grid=None, tau_range=None,
                           tickers=None):
    """Vectorized per-column scaling estimation over a [time x stock] matrix.

    Summation order within each column is fixed, so results are independent
    of how columns are batched.
    """
    X = np.asarray(returns_matrix, dtype=float)
    if X.ndim != 2:
        raise EstimationError("expected a 2-D [time x stock] matrix")
    q_grid = DEFAULT_Q_GRID if q_grid is None else np.asarray(q_grid, dtype=float)
    tau_range = DEFAULT_TAU_RANGE if tau_range is None else np.asarray(tau_range)
    T, N = X.shape
    if T - tau_range.max() + 1 < MIN_AGGREGATED_OBS:
        raise EstimationError(
            f"series length {T} leaves fewer than {MIN_AGGREGATED_OBS} "
            f"observations at tau={tau_range.max()}")
    names = list(tickers) if tickers is not None else [str(i) for i in range(N)]

    moments = np.empty((len(q_grid), len(tau_range), N))
    for j, tau in enumerate(tau_range):
        abs_agg = np.abs(aggregate_returns(X, int(tau)))
        with np.errstate(divide="ignore"):
            ln_abs = np.log(abs_agg)  # -inf at exact zeros; exp(q*-inf) = 0
        for i, q in enumerate(q_grid):
            moments[i, j] = np.mean(np.exp(q * ln_abs), axis=0)
    bad = np.argwhere(moments == 0.0)
    if bad.size:
        i, j, n = bad[0]
        raise EstimationError(
            f"zero moment at (q={q_grid[i]}, tau={tau_range[j]}) "
            f"for {names[n]}: degenerate series")

    ln_tau = np.log(tau_range.astype(float))
    xc = ln_tau - ln_tau.mean()
    sxx = np.dot(xc, xc)
    if sxx == 0.0:
        raise EstimationError("singular log-log regression: all tau equal")
    Y = np.log(moments)  # [Q, Tau, N]
    zeta = np.tensordot(xc, Y, axes=(0, 1)) / sxx          # [Q, N]
    ybar = Y.mean(axis=1)
    lnK = ybar - zeta * ln_tau.mean()
    resid = Y - zeta[:, None, :] * ln_tau[None, :, None] - lnK[:, None, :]
    tss = np.sum((Y - ybar[:, None, :]) ** 2, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        r2 = np.where(tss > 0, 1.0 - np.sum(resid ** 2, axis=1) / tss, 1.0)

    q = q_grid
    s2, s3, s4 = np.sum(q ** 2), np.sum(q ** 3), np.sum(q ** 4)
    det = s2 * s4 - s3 * s3
    b1 = q @ zeta        # [N]
    b2 = (q ** 2) @ zeta
    A = (s4 * b1 - s3 * b2) / det
    B = (s2 * b2 - s3 * b1) / det
    pres = zeta - A[None, :] * q[:, None] - B[None, :] * (q ** 2)[:, None]
    rss = np.sum(pres ** 2, axis=0)

    return [ScalingResult(q_grid=q.copy(), zeta=zeta[:, n].copy(),
                          lnK=lnK[:, n].copy(), per_q_r2=r2[:, n].copy(),
                          A_hat=float(A[n]), B_hat=float(B[n]),
                          fit_rss=float(rss[n]))
            for n in range(N)]
