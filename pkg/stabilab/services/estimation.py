"""
Estimation service

Scalar Kalman filter, least squares and instrumental variables, the
identification and price-puzzle experiments on simulated trajectories,
policy-rule fitting on CSV data and the welfare cost of fluctuations.
"""
import math
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from loguru import logger

from stabilab.config import get_settings
from stabilab.exceptions import (
    ConfigError,
    IdentificationFailure,
    InsufficientData,
    InvalidParameters,
    NonStationary,
    SchemaError,
)
from stabilab.schemas.estimation import (
    EstimationMethod,
    KalmanState,
    PricePuzzleReport,
    RegressionResult,
    RuleSpec,
    WelfareSpec,
)
from stabilab.schemas.model import Trajectory, Transmission
from stabilab.utils.random import make_rng

RULE_DATA_COLUMNS = ["date", "i", "pi", "x"]

# (pi high, pi low, gap high, gap low) per block of four quarters
TAYLOR_DATASET_BLOCKS = (
    (2.0, 3.0, 0.5, -1.0),
    (4.0, 4.5, 1.0, 0.0),
    (3.5, 2.5, -2.0, -0.5),
    (1.5, 2.0, -3.0, -1.5),
    (3.0, 3.5, 0.0, 1.5),
    (5.0, 4.0, 2.0, 0.5),
)


# ============================================
# Kalman filter
# ============================================

def kalman_step(
    ks: KalmanState,
    lam: float,
    sigma_eps: float,
    sigma_obs: float,
    y: float,
    drive: float = 0.0,
) -> KalmanState:
    """
    One predict/update step for x[t+1] = lam*x[t] + drive + eps, y = x + nu.

    Args:
        ks: Filtered state of the previous period
        lam: State persistence
        sigma_eps: State shock standard deviation
        sigma_obs: Observation noise standard deviation
        y: Observation of the current period
        drive: Known input added to the prediction (B*i in a control loop)

    Returns:
        KalmanState of the current period
    """
    if sigma_obs < 0.0:
        raise InvalidParameters("sigma_obs must be non-negative")

    prior = lam * ks.estimate + drive
    prior_var = lam * lam * ks.variance + sigma_eps * sigma_eps
    if sigma_obs == 0.0:
        return KalmanState(estimate=y, variance=0.0, gain=1.0)

    gain = prior_var / (prior_var + sigma_obs * sigma_obs)
    if gain == 1.0:
        return KalmanState(estimate=y, variance=0.0, gain=1.0)
    return KalmanState(
        estimate=prior + gain * (y - prior),
        variance=(1.0 - gain) * prior_var,
        gain=gain,
    )


def kalman_steady_state(lam: float, sigma_eps: float, sigma_obs: float) -> Tuple[float, float, float]:
    """
    Fixed point of the filter variance recursion.

    The predicted variance M is the positive root of
    M^2 + M*(sigma_obs^2*(1 - lam^2) - sigma_eps^2) - sigma_eps^2*sigma_obs^2 = 0.

    Returns:
        tuple: (predicted variance, filtered variance, gain)
    """
    s_eps2 = sigma_eps * sigma_eps
    s_obs2 = sigma_obs * sigma_obs
    if s_obs2 == 0.0:
        return s_eps2, 0.0, 1.0

    c1 = s_obs2 * (1.0 - lam * lam) - s_eps2
    c0 = -s_eps2 * s_obs2
    root = math.sqrt(c1 * c1 - 4.0 * c0)
    predicted = -2.0 * c0 / (root + c1) if c1 > 0.0 else (root - c1) / 2.0
    gain = predicted / (predicted + s_obs2)
    return predicted, (1.0 - gain) * predicted, gain


# ============================================
# Regression
# ============================================

def _design(X: Union[np.ndarray, Sequence], n: int) -> np.ndarray:
    if isinstance(X, (list, tuple)):
        matrix = np.column_stack([np.asarray(col, dtype=float) for col in X])
    else:
        matrix = np.asarray(X, dtype=float).reshape(n, -1)
    if matrix.shape[0] != n:
        raise InvalidParameters("regressors and dependent variable differ in length")
    return matrix


def _check_conditioning(matrix: np.ndarray, what: str) -> None:
    limit = get_settings().identification_max_condition
    condition = np.linalg.cond(matrix)
    if not np.isfinite(condition) or condition > limit:
        raise IdentificationFailure(f"{what} is singular (condition number {condition:.3g})")


def _r_squared(y: np.ndarray, residuals: np.ndarray, centered: bool) -> float:
    ssr = float(residuals @ residuals)
    deviations = y - y.mean() if centered else y
    sst = float(deviations @ deviations)
    if sst == 0.0:
        return 1.0 if ssr == 0.0 else 0.0
    return min(1.0, max(0.0, 1.0 - ssr / sst))


def ols(
    y: Sequence[float],
    X: Union[np.ndarray, Sequence],
    names: Optional[Sequence[str]] = None,
    intercept: bool = False,
) -> RegressionResult:
    """
    Least squares with conventional standard errors.

    Args:
        y: Dependent variable
        X: Regressor columns (list of series) or an n-by-k matrix
        names: Regressor names, ``x0, x1, ...`` by default
        intercept: Append a constant named ``const``

    Returns:
        RegressionResult; R^2 is centered with an intercept, uncentered without

    Raises:
        InsufficientData: if n <= k
        IdentificationFailure: if the Gram matrix is numerically singular
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    design = _design(X, n)
    names = list(names) if names is not None else [f"x{j}" for j in range(design.shape[1])]
    if intercept:
        design = np.column_stack([design, np.ones(n)])
        names.append("const")
    k = design.shape[1]
    if n <= k:
        raise InsufficientData(f"{n} observations for {k} regressors")

    gram = design.T @ design
    _check_conditioning(gram, "Gram matrix")
    coefficients = np.linalg.solve(gram, design.T @ y)
    residuals = y - design @ coefficients
    s2 = float(residuals @ residuals) / (n - k)
    stderrs = np.sqrt(np.maximum(s2 * np.diag(np.linalg.inv(gram)), 0.0))

    return RegressionResult(
        names=tuple(names),
        coefficients=tuple(float(c) for c in coefficients),
        stderrs=tuple(float(s) for s in stderrs),
        r2=_r_squared(y, residuals, centered=intercept),
        n=n,
    )


def iv(
    y: Sequence[float],
    X: Union[np.ndarray, Sequence],
    Z: Union[np.ndarray, Sequence],
    names: Optional[Sequence[str]] = None,
) -> RegressionResult:
    """
    Just-identified instrumental variables, beta = (Z'X)^-1 Z'y.

    Raises:
        InvalidParameters: if Z and X have different column counts
        IdentificationFailure: if Z'X is numerically singular
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    design = _design(X, n)
    instruments = _design(Z, n)
    k = design.shape[1]
    if instruments.shape[1] != k:
        raise InvalidParameters("just-identified IV needs one instrument per regressor")
    if n <= k:
        raise InsufficientData(f"{n} observations for {k} regressors")

    cross = instruments.T @ design
    _check_conditioning(cross, "Instrument cross-moment matrix")
    coefficients = np.linalg.solve(cross, instruments.T @ y)
    residuals = y - design @ coefficients
    s2 = float(residuals @ residuals) / (n - k)
    cross_inv = np.linalg.inv(cross)
    covariance = s2 * cross_inv @ (instruments.T @ instruments) @ cross_inv.T
    stderrs = np.sqrt(np.maximum(np.diag(covariance), 0.0))

    return RegressionResult(
        names=tuple(names) if names is not None else tuple(f"x{j}" for j in range(k)),
        coefficients=tuple(float(c) for c in coefficients),
        stderrs=tuple(float(s) for s in stderrs),
        r2=_r_squared(y, residuals, centered=False),
        n=n,
    )


def ar1_persistence(series: Sequence[float]) -> float:
    """First-order autoregressive coefficient of a series, with intercept."""
    values = np.asarray(series, dtype=float)
    return ols(values[1:], [values[:-1]], names=["lag"], intercept=True).coef("lag")


# ============================================
# Identification experiments
# ============================================

def estimate_transmission(
    traj: Trajectory,
    method: EstimationMethod = EstimationMethod.OLS,
) -> RegressionResult:
    """
    Estimate (A, B) from pi[t+1] = A*pi[t] + B*i[t] + eps[t].

    IV instruments i[t] with the policy shock eta[t]. Without policy shocks
    an exact proportional rule makes i[t] collinear with pi[t] and neither
    method identifies B.

    Raises:
        IdentificationFailure: if the design is collinear
    """
    y = traj.pi[1:]
    regressors = [traj.pi[:-1], traj.i[:-1]]
    names = ["a", "b"]
    if method is EstimationMethod.IV:
        result = iv(y, regressors, [traj.pi[:-1], traj.eta[:-1]], names=names)
    else:
        result = ols(y, regressors, names=names)
    logger.debug(f"{method.value} transmission estimate: A={result.coef('a')}, B={result.coef('b')}")
    return result


def price_puzzle_population_slope(tr: Transmission, f: float, sigma_eta: float) -> float:
    """
    Probability limit of the univariate slope cov(i[t], pi[t+1]) / var(i[t]).

    Equals B + A*F*var(pi)/var(i) under i = F*pi + eta, with
    var(pi) = (B^2*sigma_eta^2 + sigma_eps^2) / (1 - (A+BF)^2).

    Raises:
        NonStationary: if |A + BF| >= 1
        IdentificationFailure: if the instrument has no variance
    """
    lam = tr.a + tr.b * f
    if abs(lam) >= 1.0:
        raise NonStationary(f"|A+BF| = {abs(lam)} >= 1")
    var_pi = (tr.b ** 2 * sigma_eta ** 2 + tr.sigma_eps ** 2) / (1.0 - lam ** 2)
    var_i = f * f * var_pi + sigma_eta ** 2
    if var_i == 0.0:
        raise IdentificationFailure("instrument has zero variance")
    return tr.b + tr.a * f * var_pi / var_i


def price_puzzle_demo(
    traj: Trajectory,
    tr: Transmission,
    f: float,
    sigma_eta: Optional[float] = None,
) -> PricePuzzleReport:
    """
    Regress pi[t+1] on i[t] alone and compare with the multivariate estimate.

    Args:
        traj: Trajectory simulated under i = F*pi + eta
        tr: The transmission that generated it
        f: The rule gain that generated it
        sigma_eta: Policy shock std; adds the population slope when given

    Returns:
        PricePuzzleReport
    """
    naive = ols(traj.pi[1:], [traj.i[:-1]], names=["b"])
    multivariate = estimate_transmission(traj)
    naive_b = naive.coef("b")

    advised = -math.copysign(abs(f), naive_b)
    perceived = tr.a + naive_b * advised
    actual = tr.a + tr.b * advised
    population = None
    if sigma_eta is not None:
        population = price_puzzle_population_slope(tr, f, sigma_eta)

    sign_flip = naive_b > 0.0 > tr.b
    if sign_flip:
        logger.info(f"Price puzzle: naive slope {naive_b:.4g} has the wrong sign (true B={tr.b})")
    return PricePuzzleReport(
        naive_b=naive_b,
        naive_stderr=naive.stderr("b"),
        multivariate_b=multivariate.coef("b"),
        true_b=tr.b,
        sign_flip=sign_flip,
        advised_gain=advised,
        perceived_lambda=perceived,
        true_lambda=actual,
        misadvice=0.0 < perceived < tr.a < actual,
        population_slope=population,
    )


# ============================================
# Policy rules on data
# ============================================

def load_rule_data(data: Union[pd.DataFrame, str, Path]) -> pd.DataFrame:
    """
    Rule data with columns ``date,i,pi,x``; the last three must be numeric.

    Raises:
        ConfigError: if the CSV file does not exist
        SchemaError: if a column is missing or not numeric
    """
    if isinstance(data, pd.DataFrame):
        frame = data
    else:
        path = Path(data)
        if not path.is_file():
            raise ConfigError(f"rule data file not found: {path}")
        frame = pd.read_csv(path, dtype={"date": str})

    missing = [c for c in RULE_DATA_COLUMNS if c not in frame.columns]
    if missing:
        raise SchemaError(f"rule data is missing columns: {missing}")
    non_numeric = [c for c in RULE_DATA_COLUMNS[1:] if not pd.api.types.is_numeric_dtype(frame[c])]
    if non_numeric:
        raise SchemaError(f"rule data columns are not numeric: {non_numeric}")
    return frame


def fit_policy_rule(data: Union[pd.DataFrame, str, Path], spec: RuleSpec = RuleSpec.TAYLOR) -> RegressionResult:
    """
    Fit a Taylor or inertial rule to quarterly data.

    Args:
        data: Frame or CSV path with columns ``date,i,pi,x`` in time order
        spec: ``taylor`` (i on pi, x and a constant) or ``inertial``
            (i on lagged i and x, no constant)

    Returns:
        RegressionResult; the inertial fit also reports f_x / (1 - rho_i)

    Raises:
        ConfigError: if the CSV file does not exist
        SchemaError: if a column is missing or not numeric
        InsufficientData: if there are too few rows
    """
    frame = load_rule_data(data)
    minimum = get_settings().min_rule_observations
    if len(frame) < minimum:
        raise InsufficientData(f"{len(frame)} rows, need at least {minimum}")

    rate = frame["i"].to_numpy(dtype=float)
    gap = frame["x"].to_numpy(dtype=float)
    if spec is RuleSpec.TAYLOR:
        result = ols(rate, [frame["pi"].to_numpy(dtype=float), gap], names=["pi", "x"], intercept=True)
        logger.info(f"Taylor fit on {result.n} quarters: pi={result.coef('pi'):.4g}, x={result.coef('x'):.4g}")
        return result

    result = ols(rate[1:], [rate[:-1], gap[1:]], names=["i_lag", "x"])
    rho = result.coef("i_lag")
    sensitivity = result.coef("x") / (1.0 - rho) if rho != 1.0 else math.inf
    return result.model_copy(update={"long_run_gap_sensitivity": sensitivity})


def _quarter_labels(n: int, first_year: int = 1987) -> list:
    return [f"{first_year + q // 4}Q{q % 4 + 1}" for q in range(n)]


def synthetic_policy_data(
    spec: RuleSpec,
    n: int,
    seed: int = 0,
    noise_std: float = 0.25,
    pi_coef: float = 1.5,
    gap_coef: float = 0.5,
    intercept: float = 1.0,
    rho_i: float = 0.8,
) -> pd.DataFrame:
    """
    Quarterly ``date,i,pi,x`` data from a known rule.

    Inflation is AR(1) around 2 with persistence 0.8 and the gap AR(1) with
    persistence 0.7. Inflation shocks are drawn first, then gap shocks, then
    rule noise. The inertial rule uses ``gap_coef`` as f_x and starts from
    i[-1] = 0.
    """
    if n < 2:
        raise InsufficientData("need at least two quarters")
    rng = make_rng(seed)
    u_pi = 0.5 * rng.standard_normal(n)
    u_x = rng.standard_normal(n)
    noise = noise_std * rng.standard_normal(n)

    pi = np.empty(n)
    x = np.empty(n)
    rate = np.empty(n)
    pi_prev, x_prev, rate_prev = 2.0, 0.0, 0.0
    for t in range(n):
        pi[t] = 2.0 + 0.8 * (pi_prev - 2.0) + u_pi[t]
        x[t] = 0.7 * x_prev + u_x[t]
        if spec is RuleSpec.TAYLOR:
            rate[t] = pi_coef * pi[t] + gap_coef * x[t] + intercept + noise[t]
        else:
            rate[t] = rho_i * rate_prev + gap_coef * x[t] + noise[t]
        pi_prev, x_prev, rate_prev = pi[t], x[t], rate[t]

    return pd.DataFrame({"date": _quarter_labels(n), "i": rate, "pi": pi, "x": x})


def orthogonal_taylor_dataset(
    blocks: Sequence[Tuple[float, float, float, float]] = TAYLOR_DATASET_BLOCKS,
    h: float = 0.1,
) -> pd.DataFrame:
    """
    Taylor-rule data whose rule deviations are orthogonal to (1, pi, x).

    Each block of four quarters has pi = (a, a, b, b), x = (c, d, c, d) and
    deviations (h, -h, -h, h), so least squares returns the 1993 coefficients
    exactly with positive standard errors.
    """
    pattern = (h, -h, -h, h)
    rows = []
    for a, b, c, d in blocks:
        for pi, x, e in zip((a, a, b, b), (c, d, c, d), pattern):
            rows.append((pi, x, round(1.5 * pi + 0.5 * x + 1.0 + e, 10)))
    frame = pd.DataFrame(rows, columns=["pi", "x", "i"])
    frame.insert(0, "date", _quarter_labels(len(frame)))
    return frame[RULE_DATA_COLUMNS]


# ============================================
# Welfare
# ============================================

def lucas_welfare_cost(ws: WelfareSpec) -> float:
    """Consumption fraction worth giving up to remove fluctuations, gamma*sigma_x^2/2."""
    return 0.5 * ws.gamma * ws.sigma_x ** 2


def stabilization_welfare_gain(gamma: float, sigma_eps: float, a: float, lam: float) -> Tuple[float, float, float]:
    """
    Welfare cost under the peg against the cost under feedback.

    Fluctuations are AR(1) with innovation std ``sigma_eps`` and persistence
    A (peg) or lambda (feedback).

    Returns:
        tuple: (cost under the peg, cost under feedback, peg/feedback ratio);
        the peg cost is infinite when |A| >= 1

    Raises:
        NonStationary: if |lambda| >= 1
    """
    if abs(lam) >= 1.0:
        raise NonStationary(f"feedback persistence |lambda| = {abs(lam)} >= 1")
    feedback = lucas_welfare_cost(WelfareSpec(gamma=gamma, sigma_x=sigma_eps / math.sqrt(1.0 - lam * lam)))
    if abs(a) >= 1.0:
        return math.inf, feedback, math.inf
    peg = lucas_welfare_cost(WelfareSpec(gamma=gamma, sigma_x=sigma_eps / math.sqrt(1.0 - a * a)))
    ratio = peg / feedback if feedback > 0.0 else (1.0 if peg == 0.0 else math.inf)
    return peg, feedback, ratio
