"""q-Gaussian distributions: q-logarithm, density, CDF, sampling and MLE fitting.

The density is

    P(x) = sqrt(B)/C_q * [1 + (q-1) B (x-M)^2]^(1/(1-q)),   1 < q < 3

With phi = 1/(q-1) and kappa = (q-1)B, the maximum-likelihood equations are

    psi(phi) - psi(phi - 1/2) = mean(ln(1 + kappa*Omega^2))           shape
    M = sum(w_i x_i),  w_i proportional to 1/(1 + kappa*Omega_i^2)     location
    1/(2 kappa) = phi * mean(Omega^2 / (1 + kappa*Omega^2))            scale

with Omega_i = x_i - M.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import gammaln

from .errors import ConvergenceFailure, DegenerateData, DomainError, InsufficientData

logger = logging.getLogger(__name__)

EPS_Q = 1e-6           # below this |q-1| use the analytic q -> 1 limits
MIN_SAMPLES = 30
Q_LOWER = 1.05         # fit_full search bracket for q
Q_UPPER = 2.5
Q_INITIAL = 1.4
INNER_TOL = 1e-12
MAX_INNER_ITERATIONS = 5000
CDF_EPSABS = 1e-9

FloatOrArray = Union[float, np.ndarray]


@dataclass(frozen=True)
class QGaussianFit:
    """Parameters of a q-Gaussian plus fit diagnostics.

    n_samples is the number of observations behind an estimate; fits built
    directly from parameters (model specifications) carry 0.
    """
    q: float
    M: float
    B: float
    n_samples: int = 0
    converged: bool = True
    iterations: int = 0

    def __post_init__(self):
        if not (1.0 < self.q < 3.0):
            raise DomainError(f"q must lie in (1, 3), got {self.q}")
        if not (math.isfinite(self.B) and self.B > 0):
            raise DomainError(f"B must be positive and finite, got {self.B}")
        if not math.isfinite(self.M):
            raise DomainError(f"M must be finite, got {self.M}")

    @property
    def phi(self) -> float:
        return 1.0 / (self.q - 1.0)

    @property
    def kappa(self) -> float:
        return (self.q - 1.0) * self.B

    def to_dict(self) -> dict:
        return {
            'q': self.q,
            'M': self.M,
            'B': self.B,
            'n_samples': self.n_samples,
            'converged': self.converged,
            'iterations': self.iterations,
        }


@dataclass(frozen=True)
class MomentSummary:
    """Sample mean and standard deviation of a return series."""
    mu: float
    sigma: float
    n_samples: int

    def __post_init__(self):
        if self.sigma < 0:
            raise DomainError(f"sigma must be non-negative, got {self.sigma}")


def _finish(values: np.ndarray, scalar: bool) -> FloatOrArray:
    return float(values) if scalar else values


# ===== Special functions =====

def ln_q(x: ArrayLike, q: float) -> FloatOrArray:
    """q-logarithm (x^(1-q) - 1)/(1 - q); natural log when q is within EPS_Q of 1."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("ln_q is defined for x > 0 only")
    if abs(q - 1.0) < EPS_Q:
        return _finish(np.log(arr), arr.ndim == 0)
    # expm1 keeps precision when (1-q) ln x is small
    return _finish(np.expm1((1.0 - q) * np.log(arr)) / (1.0 - q), arr.ndim == 0)


def digamma(x: float) -> float:
    """Digamma function psi(x) for x > 0.

    Upward recurrence psi(x) = psi(x+1) - 1/x until x >= 6, then the
    asymptotic (Stirling) series through the x^-14 term.
    """
    if not x > 0:
        raise DomainError(f"digamma is implemented for x > 0, got {x}")
    x = float(x)
    result = 0.0
    while x < 6.0:
        result -= 1.0 / x
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (
        1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12.0))))))
    return result + math.log(x) - 0.5 * inv - series


def normalization_constant(q: float) -> float:
    """C_q such that the full normalization is Z_q = C_q / sqrt(B)."""
    if not (1.0 < q < 3.0):
        raise DomainError(f"q must lie in (1, 3), got {q}")
    if q - 1.0 < EPS_Q:
        return math.sqrt(math.pi)
    phi = 1.0 / (q - 1.0)
    return math.sqrt(math.pi) * math.exp(gammaln(phi - 0.5) - gammaln(phi)) / math.sqrt(q - 1.0)


def _kernel(u: FloatOrArray, q: float) -> FloatOrArray:
    """Unnormalized density in the standardized variable u = sqrt(B)(x - M)."""
    if q - 1.0 < EPS_Q:
        return np.exp(-np.square(u))
    return np.exp(-np.log1p((q - 1.0) * np.square(u)) / (q - 1.0))


# ===== Density, CDF, sampling =====

def pdf(x: ArrayLike, fit: QGaussianFit) -> FloatOrArray:
    """q-Gaussian density; symmetric about M and maximal there."""
    arr = np.asarray(x, dtype=float)
    sqrt_b = math.sqrt(fit.B)
    values = sqrt_b / normalization_constant(fit.q) * _kernel(sqrt_b * (arr - fit.M), fit.q)
    return _finish(values, arr.ndim == 0)


def cdf(x: ArrayLike, fit: QGaussianFit) -> FloatOrArray:
    """Cumulative distribution by adaptive quadrature of the density.

    Integrates the kernel in u = sqrt(B)(x - M) from 0 outward, so cdf(M) is
    exactly 1/2. Array arguments are integrated cumulatively over sorted |u|,
    one short segment per point.
    """
    arr = np.asarray(x, dtype=float)
    u = math.sqrt(fit.B) * (arr.ravel() - fit.M)
    c_q = normalization_constant(fit.q)

    magnitude = np.abs(u)
    half = np.empty_like(magnitude)
    accumulated = 0.0
    previous = 0.0
    for idx in np.argsort(magnitude, kind="stable"):
        upper = magnitude[idx]
        if math.isinf(upper):
            half[idx] = 0.5 * c_q
            continue
        if upper > previous:
            piece, _ = quad(_kernel, previous, upper, args=(fit.q,),
                            epsabs=CDF_EPSABS, epsrel=1e-10, limit=200)
            accumulated += piece
            previous = upper
        half[idx] = accumulated

    values = np.clip(0.5 + np.sign(u) * half / c_q, 0.0, 1.0).reshape(arr.shape)
    return _finish(values, arr.ndim == 0)


def sample(fit: QGaussianFit, n: int, seed: int) -> np.ndarray:
    """Draw n variates via the Student-t equivalence.

    t ~ Student-t(nu = (3-q)/(q-1)) maps to M + t / sqrt((3-q) B).
    """
    if n < 1:
        raise DomainError(f"sample size must be positive, got {n}")
    rng = np.random.default_rng(seed)
    nu = (3.0 - fit.q) / (fit.q - 1.0)
    draws = rng.standard_t(nu, size=int(n))
    return fit.M + draws / math.sqrt((3.0 - fit.q) * fit.B)


# ===== Moments =====

def moments(data: ArrayLike) -> MomentSummary:
    """Sample mean and standard deviation (denominator n-1)."""
    x = np.asarray(data, dtype=float).ravel()
    if x.size < 2:
        raise DegenerateData(f"moments need at least 2 observations, got {x.size}")
    sigma = float(np.std(x, ddof=1))
    if sigma == 0.0:
        raise DegenerateData("constant data has zero standard deviation")
    return MomentSummary(mu=float(np.mean(x)), sigma=sigma, n_samples=int(x.size))


# ===== Maximum likelihood =====

def _prepare(data: ArrayLike) -> np.ndarray:
    x = np.asarray(data, dtype=float).ravel()
    if x.size < MIN_SAMPLES:
        raise InsufficientData(f"q-Gaussian fit needs at least {MIN_SAMPLES} observations, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DomainError("data contains non-finite values")
    if np.ptp(x) == 0.0:
        raise DegenerateData("cannot fit constant data")
    return x


def _solve_location_scale(x: np.ndarray, phi: float, m: float, kappa: float) -> Tuple[float, float, int]:
    """Solve the location and scale equations for M and kappa at fixed phi.

    Alternates the weighted-mean update of M with the fixed-point update of
    kappa. This is the EM iteration for a Student-t with known degrees of
    freedom, so the likelihood never decreases.
    """
    for iteration in range(1, MAX_INNER_ITERATIONS + 1):
        omega = x - m
        w = 1.0 / (1.0 + kappa * omega * omega)
        m_new = float(np.dot(w, x) / w.sum())
        omega = x - m_new
        sq = omega * omega
        kappa_new = 1.0 / (2.0 * phi * float(np.mean(sq / (1.0 + kappa * sq))))
        if not (math.isfinite(kappa_new) and kappa_new > 0):
            raise ConvergenceFailure(f"scale iteration diverged at phi={phi:.6g}")
        dm = abs(m_new - m) * math.sqrt(kappa_new)
        dk = abs(kappa_new - kappa) / kappa_new
        m, kappa = m_new, kappa_new
        if dm < INNER_TOL and dk < INNER_TOL:
            return m, kappa, iteration
    raise ConvergenceFailure(
        f"location/scale iteration did not converge in {MAX_INNER_ITERATIONS} steps (phi={phi:.6g})"
    )


def _phi_residual(x: np.ndarray, phi: float, m: float, kappa: float) -> float:
    return digamma(phi) - digamma(phi - 0.5) - float(np.mean(np.log1p(kappa * np.square(x - m))))


def mle_residuals(data: ArrayLike, fit: QGaussianFit) -> Tuple[float, float, float]:
    """Dimensionless residuals of the shape, location and scale equations.

    shape: psi difference minus the mean log term
    location: sqrt(kappa) * (M - weighted mean)
    scale: 2 kappa phi mean(Omega^2/(1+kappa Omega^2)) - 1
    """
    x = np.asarray(data, dtype=float).ravel()
    phi, kappa = fit.phi, fit.kappa
    omega = x - fit.M
    sq = omega * omega
    w = 1.0 / (1.0 + kappa * sq)
    res_a = _phi_residual(x, phi, fit.M, kappa)
    res_b = math.sqrt(kappa) * (fit.M - float(np.dot(w, x) / w.sum()))
    res_c = 2.0 * kappa * phi * float(np.mean(sq / (1.0 + kappa * sq))) - 1.0
    return res_a, res_b, res_c


def fit_fixed_q(data: ArrayLike, q: float) -> QGaussianFit:
    """Estimate M and B with q held fixed (location and scale equations only)."""
    if not (1.0 < q < 3.0):
        raise DomainError(f"q must lie in (1, 3), got {q}")
    x = _prepare(data)
    phi = 1.0 / (q - 1.0)
    b0 = 1.0 / (2.0 * float(np.var(x, ddof=1)))
    m, kappa, iterations = _solve_location_scale(x, phi, float(np.median(x)), b0 / phi)
    return QGaussianFit(q=q, M=m, B=kappa * phi, n_samples=int(x.size),
                        converged=True, iterations=iterations)


def fit_full(data: ArrayLike) -> QGaussianFit:
    """Joint maximum-likelihood estimate of q, M and B.

    For every trial phi the location/scale pair is re-solved (warm-started
    from the previous trial), which turns the shape equation into a one-dimensional
    root-find on the profile likelihood. The root is bracketed by
    q in [Q_LOWER, Q_UPPER]; a likelihood still rising at either end returns
    that bound with converged=False.
    """
    x = _prepare(data)
    state = {
        'm': float(np.median(x)),
        'b': 1.0 / (2.0 * float(np.var(x, ddof=1))),
        'evaluations': 0,
    }

    def solve(phi: float) -> Tuple[float, float]:
        m, kappa, _ = _solve_location_scale(x, phi, state['m'], state['b'] / phi)
        state['m'], state['b'] = m, kappa * phi
        state['evaluations'] += 1
        return m, kappa

    def residual(phi: float) -> float:
        m, kappa = solve(phi)
        return _phi_residual(x, phi, m, kappa)

    solve(1.0 / (Q_INITIAL - 1.0))

    phi_lo = 1.0 / (Q_UPPER - 1.0)
    phi_hi = 1.0 / (Q_LOWER - 1.0)
    f_lo = residual(phi_lo)
    f_hi = residual(phi_hi)

    converged = True
    if f_hi > 0:
        logger.warning(f"q-Gaussian fit reached lower q bound {Q_LOWER} (n={x.size})")
        phi = phi_hi
        converged = False
    elif f_lo < 0:
        logger.warning(f"q-Gaussian fit reached upper q bound {Q_UPPER} (n={x.size})")
        phi = phi_lo
        converged = False
    else:
        try:
            phi = brentq(residual, phi_lo, phi_hi, xtol=1e-13, maxiter=200)
        except RuntimeError as exc:
            raise ConvergenceFailure(f"root-find for q did not converge: {exc}") from exc

    m, kappa = solve(phi)
    return QGaussianFit(q=1.0 + 1.0 / phi, M=m, B=kappa * phi, n_samples=int(x.size),
                        converged=converged, iterations=state['evaluations'])
