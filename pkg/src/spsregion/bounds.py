"""PAC-style size bounds for the outer ellipsoid and their ingredients.

All bounds hold with probability at least 1 - delta over the noise and sign
draws; they are distribution-free within the subgaussian class described by
the proxy sigma. Branch predicates of the piecewise terms are evaluated in
log-space so the (n d)^2 exponents never reach exp().
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RankDeficient, SampleTooSmall
from .indicator import sign_matrix

RANK_RTOL = 1e-10


@dataclass(frozen=True)
class CoherenceResult:
    mu: float
    kappa_empirical: float


def coherence(regressors, rho=1.0):
    """Row-leverage spread of the design: mu = (n/d) max_t ||u_t||^2.

    u_t are the rows of the thin-SVD left factor. kappa_empirical scales mu
    by n^(rho-1) so that mu = kappa * n^(1-rho) holds with equality.
    """
    phi = np.asarray(regressors, dtype=float)
    if phi.ndim != 2:
        raise DomainError(f"regressors must be 2-d, got shape {phi.shape}")
    n, d = phi.shape
    if n < d:
        raise DomainError(f"need n >= d, got n={n}, d={d}")
    if not 0.0 < rho <= 1.0:
        raise DomainError(f"rho must be in (0,1], got {rho}")
    u, svals, _ = np.linalg.svd(phi, full_matrices=False)
    if svals[-1] < RANK_RTOL * svals[0]:
        raise RankDeficient(
            f"column rank deficient: singular values {svals}")
    mu = (n / d) * float(np.max(np.sum(u * u, axis=1)))
    return CoherenceResult(mu=mu, kappa_empirical=mu * n ** (rho - 1.0))


def _check_delta(delta):
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must be in (0,1), got {delta}")
    return float(delta)


def f_delta(delta, n, d, sigma):
    """Noise concentration term: subgaussian tail radius at level delta."""
    delta = _check_delta(delta)
    if n < 1 or d < 1:
        raise DomainError(f"need n, d >= 1, got n={n}, d={d}")
    if sigma <= 0:
        raise DomainError(f"sigma must be > 0, got {sigma}")
    s2 = sigma * sigma
    if math.log(delta / 4.0) < -float(n * d) ** 2:
        return 2.0 * s2 * (8.0 * math.log(4.0 / delta) + d)
    return 2.0 * d * s2 * (8.0 * math.sqrt(math.log(4.0 / delta)) + 1.0)


def g_delta(delta, d, kappa):
    """Design concentration term: ln(4d/delta) * 2 kappa d."""
    delta = _check_delta(delta)
    if d < 1:
        raise DomainError(f"need d >= 1, got d={d}")
    if kappa <= 0:
        raise DomainError(f"kappa must be > 0, got {kappa}")
    return math.log(4.0 * d / delta) * 2.0 * kappa * d


@dataclass(frozen=True)
class PacBoundInputs:
    """Inputs of the size bound; lam = 0 gives the unregularized reduction."""

    n: int
    d: int
    delta: float
    m: int
    q: int
    sigma: float
    lam: float
    ell: float
    kappa: float
    rho: float = 1.0
    lambda_min_r_tilde: float | None = None

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise DomainError(f"need n, d >= 1, got n={self.n}, d={self.d}")
        _check_delta(self.delta)
        if not self.m > self.q >= 1:
            raise DomainError(f"need m > q >= 1, got m={self.m}, q={self.q}")
        if self.sigma <= 0 or self.ell <= 0 or self.kappa <= 0:
            raise DomainError("sigma, ell, kappa must all be > 0")
        if self.lam < 0:
            raise DomainError(f"lam must be >= 0, got {self.lam}")
        if not 0.0 < self.rho <= 1.0:
            raise DomainError(f"rho must be in (0,1], got {self.rho}")
        if self.lam > 0 and (self.lambda_min_r_tilde is None
                             or self.lambda_min_r_tilde <= 0):
            raise DomainError(
                "lambda_min_r_tilde must be > 0 when lam > 0 "
                f"(got {self.lambda_min_r_tilde})")


def min_sample_size(inputs):
    """Smallest n the size bound admits: ceil(g(delta/(m-q))^(1/rho))."""
    g = g_delta(inputs.delta / (inputs.m - inputs.q), inputs.d, inputs.kappa)
    return int(math.ceil(g ** (1.0 / inputs.rho)))


def size_bound(inputs):
    """High-probability bound on the squared Mahalanobis radius of the region.

    ( f + 2 lam ell^2 d ) * ( n^(rho/2) (1 + 2 lam / lambda_min(r_tilde))
                              + g^(1/2) )  /  ( n (n^(rho/2) - g^(1/2)) )
    with f, g evaluated at delta / (m - q).
    """
    delta_eff = inputs.delta / (inputs.m - inputs.q)
    g = g_delta(delta_eff, inputs.d, inputs.kappa)
    n_pow = inputs.n ** (inputs.rho / 2.0)
    g_sqrt = math.sqrt(g)
    if n_pow <= g_sqrt:
        required = min_sample_size(inputs)
        raise SampleTooSmall(
            f"n={inputs.n} below the minimum sample size {required} "
            f"for these inputs", required_n=required)
    f = f_delta(delta_eff, inputs.n, inputs.d, inputs.sigma)
    if inputs.lam > 0:
        gram_term = 1.0 + 2.0 * inputs.lam / inputs.lambda_min_r_tilde
    else:
        gram_term = 1.0
    top = (f + 2.0 * inputs.lam * inputs.ell ** 2 * inputs.d) \
        * (n_pow * gram_term + g_sqrt)
    return top / (inputs.n * (n_pow - g_sqrt))


def perturbation_norm_bound(delta, kappa, d, n, rho=1.0):
    """Tail bound on the spectral norm of the whitened sign-flip operator."""
    delta = _check_delta(delta)
    if kappa <= 0 or d < 1 or n < 1:
        raise DomainError("need kappa > 0, d >= 1, n >= 1")
    if not 0.0 < rho <= 1.0:
        raise DomainError(f"rho must be in (0,1], got {rho}")
    return math.sqrt(2.0 * kappa * d * math.log(2.0 * d / delta) / n ** rho)


def gram_ratio_bound(delta, kappa, d, n, rho=1.0, lam=0.0,
                     lambda_min_r_tilde=None):
    """Bound on (1 + ||K||) / (1 - ||K||); +inf once the norm bound hits 1."""
    beta = perturbation_norm_bound(delta, kappa, d, n, rho)
    if beta >= 1.0:
        return math.inf
    if lam > 0:
        if lambda_min_r_tilde is None or lambda_min_r_tilde <= 0:
            raise DomainError("lambda_min_r_tilde must be > 0 when lam > 0")
        extra = 2.0 * lam / lambda_min_r_tilde
    else:
        extra = 0.0
    return (1.0 + beta + extra) / (1.0 - beta)


def noise_quadratic_bound(delta, n, d, sigma, lam=0.0, theta_star_norm_sq=0.0):
    """Tail bound on |w' M w| / n for a rank-d projection M."""
    delta = _check_delta(delta)
    if n < 1 or d < 1:
        raise DomainError(f"need n, d >= 1, got n={n}, d={d}")
    if sigma <= 0:
        raise DomainError(f"sigma must be > 0, got {sigma}")
    if lam < 0 or theta_star_norm_sq < 0:
        raise DomainError("lam and theta_star_norm_sq must be >= 0")
    s2 = sigma * sigma
    ridge = 2.0 * lam * theta_star_norm_sq * d
    if math.log(delta / 2.0) < -float(n * d) ** 2:
        core = 2.0 * s2 * (8.0 * math.log(2.0 / delta) + d)
    else:
        core = 2.0 * d * s2 * (8.0 * math.sqrt(math.log(2.0 / delta)) + 1.0)
    return (core + ridge) / n


@dataclass(frozen=True)
class PerturbationOperators:
    """Sign-flip operators in the orthonormal bases of phi and the raw block."""

    k: np.ndarray
    k_tilde: np.ndarray
    k_norm: float
    k_tilde_norm: float


def perturbation_operators(ep, sign_vector):
    """K = Q' D Q (thin QR of stacked phi), K_tilde = U' D U (thin SVD, raw).

    Spectral norms of both are returned for the statistical validity suites.
    """
    sign_vector = np.asarray(sign_vector, dtype=float)
    if sign_vector.shape[0] != ep.phi.shape[0]:
        raise DomainError(
            f"sign vector length {sign_vector.shape[0]} != row count "
            f"{ep.phi.shape[0]}")
    q_factor, r_factor = np.linalg.qr(ep.phi)
    diag = np.abs(np.diag(r_factor))
    if diag.min() < RANK_RTOL * max(diag.max(), 1e-300):
        raise RankDeficient("stacked design is column rank deficient")
    k = (q_factor * sign_vector[:, None]).T @ q_factor
    k = (k + k.T) / 2.0
    raw = ep.phi[:ep.n]
    u, svals, _ = np.linalg.svd(raw, full_matrices=False)
    if svals[-1] < RANK_RTOL * svals[0]:
        raise RankDeficient("raw design is column rank deficient")
    k_tilde = (u * sign_vector[:ep.n, None]).T @ u
    k_tilde = (k_tilde + k_tilde.T) / 2.0
    return PerturbationOperators(
        k=k, k_tilde=k_tilde,
        k_norm=float(np.max(np.abs(np.linalg.eigvalsh(k)))),
        k_tilde_norm=float(np.max(np.abs(np.linalg.eigvalsh(k_tilde)))))
