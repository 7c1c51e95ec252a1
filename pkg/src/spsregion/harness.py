"""Monte Carlo harness: FIR data generation, coverage and size experiments.

The data-generating process is a second-order FIR system driven by a filtered
Gaussian input: U_t = a U_{t-1} + c1 V_t + c2 V_{t-1} + c3 V_{t-2} with
V_t ~ N(0,1), regressors phi_t = (U_{t-1}, U_{t-2}), and outputs
Y_t = phi_t' b_star + W_t. The filter is warm-started with a 100-step
burn-in that is discarded, so the retained window is effectively stationary.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter
from scipy.stats import chi2

from .bounds import PacBoundInputs, coherence, size_bound
from .eoa import Ellipsoid, build_eoa, ellipsoid_contains
from .errors import DomainError, SampleTooSmall, SingularGram
from .indicator import confidence_integers, indicator, sps_init
from .linalg import min_eigval
from .problem import RegressionData, extend, plain_problem, ridge_estimate

BURN_IN = 100
Z_99 = 2.5758293035489004  # two-sided 99% normal quantile


@dataclass(frozen=True)
class NoiseModel:
    """Symmetric i.i.d. noise family plus its subgaussian proxy sigma."""

    kind: str
    params: tuple
    sigma_proxy: float

    def __post_init__(self):
        if self.sigma_proxy <= 0:
            raise DomainError(f"sigma_proxy must be > 0, got {self.sigma_proxy}")

    @classmethod
    def gaussian(cls, sigma, sigma_proxy=None):
        if sigma <= 0:
            raise DomainError(f"gaussian sigma must be > 0, got {sigma}")
        return cls("gaussian", (float(sigma),),
                   float(sigma_proxy if sigma_proxy is not None else sigma))

    @classmethod
    def laplace(cls, scale, sigma_proxy=None):
        if scale <= 0:
            raise DomainError(f"laplace scale must be > 0, got {scale}")
        proxy = sigma_proxy if sigma_proxy is not None else math.sqrt(2.0) * scale
        return cls("laplace", (float(scale),), float(proxy))

    @classmethod
    def uniform(cls, lo, hi, sigma_proxy=None):
        if not hi > lo:
            raise DomainError(f"need hi > lo, got ({lo}, {hi})")
        if abs(lo + hi) > 1e-12 * max(abs(lo), abs(hi)):
            raise DomainError(f"uniform noise must be symmetric about 0, "
                              f"got ({lo}, {hi})")
        proxy = sigma_proxy if sigma_proxy is not None \
            else (hi - lo) / math.sqrt(12.0)
        return cls("uniform", (float(lo), float(hi)), float(proxy))

    def to_dict(self):
        rec = {"kind": self.kind, "sigma_proxy": self.sigma_proxy}
        if self.kind == "gaussian":
            rec["sigma"] = self.params[0]
        elif self.kind == "laplace":
            rec["scale"] = self.params[0]
        else:
            rec["lo"], rec["hi"] = self.params
        return rec

    @classmethod
    def from_dict(cls, rec):
        kind = rec["kind"]
        proxy = rec.get("sigma_proxy")
        if kind == "gaussian":
            return cls.gaussian(rec["sigma"], proxy)
        if kind == "laplace":
            return cls.laplace(rec["scale"], proxy)
        if kind == "uniform":
            return cls.uniform(rec["lo"], rec["hi"], proxy)
        raise DomainError(f"unknown noise kind {kind!r}")


def _rng(seed):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def sample_noise(model, n, seed):
    """n i.i.d. draws from the model; seed may be an int or a Generator."""
    rng = seed if isinstance(seed, np.random.Generator) else _rng(seed)
    if model.kind == "gaussian":
        return rng.standard_normal(n) * model.params[0]
    if model.kind == "laplace":
        return rng.laplace(0.0, model.params[0], n)
    if model.kind == "uniform":
        return rng.uniform(model.params[0], model.params[1], n)
    raise DomainError(f"unknown noise kind {model.kind!r}")


@dataclass(frozen=True)
class FirConfig:
    """Second-order FIR plant with an ARMA(1,3)-filtered Gaussian input."""

    n: int
    seed: int
    noise: NoiseModel | None = None
    b_star: tuple = (2.0, 2.0)
    a: float = 0.7
    c: tuple = (0.9, 0.5, 0.1)
    unit_input: bool = False

    def __post_init__(self):
        if self.n < 3:
            raise DomainError(f"need n >= 3, got {self.n}")
        if not abs(self.a) < 1:
            raise DomainError(f"input filter must be stable: |a| < 1, got {self.a}")
        if len(self.b_star) != 2 or len(self.c) != 3:
            raise DomainError("b_star must have 2 entries and c must have 3")


@dataclass(frozen=True)
class FirResult:
    data: RegressionData
    theta_star: np.ndarray
    realized_noise: np.ndarray
    inputs: np.ndarray  # U_{-1}..U_{n-1}, the lag window feeding the regressors


def gen_fir(config):
    """Simulate the FIR system; draw order is inputs first, then noise."""
    n = config.n
    rng = _rng(config.seed)
    if config.unit_input:
        u = np.ones(n + 2)
    else:
        v = rng.standard_normal(BURN_IN + n + 2)
        u_all = lfilter(list(config.c), [1.0, -config.a], v)
        u = u_all[BURN_IN:]
    regressors = np.column_stack([u[1:n + 1], u[0:n]])
    if config.noise is None:
        w = np.zeros(n)
    else:
        w = sample_noise(config.noise, n, rng)
    theta_star = np.asarray(config.b_star, dtype=float)
    outputs = regressors @ theta_star + w
    return FirResult(RegressionData(regressors, outputs), theta_star, w, u)


def stationary_input_variance(a, c):
    """Closed-form Var(U) for the ARMA input filter (geometric tail sum)."""
    psi0 = c[0]
    psi1 = a * psi0 + c[1]
    psi2 = a * psi1 + c[2]
    return psi0 ** 2 + psi1 ** 2 + psi2 ** 2 / (1.0 - a * a)


def asymptotic_ellipsoid(data, p):
    """Large-sample baseline: LS center, shape r_tilde/n, chi-square radius."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"confidence level must be in (0,1), got {p}")
    if data.n <= data.d:
        raise SingularGram(f"need n > d for the residual variance "
                           f"(n={data.n}, d={data.d})")
    ep = plain_problem(data)
    theta = ridge_estimate(ep)
    resid = data.outputs - data.regressors @ theta
    sigma_sq = float(resid @ resid) / (data.n - data.d)
    radius = sigma_sq * float(chi2.ppf(p, data.d)) / data.n
    return Ellipsoid(center=theta, shape=ep.r_bar.copy(), radius_sq=radius)


def binomial_ci(successes, trials, z=Z_99):
    """Conservative (worst-case variance) normal-approximation interval."""
    p_hat = successes / trials
    half = z * 0.5 / math.sqrt(trials)
    return (max(0.0, p_hat - half), min(1.0, p_hat + half))


@dataclass(frozen=True)
class CoverageScenario:
    """One coverage Monte Carlo: which region, at what level, on what data."""

    region: str  # indicator | rr-eoa | ls-eoa | asymptotic
    p: float
    n: int
    trials: int
    seed: int
    lam: float = 10.0
    noise: NoiseModel = field(default_factory=lambda: NoiseModel.laplace(1.0))
    b_star: tuple = (2.0, 2.0)

    def __post_init__(self):
        if self.region not in ("indicator", "rr-eoa", "ls-eoa", "asymptotic"):
            raise DomainError(f"unknown region type {self.region!r}")
        if self.trials < 1:
            raise DomainError(f"need trials >= 1, got {self.trials}")


@dataclass(frozen=True)
class CoverageResult:
    coverage: float
    ci: tuple
    trials: int
    successes: int


def _trial_seeds(master, count, streams=2):
    """Deterministic per-trial integer seeds, independent of thread order."""
    state = np.random.SeedSequence(master).generate_state(
        count * streams, dtype=np.uint64)
    return [tuple(int(s) for s in state[i * streams:(i + 1) * streams])
            for i in range(count)]


def _run_trials(fun, count, threads):
    """Evaluate fun(trial_index) for all indices; order-stable gather."""
    if threads is None:
        threads = os.cpu_count() or 1
    if threads <= 1 or count <= 1:
        return [fun(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fun, range(count)))


def coverage_experiment(scenario, threads=None):
    """Fraction of independent trials whose region contains theta_star."""
    seeds = _trial_seeds(scenario.seed, scenario.trials)

    def one_trial(t):
        data_seed, sps_seed = seeds[t]
        fir = gen_fir(FirConfig(n=scenario.n, seed=data_seed,
                                noise=scenario.noise, b_star=scenario.b_star))
        data, theta_star = fir.data, fir.theta_star
        if scenario.region == "asymptotic":
            return ellipsoid_contains(asymptotic_ellipsoid(data, scenario.p),
                                      theta_star)
        state = sps_init(scenario.p, scenario.n, sps_seed)
        if scenario.region == "indicator":
            ep = extend(data, scenario.lam)
            return indicator(ep, state, theta_star).accepted
        if scenario.region == "rr-eoa":
            ep = extend(data, scenario.lam)
        else:  # ls-eoa
            ep = plain_problem(data)
        return ellipsoid_contains(build_eoa(ep, state), theta_star)

    hits = _run_trials(one_trial, scenario.trials, threads)
    successes = int(sum(hits))
    return CoverageResult(coverage=successes / scenario.trials,
                          ci=binomial_ci(successes, scenario.trials),
                          trials=scenario.trials, successes=successes)


@dataclass(frozen=True)
class TableConfig:
    """Empirical-vs-theoretical size comparison over a sample-size grid."""

    n_grid: tuple
    seed: int
    lam: float = 10.0
    s: int = 100
    delta: float = 0.5
    p: float = 0.9
    rho: float = 1.0
    noise: NoiseModel = field(default_factory=lambda: NoiseModel.uniform(-2.0, 2.0))
    b_star: tuple = (2.0, 2.0)

    def __post_init__(self):
        if self.s < 1:
            raise DomainError(f"need s >= 1, got {self.s}")
        if self.lam <= 0:
            raise DomainError(f"table lam must be > 0, got {self.lam}")
        if not self.n_grid:
            raise DomainError("n_grid must be non-empty")


@dataclass(frozen=True)
class ExperimentReport:
    """Per-n medians plus the full run metadata."""

    rows: tuple
    meta: dict

    def to_dict(self):
        """JSON-ready form; non-finite medians use the "inf" sentinel."""
        rows = []
        for r in self.rows:
            rows.append({k: ("inf" if isinstance(v, float) and math.isinf(v)
                             else v) for k, v in r.items()})
        return {"rows": rows, "meta": dict(self.meta)}

    COLUMNS = ("n", "emp_sps_eoa", "emp_rr_sps_eoa", "th_sps_eoa",
               "th_rr_sps_eoa", "emp_asymptotic")

    def to_csv_text(self):
        lines = [",".join(self.COLUMNS)]
        for row in self.rows:
            lines.append(",".join(repr(row[c]) if c != "n" else str(row[c])
                                  for c in self.COLUMNS))
        return "\n".join(lines) + "\n"


def _median(values):
    return float(np.median(np.sort(np.asarray(values, dtype=float))))


def size_table(config, threads=None):
    """Median sizes and bounds per n, uniform noise, per-seed bound inputs."""
    m, q = confidence_integers(config.p)
    ell = float(np.linalg.norm(config.b_star))
    sigma = config.noise.sigma_proxy
    rows = []
    for n in config.n_grid:
        seeds = _trial_seeds((config.seed, int(n)), config.s)

        def one_seed(t, n=n, seeds=seeds):
            data_seed, sps_seed = seeds[t]
            fir = gen_fir(FirConfig(n=n, seed=data_seed, noise=config.noise,
                                    b_star=config.b_star))
            data = fir.data
            state = sps_init(config.p, n, sps_seed)
            ep_rr = extend(data, config.lam)
            emp_rr = build_eoa(ep_rr, state).radius_sq
            emp_ls = build_eoa(plain_problem(data), state).radius_sq
            emp_asym = asymptotic_ellipsoid(data, config.p).radius_sq
            kappa = coherence(data.regressors, config.rho).kappa_empirical
            lam_min = min_eigval(ep_rr.r_tilde)
            common = dict(n=n, d=data.d, delta=config.delta, m=m, q=q,
                          sigma=sigma, ell=ell, kappa=kappa, rho=config.rho)
            try:
                th_rr = size_bound(PacBoundInputs(
                    lam=config.lam, lambda_min_r_tilde=lam_min, **common))
            except SampleTooSmall:
                th_rr = math.inf
            try:
                th_ls = size_bound(PacBoundInputs(lam=0.0, **common))
            except SampleTooSmall:
                th_ls = math.inf
            return emp_ls, emp_rr, th_ls, th_rr, emp_asym

        results = _run_trials(one_seed, config.s, threads)
        cols = list(zip(*results))
        rows.append({
            "n": int(n),
            "emp_sps_eoa": _median(cols[0]),
            "emp_rr_sps_eoa": _median(cols[1]),
            "th_sps_eoa": _median(cols[2]),
            "th_rr_sps_eoa": _median(cols[3]),
            "emp_asymptotic": _median(cols[4]),
        })
    meta = {"lambda": config.lam, "s": config.s, "delta": config.delta,
            "m": m, "q": q, "seeds": config.seed, "p": config.p,
            "rho": config.rho, "ell": ell, "noise": config.noise.to_dict(),
            "b_star": list(config.b_star)}
    return ExperimentReport(rows=tuple(rows), meta=meta)


@dataclass(frozen=True)
class SweepEntry:
    lam: float
    ellipsoid: Ellipsoid


def lambda_sweep(n, lambdas, seed, noise=None, p=0.9, b_star=(2.0, 2.0)):
    """Regions for several ridge parameters on one shared realization.

    The data draw and the perturbation state are fixed across the grid, so
    entries differ only through lam (lam = 0 selects the unextended route).
    """
    if noise is None:
        noise = NoiseModel.laplace(1.0)
    data_seed, sps_seed = _trial_seeds(seed, 1)[0]
    fir = gen_fir(FirConfig(n=n, seed=data_seed, noise=noise, b_star=b_star))
    state = sps_init(p, n, sps_seed)
    entries = []
    for lam in lambdas:
        ep = plain_problem(fir.data) if lam == 0 else extend(fir.data, lam)
        entries.append(SweepEntry(lam=float(lam), ellipsoid=build_eoa(ep, state)))
    return entries
