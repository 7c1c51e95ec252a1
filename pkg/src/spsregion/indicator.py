"""Sign-perturbation state and the exact-coverage membership indicator.

A candidate theta is accepted when the squared norm of the unperturbed
whitened residual sum ranks low enough among its m-1 sign-flipped copies;
ties are broken by a random permutation so the rank is almost-surely
well-defined and the acceptance probability is exactly 1 - q/m.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, IndexOutOfRange, IrrationalConfidence
from .linalg import sym_inv_sqrt

DENOMINATOR_CAP = 10**6
TIE_TOL = 1e-12


@dataclass(frozen=True)
class SpsState:
    """Immutable perturbation state: integers (m, q), signs, tie-break order.

    signs is (m-1) x n of +-1; row i-1 belongs to perturbation i. pi is a
    permutation of {0..m-1}. Everything regenerates from (m, q, n, seed).
    """

    m: int
    q: int
    n: int
    seed: int
    signs: np.ndarray
    pi: np.ndarray

    @property
    def p(self):
        return 1.0 - self.q / self.m

    def to_dict(self):
        """JSON-ready form; signs and pi regenerate from the seed."""
        return {"m": self.m, "q": self.q, "n": self.n, "seed": self.seed}

    @classmethod
    def from_dict(cls, rec):
        return _generate(int(rec["m"]), int(rec["q"]), int(rec["n"]),
                         int(rec["seed"]))


def _stream(seed, idx):
    """Counter-based substream for (seed, idx); idx 0 is the permutation."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, idx))))


def _generate(m, q, n, seed):
    signs = np.empty((m - 1, n))
    for i in range(1, m):
        signs[i - 1] = _stream(seed, i).integers(0, 2, size=n) * 2.0 - 1.0
    pi = _stream(seed, 0).permutation(m)
    signs.setflags(write=False)
    pi.setflags(write=False)
    return SpsState(m, q, n, seed, signs, pi)


def confidence_integers(p):
    """Smallest (m, q) with q = m(1-p) a positive integer.

    Accepts a float or Fraction confidence level; a float must agree with a
    rational of denominator <= 10**6, else IrrationalConfidence.
    """
    if isinstance(p, Fraction):
        frac = p
        if frac.denominator > DENOMINATOR_CAP:
            raise IrrationalConfidence(
                f"confidence level {p} needs denominator {frac.denominator} "
                f"> {DENOMINATOR_CAP}")
    else:
        p = float(p)
        if not 0.0 < p < 1.0:
            raise DomainError(f"confidence level must be in (0,1), got {p}")
        frac = Fraction(p).limit_denominator(DENOMINATOR_CAP)
        if float(frac) != p:
            raise IrrationalConfidence(
                f"confidence level {p!r} is not representable with "
                f"denominator <= {DENOMINATOR_CAP}")
    if not 0 < frac < 1:
        raise DomainError(f"confidence level must be in (0,1), got {frac}")
    # p = a/b in lowest terms: b | m is forced, so m = b is minimal
    m = frac.denominator
    q = frac.denominator - frac.numerator
    return m, q


def sps_init(p, n, rng_seed):
    """Draw the (m-1) x n fair sign rows and the tie-break permutation."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    m, q = confidence_integers(p)
    return _generate(m, q, n, int(rng_seed))


def sign_matrix(state, i, pad=0):
    """Diagonal of the i-th perturbation as a length-(n + pad) sign vector.

    i = 0 is the unperturbed identity; the trailing pad block (the ridge
    extension rows) is always +1.
    """
    if not 0 <= i < state.m:
        raise IndexOutOfRange(f"perturbation index {i} outside [0, {state.m - 1}]")
    out = np.ones(state.n + pad)
    if i > 0:
        out[:state.n] = state.signs[i - 1]
    return out


@dataclass(frozen=True)
class SpsDecision:
    rank: int
    accepted: bool


def compute_s(ep, state, theta, i):
    """Whitened, sign-flipped residual sum (1/n) rbar^{-1/2} phi' D_i eps."""
    if state.n != ep.n:
        raise DomainError(f"state built for n={state.n}, problem has n={ep.n}")
    eps = ep.y - ep.phi @ np.asarray(theta, dtype=float)
    flipped = eps * sign_matrix(state, i, ep.pad)
    return sym_inv_sqrt(ep.r_bar) @ (ep.phi.T @ flipped) / ep.n


def _rank_of_reference(values, pi):
    """1 + count of perturbed values the reference strictly dominates.

    Dominance: values differing by more than TIE_TOL compare by value;
    within-tolerance pairs compare by permutation position.
    """
    v0 = values[0]
    rank = 1
    for i in range(1, len(values)):
        diff = v0 - values[i]
        if abs(diff) <= TIE_TOL:
            if pi[0] > pi[i]:
                rank += 1
        elif diff > 0:
            rank += 1
    return rank


def indicator(ep, state, theta):
    """Exact-coverage membership test for a single candidate theta."""
    values = [float(np.dot(s, s))
              for s in (compute_s(ep, state, theta, i) for i in range(state.m))]
    rank = _rank_of_reference(np.asarray(values), state.pi)
    return SpsDecision(rank=rank, accepted=rank <= state.m - state.q)


def indicator_batch(ep, state, thetas):
    """Vectorized indicator over a (G x d) array of candidates.

    Same formulas as the scalar path, evaluated for all candidates at once;
    returns (ranks, accepted) arrays of length G.
    """
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    if state.n != ep.n:
        raise DomainError(f"state built for n={state.n}, problem has n={ep.n}")
    whiten = sym_inv_sqrt(ep.r_bar)
    resid = ep.y[:, None] - ep.phi @ thetas.T          # (n+pad) x G
    values = np.empty((state.m, thetas.shape[0]))
    for i in range(state.m):
        sgn = sign_matrix(state, i, ep.pad)
        s = whiten @ (ep.phi.T @ (resid * sgn[:, None])) / ep.n
        values[i] = np.sum(s * s, axis=0)
    diff = values[0][None, :] - values[1:]
    tie = np.abs(diff) <= TIE_TOL
    beats = np.where(tie, (state.pi[0] > state.pi[1:])[:, None], diff > 0)
    ranks = 1 + np.sum(beats, axis=0)
    return ranks, ranks <= state.m - state.q
