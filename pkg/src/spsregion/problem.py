"""Regression data model, ridge extension, Gram matrices, and estimates.

The extended problem stacks sqrt(lambda) * I under the raw regressors and
zero-pads the outputs; all Gram matrices are normalized by the ORIGINAL
sample count n, not the stacked row count.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import (DimensionMismatch, DomainError, NonPositiveLambda,
                     SingularGram)
from .linalg import min_eigval, spd_solve, sym_eig

_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class RegressionData:
    """Raw regressors (n x d) and outputs (n)."""

    regressors: np.ndarray
    outputs: np.ndarray

    def __post_init__(self):
        phi = np.atleast_2d(np.asarray(self.regressors, dtype=float))
        y = np.asarray(self.outputs, dtype=float).ravel()
        if phi.ndim != 2 or phi.shape[0] < 1 or phi.shape[1] < 1:
            raise DimensionMismatch(f"regressors must be n x d, got shape {phi.shape}")
        if not np.all(np.isfinite(phi)):
            raise DomainError("regressors contain non-finite entries")
        if not np.all(np.isfinite(y)):
            raise DomainError("outputs contain non-finite entries")
        if y.shape[0] != phi.shape[0]:
            raise DimensionMismatch(
                f"outputs length {y.shape[0]} != sample count {phi.shape[0]}")
        phi.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "regressors", phi)
        object.__setattr__(self, "outputs", y)

    @property
    def n(self):
        return self.regressors.shape[0]

    @property
    def d(self):
        return self.regressors.shape[1]


def expected_header(d):
    return [f"phi{j}" for j in range(1, d + 1)] + ["y"]


def load_csv(path):
    """Read RegressionData from CSV with header phi1,...,phid,y.

    Error messages carry 1-based line numbers so the CLI can point at the
    offending row.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DomainError(f"{path}: line 1: empty file, header row required")
        header = [h.strip() for h in header]
        if len(header) < 2 or header[-1] != "y":
            raise DomainError(
                f"{path}: line 1: header must be phi1,...,phiD,y (got {header})")
        d = len(header) - 1
        if header != expected_header(d):
            raise DomainError(
                f"{path}: line 1: header must be {expected_header(d)} (got {header})")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or (len(rec) == 1 and not rec[0].strip()):
                continue
            if len(rec) != d + 1:
                raise DimensionMismatch(
                    f"{path}: line {lineno}: expected {d + 1} columns, got {len(rec)}")
            vals = []
            for col, cell in enumerate(rec, start=1):
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise DomainError(
                        f"{path}: line {lineno}: non-numeric value {cell!r} "
                        f"in column {col}") from None
            rows.append(vals)
    if not rows:
        raise DomainError(f"{path}: no data rows")
    arr = np.asarray(rows, dtype=float)
    return RegressionData(arr[:, :d], arr[:, d])


def save_csv(data, path):
    """Write RegressionData as CSV with the phi1,...,phid,y header."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(expected_header(data.d))
        for i in range(data.n):
            writer.writerow([repr(float(v)) for v in data.regressors[i]] +
                            [repr(float(data.outputs[i]))])


@dataclass(frozen=True)
class ExtendedProblem:
    """Stacked design for a given ridge parameter (lam = 0 means unextended).

    phi:     (n + pad) x d stacked regressors, pad = d if lam > 0 else 0
    y:       length n + pad outputs, zero in the padded block
    r_tilde: raw Gram matrix
    r:       regularized Gram r_tilde + lam * I
    r_bar:   r / n with n the original sample count
    """

    phi: np.ndarray
    y: np.ndarray
    lam: float
    r_tilde: np.ndarray
    r: np.ndarray
    r_bar: np.ndarray
    n: int
    d: int

    @property
    def pad(self):
        """Rows appended below the raw design (d for ridge, 0 for plain)."""
        return self.phi.shape[0] - self.n


def _grams(phi_raw, lam, n):
    r_tilde = phi_raw.T @ phi_raw
    r_tilde = (r_tilde + r_tilde.T) / 2.0
    r = r_tilde + lam * np.eye(phi_raw.shape[1])
    return r_tilde, r, r / n


def extend(data, lam):
    """Build the ridge-extended problem: phi over sqrt(lam)*I, zero-padded y."""
    lam = float(lam)
    if not np.isfinite(lam) or lam <= 0:
        raise NonPositiveLambda(f"ridge parameter must be > 0, got {lam}")
    n, d = data.n, data.d
    phi = np.vstack([data.regressors, np.sqrt(lam) * np.eye(d)])
    y = np.concatenate([data.outputs, np.zeros(d)])
    r_tilde, r, r_bar = _grams(data.regressors, lam, n)
    return ExtendedProblem(phi, y, lam, r_tilde, r, r_bar, n, d)


def plain_problem(data):
    """lam = 0 variant on the unextended matrices (least-squares route).

    Requires an invertible raw Gram matrix.
    """
    n, d = data.n, data.d
    r_tilde, r, r_bar = _grams(data.regressors, 0.0, n)
    w = sym_eig(r_tilde)[0]
    if w[0] < _RANK_RTOL * max(w[-1], 1e-300):
        raise SingularGram(
            f"raw Gram matrix singular within tolerance (eigenvalues {w})")
    return ExtendedProblem(data.regressors.copy(), data.outputs.copy(),
                           0.0, r_tilde, r, r_bar, n, d)


def ridge_estimate(ep):
    """Estimate solving the regularized normal equations r @ theta = phi' y."""
    return spd_solve(ep.r, ep.phi.T @ ep.y)


def ls_estimate(data):
    """Plain least-squares estimate on the unextended problem."""
    return ridge_estimate(plain_problem(data))
