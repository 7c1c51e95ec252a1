"""Figure rendering for the report-producing commands (Agg, file output)."""

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .eoa import boundary_polyline  # noqa: E402

_PNG_META = {"Software": "spsregion"}


def _save(fig, path):
    fig.savefig(path, dpi=150, bbox_inches="tight", metadata=_PNG_META)
    plt.close(fig)


def save_region_figure(ellipsoid, path, label=None):
    """Boundary of a single 2-d region with its center marked."""
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    poly = boundary_polyline(ellipsoid)
    closed_x = list(poly[:, 0]) + [poly[0, 0]]
    closed_y = list(poly[:, 1]) + [poly[0, 1]]
    ax.plot(closed_x, closed_y, "-", lw=1.5, label=label or "region boundary")
    ax.plot([ellipsoid.center[0]], [ellipsoid.center[1]], "k+", ms=10,
            label="center")
    ax.set_xlabel("theta_1")
    ax.set_ylabel("theta_2")
    ax.legend(loc="best", fontsize=8)
    ax.set_aspect("equal", adjustable="datalim")
    ax.grid(alpha=0.3)
    _save(fig, path)


def save_sweep_figure(entries, path):
    """Overlaid boundaries for each finite-radius sweep entry."""
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    for entry in entries:
        if math.isinf(entry.ellipsoid.radius_sq):
            continue
        poly = boundary_polyline(entry.ellipsoid)
        closed_x = list(poly[:, 0]) + [poly[0, 0]]
        closed_y = list(poly[:, 1]) + [poly[0, 1]]
        ax.plot(closed_x, closed_y, "-", lw=1.5,
                label=f"lambda = {entry.lam:g}")
    if entries:
        c = entries[0].ellipsoid.center
        ax.plot([c[0]], [c[1]], "k+", ms=8)
    ax.set_xlabel("theta_1")
    ax.set_ylabel("theta_2")
    ax.legend(loc="best", fontsize=8)
    ax.set_aspect("equal", adjustable="datalim")
    ax.grid(alpha=0.3)
    _save(fig, path)


def save_table_figure(report, path):
    """Median sizes and bounds against n on log-log axes."""
    fig, ax = plt.subplots(figsize=(5.5, 4.2))
    ns = [row["n"] for row in report.rows]
    series = [("emp_sps_eoa", "o-"), ("emp_rr_sps_eoa", "s-"),
              ("th_sps_eoa", "^--"), ("th_rr_sps_eoa", "v--"),
              ("emp_asymptotic", "d-")]
    for key, style in series:
        vals = [row[key] for row in report.rows]
        if all(math.isfinite(v) for v in vals):
            ax.loglog(ns, vals, style, ms=4, lw=1.2, label=key)
    ax.set_xlabel("n")
    ax.set_ylabel("median squared radius")
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3, which="both")
    _save(fig, path)


def save_coverage_figure(result, p_target, path):
    """Observed coverage with its interval against the nominal level."""
    fig, ax = plt.subplots(figsize=(4.0, 3.6))
    lo, hi = result.ci
    ax.errorbar([0.0], [result.coverage],
                yerr=[[result.coverage - lo], [hi - result.coverage]],
                fmt="o", capsize=6, label="observed")
    ax.axhline(p_target, color="k", ls="--", lw=1, label=f"nominal {p_target:g}")
    ax.set_xlim(-0.6, 0.6)
    ax.set_xticks([])
    ax.set_ylabel("coverage")
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3, axis="y")
    _save(fig, path)
