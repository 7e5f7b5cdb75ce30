"""Boundary verification and solution certificates.

The verifier is the contract: a solution is accepted when the pairing
Re(nu * f) attains the boundary target nontangentially at a sufficient
fraction of probe vertices.  Probes run along Stolz paths at several
apertures; a vertex passes when every aperture's estimate lands within
tolerance and its approach sequence is flagged converged.

Vertices within delta of a jump of the data, of the argument cut, or of
a homogeneous pole are excluded and annotated; everything is recorded
per vertex in a report with a fixed column order.

Also here: radial attainment tables (boundary values of u and Neumann
difference quotients), five-point Laplacian residuals, the numerical
rank certificate for solution families, and chord recovery of u from
its directional derivative.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .boundary_data import BoundaryFunction, TWO_PI, wrap_angle
from .disk_harmonic import (SeriesEvaluator, StolzPath, converged_sequence,
                            default_j_max)
from .errors import ConfigurationError, DataError, DomainError
from .rh_solver import AnalyticSolution

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(12)

DEFAULT_APERTURES = (0.0, 0.5, -0.5, 1.0, -1.0)


# ----------------------------------------------------------------------
# helpers
# ----------------------------------------------------------------------

def disk_grid(n: int = 101, half_width: float = 0.95):
    """Cartesian grid points of the square [-hw, hw]^2 inside the disk."""
    xs = np.linspace(-half_width, half_width, n)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    Z = (X + 1j * Y).ravel()
    return Z[np.abs(Z) < 1.0]


def _wrapped_dist(angles: np.ndarray, centers: Sequence[float]) -> np.ndarray:
    if not centers:
        return np.full(len(angles), np.inf)
    diffs = wrap_angle(angles[:, None] - np.asarray(centers)[None, :])
    return np.min(np.abs(diffs), axis=1)


def _exclusions(angles: np.ndarray, delta: float,
                jump_centers: Sequence[float], cut_centers: Sequence[float],
                pole_centers: Sequence[float]):
    """Exclusion mask and per-vertex reasons, priority jump > cut > pole."""
    cats = (("jump-neighborhood", jump_centers),
            ("cut-neighborhood", cut_centers),
            ("hom-pole-neighborhood", pole_centers))
    n_centers = sum(len(c) for _, c in cats)
    budget = 2.0 * delta * n_centers
    if budget > 0.05 * TWO_PI:
        raise ConfigurationError(
            f"exclusion zones would cover {budget / TWO_PI:.1%} of the "
            f"boundary (> 5%); reduce delta or the number of special points")
    excluded = np.zeros(len(angles), dtype=bool)
    reasons = np.array(["-"] * len(angles), dtype=object)
    for name, centers in cats[::-1]:  # low priority first, high overwrites
        if not centers:
            continue
        hit = _wrapped_dist(angles, centers) <= delta
        excluded |= hit
        reasons[hit] = name
    return excluded, reasons, budget


def _solution_specials(hsol, target: BoundaryFunction):
    """(jump, cut, pole) angle lists relevant to a solution/target pair."""
    jumps = set(target.jumps)
    cuts: set[float] = set()
    poles: set[float] = set()
    src = getattr(hsol, "f_source", None)
    if isinstance(src, AnalyticSolution):
        if src.phi is not None:
            jumps |= set(src.phi.jumps)
        if src.A.winding:
            cuts.add(src.A.cut % TWO_PI)
        jumps |= set(src.alpha.jumps) - cuts
        poles |= set(src.hom_points)
    return sorted(jumps), sorted(cuts), sorted(poles)


def _pairing_series_values(hsol, scales: np.ndarray, V: int) -> np.ndarray:
    """f at z = s * exp(2 pi i v / V), shape (len(scales), V)."""
    src = getattr(hsol, "f_source", None)
    if isinstance(src, AnalyticSolution):
        return src.f_on_scales(scales, V)
    fser = hsol.F.derivative()
    return fser.eval_on_rays(np.asarray(scales, dtype=complex), V)


# ----------------------------------------------------------------------
# report
# ----------------------------------------------------------------------

REPORT_COLUMNS = ("angle", "target", "estimate", "error",
                  "converged", "excluded", "reason")


@dataclass
class VerificationReport:
    angles: np.ndarray
    target: np.ndarray
    estimate: np.ndarray
    error: np.ndarray
    converged: np.ndarray
    excluded: np.ndarray
    reasons: np.ndarray
    pass_fraction: float
    residual_stats: tuple[float, float]
    settings: dict
    notes: list[str] = field(default_factory=list)

    def serialize(self) -> str:
        lines = ["# rhbvp verification report"]
        lines.append("# settings: " + json.dumps(self.settings, sort_keys=True))
        for note in self.notes:
            lines.append("# note: " + note)
        lines.append(",".join(REPORT_COLUMNS))
        for i in range(len(self.angles)):
            lines.append(
                f"{self.angles[i]:.17g},{self.target[i]:.17g},"
                f"{self.estimate[i]:.17g},{self.error[i]:.17g},"
                f"{int(self.converged[i])},{int(self.excluded[i])},"
                f"{self.reasons[i]}")
        lines.append(f"# pass_fraction = {self.pass_fraction:.17g}")
        lines.append(f"# residual_max = {self.residual_stats[0]:.17g}")
        lines.append(f"# residual_mean = {self.residual_stats[1]:.17g}")
        return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict:
    """Inverse of VerificationReport.serialize, for round-trip checks."""
    settings = {}
    notes = []
    rows = []
    tail = {}
    for line in text.splitlines():
        if line.startswith("# settings: "):
            settings = json.loads(line[len("# settings: "):])
        elif line.startswith("# note: "):
            notes.append(line[len("# note: "):])
        elif line.startswith("# ") and "=" in line:
            key, val = line[2:].split("=", 1)
            tail[key.strip()] = float(val)
        elif line and not line.startswith("#") and not line.startswith("angle,"):
            parts = line.split(",")
            rows.append((float(parts[0]), float(parts[1]), float(parts[2]),
                         float(parts[3]), bool(int(parts[4])),
                         bool(int(parts[5])), parts[6]))
    return {"settings": settings, "notes": notes, "rows": rows, **tail}


# ----------------------------------------------------------------------
# the verifier
# ----------------------------------------------------------------------

def verify_solution(hsol, target: BoundaryFunction | None = None,
                    V: int = 500, tol: float = 1e-3, delta: float = 1e-2,
                    apertures: Sequence[float] = DEFAULT_APERTURES,
                    with_radial: bool = True,
                    laplacian_points: np.ndarray | None = None) -> VerificationReport:
    """Certify that Re(nu f) attains the target nontangentially.

    pass_fraction is taken over non-excluded vertices whose approach
    sequences converged at every aperture; a vertex passes when all
    aperture estimates are within tol of the target.
    """
    target = target if target is not None else hsol.phi
    if target is None:
        raise ConfigurationError("verification requires a boundary target")
    if V < 8:
        raise ConfigurationError(f"V must be at least 8, got {V}")
    src = getattr(hsol, "f_source", None)
    nu = hsol.nu or (src.nu if isinstance(src, AnalyticSolution) else None)
    if nu is None:
        from .neumann import disk_inner_normal
        nu = disk_inner_normal(max(target.N, 16)).field

    angles = TWO_PI * np.arange(V) / V
    targets = np.asarray(target.evaluate(angles), dtype=float)
    nu_vals = np.asarray(nu.base.evaluate(angles), dtype=complex)

    N = src.N if isinstance(src, AnalyticSolution) else 1024
    j_max = default_j_max(N)
    paths = [StolzPath(angle=0.0, aperture=k, j_min=3, j_max=j_max)
             for k in apertures]
    scale_list = [p.scales for p in paths]
    all_scales = np.concatenate(scale_list)
    fvals = _pairing_series_values(hsol, all_scales, V)

    est_per_ap = []
    conv_per_ap = []
    err_per_ap = []
    off = 0
    for sc in scale_list:
        K = len(sc)
        block = (nu_vals[None, :] * fvals[off:off + K]).real  # (K, V)
        off += K
        est_per_ap.append(block[-1])
        conv_per_ap.append(converged_sequence(block.T, tol))
        err_per_ap.append(np.abs(block[-1] - targets))
    est = est_per_ap[0]
    conv = np.logical_and.reduce(conv_per_ap)
    err = np.max(err_per_ap, axis=0)

    jumps, cuts, poles = _solution_specials(hsol, target)
    excluded, reasons, budget = _exclusions(angles, delta, jumps, cuts, poles)

    denom = (~excluded) & conv
    ok_per_ap = [e <= tol for e in err_per_ap]
    passed = denom & np.logical_and.reduce(ok_per_ap)
    pass_fraction = float(passed.sum() / denom.sum()) if denom.any() else 0.0

    agree = np.logical_and.reduce(
        [ok == ok_per_ap[0] for ok in ok_per_ap])
    agreement = float(np.mean(agree[denom])) if denom.any() else 1.0

    notes = list(getattr(hsol, "notes", []))
    if not denom.any():
        notes.append("no vertex both converged and non-excluded; "
                     "pass_fraction reported as 0")

    settings = {
        "V": V, "tol": tol, "delta": delta,
        "apertures": list(map(float, apertures)),
        "N": int(N), "j_max": int(j_max),
        "excluded_count": int(excluded.sum()),
        "excluded_measure": float(budget),
        "aperture_agreement": agreement,
        "converged_fraction": float(np.mean(conv[~excluded]))
        if (~excluded).any() else 0.0,
    }

    if with_radial and getattr(hsol, "conformal_map", None) is None \
            and isinstance(src, AnalyticSolution):
        table = radial_u_table(hsol, V=V, tol=tol, delta=delta)
        settings["radial_flag_fraction"] = table.flag_fraction
        settings["radial_quotient_fraction_1e-2"] = float(np.mean(
            np.abs(table.quotient_est[table.valid] - targets[table.valid]) <= 1e-2))
        settings["u_boundary_range"] = [float(np.min(table.u_boundary)),
                                        float(np.max(table.u_boundary))]

    if laplacian_points is None:
        laplacian_points = disk_grid(21, 0.9)
    if getattr(hsol, "conformal_map", None) is None and len(laplacian_points):
        stats = laplacian_residual(hsol.u, laplacian_points)
        residual_stats = (stats.max_residual, stats.mean_residual)
    else:
        residual_stats = (float("nan"), float("nan"))

    return VerificationReport(
        angles=angles, target=targets, estimate=est, error=err,
        converged=conv, excluded=excluded, reasons=reasons,
        pass_fraction=pass_fraction, residual_stats=residual_stats,
        settings=settings, notes=notes)


# ----------------------------------------------------------------------
# radial attainment and Neumann quotients
# ----------------------------------------------------------------------

@dataclass
class RadialTable:
    """u along rays at dyadic depths, its boundary values, and quotients.

    u_edges[k, v] is u at radius edges[k] along the ray of vertex v;
    u_boundary is the deepest value (radius 1 - 2^-j_deep), the numerical
    nontangential boundary value of u.  quotient_est holds the Neumann
    difference quotient (u(r_j) - u_boundary)/(1 - r_j) at the deepest
    quotient level, which attains the boundary data where u does.
    """

    angles: np.ndarray
    edges: np.ndarray
    u_edges: np.ndarray
    u_boundary: np.ndarray
    flags: np.ndarray
    quotient_est: np.ndarray
    quotient_conv: np.ndarray
    excluded: np.ndarray
    flag_fraction: float

    @property
    def valid(self) -> np.ndarray:
        return (~self.excluded) & self.flags


def radial_u_table(hsol, V: int = 500, tol: float = 1e-3, delta: float = 1e-2,
                   j_flag: tuple[int, int] = (3, 12),
                   j_quot: tuple[int, int] = (3, 16),
                   j_deep: int = 34, with_quotients: bool = True) -> RadialTable:
    """Integrate du/dr = Re(e^{i theta} f) along V rays with Gauss panels.

    Panels are dyadically graded toward the boundary so the cumulative
    values converge even when f is unbounded at the rim (integrable
    singularities).  edges[j] = 1 - 2^-j for j >= 3.
    """
    if getattr(hsol, "conformal_map", None) is not None:
        raise ConfigurationError("radial tables are disk-native; verify "
                                 "transplanted solutions via the pairing")
    angles = TWO_PI * np.arange(V) / V
    edges = np.concatenate([[0.0, 0.5, 0.75],
                            1.0 - 2.0 ** (-np.arange(3, j_deep + 1, dtype=float))])
    mids = 0.5 * (edges[1:] + edges[:-1])
    halfs = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mids[:, None] + halfs[:, None] * _GAUSS_X[None, :]).ravel()

    fvals = _pairing_series_values(hsol, nodes, V)  # (P*12, V)
    phase = np.exp(1j * angles)[None, :]
    integrand = (phase * fvals).real
    P = len(mids)
    panel_int = (integrand.reshape(P, 12, V) * _GAUSS_W[None, :, None]).sum(axis=1)
    panel_int *= halfs[:, None]
    u_edges = np.concatenate([np.zeros((1, V)), np.cumsum(panel_int, axis=0)])
    u_edges += getattr(hsol, "d0", 0.0)

    u_boundary = u_edges[-1]
    lo, hi = j_flag
    flags = converged_sequence(u_edges[lo:hi + 1].T, tol)

    target = hsol.phi
    jumps, cuts, poles = _solution_specials(hsol, target if target is not None
                                            else BoundaryFunction(
                                                samples=np.zeros(16)))
    excluded, _, _ = _exclusions(angles, delta, jumps, cuts, poles)

    ql, qh = j_quot
    if with_quotients:
        depths = 2.0 ** (-np.arange(ql, qh + 1, dtype=float))
        quots = (u_edges[ql:qh + 1] - u_boundary[None, :]) / depths[:, None]
        quotient_est = quots[-1]
        quotient_conv = converged_sequence(quots.T, max(tol, 1e-2))
    else:
        quotient_est = np.full(V, np.nan)
        quotient_conv = np.zeros(V, dtype=bool)

    valid_mask = ~excluded
    flag_fraction = float(np.mean(flags[valid_mask])) if valid_mask.any() else 0.0
    return RadialTable(angles=angles, edges=edges, u_edges=u_edges,
                       u_boundary=u_boundary, flags=flags,
                       quotient_est=quotient_est, quotient_conv=quotient_conv,
                       excluded=excluded, flag_fraction=flag_fraction)


# ----------------------------------------------------------------------
# interior certificates
# ----------------------------------------------------------------------

@dataclass
class LaplacianStats:
    max_residual: float
    mean_residual: float
    n_points: int
    n_skipped: int


def laplacian_residual(u: Callable, points: np.ndarray, h: float = 1e-3,
                       contains: Callable | None = None) -> LaplacianStats:
    """Five-point Laplacian residual of u at interior points.

    Points whose stencil leaves the domain are skipped and counted.  For
    an exactly harmonic u generated by a power series F the residual is
    (h^2/6) Re F'''' + O(h^4): fourth-derivative curvature, not noise, so
    it is small only away from boundary singularities of the data.
    """
    z = np.asarray(points, dtype=complex).ravel()
    if contains is None:
        inside = lambda w: np.abs(w) < 1.0
    else:
        inside = contains
    stencil = np.array([h, -h, 1j * h, -1j * h])
    ok = np.ones(len(z), dtype=bool)
    for s in stencil:
        ok &= inside(z + s)
    zin = z[ok]
    if len(zin) == 0:
        return LaplacianStats(float("nan"), float("nan"), 0, int(len(z)))
    acc = -4.0 * np.asarray(u(zin), dtype=float)
    for s in stencil:
        acc = acc + np.asarray(u(zin + s), dtype=float)
    res = np.abs(acc) / (h * h)
    return LaplacianStats(float(np.max(res)), float(np.mean(res)),
                          int(len(zin)), int(len(z) - len(zin)))


def lattice_laplacian_stats(U: np.ndarray, dx: float) -> tuple[float, float]:
    """Five-point residual on a stored grid, NaN-aware (for CSV round trips)."""
    core = U[1:-1, 1:-1]
    lap = (U[2:, 1:-1] + U[:-2, 1:-1] + U[1:-1, 2:] + U[1:-1, :-2]
           - 4.0 * core) / (dx * dx)
    good = np.isfinite(lap)
    if not np.any(good):
        return float("nan"), float("nan")
    vals = np.abs(lap[good])
    return float(np.max(vals)), float(np.mean(vals))


@dataclass
class DimensionCertificate:
    sigma_min: float
    singular_values: np.ndarray
    n_rows: int
    n_points: int
    notes: list[str] = field(default_factory=list)


def certificate_points(M: int = 64) -> np.ndarray:
    """Deterministic well-spread interior points (golden-angle spiral)."""
    m = np.arange(M)
    r = 0.15 + 0.75 * (m + 0.5) / M
    gamma = np.pi * (3.0 - np.sqrt(5.0))
    return r * np.exp(1j * gamma * m)


def dimension_certificate(rows: Sequence[Callable],
                          points: np.ndarray | None = None) -> DimensionCertificate:
    """Smallest singular value of the row-normalized value matrix.

    Each row is one candidate solution evaluated at the sample points;
    sigma_min bounded away from 0 certifies linear independence of the
    family at the sampled resolution.
    """
    if len(rows) < 2:
        raise ConfigurationError("dimension certificate needs at least 2 rows")
    pts = certificate_points() if points is None else np.asarray(points,
                                                                 dtype=complex)
    A = np.empty((len(rows), len(pts)))
    notes = []
    for i, fn in enumerate(rows):
        A[i] = np.asarray(fn(pts), dtype=float)
        nrm = np.linalg.norm(A[i])
        if nrm < 1e-300:
            notes.append(f"row {i} is numerically zero")
            return DimensionCertificate(0.0, np.zeros(len(rows)), len(rows),
                                        len(pts), notes)
        A[i] /= nrm
    svals = np.linalg.svd(A, compute_uv=False)
    return DimensionCertificate(float(svals[-1]), svals, len(rows), len(pts),
                                notes)


def chord_recovery(hsol, z0: complex, z1: complex,
                     panels: int = 6) -> tuple[float, float]:
    """Recover u(z1) from u(z0) plus the chord integral of the pairing.

    u(z1) = u(z0) + |z1 - z0| * int_0^1 Re(e * f(z0 + t (z1 - z0))) dt
    with e the unit chord direction; when e equals the field nu along the
    chord the integrand is the attained boundary pairing.  Returns
    (recovered, direct).
    """
    z0 = complex(z0)
    z1 = complex(z1)
    if abs(z0) >= 1.0 or abs(z1) >= 1.0:
        raise DomainError("chord endpoints must lie inside the disk")
    span = z1 - z0
    if abs(span) == 0:
        raise DataError("chord endpoints coincide")
    e = span / abs(span)
    edges = np.linspace(0.0, 1.0, panels + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    halfs = 0.5 * (edges[1:] - edges[:-1])
    t = (mids[:, None] + halfs[:, None] * _GAUSS_X[None, :]).ravel()
    pts = z0 + t * span
    f_at = hsol.f(pts) if hasattr(hsol, "f") else hsol.F.derivative()(pts)
    vals = (e * np.asarray(f_at)).real.reshape(panels, 12)
    integral = float(np.sum(vals * _GAUSS_W[None, :] * halfs[:, None]))
    recovered = float(hsol.u(np.array([z0]))[0].real if np.ndim(hsol.u(z0)) else
                      hsol.u(z0)) + abs(span) * integral
    direct = float(hsol.u(z1))
    return recovered, direct
