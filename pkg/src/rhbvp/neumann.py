"""Neumann problems as directional problems with the inner normal field.

On the unit disk the inner normal at exp(i*theta) is -exp(i*theta)
exactly, a winding-one direction field; grad u . n -> phi is then the
(possibly nonclassical) Neumann problem.  No compatibility integral is
required: when the classical condition integral phi ds = 0 fails, the
solver still produces a solution with nontangential boundary derivative
phi a.e., and an informational note records the incompatibility.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary_data import BoundaryFunction, DirectionField, grid_nodes
from .direction_solver import HarmonicSolution, solve_directional
from .errors import OrientationError, ParametrizationError
from .rh_solver import SolverParams


@dataclass(frozen=True)
class NormalField:
    """Inner normal direction field along a boundary, with provenance."""

    field: DirectionField
    provenance: str = "disk"

    @property
    def N(self) -> int:
        return self.field.N


def disk_inner_normal(N: int, cut: float = 0.0) -> NormalField:
    """Inner normal of the unit disk: exactly -exp(i*theta_j) at the nodes."""
    samples = -np.exp(1j * grid_nodes(N))
    return NormalField(DirectionField.from_samples(samples, cut=cut),
                       provenance="disk")


def inner_normal(points: np.ndarray, derivs: np.ndarray,
                 interior_point: complex = 0.0, closed: bool = True) -> np.ndarray:
    """Inner normal samples along an arc-length parametrized boundary.

    points and derivs are zeta(s_j) and zeta'(s_j) at uniform parameter
    nodes.  Requires unit speed, counterclockwise traversal of closed
    curves, and resolves the normal side by a sign check against the
    interior point.
    """
    points = np.asarray(points, dtype=complex)
    derivs = np.asarray(derivs, dtype=complex)
    speed = np.abs(derivs)
    dev = float(np.max(np.abs(speed - 1.0)))
    if dev > 1e-8:
        raise ParametrizationError(
            f"boundary parametrization is not by arc length "
            f"(max | |zeta'| - 1 | = {dev:.3e})")
    tau = derivs / speed
    if closed:
        rel = points - interior_point
        incr = np.angle(np.roll(rel, -1) / rel)
        wind = np.sum(incr) / (2 * np.pi)
        if abs(wind - 1.0) > 0.25:
            raise OrientationError(
                f"closed boundary must wind once counterclockwise around the "
                f"interior point (winding {wind:+.3f})")
    for cand in (1j * tau, -1j * tau):
        inward = ((interior_point - points) * np.conj(cand)).real
        if np.all(inward > 0):
            return cand
    raise OrientationError(
        "neither normal candidate points consistently toward the interior")


def compatibility_integral(phi: BoundaryFunction) -> float:
    """integral phi ds over the unit circle (trapezoid = exact node mean)."""
    return float(2.0 * np.pi * np.mean(np.asarray(phi.samples, dtype=float)))


def solve_neumann(phi: BoundaryFunction, params: SolverParams | None = None,
                  domain=None, cut: float | None = None) -> HarmonicSolution:
    """Neumann problem grad u . n -> phi on the disk or a mapped domain.

    domain None or "disk" solves on the unit disk; a ConformalMap solves
    on its image by transplantation.
    """
    params = params or SolverParams(N=phi.N)
    if domain is not None and domain != "disk":
        from .jordan_domain import transplant_neumann
        return transplant_neumann(domain, phi, params)
    normal = disk_inner_normal(phi.N, cut=params.cut if cut is None else cut)
    hs = solve_directional(normal.field, phi, params)
    flux = compatibility_integral(phi)
    scale = 1.0 + float(np.max(np.abs(phi.samples)))
    if abs(flux) > 1e-10 * scale:
        hs.notes.append(
            f"compatibility integral of the data is {flux:.6g}, not 0: the "
            f"classical Neumann problem is insolvable; returning the "
            f"nonclassical solution (boundary derivative holds a.e. "
            f"nontangentially)")
    return hs


def check_radial_limits(hsol: HarmonicSolution, V: int = 500,
                        tol: float = 1e-3, delta: float = 1e-2):
    """Radial convergence certificate for u; see verify.radial_u_table."""
    from .verify import radial_u_table
    return radial_u_table(hsol, V=V, tol=tol, delta=delta)


def check_normal_derivative(hsol: HarmonicSolution, V: int = 500,
                            tol: float = 1e-2, delta: float = 1e-2):
    """Difference-quotient certificate that -du/dr attains the Neumann data.

    Returns the radial table; quotient fields compare (u(r) - u(1-)) / (1-r)
    against the boundary data at each vertex.
    """
    from .verify import radial_u_table
    return radial_u_table(hsol, V=V, tol=tol, delta=delta, with_quotients=True)
