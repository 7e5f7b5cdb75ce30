"""Harmonic analysis on the unit disk.

Schwarz integral, boundary conjugation, Poisson extension, truncated
power series evaluation, and nontangential (Stolz) boundary limits.

Argument functions produced by measurable_arg carry a winding split
alpha = w*saw + remainder; here the sawtooth part is handled in closed
form (log kernel for the Schwarz integral, -2w*log|2 sin((theta-c)/2)|
for the conjugate) and only the bounded remainder goes through the FFT,
so winding data costs no bandwidth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .boundary_data import (BoundaryFunction, TWO_PI, grid_nodes, sawtooth)
from .errors import (ConfigurationError, DataError, DomainError)

_LOG_TINY = 1e-300  # floor for |2 sin| at the cut node; keeps samples finite


# ----------------------------------------------------------------------
# power series
# ----------------------------------------------------------------------

@dataclass
class SeriesEvaluator:
    """Truncated power series sum c_n z^n on the open unit disk.

    Evaluation is permitted for |z| < 1; beyond radius_cap the truncation
    error is no longer certified and beyond_cap() flags such points.
    """

    coefficients: np.ndarray
    radius_cap: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        if c.ndim != 1 or len(c) == 0:
            raise DataError("series coefficients must be a nonempty 1-d array")
        self.coefficients = c
        if not self.radius_cap:
            self.radius_cap = max(0.5, 1.0 - 8.0 / (2 * len(c)))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) >= 1.0):
            raise DomainError("series evaluation requires |z| < 1")
        return self._horner(z)

    def _horner(self, z):
        c = self.coefficients
        out = np.full(np.shape(z), c[-1], dtype=complex)
        for k in range(len(c) - 2, -1, -1):
            out *= z
            out += c[k]
        return out

    def beyond_cap(self, z) -> np.ndarray:
        return np.abs(np.asarray(z, dtype=complex)) > self.radius_cap

    def derivative(self) -> "SeriesEvaluator":
        c = self.coefficients
        if len(c) == 1:
            return SeriesEvaluator(np.zeros(1, dtype=complex), self.radius_cap)
        n = np.arange(1, len(c))
        return SeriesEvaluator(c[1:] * n, self.radius_cap)

    def integrate(self) -> "SeriesEvaluator":
        """Termwise antiderivative with F(0) = 0."""
        c = self.coefficients
        n = np.arange(1, len(c) + 1)
        return SeriesEvaluator(np.concatenate([[0.0], c / n]), self.radius_cap)

    def eval_on_circle(self, rho: float, M: int, rot: float = 0.0) -> np.ndarray:
        """Values at z = rho*exp(i*(rot + 2*pi*k/M)), k = 0..M-1, via FFT."""
        c = self.coefficients
        n = np.arange(len(c))
        scaled = c * (rho * np.exp(1j * rot)) ** n if rot else c * rho ** n
        return np.fft.ifft(_fold(scaled, M)) * M

    def eval_on_rays(self, scales: np.ndarray, V: int) -> np.ndarray:
        """Values at z = s * exp(2*pi*i*v/V) for each complex scale s.

        Returns an array of shape (len(scales), V).  Used for fast fans
        of Stolz-path points: a path point z_j = zeta_v * s_j shares the
        scale s_j across all V vertices.
        """
        c = self.coefficients
        n = np.arange(len(c))
        out = np.empty((len(scales), V), dtype=complex)
        for i, s in enumerate(np.asarray(scales, dtype=complex)):
            out[i] = np.fft.ifft(_fold(c * s ** n, V)) * V
        return out


def _fold(coeffs: np.ndarray, M: int) -> np.ndarray:
    """Fold c_n into n mod M bins (pad + reshape, no scatter)."""
    L = len(coeffs)
    q = -(-L // M)
    buf = np.zeros(q * M, dtype=complex)
    buf[:L] = coeffs
    return buf.reshape(q, M).sum(axis=0)


@dataclass
class SchwarzEvaluator(SeriesEvaluator):
    """Schwarz integral: analytic completion with Im value 0 at the origin.

    For argument data with winding w about the cut c the unbounded part
    is exact: S[w*saw_c](z) = -2i*w*log(1 - z*exp(-i*c)); coefficients
    hold only the bounded remainder's series.
    """

    winding: int = 0
    cut: float = 0.0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) >= 1.0):
            raise DomainError("Schwarz integral evaluation requires |z| < 1")
        out = self._horner(z)
        if self.winding:
            out = out - 2j * self.winding * np.log1p(-z * np.exp(-1j * self.cut))
        return out

    def derivative(self):
        if self.winding:
            raise RepresentationHint()
        return super().derivative()

    def integrate(self):
        if self.winding:
            raise RepresentationHint()
        return super().integrate()


class RepresentationHint(TypeError):
    """Winding Schwarz integrals are not polynomial; no termwise calculus."""

    def __init__(self):
        super().__init__("winding part is a log kernel; termwise calculus "
                         "applies only to the series remainder")


# ----------------------------------------------------------------------
# boundary transforms
# ----------------------------------------------------------------------

def analytic_coefficients(samples: np.ndarray) -> np.ndarray:
    """Coefficients of the analytic completion of real boundary samples.

    c_0 = mean, c_n = 2*fft(samples)[n]/N for 0 < n < N/2; the resulting
    series has real part reproducing the band-limited interpolant and
    imaginary part 0 at the origin.
    """
    s = np.asarray(samples, dtype=float)
    N = len(s)
    F = np.fft.fft(s) / N
    c = np.zeros(N // 2, dtype=complex)
    c[0] = F[0].real
    c[1:] = 2.0 * F[1:N // 2]
    return c


def schwarz_integral(bf: BoundaryFunction) -> SchwarzEvaluator:
    """Analytic function with boundary real part bf and Im = 0 at z = 0."""
    if bf.kind != "real":
        raise DataError("schwarz_integral requires real-valued boundary data")
    w, cut = bf.winding if bf.winding is not None else (0, 0.0)
    rem = bf._remainder_samples()
    c = analytic_coefficients(np.asarray(rem, dtype=float))
    cap = 1.0 - 8.0 / bf.N
    return SchwarzEvaluator(coefficients=c, radius_cap=cap, winding=w, cut=cut)


def poisson_extend(bf: BoundaryFunction, z) -> np.ndarray:
    """Harmonic extension of real boundary data: Re of the Schwarz integral."""
    return schwarz_integral(bf)(z).real


def _boundary_values_of_series(c: np.ndarray, L: int) -> np.ndarray:
    """Values of sum c_n exp(i n theta) at L uniform nodes via padded iFFT."""
    if len(c) > L:
        raise ConfigurationError(
            f"target grid L={L} is below the series length {len(c)}")
    buf = np.zeros(L, dtype=complex)
    buf[:len(c)] = c
    return np.fft.ifft(buf) * L


def conjugate_boundary(bf: BoundaryFunction, L: int | None = None) -> BoundaryFunction:
    """Boundary values of the harmonic conjugate (conjugate vanishing at 0).

    For winding data the sawtooth part conjugates in closed form to
    -2*w*log|2 sin((theta - cut)/2)|, evaluated exactly on the target
    grid; the node at the cut is floored to keep samples finite.
    """
    if bf.kind != "real":
        raise DataError("conjugate_boundary requires real-valued boundary data")
    L = L or bf.N
    w, cut = bf.winding if bf.winding is not None else (0, 0.0)
    rem = np.asarray(bf._remainder_samples(), dtype=float)
    c = analytic_coefficients(rem)
    H = _boundary_values_of_series(c, L).imag
    jumps = set(bf.jumps)
    if w:
        tL = grid_nodes(L)
        mag = np.maximum(np.abs(2.0 * np.sin(0.5 * (tL - cut))), _LOG_TINY)
        H = H - 2.0 * w * np.log(mag)
        jumps.add(cut % TWO_PI)
    return BoundaryFunction(samples=H, kind="real", jumps=tuple(sorted(jumps)))


def exp_series(b: np.ndarray, M: int | None = None) -> np.ndarray:
    """Power series coefficients of exp(sum b_k z^k), length M.

    Standard recurrence: w_0 = exp(b_0), n*w_n = sum_{k=1}^{n} k*b_k*w_{n-k}.
    """
    b = np.asarray(b, dtype=complex)
    M = M or len(b)
    w = np.zeros(M, dtype=complex)
    w[0] = np.exp(b[0])
    kb = np.arange(len(b)) * b
    for n in range(1, M):
        kmax = min(n, len(b) - 1)
        stop = n - kmax - 1
        seg = w[n - 1:stop:-1] if stop >= 0 else w[n - 1::-1]
        w[n] = np.dot(kb[1:kmax + 1], seg) / n
    return w


# ----------------------------------------------------------------------
# nontangential limits
# ----------------------------------------------------------------------

def aperture_constant(kappa: float) -> float:
    """Stolz-region opening constant: |zeta - z| <= C*(1 - |z|) on the path."""
    return 1.05 * np.sqrt(1.0 + kappa * kappa)


@dataclass(frozen=True)
class StolzPath:
    """Dyadic approach path to exp(i*angle) inside a Stolz region.

    Points z_j = zeta * r_j * exp(i*kappa*(1 - r_j)) with r_j = 1 - 2^-j
    for j = j_min..j_max; kappa = 0 is the radial path.
    """

    angle: float
    aperture: float = 0.0
    j_min: int = 3
    j_max: int = 7

    def __post_init__(self):
        if self.j_max < self.j_min + 3:
            raise ConfigurationError(
                f"Stolz path needs at least 4 points (j_max >= j_min + 3), "
                f"got j_min={self.j_min}, j_max={self.j_max}")

    @property
    def radii(self) -> np.ndarray:
        return 1.0 - 2.0 ** (-np.arange(self.j_min, self.j_max + 1, dtype=float))

    @property
    def scales(self) -> np.ndarray:
        r = self.radii
        return r * np.exp(1j * self.aperture * (1.0 - r))

    def points(self) -> np.ndarray:
        return np.exp(1j * self.angle) * self.scales


def default_j_max(N: int) -> int:
    """Deepest dyadic level resolvable by an N-node construction.

    Never below 6: a Stolz path needs four levels from j_min = 3 even
    when coarse grids cannot truly resolve that depth.
    """
    return max(6, int(np.floor(np.log2(N / 8.0))))


def converged_sequence(values: np.ndarray, tol: float) -> np.ndarray:
    """Convergence flag(s) for approach sequences along the last axis.

    The last successive difference must be below tol, and either the last
    three differences are non-increasing or they are all already at the
    rounding floor (below tol*1e-3), which keeps the flag stable when the
    sequence has converged to machine precision and the differences are
    pure noise.
    """
    v = np.asarray(values)
    if v.shape[-1] < 4:
        raise ConfigurationError("convergence check needs at least 4 path values")
    d = np.abs(np.diff(v, axis=-1))
    mono = (d[..., -3] >= d[..., -2]) & (d[..., -2] >= d[..., -1])
    small = np.max(d[..., -3:], axis=-1) < tol * 1e-3
    return (d[..., -1] < tol) & (mono | small)


def nontangential_eval(h: Callable, path: StolzPath, tol: float):
    """Estimate the nontangential limit of h along a Stolz path.

    Returns (estimate, converged, diagnostics); the estimate is the value
    at the deepest path point regardless of the flag.
    """
    pts = path.points()
    vals = np.asarray(h(pts))
    conv = bool(converged_sequence(vals, tol))
    diag = {
        "points": pts,
        "values": vals,
        "diffs": np.abs(np.diff(vals)),
        "beyond_cap": (np.asarray(h.beyond_cap(pts))
                       if hasattr(h, "beyond_cap") else None),
    }
    return complex(vals[-1]), conv, diag
