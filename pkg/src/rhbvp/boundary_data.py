"""Boundary data on the unit circle.

A BoundaryFunction is a 2pi-periodic function known exactly (piecewise
expressions) or through uniform samples.  Sample grids have N a power of
two, N >= 16, nodes theta_j = 2*pi*j/N.  At a junction between pieces
the stored value follows the right piece (right-continuous convention).

A DirectionField is a unit-modulus complex boundary function together
with a cut angle; measurable_arg splits its argument into an integer
multiple of the sawtooth anchored at the cut plus a bounded remainder,
so downstream conjugation can treat the winding part in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError, DataError, InvariantViolation
from .expressions import parse_expression

TWO_PI = 2.0 * np.pi
_EDGE_EPS = 1e-12  # queries within this of a junction resolve to the right piece


def _check_grid_size(N: int) -> None:
    if not isinstance(N, (int, np.integer)) or N < 16 or (N & (N - 1)) != 0:
        raise ConfigurationError(
            f"grid size N must be a power of two with N >= 16, got {N!r}")


def grid_nodes(N: int) -> np.ndarray:
    return TWO_PI * np.arange(N) / N


def sawtooth(theta, cut: float = 0.0):
    """Principal sawtooth: ((theta - cut) mod 2pi) - pi, values in [-pi, pi)."""
    return np.mod(np.asarray(theta, dtype=float) - cut, TWO_PI) - np.pi


def wrap_angle(x):
    """Reduce to [-pi, pi)."""
    return np.mod(np.asarray(x, dtype=float) + np.pi, TWO_PI) - np.pi


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    fn: Callable
    source: str = ""


def _as_piece_fn(obj) -> tuple[Callable, str]:
    if callable(obj):
        return obj, getattr(obj, "source", getattr(obj, "__name__", "<callable>"))
    if isinstance(obj, (int, float)):
        val = float(obj)
        return (lambda t: np.full(np.shape(t), val, dtype=float)), repr(val)
    if isinstance(obj, str):
        return parse_expression(obj), obj
    raise ConfigurationError(f"cannot interpret {obj!r} as a boundary expression")


@dataclass(frozen=True)
class BoundaryFunction:
    """Periodic boundary data: samples plus optional exact piece structure.

    winding, when set to (w, cut), marks the function as an argument
    function alpha = w*sawtooth(theta - cut) + remainder; samples hold
    the full alpha values and the remainder is band-limited.
    """

    samples: np.ndarray
    kind: str = "real"
    jumps: tuple[float, ...] = ()
    pieces: tuple[Piece, ...] | None = None
    winding: tuple[int, float] | None = None

    def __post_init__(self):
        s = np.asarray(self.samples)
        _check_grid_size(len(s))
        if not np.all(np.isfinite(s)):
            raise DataError("boundary samples contain non-finite values")
        if self.kind not in ("real", "complex"):
            raise DataError(f"kind must be 'real' or 'complex', got {self.kind!r}")
        if self.kind == "real":
            if np.iscomplexobj(s) and np.max(np.abs(s.imag)) > 1e-12:
                raise DataError("real-kind boundary function has complex samples")
            s = np.asarray(s.real if np.iscomplexobj(s) else s, dtype=float)
        else:
            s = np.asarray(s, dtype=complex)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "jumps", tuple(sorted(float(a) % TWO_PI for a in self.jumps)))

    @property
    def N(self) -> int:
        return len(self.samples)

    @property
    def theta(self) -> np.ndarray:
        return grid_nodes(self.N)

    # -- internal helpers -------------------------------------------------

    def _remainder_samples(self) -> np.ndarray:
        if self.winding is None:
            return self.samples
        w, cut = self.winding
        return self.samples - w * sawtooth(self.theta, cut)

    def _interp_remainder(self, theta: np.ndarray) -> np.ndarray:
        """Band-limited trigonometric interpolant of the periodic part."""
        rem = self._remainder_samples()
        N = self.N
        F = np.fft.fft(rem) / N
        freqs = np.fft.fftfreq(N, d=1.0 / N)  # 0, 1, ..., N/2-1, -N/2, ...
        # split the Nyquist bin evenly for a real-valued interpolant
        coeff = F.copy()
        phases = np.exp(1j * np.multiply.outer(np.asarray(theta, float), freqs))
        vals = phases @ coeff
        ny = F[N // 2] * np.cos((N // 2) * np.asarray(theta, float))
        vals = vals - F[N // 2] * np.exp(1j * (-(N // 2)) * np.asarray(theta, float)) + ny
        if self.kind == "real" and not np.iscomplexobj(rem):
            return vals.real
        return vals

    # -- public API --------------------------------------------------------

    def evaluate(self, theta) -> np.ndarray:
        """Value at arbitrary angles: exact for piecewise data, band-limited
        interpolation otherwise.  Right-piece convention at junctions."""
        t = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        if self.pieces is not None:
            los = np.array([p.lo for p in self.pieces])
            idx = np.searchsorted(los, t + _EDGE_EPS, side="right") - 1
            idx = np.clip(idx, 0, len(self.pieces) - 1)
            out = np.empty(len(t), dtype=complex if self.kind == "complex" else float)
            for k, p in enumerate(self.pieces):
                m = idx == k
                if np.any(m):
                    out[m] = p.fn(t[m])
            return out[0] if scalar else out
        vals = self._interp_remainder(t)
        if self.winding is not None:
            w, cut = self.winding
            vals = vals + w * sawtooth(t, cut)
        return vals[0] if scalar else vals

    def resample(self, L: int) -> "BoundaryFunction":
        """Same function on an L-node grid (L a power of two >= N).

        Piecewise data is re-evaluated exactly; sampled data is resampled
        band-limitedly, which is exact for trigonometric polynomials of
        degree < N/2.
        """
        _check_grid_size(L)
        if L == self.N:
            return self
        if L < self.N:
            raise ConfigurationError(f"resample target {L} is below current N={self.N}")
        if self.pieces is not None:
            return build_boundary_function(
                [(p.lo, p.hi, p.fn) for p in self.pieces], L, kind=self.kind)
        rem = self._remainder_samples()
        F = np.fft.fft(rem)
        G = np.zeros(L, dtype=complex)
        half = self.N // 2
        G[:half] = F[:half]
        G[L - half + 1:] = F[half + 1:]
        G[half] = 0.5 * F[half]
        G[L - half] = 0.5 * F[half]
        up = np.fft.ifft(G) * (L / self.N)
        if self.kind == "real" and not np.iscomplexobj(rem):
            up = up.real
        if self.winding is not None:
            w, cut = self.winding
            up = up + w * sawtooth(grid_nodes(L), cut)
        return replace(self, samples=up)

    def mean(self) -> float | complex:
        m = np.mean(self.samples)
        return float(m.real) if self.kind == "real" else complex(m)


def build_boundary_function(spec, N: int, kind: str = "real",
                            jumps: Sequence[float] = ()) -> BoundaryFunction:
    """Construct boundary data from a piecewise description or samples.

    spec may be: a number (constant), an expression string, a callable
    of theta, a list of (lo, hi, expr) triples / {"from","to","expr"}
    dicts forming a partition of [0, 2pi), or a sample array of length N.
    Junctions where the piece values disagree are recorded as jumps.
    """
    _check_grid_size(N)
    if isinstance(spec, np.ndarray):
        if len(spec) != N:
            raise ConfigurationError(
                f"sample array has length {len(spec)}, expected N={N}")
        return BoundaryFunction(samples=spec, kind=kind, jumps=tuple(jumps))
    if isinstance(spec, (int, float, str)) or callable(spec):
        spec = [(0.0, TWO_PI, spec)]
    pieces = []
    for item in spec:
        if isinstance(item, dict):
            extra = set(item) - {"from", "to", "expr"}
            if extra:
                raise ConfigurationError(
                    f"unknown keys in boundary piece: {sorted(extra)}")
            lo, hi, raw = item.get("from", 0.0), item.get("to", TWO_PI), item["expr"]
        else:
            lo, hi, raw = item
        fn, src = _as_piece_fn(raw)
        pieces.append(Piece(float(lo), float(hi), fn, src))
    pieces.sort(key=lambda p: p.lo)
    if abs(pieces[0].lo) > 1e-12 or abs(pieces[-1].hi - TWO_PI) > 1e-12:
        raise ConfigurationError(
            "piecewise boundary data must cover [0, 2pi) exactly")
    for a, b in zip(pieces, pieces[1:]):
        if abs(a.hi - b.lo) > 1e-12:
            raise ConfigurationError(
                f"boundary pieces do not form a partition near angle {a.hi:.6g}")
    theta = grid_nodes(N)
    samples = np.empty(N, dtype=complex if kind == "complex" else float)
    los = np.array([p.lo for p in pieces])
    idx = np.clip(np.searchsorted(los, theta + _EDGE_EPS, side="right") - 1,
                  0, len(pieces) - 1)
    for k, p in enumerate(pieces):
        m = idx == k
        if np.any(m):
            samples[m] = p.fn(theta[m])
    if not np.all(np.isfinite(samples)):
        bad = int(np.flatnonzero(~np.isfinite(samples))[0])
        raise DataError(f"boundary expression is non-finite at node {bad} "
                        f"(theta={theta[bad]:.6g})")
    # junction angles where left limit and right value disagree are jumps
    scale = 1.0 + float(np.max(np.abs(samples)))
    detected = []
    for k, p in enumerate(pieces):
        left = pieces[k - 1]
        right_val = np.asarray(p.fn(np.array([p.lo if k else 0.0])))[0]
        left_val = np.asarray(left.fn(np.array([left.hi])))[0]
        if abs(right_val - left_val) > 1e-10 * scale:
            detected.append(p.lo % TWO_PI)
    all_jumps = sorted(set(float(j) % TWO_PI for j in jumps) | set(detected))
    return BoundaryFunction(samples=samples, kind=kind,
                            jumps=tuple(all_jumps), pieces=tuple(pieces))


@dataclass(frozen=True)
class DirectionField:
    """Unit-modulus boundary direction field with a branch-cut anchor."""

    base: BoundaryFunction
    cut: float = 0.0

    def __post_init__(self):
        if self.base.kind != "complex":
            raise DataError("direction field requires complex-kind boundary data")
        dev = np.max(np.abs(np.abs(self.base.samples) - 1.0))
        if dev > 1e-12:
            raise InvariantViolation(
                f"direction field is not unit-modulus (max deviation {dev:.3e})")
        c = float(self.cut) % TWO_PI
        object.__setattr__(self, "cut", c)

    @property
    def N(self) -> int:
        return self.base.N

    @property
    def theta(self) -> np.ndarray:
        return self.base.theta

    @property
    def samples(self) -> np.ndarray:
        return self.base.samples

    @classmethod
    def from_samples(cls, samples: np.ndarray, cut: float = 0.0,
                     jumps: Sequence[float] = ()) -> "DirectionField":
        s = np.asarray(samples, dtype=complex)
        mod = np.abs(s)
        if np.max(np.abs(mod - 1.0)) <= 1e-12:
            pass
        elif np.max(np.abs(mod - 1.0)) <= 1e-8:
            s = s / mod  # renormalize tiny drift from upstream arithmetic
        base = BoundaryFunction(samples=s, kind="complex", jumps=tuple(jumps))
        return cls(base=base, cut=cut)

    @classmethod
    def from_angle(cls, beta, N: int, cut: float = 0.0) -> "DirectionField":
        """Direction field nu = exp(i*beta(theta)) from an angle function."""
        fn, _ = _as_piece_fn(beta)
        vals = np.exp(1j * np.asarray(fn(grid_nodes(N)), dtype=float))
        base = BoundaryFunction(samples=vals, kind="complex")
        return cls(base=base, cut=cut)


def measurable_arg(nu: DirectionField) -> BoundaryFunction:
    """Argument function of a direction field.

    Returns alpha with exp(i*alpha(theta_j)) = nu(theta_j) at every node,
    split as alpha = w*sawtooth(theta - cut) + remainder with integer
    winding w and a remainder free of branch jumps.  The split is stored
    in the result's ``winding`` field so conjugation can evaluate the
    sawtooth part in closed form.
    """
    raw = np.angle(nu.samples)
    inc = wrap_angle(np.diff(np.concatenate([raw, raw[:1]])))
    w = int(np.round(np.sum(inc) / TWO_PI))
    saw = sawtooth(nu.theta, nu.cut)
    rem = np.unwrap(wrap_angle(raw - w * saw))
    # keep the remainder anchored near zero winding offset
    rem -= TWO_PI * np.round(np.median(rem) / TWO_PI)
    alpha = w * saw + rem
    err = np.max(np.abs(np.exp(1j * alpha) - nu.samples))
    if err > 1e-9:
        raise InvariantViolation(
            f"argument reconstruction failed: max |exp(i*alpha) - nu| = {err:.3e}")
    jumps = set(nu.base.jumps)
    if w != 0:
        jumps.add(nu.cut % TWO_PI)
    # residual wrap failures mark genuine jumps of the remainder
    big = np.flatnonzero(np.abs(np.diff(rem)) > np.pi)
    for k in big:
        jumps.add(float(nu.theta[k + 1]))
    return BoundaryFunction(samples=alpha, kind="real", jumps=tuple(sorted(jumps)),
                            winding=(w, nu.cut))
