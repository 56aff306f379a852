"""Uniform position and phase-space grids, quadrature, and reference states.

Everything in this package is sampled on symmetric left-inclusive lattices
x_k = -L + k*dx with n a power of two.  The conjugate momentum lattice has
spacing dp = 2*pi*hbar/(n*dx), so a length-n FFT maps one lattice onto the
other without interpolation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CheckError",
    "PositionGrid",
    "PhaseSpaceGrid",
    "SampledState",
    "PhaseSpaceField",
    "make_grid",
    "make_self_reciprocal_grid",
    "catalog_state",
    "hermite_functions",
    "trapezoid_weights",
    "state_norm",
    "state_overlap",
    "field_integral",
    "read_state_csv",
    "write_state_csv",
]


class CheckError(ValueError):
    """A numerical consistency check failed.

    Distinct from plain ValueError (bad arguments, unreadable files) so that
    callers can map the two onto different exit codes.
    """


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PositionGrid:
    """Uniform symmetric grid x_k = -L + k*dx, k = 0 .. n_points-1.

    The right endpoint +L is excluded, matching FFT conventions.
    """

    n_points: int
    half_width: float

    def __post_init__(self) -> None:
        n = self.n_points
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
            raise ValueError(f"n_points must be an integer, got {n!r}")
        if n < 8 or not _is_power_of_two(int(n)):
            raise ValueError(f"n_points must be a power of two >= 8, got {n}")
        if not (self.half_width > 0 and math.isfinite(self.half_width)):
            raise ValueError(f"half_width must be positive, got {self.half_width}")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.n_points

    def points(self) -> np.ndarray:
        return -self.half_width + self.dx * np.arange(self.n_points)


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Position lattice plus its reciprocal momentum lattice.

    The momentum spacing satisfies dp * dx * n_points = 2*pi*hbar exactly.
    """

    x_grid: PositionGrid
    hbar: float

    def __post_init__(self) -> None:
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise ValueError(f"hbar must be positive, got {self.hbar}")

    @property
    def n_points(self) -> int:
        return self.x_grid.n_points

    @property
    def dx(self) -> float:
        return self.x_grid.dx

    @property
    def dp(self) -> float:
        return 2.0 * math.pi * self.hbar / (self.n_points * self.dx)

    @property
    def is_self_reciprocal(self) -> bool:
        return abs(self.dx - self.dp) <= 1e-9 * self.dp

    def p_points(self) -> np.ndarray:
        """Full momentum lattice, n_points samples centered at 0."""
        n = self.n_points
        return (np.arange(n) - n // 2) * self.dp

    def wigner_p_points(self) -> np.ndarray:
        """Central half of the momentum lattice (n/2 samples).

        The slice FFT used for Wigner transforms is periodic in p with
        period n/2 * dp; this is the one alias-free period centered at 0.
        """
        n = self.n_points
        return (np.arange(n // 2) - n // 4) * self.dp


def make_grid(n_points: int, half_width: float, hbar: float = 1.0) -> PhaseSpaceGrid:
    """Build a phase-space grid; rejects non-power-of-two sizes."""
    return PhaseSpaceGrid(PositionGrid(n_points, float(half_width)), float(hbar))


def make_self_reciprocal_grid(n_points: int, hbar: float = 1.0) -> PhaseSpaceGrid:
    """Grid with dx == dp, i.e. half_width = sqrt(pi*hbar*n/2)."""
    return make_grid(n_points, math.sqrt(0.5 * math.pi * hbar * n_points), hbar)


@dataclass(frozen=True)
class SampledState:
    """A wave function sampled on a PositionGrid.

    Values are stored as a read-only complex array; instances are safe to
    share between threads.
    """

    grid: PositionGrid
    values: np.ndarray
    label: str
    hbar: float = 1.0

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=np.complex128, copy=True)
        if vals.shape != (self.grid.n_points,):
            raise ValueError(
                f"values must have shape ({self.grid.n_points},), got {vals.shape}"
            )
        if not np.isfinite(vals).all():
            raise ValueError("state values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise ValueError(f"hbar must be positive, got {self.hbar}")


def trapezoid_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    w[0] = 0.5
    w[-1] = 0.5
    return w


def state_norm(state: SampledState) -> float:
    """L2 norm by trapezoid quadrature."""
    w = trapezoid_weights(state.grid.n_points)
    return math.sqrt(float(np.sum(w * np.abs(state.values) ** 2)) * state.grid.dx)


def state_overlap(psi: SampledState, phi: SampledState) -> complex:
    """Inner product by trapezoid quadrature, linear in the first argument."""
    if psi.grid != phi.grid:
        raise ValueError("overlap requires states on the same grid")
    w = trapezoid_weights(psi.grid.n_points)
    return complex(np.sum(w * psi.values * np.conj(phi.values)) * psi.grid.dx)


def hermite_functions(k_max: int, x: np.ndarray, hbar: float = 1.0) -> np.ndarray:
    """Orthonormal oscillator eigenfunctions phi_0 .. phi_k_max sampled at x.

    Uses the normalized two-term recurrence
    phi_k = sqrt(2/k)*u*phi_{k-1} - sqrt((k-1)/k)*phi_{k-2} with u = x/sqrt(hbar),
    which is stable for the k <= 127 range supported here.

    Returns an array of shape (k_max + 1, x.size).
    """
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    u = np.asarray(x, dtype=float) / math.sqrt(hbar)
    out = np.empty((k_max + 1, u.size))
    out[0] = (math.pi * hbar) ** -0.25 * np.exp(-0.5 * u * u)
    if k_max >= 1:
        out[1] = math.sqrt(2.0) * u * out[0]
    for k in range(2, k_max + 1):
        out[k] = math.sqrt(2.0 / k) * u * out[k - 1] - math.sqrt((k - 1.0) / k) * out[k - 2]
    return out


def read_state_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Read a sampled state from CSV with header ``x,re,im``.

    Requires strictly increasing x with uniform spacing (relative tolerance
    1e-9).  Returns (x, complex values).
    """
    xs: list[float] = []
    res: list[float] = []
    ims: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["x", "re", "im"]:
            raise ValueError(f"{path}: expected header 'x,re,im', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            try:
                xs.append(float(row[0]))
                res.append(float(row[1]))
                ims.append(float(row[2]))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    if len(xs) < 2:
        raise ValueError(f"{path}: need at least 2 samples")
    x = np.asarray(xs)
    steps = np.diff(x)
    if np.any(steps <= 0):
        raise ValueError(f"{path}: x must be strictly increasing")
    dx = steps[0]
    if np.abs(steps - dx).max() > 1e-9 * abs(dx):
        raise ValueError(f"{path}: x spacing is not uniform")
    return x, np.asarray(res) + 1j * np.asarray(ims)


def write_state_csv(path: str, x: np.ndarray, values: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "re", "im"])
        for xv, v in zip(np.asarray(x), np.asarray(values, dtype=complex)):
            writer.writerow(
                [format(float(xv), ".17g"), format(v.real, ".17g"), format(v.imag, ".17g")]
            )


def _normalized(values: np.ndarray, grid: PositionGrid, what: str) -> np.ndarray:
    w = trapezoid_weights(grid.n_points)
    nrm = math.sqrt(float(np.sum(w * np.abs(values) ** 2)) * grid.dx)
    if nrm == 0.0:
        raise ValueError(f"{what}: state has zero norm on this grid")
    return values / nrm


def catalog_state(
    spec: str,
    grid: PositionGrid,
    hbar: float = 1.0,
    renormalize_samples: bool = False,
) -> SampledState:
    """Build a reference state from a descriptor string.

    Descriptors: ``hermite:k``, ``gaussian:sigma``, ``box:a:b`` and
    ``file:path`` (CSV with header x,re,im sampled on the same grid).
    Analytic states are renormalized to unit trapezoid norm on construction;
    file samples keep their raw normalization unless renormalize_samples is
    set.
    """
    if not isinstance(spec, str) or not spec:
        raise ValueError(f"bad state descriptor {spec!r}")
    name, _, rest = spec.partition(":")
    x = grid.points()
    L = grid.half_width

    if name == "hermite":
        try:
            k = int(rest)
        except ValueError:
            raise ValueError(f"bad hermite order in {spec!r}") from None
        if k < 0:
            raise ValueError(f"hermite order must be >= 0, got {k}")
        vals = hermite_functions(k, x, hbar)[k].astype(complex)
        w = trapezoid_weights(grid.n_points)
        raw = math.sqrt(float(np.sum(w * np.abs(vals) ** 2)) * grid.dx)
        if abs(raw - 1.0) > 1e-3:
            raise ValueError(
                f"grid too coarse or narrow for {spec}: norm deviates by {abs(raw - 1.0):.2e}"
            )
        return SampledState(grid, _normalized(vals, grid, spec), spec, hbar)

    if name == "gaussian":
        try:
            sigma = float(rest)
        except ValueError:
            raise ValueError(f"bad gaussian width in {spec!r}") from None
        if not 0 < sigma < L / 4:
            raise ValueError(f"gaussian width must satisfy 0 < sigma < L/4 = {L / 4}")
        vals = (math.pi * sigma**2) ** -0.25 * np.exp(-(x**2) / (2 * sigma**2))
        return SampledState(grid, _normalized(vals.astype(complex), grid, spec), spec, hbar)

    if name == "box":
        parts = rest.split(":")
        if len(parts) != 2:
            raise ValueError(f"box descriptor needs two endpoints, got {spec!r}")
        try:
            a, b = float(parts[0]), float(parts[1])
        except ValueError:
            raise ValueError(f"bad box endpoints in {spec!r}") from None
        if not a < b:
            raise ValueError(f"box endpoints must satisfy a < b, got {a}, {b}")
        if not (abs(a) < L and abs(b) < L):
            raise ValueError(f"box [{a}, {b}] exceeds grid support (-{L}, {L})")
        vals = np.where((x >= a) & (x <= b), 1.0 + 0.0j, 0.0j)
        if not np.any(vals):
            raise ValueError(f"box [{a}, {b}] contains no grid samples")
        return SampledState(grid, _normalized(vals, grid, spec), spec, hbar)

    if name == "file":
        path = rest
        if not path:
            raise ValueError("file descriptor needs a path")
        fx, fvals = read_state_csv(path)
        if fx.size != grid.n_points:
            raise ValueError(
                f"{path}: {fx.size} samples but grid has {grid.n_points} points"
            )
        if np.abs(fx - x).max() > 1e-9 * grid.dx:
            raise ValueError(f"{path}: sample positions do not match the grid")
        if renormalize_samples:
            fvals = _normalized(fvals, grid, spec)
        return SampledState(grid, fvals, spec, hbar)

    raise ValueError(f"unknown state descriptor {spec!r}")


@dataclass(frozen=True)
class PhaseSpaceField:
    """A function sampled on the phase-space lattice.

    The momentum axis is stored explicitly because it is not always the full
    lattice of the grid: Wigner-type fields live on the central alias-free
    half (n/2 samples), characteristic functions on the full reciprocal
    lattice (n samples).
    """

    grid: PhaseSpaceGrid
    values: np.ndarray
    p_axis: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, copy=True)
        p = np.array(self.p_axis, dtype=float, copy=True)
        if p.ndim != 1 or p.size < 2:
            raise ValueError("p_axis must be a 1-D array with at least 2 samples")
        if vals.shape != (self.grid.n_points, p.size):
            raise ValueError(
                f"values shape {vals.shape} does not match "
                f"({self.grid.n_points}, {p.size})"
            )
        if abs((p[1] - p[0]) - self.grid.dp) > 1e-12 * self.grid.dp:
            raise ValueError("p_axis spacing does not match the grid dp")
        vals.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "p_axis", p)

    @property
    def x_axis(self) -> np.ndarray:
        return self.grid.x_grid.points()

    @property
    def dx(self) -> float:
        return self.grid.dx

    @property
    def dp(self) -> float:
        return self.grid.dp

    @property
    def hbar(self) -> float:
        return self.grid.hbar


def field_integral(field: PhaseSpaceField) -> complex:
    """Integral over phase space: trapezoid in x, uniform weights in p.

    The p axis covers exactly one period of the underlying slice transform,
    so the periodic rectangle rule is the natural quadrature there.
    """
    w = trapezoid_weights(field.grid.n_points)
    return complex(np.sum(w @ field.values) * field.dx * field.dp)
