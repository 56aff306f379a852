"""Discrete cross-Wigner transform and metaplectic companion operators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import (
    CheckError,
    PhaseSpaceField,
    PhaseSpaceGrid,
    SampledState,
    field_integral,
    state_overlap,
)

__all__ = [
    "WignerResult",
    "cross_wigner",
    "wigner",
    "overlap_identity_check",
    "hermiticity_residual",
    "apply_metaplectic",
    "symplectic_matrix",
]


@dataclass(frozen=True)
class WignerResult:
    field: PhaseSpaceField
    source_labels: tuple[str, str]
    hbar: float


def _check_inputs(psi: SampledState, phi: SampledState, grid: PhaseSpaceGrid) -> None:
    if psi.grid != grid.x_grid or phi.grid != grid.x_grid:
        raise ValueError("cross_wigner: states are not sampled on grid.x_grid")
    for st in (psi, phi):
        if abs(st.hbar - grid.hbar) > 1e-12 * grid.hbar:
            raise ValueError(
                f"cross_wigner: hbar mismatch (state {st.hbar} vs grid {grid.hbar})"
            )


def wigner_rows(
    psi_values: np.ndarray,
    phi_values: np.ndarray,
    grid: PhaseSpaceGrid,
    rows: np.ndarray,
) -> np.ndarray:
    """Cross-Wigner values for the given x-row indices.

    Row j is the FFT over the signed half-offset lattice y = 2m*dx of the
    slice products psi(x_{j+m}) * conj(phi(x_{j-m})); samples with j +- m
    outside [0, n) contribute 0.  The transform is periodic in p with period
    n/2 * dp, so only the central alias-free period is kept: n/2 columns at
    p_i = (i - n/4) * dp, i.e. every second sample of the half-spacing
    momentum axis.
    """
    n = grid.n_points
    m_idx = np.arange(n)[None, :]
    m = np.where(m_idx <= n // 2, m_idx, m_idx - n)
    j = np.asarray(rows, dtype=np.intp)[:, None]
    jp = j + m
    jm = j - m
    valid = (jp >= 0) & (jp < n) & (jm >= 0) & (jm < n)
    slices = np.where(
        valid,
        psi_values[np.clip(jp, 0, n - 1)] * np.conj(phi_values[np.clip(jm, 0, n - 1)]),
        0.0,
    )
    spectrum = np.fft.fft(slices, axis=1)
    cols = (2 * (np.arange(n // 2) + n // 4)) % n
    return (grid.dx / (math.pi * grid.hbar)) * spectrum[:, cols]


def cross_wigner(
    psi: SampledState,
    phi: SampledState,
    grid: PhaseSpaceGrid,
    row_block: int = 256,
) -> WignerResult:
    """Discrete cross-Wigner transform of a pair of states.

    Evaluates, for every grid point x and every momentum sample of the
    central half-lattice, the lattice form of
    (1/(2*pi*hbar)) * integral e^(-i*p*y/hbar) psi(x + y/2) conj(phi(x - y/2)) dy
    with y restricted to even multiples of dx so that both arguments stay on
    the grid.  Out-of-range samples are treated as 0 (compact-support
    embedding, no periodic wraparound).

    row_block bounds the number of x-slices transformed per FFT batch; the
    result is independent of the blocking.
    """
    _check_inputs(psi, phi, grid)
    if row_block < 1:
        raise ValueError(f"row_block must be >= 1, got {row_block}")
    n = grid.n_points
    out = np.empty((n, n // 2), dtype=np.complex128)
    for start in range(0, n, row_block):
        rows = np.arange(start, min(start + row_block, n))
        out[rows] = wigner_rows(psi.values, phi.values, grid, rows)
    field = PhaseSpaceField(grid, out, grid.wigner_p_points())
    return WignerResult(field, (psi.label, phi.label), grid.hbar)


def wigner(psi: SampledState, grid: PhaseSpaceGrid, row_block: int = 256) -> WignerResult:
    """Wigner transform: the diagonal cross-Wigner, returned real-valued."""
    result = cross_wigner(psi, psi, grid, row_block)
    vals = result.field.values
    scale = float(np.abs(vals).max())
    imag_max = float(np.abs(vals.imag).max())
    if scale > 0.0 and imag_max > 1e-10 * scale:
        raise CheckError(
            f"wigner: imaginary part {imag_max:.3e} exceeds 1e-10 of max {scale:.3e}"
        )
    field = PhaseSpaceField(grid, vals.real, result.field.p_axis)
    return WignerResult(field, result.source_labels, result.hbar)


def overlap_identity_check(
    psi: SampledState, phi: SampledState, grid: PhaseSpaceGrid
) -> float:
    """|integral of W(psi, phi) - <psi, phi>| with trapezoid quadrature."""
    result = cross_wigner(psi, phi, grid)
    total = field_integral(result.field)
    return abs(total - state_overlap(psi, phi))


def hermiticity_residual(forward: WignerResult, swapped: WignerResult) -> float:
    """max |W(psi, phi) - conj(W(phi, psi))| for a swapped pair of results."""
    a, b = forward.field, swapped.field
    if a.values.shape != b.values.shape or a.grid != b.grid:
        raise ValueError("hermiticity_residual: fields are not comparable")
    return float(np.abs(a.values - np.conj(b.values)).max())


def symplectic_matrix(op: str) -> np.ndarray:
    """The linear phase-space map S covered by a metaplectic descriptor.

    fourier maps (x, p) to (p, -x); scale:lam maps (x, p) to (lam*x, p/lam).
    The transformed Wigner function samples the original at S^(-1) z.
    """
    name, _, rest = op.partition(":")
    if name == "fourier":
        return np.array([[0.0, 1.0], [-1.0, 0.0]])
    if name == "scale":
        lam = float(rest)
        if lam == 0.0:
            raise ValueError("scale factor must be nonzero")
        return np.array([[lam, 0.0], [0.0, 1.0 / lam]])
    raise ValueError(f"unknown metaplectic descriptor {op!r}")


def _fourier_state(psi: SampledState) -> np.ndarray:
    n = psi.grid.n_points
    dx = psi.grid.dx
    dp = 2.0 * math.pi * psi.hbar / (n * dx)
    if abs(dx - dp) > 1e-9 * dp:
        raise ValueError(
            "fourier requires a self-reciprocal grid (dx == dp); "
            f"got dx={dx:.6g}, dp={dp:.6g}"
        )
    k = np.arange(n)
    sign = 1.0 - 2.0 * (k & 1)
    # Centered unitary transform; the leftover center phase exp(-i*pi*n/2)
    # is 1 because n is a power of two >= 8.
    return dx / math.sqrt(2.0 * math.pi * psi.hbar) * sign * np.fft.fft(sign * psi.values)


def _scaled_state(psi: SampledState, lam: float) -> np.ndarray:
    """|lam|^(-1/2) psi(x/lam) by trigonometric interpolation.

    The interpolant is the band-limited periodic extension of the samples;
    evaluation points pulled from outside [-L, L) are set to 0, consistent
    with the compact-support reading used elsewhere.
    """
    n = psi.grid.n_points
    L = psi.grid.half_width
    coeff = np.fft.fft(psi.values) / n
    q = np.arange(n)
    q_centered = np.where(q <= n // 2, q, q - n)
    freq = math.pi * q_centered / L
    targets = psi.grid.points() / lam
    out = np.zeros(n, dtype=np.complex128)
    nyq = n // 2
    for start in range(0, n, 512):
        xs = targets[start : start + 512, None] + L
        phases = np.exp(1j * xs * freq[None, :])
        # The unpaired Nyquist mode is evaluated as a cosine so that real
        # inputs stay real.
        phases[:, nyq] = np.cos(xs[:, 0] * freq[nyq])
        out[start : start + 512] = phases @ coeff
    out[np.abs(targets) >= L] = 0.0
    return out / math.sqrt(abs(lam))


def apply_metaplectic(psi: SampledState, op: str) -> SampledState:
    """Apply a metaplectic generator to a state.

    Descriptors: ``fourier`` for the unitary transform
    (2*pi*hbar)^(-1/2) * integral e^(-i*x*p/hbar) psi(x) dx, evaluated by a
    centered FFT (requires dx == dp so the momentum lattice can be read back
    as the position lattice), and ``scale:lam`` for
    psi(x) -> |lam|^(-1/2) * psi(x/lam) with lam != 0.
    """
    name, _, rest = op.partition(":")
    if name == "fourier":
        if rest:
            raise ValueError(f"fourier takes no parameter, got {op!r}")
        vals = _fourier_state(psi)
    elif name == "scale":
        try:
            lam = float(rest)
        except ValueError:
            raise ValueError(f"bad scale factor in {op!r}") from None
        if lam == 0.0:
            raise ValueError("scale factor must be nonzero")
        vals = _scaled_state(psi, lam)
    else:
        raise ValueError(f"unknown metaplectic descriptor {op!r}")
    return SampledState(psi.grid, vals, f"{op}({psi.label})", psi.hbar)
