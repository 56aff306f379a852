import math

import numpy as np
import pytest

from wignerlab.grid import (
    CheckError,
    catalog_state,
    make_grid,
    state_norm,
    state_overlap,
    trapezoid_weights,
)
from wignerlab.wigner import (
    apply_metaplectic,
    cross_wigner,
    hermiticity_residual,
    overlap_identity_check,
    symplectic_matrix,
    wigner,
    wigner_rows,
)


def test_row_sums_reproduce_pointwise_overlap(g512):
    box = catalog_state("box:-0.5:0.5", g512.x_grid)
    h1 = catalog_state("hermite:1", g512.x_grid)
    result = cross_wigner(box, h1, g512)
    row_sums = result.field.values.sum(axis=1) * g512.dp
    np.testing.assert_allclose(
        row_sums, box.values * np.conj(h1.values), atol=5e-15
    )


def test_wigner_is_real_and_labels_carry_sources(g512):
    h1 = catalog_state("hermite:1", g512.x_grid)
    result = wigner(h1, g512)
    assert result.field.values.dtype == np.float64
    assert result.source_labels == ("hermite:1", "hermite:1")
    assert result.hbar == 1.0


def test_cross_wigner_hermiticity(g512):
    h0 = catalog_state("hermite:0", g512.x_grid)
    box = catalog_state("box:-0.5:0.5", g512.x_grid)
    forward = cross_wigner(h0, box, g512)
    swapped = cross_wigner(box, h0, g512)
    w01 = forward.field.values
    scale = np.abs(w01).max()
    assert np.abs(w01 - np.conj(swapped.field.values)).max() <= 1e-14 * scale
    assert hermiticity_residual(forward, swapped) <= 1e-14 * scale


def test_row_blocks_are_bitwise_identical(g512):
    h1 = catalog_state("hermite:1", g512.x_grid)
    box = catalog_state("box:-0.5:0.5", g512.x_grid)
    reference = cross_wigner(h1, box, g512, row_block=512).field.values
    for block in (1, 64, 137, 256):
        chunked = cross_wigner(h1, box, g512, row_block=block).field.values
        np.testing.assert_array_equal(chunked, reference)


def test_wigner_rows_subset_matches_full(g512):
    h1 = catalog_state("hermite:1", g512.x_grid)
    rows = np.array([0, 17, 255, 256, 511])
    partial = wigner_rows(h1.values, h1.values, g512, rows)
    full = cross_wigner(h1, h1, g512).field.values
    np.testing.assert_array_equal(partial, full[rows])


def test_momentum_marginal_is_nonnegative(g512):
    h1 = catalog_state("hermite:1", g512.x_grid)
    field = wigner(h1, g512).field
    w = trapezoid_weights(g512.n_points)[:, None]
    p_marginal = (w * field.values).sum(axis=0) * g512.dx
    assert p_marginal.min() >= -1e-15


def test_overlap_identity_check(g512):
    h0 = catalog_state("hermite:0", g512.x_grid)
    h1 = catalog_state("hermite:1", g512.x_grid)
    assert overlap_identity_check(h0, h1, g512) <= 1e-12


def test_fourier_eigenstates(sr1024):
    for k in range(4):
        hk = catalog_state(f"hermite:{k}", sr1024.x_grid)
        fhk = apply_metaplectic(hk, "fourier")
        np.testing.assert_allclose(
            fhk.values, (-1j) ** k * hk.values, atol=1e-12
        )
    assert fhk.label == "fourier(hermite:3)"


def test_fourier_twice_is_parity(sr1024):
    h3 = catalog_state("hermite:3", sr1024.x_grid)
    twice = apply_metaplectic(apply_metaplectic(h3, "fourier"), "fourier")
    np.testing.assert_allclose(
        twice.values[1:], h3.values[1:][::-1], atol=1e-12
    )


def test_fourier_requires_matched_spacings(g512):
    h0 = catalog_state("hermite:0", g512.x_grid)
    with pytest.raises(ValueError, match="self-reciprocal"):
        apply_metaplectic(h0, "fourier")


def test_scale_preserves_norm_and_inverts(g512):
    h0 = catalog_state("hermite:0", g512.x_grid)
    same = apply_metaplectic(h0, "scale:1")
    np.testing.assert_allclose(same.values, h0.values, atol=1e-12)
    scaled = apply_metaplectic(h0, "scale:2")
    assert state_norm(scaled) == pytest.approx(1.0, abs=1e-10)
    x = g512.x_grid.points()
    expected = 2.0**-0.5 * np.pi**-0.25 * np.exp(-(x**2) / 8.0)
    np.testing.assert_allclose(scaled.values.real, expected, atol=1e-10)
    back = apply_metaplectic(scaled, "scale:0.5")
    # The widened intermediate carries exp(-L**2 / 8) ~ 4e-6 tails at the
    # grid edge, and those wrap under trigonometric interpolation.
    np.testing.assert_allclose(back.values, h0.values, atol=1e-5)


def test_scale_minus_one_is_parity(g512):
    h3 = catalog_state("hermite:3", g512.x_grid)
    flipped = apply_metaplectic(h3, "scale:-1")
    np.testing.assert_allclose(
        flipped.values[1:], h3.values[1:][::-1], atol=1e-12
    )


def test_metaplectic_rejects_bad_descriptors(g512):
    h0 = catalog_state("hermite:0", g512.x_grid)
    for bad in ("scale:0", "rotate:1", "scale:x", "fourier:2"):
        with pytest.raises(ValueError):
            apply_metaplectic(h0, bad)


def test_symplectic_matrices():
    np.testing.assert_allclose(
        symplectic_matrix("fourier"), np.array([[0.0, 1.0], [-1.0, 0.0]])
    )
    np.testing.assert_allclose(
        symplectic_matrix("scale:2"), np.diag([2.0, 0.5])
    )
    with pytest.raises(ValueError):
        symplectic_matrix("shear:1")


def test_fourier_remaps_wigner_indices(sr1024):
    # For dx == dp the transformed field is an exact index permutation of
    # the original: value at (x_j, p_i) moves to (-p_i, x_j).  The state
    # must decay inside the grid in both domains; slow 1/x transform tails
    # wrap at the edges and break the permutation at the 1e-2 level.
    gauss = catalog_state("gaussian:2", sr1024.x_grid)
    base = wigner(gauss, sr1024).field.values
    rotated = wigner(apply_metaplectic(gauss, "fourier"), sr1024).field.values
    n = sr1024.n_points
    rows = np.arange(n // 4, 3 * n // 4)
    cols = np.arange(n // 2)
    expected = base[3 * n // 4 - cols[None, :], rows[:, None] - n // 4]
    scale = np.abs(base).max()
    assert np.abs(rotated[rows] - expected).max() <= 1e-12 * scale


def test_cross_wigner_grid_mismatch(g512):
    h0 = catalog_state("hermite:0", g512.x_grid)
    other = make_grid(512, 9.0)
    h1 = catalog_state("hermite:1", other.x_grid)
    with pytest.raises(ValueError):
        cross_wigner(h0, h1, g512)


def test_overlap_integral_over_field(g512):
    h0 = catalog_state("hermite:0", g512.x_grid)
    h2 = catalog_state("hermite:2", g512.x_grid)
    field = cross_wigner(h0, h2, g512).field
    w = trapezoid_weights(g512.n_points)[:, None]
    integral = complex((w * field.values).sum() * g512.dx * g512.dp)
    assert abs(integral - state_overlap(h0, h2)) <= 1e-12


def test_wigner_peak_value(g512):
    # A unit Gaussian peaks at 1/pi at the origin of phase space.
    h0 = catalog_state("hermite:0", g512.x_grid)
    field = wigner(h0, g512).field
    assert field.values.max() == pytest.approx(1.0 / math.pi, abs=1e-10)
    j0 = g512.n_points // 2
    i0 = g512.n_points // 4
    assert field.values[j0, i0] == field.values.max()
