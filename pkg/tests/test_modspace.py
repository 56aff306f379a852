import math

import numpy as np
import pytest

from wignerlab.grid import CheckError, SampledState, catalog_state, make_grid
from wignerlab.modspace import (
    DivergingStateError,
    cutoff_ladder,
    diagnostic_grid_warning,
    feichtinger_diagnostic,
    modulation_norm,
    weighted_l1_norm,
)
from wignerlab.wigner import apply_metaplectic, wigner


def test_weighted_norm_analytic_values(g51):
    h0 = catalog_state("hermite:0", g51.x_grid)
    field = wigner(h0, g51).field
    top = cutoff_ladder(field)[-1]
    # The ground-state field is a unit-mass Gaussian, so the full s=0 mass
    # is 1 and the s=2 weight adds its second moment: 1 + <x^2 + p^2> = 2.
    assert weighted_l1_norm(field, 0.0, top, region="ball") == pytest.approx(
        1.0, abs=1e-6
    )
    assert weighted_l1_norm(field, 2.0, top, region="ball") == pytest.approx(
        2.0, abs=1e-5
    )


def test_weighted_norm_first_excited_value(sr1024):
    h1 = catalog_state("hermite:1", sr1024.x_grid)
    field = wigner(h1, sr1024).field
    top = cutoff_ladder(field)[-1]
    value = weighted_l1_norm(field, 0.0, top, region="ball")
    assert value == pytest.approx(4.0 * math.exp(-0.5) - 1.0, abs=5e-4)


def test_weighted_norm_argument_validation(g512):
    h0 = catalog_state("hermite:0", g512.x_grid)
    field = wigner(h0, g512).field
    band = -float(field.p_axis[0])
    with pytest.raises(ValueError):
        weighted_l1_norm(field, -1.0, 1.0)
    with pytest.raises(ValueError):
        weighted_l1_norm(field, 0.0, 2.0 * band)
    with pytest.raises(ValueError):
        weighted_l1_norm(field, 0.0, 1.0, region="disk")


def test_slab_contains_ball(g512):
    h1 = catalog_state("hermite:1", g512.x_grid)
    field = wigner(h1, g512).field
    for cut in cutoff_ladder(field):
        slab = weighted_l1_norm(field, 0.0, cut, region="slab")
        ball = weighted_l1_norm(field, 0.0, cut, region="ball")
        assert slab >= ball


def test_cutoff_ladder_geometry(g512):
    h0 = catalog_state("hermite:0", g512.x_grid)
    field = wigner(h0, g512).field
    ladder = cutoff_ladder(field)
    band = -float(field.p_axis[0])
    assert ladder[-1] == pytest.approx(band / 2.0)
    for lo, hi in zip(ladder, ladder[1:]):
        assert hi == pytest.approx(2.0 * lo)


def test_smooth_state_verdicts(g1024):
    h0 = catalog_state("hermite:0", g1024.x_grid)
    report = feichtinger_diagnostic(h0, g1024)
    assert report.verdict == "convergent"
    assert abs(report.growth_exponent) < 0.05
    assert report.s == 0.0
    gauss = catalog_state("gaussian:1.5", g1024.x_grid)
    assert feichtinger_diagnostic(gauss, g1024).verdict == "convergent"


def test_box_state_diverges_with_unit_growth(g1024):
    box = catalog_state("box:-0.5:0.5", g1024.x_grid)
    report = feichtinger_diagnostic(box, g1024)
    assert report.verdict == "diverging"
    assert 0.8 <= report.growth_exponent <= 1.2
    values = [v for _, v in report.partial_norms]
    increments = np.diff(values) / math.log(2.0)
    # Each octave adds 4/pi^2 * ln 2: both halves of the reflected overlap
    # slice sin(2*p*(1/2 - |x|))/(pi*p) deposit 2/pi^2 per octave.
    c = float(increments.mean())
    assert abs(c - 4.0 / math.pi**2) <= 0.1 * (4.0 / math.pi**2)


def test_ladder_saturation_reads_as_convergent(sr1024):
    # A widened smooth state fills the lower rungs late; the tail-rung fit
    # must not mistake that transient for divergent growth.
    h1 = catalog_state("hermite:1", sr1024.x_grid)
    wide = apply_metaplectic(h1, "scale:2")
    report = feichtinger_diagnostic(wide, sr1024)
    assert report.verdict in ("convergent", "inconclusive")
    assert report.growth_exponent < 0.5


def test_window_choice_does_not_change_verdicts(g51):
    for spec in ("hermite:0", "hermite:1", "box:-0.5:0.5"):
        psi = catalog_state(spec, g51.x_grid)
        r0 = modulation_norm(psi, 0.0, g51, window="hermite:0")
        r1 = modulation_norm(psi, 0.0, g51, window="hermite:1")
        assert r0.verdict == r1.verdict
        assert r0.window_label == "hermite:0"
        assert r1.window_label == "hermite:1"


def test_verdicts_invariant_under_fourier(sr1024, sr2048):
    for spec in ("hermite:0", "hermite:1"):
        psi = catalog_state(spec, sr1024.x_grid)
        base = feichtinger_diagnostic(psi, sr1024)
        moved = feichtinger_diagnostic(apply_metaplectic(psi, "fourier"), sr1024)
        assert moved.verdict == base.verdict == "convergent"
    box = catalog_state("box:-0.5:0.5", sr2048.x_grid)
    base = feichtinger_diagnostic(box, sr2048)
    moved = feichtinger_diagnostic(apply_metaplectic(box, "fourier"), sr2048)
    assert moved.verdict == base.verdict == "diverging"


def test_verdicts_invariant_under_scaling(sr2048):
    h1 = catalog_state("hermite:1", sr2048.x_grid)
    base = feichtinger_diagnostic(h1, sr2048)
    moved = feichtinger_diagnostic(apply_metaplectic(h1, "scale:2"), sr2048)
    assert moved.verdict == base.verdict == "convergent"
    g101 = make_grid(2048, 1024.0 / 101.0, 1.0)
    box = catalog_state("box:-0.5:0.5", g101.x_grid)
    base = feichtinger_diagnostic(box, g101)
    moved = feichtinger_diagnostic(apply_metaplectic(box, "scale:2"), g101)
    assert moved.verdict == base.verdict == "diverging"


def test_weighted_ladder_grows_fast_for_box_at_s2(g51):
    box = catalog_state("box:-0.5:0.5", g51.x_grid)
    report = modulation_norm(box, 2.0, g51)
    assert report.verdict == "diverging"
    assert report.growth_exponent > 2.0


def test_diagnostic_requires_unit_norm(g512):
    h0 = catalog_state("hermite:0", g512.x_grid)
    dim = SampledState(g512.x_grid, 0.9 * h0.values, "dim", 1.0)
    with pytest.raises(ValueError, match="unit-norm"):
        feichtinger_diagnostic(dim, g512)


def test_modulation_norm_validates_arguments(g512):
    h0 = catalog_state("hermite:0", g512.x_grid)
    with pytest.raises(ValueError):
        modulation_norm(h0, -2.0, g512)
    with pytest.raises(ValueError):
        modulation_norm(h0, 0.0, g512, window="nope:1")


def test_grid_adequacy_warning(g1024):
    box = catalog_state("box:-0.5:0.5", g1024.x_grid)
    message = diagnostic_grid_warning(box, g1024)
    assert message is not None and "band" in message
    h0 = catalog_state("hermite:0", g1024.x_grid)
    assert diagnostic_grid_warning(h0, g1024) is None
    wide = make_grid(4096, 2048.0 / 151.0, 1.0)
    box_wide = catalog_state("box:-0.5:0.5", wide.x_grid)
    assert diagnostic_grid_warning(box_wide, wide) is None


def test_diverging_error_is_check_error():
    assert issubclass(DivergingStateError, CheckError)
