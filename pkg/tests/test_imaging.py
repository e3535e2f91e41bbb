import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scatter_imaging import forward as f
from scatter_imaging import geometry as g
from scatter_imaging import imaging as im
from scatter_imaging import modes as md
from scatter_imaging import specfun

J01 = specfun.bessel_j_zeros(0, 1)[0]
J11 = specfun.bessel_j_zeros(1, 1)[0]
DISK = g.disk(1.0)
GRID = g.default_grid(DISK, 81, 81)


def analytic_j0(k=J01, c=1.0):
    return md.HerglotzKernel(k, "fourier", np.array([c + 0j]), "FTLS", 0.0)


def test_single_mode_boundary_above_median():
    ind = im.indicator_single(analytic_j0(), GRID)
    on = ind.interpolate(DISK(np.linspace(0, 2 * np.pi, 64, endpoint=False)))
    assert np.all(on > np.median(ind.values))
    assert np.all(np.isfinite(ind.values))


def test_scaling_shifts_by_log():
    a = im.indicator_single(analytic_j0(), GRID)
    b = im.indicator_single(analytic_j0(c=3.0), GRID)
    unclipped = (a.values < a.ceiling) & (b.values < b.ceiling)
    assert np.allclose((b.values - a.values)[unclipped], -math.log(3.0), atol=1e-10)
    assert np.argmax(a.values) == np.argmax(b.values)


def test_clipping_ceiling_keeps_values_finite():
    # the grid origin sits on the nodal set of a J_1 mode
    kern = md.HerglotzKernel(J11, "fourier", np.array([1.0 + 0j, 0, 0]), "FTLS", 0.0)
    grid = g.SamplingGrid((-1, 1), (-1, 1), 21, 21)
    ind = im.indicator_single(kern, grid)
    assert np.all(np.isfinite(ind.values))
    assert ind.values.max() <= ind.ceiling
    amp = np.abs(md.herglotz_eval(kern, grid.nodes))
    assert ind.ceiling == pytest.approx(-math.log(1e-14 * amp.max()))


def test_multi_properties():
    k1 = analytic_j0()
    k2 = md.HerglotzKernel(J11, "fourier", np.array([0.3 + 0j, 0, 0.3]), "FTLS", 0.0)
    single = im.indicator_single(k1, GRID)
    assert np.array_equal(im.indicator_multi([k1], GRID).values, single.values)
    both = im.indicator_multi([k1, k2], GRID)
    s2 = im.indicator_single(k2, GRID)
    assert np.all(both.values <= np.minimum(single.values, s2.values) + 1e-12)
    with pytest.raises(ValueError):
        im.indicator_multi([], GRID)
    with pytest.raises(ValueError):
        im.indicator_multi([k1, k1], GRID)
    sup = im.indicator_multi([k1, k2], GRID, sup_normalize=True)
    assert sup.values.min() >= -math.log(2) - 1e-12


def test_contrast_constant_indicator_is_zero():
    grid = g.SamplingGrid((-2, 2), (-2, 2), 11, 11)
    ind = im.IndicatorGrid(grid, np.full((11, 11), 4.2), "const")
    assert im.boundary_contrast(ind, DISK, 0.2) == 0.0


@settings(max_examples=20, deadline=None)
@given(offset=st.floats(0.05, 0.4, exclude_min=True, exclude_max=True))
def test_contrast_analytic_disk_mode_positive(offset):
    ind = im.indicator_single(analytic_j0(), g.default_grid(DISK, 81, 81, inflate=0.6))
    assert im.boundary_contrast(ind, DISK, offset) > 0


def test_contrast_rejects_samples_off_grid():
    ind = im.indicator_single(analytic_j0(), GRID)
    with pytest.raises(ValueError, match="imaging grid"):
        im.boundary_contrast(ind, DISK, 0.35)


def flower(a=0.25, m=6):
    """r = 2 + a cos(m t) in Fourier form."""
    fx, fy = np.zeros(2 * m + 3), np.zeros(2 * m + 3)
    fx[1] = fy[2] = 2.0
    fx[2 * (m + 1) - 1] += a / 2
    fx[2 * (m - 1) - 1] += a / 2
    fy[2 * (m + 1)] += a / 2
    fy[2 * (m - 1)] -= a / 2
    return g.fourier_curve(fx, fy, "flower")


def test_offset_errors():
    ind = im.indicator_single(analytic_j0(), GRID)
    with pytest.raises(ValueError, match="collapses"):
        im.boundary_contrast(ind, DISK, 1.0)
    with pytest.raises(ValueError):
        im.boundary_contrast(ind, DISK, 0.0)
    # deep dents: outward offsets fold (radius 0.42) before inward ones collapse (0.45)
    with pytest.raises(ValueError, match="folds"):
        im.offset_curves(flower(), 0.43)
    with pytest.raises(ValueError, match="collapses"):
        im.offset_curves(g.kite2d(), 0.1)


def test_concave_arcs():
    assert im.concave_arcs(DISK) == []
    arcs = im.concave_arcs(g.pear(), 512)
    assert len(arcs) == 3
    t = 2 * np.pi * np.arange(512) / 512
    centers = sorted(float(np.mean(t[m])) for m in arcs)
    assert np.allclose(centers, [np.pi / 3, np.pi, 5 * np.pi / 3], atol=0.05)


def test_recovered_first_disk_mode_vanishes_on_boundary():
    D = g.DirectionSet(64)
    F = f.nystrom_farfield(DISK, J01, D, D, 64)
    kern = md.ftls_recover(F, md.default_cutoff(J01, GRID.radius, 64))
    amp = np.abs(md.herglotz_eval(kern, GRID.nodes))
    on = np.abs(md.herglotz_eval(kern, DISK(np.linspace(0, 2 * np.pi, 256, endpoint=False))))
    assert on.max() < 0.02 * amp.max()


def test_emit_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    grid = g.SamplingGrid((-1.25, 2.5), (0.1, 0.7), 7, 5)
    ind = im.IndicatorGrid(grid, rng.standard_normal((7, 5)) * 1e3, "multi")
    csv_path, pgm_path = im.emit(ind, tmp_path / "out" / "ind")
    back = im.read_indicator_csv(csv_path)
    assert np.array_equal(back.values, ind.values)
    assert back.grid == grid
    img = im.read_pgm(pgm_path)
    assert img.shape == (5, 7)
    # first image row is y_max, first column x_min
    assert np.array_equal(img, im.pgm_levels(ind.values)[:, ::-1].T)
    assert img.min() == 0 and img.max() == 65535


def test_pgm_constant_and_hand_mapping(tmp_path):
    grid = g.SamplingGrid((0, 1), (0, 1), 3, 3)
    _, p = im.emit(im.IndicatorGrid(grid, np.full((3, 3), 7.0), "const"), tmp_path / "c")
    assert np.all(im.read_pgm(p) == 32768)
    levels = im.pgm_levels(np.arange(9.0).reshape(3, 3))
    assert sorted(levels.ravel()) == [0, 8191, 16383, 24575, 32767, 40959, 49151, 57343, 65535]
    text = p.read_text().split()
    assert text[:4] == ["P2", "3", "3", "65535"]


def test_pgm_applies_ceiling_first():
    v = np.array([[0.0, 1.0], [2.0, 50.0]])
    levels = im.pgm_levels(v, ceiling=3.0)
    assert levels.max() == 65535 and levels[1, 0] == math.floor(2 / 3 * 65535)
