import csv
import itertools

import numpy as np
import pytest

from camrng.characterize import (
    FanoPoint,
    PixelMask,
    build_pixel_mask,
    estimate_zeta,
    fano_curve_to_csv,
    fano_factor,
    find_operating_region,
    pixel_stats,
)
from camrng.sensor import Frame, SensorConfig, get_preset, simulate_stack

NOKIA = get_preset("nokia-n9")


def frame_of(values, bit_depth=10) -> Frame:
    codes = np.asarray(values, dtype=np.uint16)
    return Frame(
        width=codes.shape[1], height=codes.shape[0], codes=codes, bit_depth=bit_depth
    )


def test_pixel_stats_hand_example():
    stack = [frame_of([[10, 20]]), frame_of([[14, 20]])]
    stats = pixel_stats(stack)
    assert stats.n_frames == 2
    assert stats.mean.tolist() == [[12.0, 20.0]]
    assert stats.variance.tolist() == [[8.0, 0.0]]  # (n-1) normalization


def test_pixel_stats_validation():
    with pytest.raises(ValueError):
        pixel_stats([frame_of([[1]])])  # one frame has no variance
    with pytest.raises(ValueError):
        pixel_stats([frame_of([[1]]), frame_of([[1, 2]])])  # geometry mismatch


def test_pixel_stats_order_invariant_bitwise():
    rng = np.random.default_rng(0)
    stack = [
        frame_of(rng.integers(0, 1000, size=(7, 9)), bit_depth=10)
        for _ in range(8)
    ]
    base = pixel_stats(stack)
    for perm in itertools.islice(itertools.permutations(stack), 0, 24, 7):
        again = pixel_stats(list(perm))
        # integer moment accumulation makes this exact, not approximate
        assert np.array_equal(base.mean, again.mean)
        assert np.array_equal(base.variance, again.variance)


def test_fano_factor_hand_example():
    cfg = SensorConfig(
        name="f", eta=1.0, zeta=2.0, sigma_t=0.0, offset=1.0,
        full_well=1000.0, bit_depth=10,
    )
    # one pixel alternating 10/14: mean 12, variance 8, pedestal 2
    stack = [frame_of([[10]]), frame_of([[14]])]
    point = fano_factor(stack, cfg)
    assert point.mean_code == 12.0
    assert point.variance_code == 8.0
    assert point.fano == pytest.approx(8.0 / (2.0 * (12.0 - 2.0)))


def test_fano_factor_zero_variance_error():
    stack = [frame_of([[7, 7]]), frame_of([[7, 7]])]
    with pytest.raises(ValueError, match="variance"):
        fano_factor(stack, NOKIA)


def test_fano_factor_requires_signal_above_pedestal():
    cfg = SensorConfig(
        name="p", eta=1.0, zeta=2.0, sigma_t=0.0, offset=10.0,
        full_well=1000.0, bit_depth=10,
    )
    stack = [frame_of([[19]]), frame_of([[21]])]  # mean 20 == pedestal
    with pytest.raises(ValueError, match="pedestal"):
        fano_factor(stack, cfg)


def test_fano_factor_mask():
    cfg = SensorConfig(
        name="m", eta=1.0, zeta=1.0, sigma_t=0.0, offset=0.0,
        full_well=1000.0, bit_depth=10,
    )
    # second pixel is garbage; the mask must exclude it from the average
    stack = [frame_of([[10, 500]]), frame_of([[14, 0]])]
    mask = PixelMask(flags=np.array([[True, False]]), reasons={(0, 1): "hot"})
    point = fano_factor(stack, cfg, mask=mask)
    assert point.mean_code == 12.0
    assert point.variance_code == 8.0
    all_masked = PixelMask(flags=np.array([[False, False]]), reasons={})
    with pytest.raises(ValueError, match="mask"):
        fano_factor(stack, cfg, mask=all_masked)


def test_estimate_zeta_exact_linear_fixture():
    # stacks engineered so variance = 4 * mean exactly => slope 4
    stacks = []
    for mean, half_spread in ((8, 4), (18, 6), (32, 8)):
        stacks.append(
            (
                [frame_of([[mean - half_spread]]), frame_of([[mean + half_spread]])],
                float(mean),
            )
        )
    ptc = estimate_zeta(stacks)
    assert ptc.fitted_zeta == pytest.approx(4.0, abs=1e-12)
    assert ptc.fit_residual == pytest.approx(0.0, abs=1e-9)
    assert len(ptc.points) == 3


def test_estimate_zeta_simulated_round_trip():
    stacks = [
        (simulate_stack(NOKIA, nb, 64, 64, 12, seed=int(nb)), nb)
        for nb in (60.0, 120.0, 200.0, 300.0, 400.0)
    ]
    ptc = estimate_zeta(stacks)
    assert ptc.fitted_zeta == pytest.approx(NOKIA.zeta, rel=0.05)


def test_estimate_zeta_validation():
    stack = [frame_of([[1]]), frame_of([[3]])]
    with pytest.raises(ValueError):
        estimate_zeta([(stack, 5.0)])  # one point cannot fix a slope
    with pytest.raises(ValueError):
        estimate_zeta([(stack, 5.0), (stack, 5.0)])  # duplicate intensity


def point(f):
    return FanoPoint(mean_code=100.0, variance_code=f * 100.0, fano=f, n_frames=10)


def test_find_operating_region_fixture():
    curve = [(1.0, point(5.0)), (10.0, point(1.05)), (50.0, point(1.02)),
             (200.0, point(0.5))]
    assert find_operating_region(curve, tolerance=0.15) == (10.0, 50.0)


def test_find_operating_region_picks_widest_run():
    curve = [
        (1.0, point(1.0)), (2.0, point(3.0)),
        (10.0, point(1.1)), (100.0, point(0.9)), (1000.0, point(1.0)),
    ]
    assert find_operating_region(curve, tolerance=0.15) == (10.0, 1000.0)


def test_find_operating_region_none_and_validation():
    assert find_operating_region([(1.0, point(9.0))]) is None
    with pytest.raises(ValueError):
        find_operating_region([(2.0, point(1.0)), (1.0, point(1.0))])
    with pytest.raises(ValueError):
        find_operating_region([(1.0, point(1.0))], tolerance=0.0)


def test_build_pixel_mask_classifies():
    cfg = SensorConfig(
        name="mask", eta=1.0, zeta=1.0, sigma_t=1.0, offset=0.0,
        full_well=2000.0, bit_depth=10,
    )
    rng = np.random.default_rng(8)
    base = rng.integers(80, 121, size=(12, 4, 4)).astype(np.uint16)
    base[:, 0, 0] = 0          # stuck at zero
    base[:, 1, 1] = 1023       # pinned at the ADC rail -> hot
    base[:, 2, 2] = 100        # constant mid-range -> dead (zero variance)
    stack = [frame_of(base[i], bit_depth=10) for i in range(12)]
    mask = build_pixel_mask(pixel_stats(stack), cfg)
    assert mask.reasons[(0, 0)] == "stuck"
    assert mask.reasons[(1, 1)] == "hot"
    assert mask.reasons[(2, 2)] == "dead"
    assert not mask.flags[0, 0] and not mask.flags[1, 1] and not mask.flags[2, 2]
    assert mask.flags.sum() == 16 - 3
    assert mask.n_flagged == 3


def test_build_pixel_mask_needs_frames():
    stack = [frame_of([[1, 2]]), frame_of([[3, 4]])]
    with pytest.raises(ValueError, match="10"):
        build_pixel_mask(pixel_stats(stack), NOKIA)


def test_pixel_mask_json_round_trip():
    flags = np.array([[True, False], [True, True]])
    mask = PixelMask(flags=flags, reasons={(0, 1): "hot"})
    again = PixelMask.from_json(mask.to_json())
    assert np.array_equal(again.flags, flags)
    assert again.reasons == {(0, 1): "hot"}
    assert again.n_flagged == 1


def test_fano_curve_csv(tmp_path):
    path = tmp_path / "curve.csv"
    fano_curve_to_csv(
        [(10.0, FanoPoint(mean_code=25.0, variance_code=50.0, fano=2.0, n_frames=5))],
        path,
    )
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["n_bar", "mean_code", "variance_code", "fano"]
    assert rows[1] == ["10.0", "25.0", "50.0", "2.0"]
