"""Sensor characterization from frame stacks.

Given repeated frames of a uniformly lit sensor, these routines recover
the conversion gain (photon transfer method), measure the Fano factor
of the digitized signal, locate the shot-noise-limited operating
region, and flag unusable pixels.

All statistics are temporal: each pixel is treated as its own repeated
measurement across the stack, and per-pixel moments are aggregated
afterwards.  Spatial statistics would fold any fixed-pattern structure
into the variance.  Sums are accumulated in exact int64 arithmetic, so
results are identical for any frame ordering.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .sensor import Frame, SensorConfig

DEFAULT_FANO_TOLERANCE = 0.15

# build_pixel_mask thresholds: a pixel is dead below this fraction of
# the median temporal variance, and stuck/hot within this many codes of
# an ADC rail.
_DEAD_VARIANCE_FRACTION = 0.25
_RAIL_MARGIN_CODES = 1.0


@dataclass(frozen=True)
class PixelStats:
    """Per-pixel temporal moments of a frame stack.

    Attributes:
        mean: (height, width) per-pixel mean code.
        variance: (height, width) per-pixel unbiased sample variance.
        n_frames: stack depth the moments were computed from.
        bit_depth: ADC width of the contributing frames.
    """

    mean: np.ndarray
    variance: np.ndarray
    n_frames: int
    bit_depth: int


def _check_stack(frames: list[Frame], minimum: int = 2) -> None:
    if len(frames) < minimum:
        raise ValueError(f"need at least {minimum} frames, got {len(frames)}")
    first = frames[0]
    for f in frames[1:]:
        if (f.width, f.height, f.bit_depth) != (
            first.width,
            first.height,
            first.bit_depth,
        ):
            raise ValueError(
                "frame stack mismatch: "
                f"{f.width}x{f.height}@{f.bit_depth}b vs "
                f"{first.width}x{first.height}@{first.bit_depth}b"
            )


def pixel_stats(frames: list[Frame]) -> PixelStats:
    """Per-pixel mean and unbiased variance across a frame stack.

    Codes are integers, so the first and second moments are accumulated
    exactly in int64; the result does not depend on frame order even in
    the last float bit.

    Args:
        frames: >= 2 frames of identical geometry and bit depth.

    Returns:
        PixelStats with (height, width) float64 moment arrays.
    """
    _check_stack(frames, minimum=2)
    n = len(frames)
    shape = frames[0].codes.shape
    s1 = np.zeros(shape, dtype=np.int64)
    s2 = np.zeros(shape, dtype=np.int64)
    for f in frames:
        c = f.codes.astype(np.int64)
        s1 += c
        s2 += c * c
    mean = s1 / n
    # Unbiased: sum((c - mean)^2) = s2 - s1^2/n, divided by n-1.
    variance = (s2 - s1.astype(np.float64) ** 2 / n) / (n - 1)
    np.maximum(variance, 0.0, out=variance)
    return PixelStats(
        mean=mean,
        variance=variance,
        n_frames=n,
        bit_depth=frames[0].bit_depth,
    )


@dataclass(frozen=True)
class FanoPoint:
    """Fano factor measurement at one illumination level.

    fano = variance_code / (zeta * (mean_code - zeta*offset)), i.e. the
    measured code variance over the code variance a pure Poisson signal
    of the same offset-corrected mean would have.
    """

    mean_code: float
    variance_code: float
    fano: float
    n_frames: int


def fano_factor(
    frames: list[Frame], config: SensorConfig, mask: "PixelMask | None" = None
) -> FanoPoint:
    """Measure the Fano factor of a constant-illumination stack.

    Per-pixel temporal means and variances are averaged over usable
    pixels, then F = Var(c) / (zeta * (mean(c) - zeta*offset)).  The
    offset enters in code units (zeta * offset) so that a clamp-free
    Poisson+Gaussian signal gives F = 1 + sigma_t**2 / n_bar and a pure
    Poisson signal gives exactly 1.

    Args:
        frames: >= 2 frames at fixed illumination.
        config: supplies zeta and offset.
        mask: optional PixelMask restricting which pixels count.

    Returns:
        FanoPoint.

    Raises:
        ValueError: mean code at or below the offset pedestal (F is
            undefined there), or zero temporal variance (degenerate
            stack, e.g. identical frames).
    """
    stats = pixel_stats(frames)
    if mask is not None:
        if mask.flags.shape != stats.mean.shape:
            raise ValueError(
                f"mask geometry {mask.flags.shape} does not match frames "
                f"{stats.mean.shape}"
            )
        sel = mask.flags
        if not sel.any():
            raise ValueError("mask excludes every pixel")
    else:
        sel = slice(None)
    mean_code = float(np.mean(stats.mean[sel]))
    variance_code = float(np.mean(stats.variance[sel]))

    pedestal = config.zeta * config.offset
    if mean_code <= pedestal:
        raise ValueError(
            f"Fano undefined: mean code {mean_code:.3f} at or below the "
            f"offset pedestal {pedestal:.3f}"
        )
    if variance_code == 0.0:
        raise ValueError(
            "Fano undefined: zero temporal variance across the stack "
            "(identical frames or fully saturated signal)"
        )
    fano = variance_code / (config.zeta * (mean_code - pedestal))
    return FanoPoint(
        mean_code=mean_code,
        variance_code=variance_code,
        fano=fano,
        n_frames=stats.n_frames,
    )


@dataclass(frozen=True)
class PhotonTransferCurve:
    """Variance-vs-mean line fit across an intensity sweep.

    Attributes:
        points: (mean_code, variance_code) per swept intensity.
        fitted_zeta: slope of the fit, in codes per electron.
        fit_residual: relative RMS of variance residuals.
    """

    points: list[tuple[float, float]]
    fitted_zeta: float
    fit_residual: float


def estimate_zeta(sweep: list[tuple[list[Frame], float]]) -> PhotonTransferCurve:
    """Fit the conversion gain from a photon transfer sweep.

    In the shot-noise-limited region Var(c) = zeta**2 (n_bar + sigma_t**2)
    and mean(c) = zeta (n_bar + offset), so variance against mean is a
    line with slope zeta; technical noise and offset land in the
    intercept.

    Args:
        sweep: (frame stack, intensity) pairs at >= 2 distinct
            intensities, all inside the linear region.

    Returns:
        PhotonTransferCurve with the least-squares slope as fitted_zeta.
    """
    if len(sweep) < 2:
        raise ValueError(f"need >= 2 sweep points, got {len(sweep)}")
    intensities = [nb for _, nb in sweep]
    if len(set(intensities)) < 2:
        raise ValueError("sweep intensities are all equal; slope is undefined")

    points = []
    for frames, _ in sweep:
        stats = pixel_stats(frames)
        points.append((float(stats.mean.mean()), float(stats.variance.mean())))

    means = np.array([p[0] for p in points])
    variances = np.array([p[1] for p in points])
    if np.ptp(means) == 0:
        raise ValueError("mean codes identical across sweep; slope is undefined")
    slope, intercept = np.polyfit(means, variances, 1)
    predicted = slope * means + intercept
    fit_residual = float(np.sqrt(np.mean(((predicted - variances) / variances) ** 2)))
    if slope <= 0:
        raise ValueError(f"fitted slope {slope:.4g} is not positive; sweep "
                         "is outside the shot-noise-limited region")
    return PhotonTransferCurve(
        points=points, fitted_zeta=float(slope), fit_residual=fit_residual
    )


def find_operating_region(
    fano_curve: list[tuple[float, FanoPoint]],
    tolerance: float = DEFAULT_FANO_TOLERANCE,
) -> tuple[float, float] | None:
    """Widest contiguous intensity interval with |F - 1| <= tolerance.

    Args:
        fano_curve: (n_bar, FanoPoint) pairs sorted by rising n_bar.
        tolerance: acceptance band around F = 1, > 0.

    Returns:
        (n_min, n_max) of the widest qualifying run, or None when no
        point qualifies.
    """
    if tolerance <= 0:
        raise ValueError(f"tolerance must be > 0, got {tolerance}")
    n_bars = [nb for nb, _ in fano_curve]
    if any(b < a for a, b in zip(n_bars, n_bars[1:])):
        raise ValueError("fano_curve must be sorted by rising intensity")

    best: tuple[float, float] | None = None
    best_width = -1.0
    run_start: int | None = None
    for i, (nb, point) in enumerate(fano_curve + [(None, None)]):
        ok = point is not None and abs(point.fano - 1.0) <= tolerance
        if ok and run_start is None:
            run_start = i
        elif not ok and run_start is not None:
            lo, hi = n_bars[run_start], n_bars[i - 1]
            if hi - lo > best_width:
                best, best_width = (lo, hi), hi - lo
            run_start = None
    return best


@dataclass
class PixelMask:
    """Per-pixel usability flags with reasons for exclusions.

    Attributes:
        flags: (height, width) bool array, True = usable.
        reasons: {(row, col): "dead" | "stuck" | "hot"} for every
            flagged (unusable) pixel.
    """

    flags: np.ndarray
    reasons: dict = field(default_factory=dict)

    @property
    def width(self) -> int:
        return self.flags.shape[1]

    @property
    def height(self) -> int:
        return self.flags.shape[0]

    @property
    def n_flagged(self) -> int:
        return int((~self.flags).sum())

    def to_json(self) -> str:
        return json.dumps(
            {
                "width": self.width,
                "height": self.height,
                "flagged": {f"{y},{x}": r for (y, x), r in sorted(self.reasons.items())},
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "PixelMask":
        data = json.loads(text)
        flags = np.ones((data["height"], data["width"]), dtype=bool)
        reasons = {}
        for key, reason in data["flagged"].items():
            y, x = (int(v) for v in key.split(","))
            flags[y, x] = False
            reasons[(y, x)] = reason
        return cls(flags=flags, reasons=reasons)


def build_pixel_mask(stats: PixelStats, config: SensorConfig) -> PixelMask:
    """Flag pixels unusable for randomness generation.

    A pixel is flagged when its temporal variance falls below 0.25x the
    median variance (dead: it does not respond), or its mean sits within
    one code of an ADC rail (stuck at the bottom, hot at the top, where
    clamping removes the noise).

    Args:
        stats: per-pixel moments from >= 10 uniformly lit frames.
        config: supplies the ADC range.

    Returns:
        PixelMask with reasons for every flagged pixel.
    """
    if stats.n_frames < 10:
        raise ValueError(
            f"pixel mask needs >= 10 frames of statistics, got {stats.n_frames}"
        )
    median_var = float(np.median(stats.variance))
    dead = stats.variance < _DEAD_VARIANCE_FRACTION * median_var
    stuck = stats.mean <= _RAIL_MARGIN_CODES
    hot = stats.mean >= config.max_code - _RAIL_MARGIN_CODES

    flags = ~(dead | stuck | hot)
    reasons = {}
    for y, x in np.argwhere(~flags):
        y, x = int(y), int(x)
        if hot[y, x]:
            reasons[(y, x)] = "hot"
        elif stuck[y, x]:
            reasons[(y, x)] = "stuck"
        else:
            reasons[(y, x)] = "dead"
    return PixelMask(flags=flags, reasons=reasons)


def fano_curve_to_csv(
    fano_curve: list[tuple[float, FanoPoint]], path: str
) -> None:
    """Write a Fano sweep as CSV (n_bar, mean_code, variance_code, fano)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n_bar", "mean_code", "variance_code", "fano"])
        for nb, point in fano_curve:
            writer.writerow(
                [nb, point.mean_code, point.variance_code, point.fano]
            )
