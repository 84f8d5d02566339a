"""Photon-counting camera signal chain simulator.

Models the per-pixel measurement chain of a digital image sensor used as
a quantum randomness source:

    light --> Poisson absorption --> + technical noise --> + offset
          --> well saturation --> gain --> ADC quantization/clipping

The absorbed photon number n per pixel is Poisson with mean n_bar (the
quantum part, variance n_bar).  Readout electronics add a Gaussian term
t with standard deviation sigma_t electrons plus a fixed dark offset.
The electron total is clipped to [0, full_well], multiplied by the
conversion gain zeta (codes per electron), rounded, and clipped to the
ADC range [0, 2**bit_depth - 1].

Simulation is deterministic: all randomness is derived from a uint64
seed through counter-based streams keyed by (seed, frame id, pixel
block), so a frame is a pure function of its arguments and identical no
matter how many workers generate it.
"""

from __future__ import annotations

import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

# Pixels are simulated in fixed-size blocks, each with its own
# counter-derived random stream.  The block size is part of the
# determinism contract: changing it changes simulated frames.
_PIXEL_BLOCK = 1 << 16

# Simulated frames larger than this are rejected as likely mistakes.
_MAX_PIXELS = 1 << 31

# JSON field names for SensorConfig serialization.
_CONFIG_KEYS = (
    "name",
    "eta",
    "zeta",
    "sigma_t_electrons",
    "offset_electrons",
    "full_well_electrons",
    "bit_depth",
)


def worker_count() -> int:
    """Worker cap: QRNG_THREADS if set, else hardware parallelism."""
    env = os.environ.get("QRNG_THREADS", "").strip()
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"QRNG_THREADS must be >= 1, got {env!r}")
        return n
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SensorConfig:
    """Static description of one sensor operating mode.

    Attributes:
        name: preset or config label.
        eta: transmission probability of optics ahead of the pixel, in (0, 1].
        zeta: conversion gain, output codes per electron (> 0).
        sigma_t: technical (readout) noise standard deviation, electrons.
        offset: dark-level offset, electrons; negative values are allowed
            and make low signals clip at zero code.
        full_well: electron capacity of a pixel (> 0).
        bit_depth: ADC output width in bits, 1..16.
    """

    name: str
    eta: float
    zeta: float
    sigma_t: float
    offset: float
    full_well: float
    bit_depth: int

    def __post_init__(self):
        if not 0 < self.eta <= 1:
            raise ValueError(f"eta must be in (0, 1], got {self.eta}")
        if self.zeta <= 0:
            raise ValueError(f"zeta must be > 0, got {self.zeta}")
        if self.sigma_t < 0:
            raise ValueError(f"sigma_t must be >= 0, got {self.sigma_t}")
        if self.full_well <= 0:
            raise ValueError(f"full_well must be > 0, got {self.full_well}")
        if not 1 <= self.bit_depth <= 16:
            raise ValueError(f"bit_depth must be in 1..16, got {self.bit_depth}")
        if self.zeta < 1:
            # Gain below one code per electron merges adjacent electron
            # counts into one code, so the per-code quantum entropy
            # accounting no longer holds.
            warnings.warn(
                f"config {self.name!r}: zeta={self.zeta} < 1 cannot resolve "
                "single electrons; quantum entropy estimates are invalid",
                UserWarning,
                stacklevel=2,
            )

    @property
    def max_code(self) -> int:
        return (1 << self.bit_depth) - 1

    @property
    def resolves_single_electrons(self) -> bool:
        """True when each electron count maps to a distinct code (zeta >= 1)."""
        return self.zeta >= 1

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "eta": self.eta,
            "zeta": self.zeta,
            "sigma_t_electrons": self.sigma_t,
            "offset_electrons": self.offset,
            "full_well_electrons": self.full_well,
            "bit_depth": self.bit_depth,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SensorConfig":
        missing = [k for k in _CONFIG_KEYS if k not in d]
        if missing:
            raise ValueError(f"sensor config missing keys: {missing}")
        unknown = [k for k in d if k not in _CONFIG_KEYS]
        if unknown:
            raise ValueError(f"sensor config has unknown keys: {unknown}")
        return cls(
            name=str(d["name"]),
            eta=float(d["eta"]),
            zeta=float(d["zeta"]),
            sigma_t=float(d["sigma_t_electrons"]),
            offset=float(d["offset_electrons"]),
            full_well=float(d["full_well_electrons"]),
            bit_depth=int(d["bit_depth"]),
        )


def load_sensor_config(path: str) -> SensorConfig:
    """Load a SensorConfig from a JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return SensorConfig.from_dict(data)


def save_sensor_config(config: SensorConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2)
        fh.write("\n")


# Canonical presets: a cooled 16-bit astronomy CCD and a 10-bit phone
# camera sensor.  Both quote absorbed-photon statistics, so eta = 1.
PRESETS = {
    "atik383l": SensorConfig(
        name="atik383l",
        eta=1.0,
        zeta=2.3,
        sigma_t=10.0,
        offset=144.0,
        full_well=2.0e4,
        bit_depth=16,
    ),
    "nokia-n9": SensorConfig(
        name="nokia-n9",
        eta=1.0,
        zeta=1.9,
        sigma_t=3.3,
        offset=-6.0,
        full_well=500.0,
        bit_depth=10,
    ),
}


def get_preset(name: str) -> SensorConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown preset {name!r}; available: {sorted(PRESETS)}"
        ) from None


@dataclass(frozen=True)
class PixelSignalModel:
    """Statistical model of one pixel's absorbed-photon signal.

    sigma_q is derived from n_bar (sigma_q**2 == n_bar always holds);
    it is carried as a field only so reports can print it directly.
    """

    n_bar: float
    sigma_q: float = field(init=False)

    def __post_init__(self):
        if self.n_bar < 0:
            raise ValueError(f"n_bar must be >= 0, got {self.n_bar}")
        object.__setattr__(self, "sigma_q", math.sqrt(self.n_bar))


@dataclass
class Frame:
    """One captured or simulated image.

    Attributes:
        width, height: geometry in pixels.
        codes: (height, width) array of ADC output codes, row-major.
        bit_depth: ADC width the codes were produced with.
        meta: free-form provenance (seed and config for simulated frames,
            source path for ingested ones).
    """

    width: int
    height: int
    codes: np.ndarray
    bit_depth: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(
                f"frame dimensions must be positive, got {self.width}x{self.height}"
            )
        codes = np.asarray(self.codes)
        if codes.shape != (self.height, self.width):
            raise ValueError(
                f"codes shape {codes.shape} does not match "
                f"{self.height}x{self.width} geometry"
            )
        if not np.issubdtype(codes.dtype, np.integer):
            raise ValueError(f"codes must be integers, got dtype {codes.dtype}")
        if not 1 <= self.bit_depth <= 16:
            raise ValueError(f"bit_depth must be in 1..16, got {self.bit_depth}")
        if codes.size:
            lo, hi = int(codes.min()), int(codes.max())
            if lo < 0 or hi > (1 << self.bit_depth) - 1:
                raise ValueError(
                    f"codes [{lo}, {hi}] exceed {self.bit_depth}-bit range"
                )
        self.codes = codes.astype(np.uint16, copy=False)

    @property
    def n_pixels(self) -> int:
        return self.width * self.height


def absorbed_mean(incident_mean: float, config: SensorConfig) -> float:
    """Mean absorbed photons for a given incident mean.

    Poisson statistics survive the loss: thinning a Poisson stream with
    probability eta yields Poisson(eta * mean), so downstream simulation
    works directly at the absorbed mean.
    """
    if incident_mean < 0:
        raise ValueError(f"incident_mean must be >= 0, got {incident_mean}")
    return config.eta * incident_mean


def digitize_electrons(electrons: np.ndarray, config: SensorConfig) -> np.ndarray:
    """Apply well saturation, gain, and ADC quantization to electron totals.

    The electron total is clipped to [0, full_well] (charge cannot be
    negative; the well is finite), scaled by zeta, rounded to nearest
    with ties away from zero, and clipped to the ADC code range.
    """
    e = np.clip(electrons, 0.0, config.full_well)
    # Values here are nonnegative, so floor(x + 0.5) rounds to nearest
    # with ties away from zero (np.round would round ties to even).
    codes = np.floor(config.zeta * e + 0.5)
    np.clip(codes, 0, config.max_code, out=codes)
    return codes.astype(np.uint16)


def simulate_pixel(
    model: PixelSignalModel,
    config: SensorConfig,
    noise_draws: tuple[int, float],
) -> int:
    """Digitize one pixel given pre-drawn noise samples.

    Args:
        model: signal statistics the draws were sampled from.
        config: sensor operating mode.
        noise_draws: (n, t) with n a Poisson(model.n_bar) photon count
            and t a Normal(0, config.sigma_t**2) technical noise sample,
            both produced by the caller's deterministic stream.

    Returns:
        The ADC output code as an int.
    """
    n, t = noise_draws
    if n < 0:
        raise ValueError(f"photon count must be >= 0, got {n}")
    electrons = np.array([float(n) + float(t) + config.offset])
    return int(digitize_electrons(electrons, config)[0])


def _block_rng(seed: int, frame_id: int, block: int) -> np.random.Generator:
    """Random stream for one pixel block of one frame.

    SeedSequence hashes (seed, frame_id, block) into independent Philox
    counter-based streams, so blocks can be generated in any order or in
    parallel with identical results.
    """
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(frame_id, block))
    return np.random.Generator(np.random.Philox(ss))


def _simulate_block(
    config: SensorConfig, n_bar: float, seed: int, frame_id: int, block: int, size: int
) -> np.ndarray:
    rng = _block_rng(seed, frame_id, block)
    electrons = rng.poisson(n_bar, size).astype(np.float64)
    if config.sigma_t > 0:
        electrons += rng.normal(0.0, config.sigma_t, size)
    electrons += config.offset
    return digitize_electrons(electrons, config)


def simulate_frame(
    config: SensorConfig,
    n_bar: float,
    width: int,
    height: int,
    seed: int,
    *,
    frame_id: int = 0,
    n_workers: int | None = None,
) -> Frame:
    """Simulate one frame of the full detector chain.

    The frame is a pure function of (config, n_bar, width, height, seed,
    frame_id).  frame_id distinguishes frames of a stack sharing one
    seed.  n_workers only affects wall-clock time, never the output.

    Args:
        config: sensor operating mode.
        n_bar: mean absorbed photons per pixel.
        width, height: frame geometry, both > 0.
        seed: stream seed (uint64 range).
        frame_id: index of this frame within a multi-frame acquisition.
        n_workers: parallel workers; defaults to worker_count().

    Returns:
        Frame with simulated codes.
    """
    if width <= 0 or height <= 0:
        raise ValueError(f"frame dimensions must be positive, got {width}x{height}")
    n_pixels = width * height
    if n_pixels > _MAX_PIXELS:
        raise ValueError(f"frame of {n_pixels} pixels exceeds limit {_MAX_PIXELS}")
    if n_bar < 0:
        raise ValueError(f"n_bar must be >= 0, got {n_bar}")

    n_blocks = (n_pixels + _PIXEL_BLOCK - 1) // _PIXEL_BLOCK
    sizes = [
        min(_PIXEL_BLOCK, n_pixels - b * _PIXEL_BLOCK) for b in range(n_blocks)
    ]
    if n_workers is None:
        n_workers = worker_count()

    if n_workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            parts = list(
                pool.map(
                    lambda b: _simulate_block(
                        config, n_bar, seed, frame_id, b, sizes[b]
                    ),
                    range(n_blocks),
                )
            )
    else:
        parts = [
            _simulate_block(config, n_bar, seed, frame_id, b, sizes[b])
            for b in range(n_blocks)
        ]

    codes = np.concatenate(parts).reshape(height, width)
    meta = {
        "source": "simulated",
        "config": config.name,
        "seed": int(seed),
        "frame_id": int(frame_id),
        "n_bar": float(n_bar),
    }
    return Frame(width=width, height=height, codes=codes, bit_depth=config.bit_depth, meta=meta)


def simulate_stack(
    config: SensorConfig,
    n_bar: float,
    width: int,
    height: int,
    n_frames: int,
    seed: int,
    *,
    n_workers: int | None = None,
) -> list[Frame]:
    """Simulate n_frames consecutive frames at one intensity.

    Frame i uses frame_id=i under the shared seed, so stacks are
    reproducible and extendable without re-rolling earlier frames.
    """
    if n_frames <= 0:
        raise ValueError(f"n_frames must be >= 1, got {n_frames}")
    return [
        simulate_frame(
            config, n_bar, width, height, seed, frame_id=i, n_workers=n_workers
        )
        for i in range(n_frames)
    ]


def sweep_intensities(
    config: SensorConfig,
    n_bars: list[float],
    shape: tuple[int, int],
    seed: int,
    *,
    n_workers: int | None = None,
) -> list[Frame]:
    """Simulate one frame per intensity for a transfer-curve sweep.

    Args:
        config: sensor operating mode.
        n_bars: non-empty list of mean absorbed photon counts, each >= 0.
        shape: (width, height) of every frame.
        seed: base seed; intensity i uses frame_id=i.

    Returns:
        One Frame per entry of n_bars, in order.
    """
    if len(n_bars) == 0:
        raise ValueError("n_bars must be non-empty")
    width, height = shape
    return [
        simulate_frame(
            config, nb, width, height, seed, frame_id=i, n_workers=n_workers
        )
        for i, nb in enumerate(n_bars)
    ]
