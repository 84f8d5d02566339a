"""Frame file formats: binary PGM and headerless raw dumps.

PGM (P5) is the interchange format most camera tooling can export.
Samples are one byte up to maxval 255 and two bytes big-endian above,
per the de-facto netpbm convention.  Raw dumps are little-endian 16-bit
("raw16le") or single-byte ("raw8") pixel arrays with no embedded
header, so the caller supplies a FrameFileHeader; a JSON sidecar next
to the file is the usual carrier.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .sensor import Frame

_RAW_FORMATS = ("raw16le", "raw8")
_FORMATS = ("pgm16",) + _RAW_FORMATS


@dataclass(frozen=True)
class FrameFileHeader:
    """Geometry and encoding of a frame file.

    Attributes:
        format: "pgm16", "raw16le", or "raw8".
        width, height: frame geometry in pixels.
        bit_depth: ADC width of the stored codes.
        frame_count: frames in the file (raw files may hold several).
    """

    format: str
    width: int
    height: int
    bit_depth: int
    frame_count: int = 1

    def __post_init__(self):
        if self.format not in _FORMATS:
            raise ValueError(
                f"format must be one of {_FORMATS}, got {self.format!r}"
            )
        if self.width <= 0 or self.height <= 0:
            raise ValueError(
                f"dimensions must be positive, got {self.width}x{self.height}"
            )
        max_depth = 8 if self.format == "raw8" else 16
        if not 1 <= self.bit_depth <= max_depth:
            raise ValueError(
                f"bit_depth {self.bit_depth} invalid for {self.format} "
                f"(allowed 1..{max_depth})"
            )
        if self.frame_count < 1:
            raise ValueError(f"frame_count must be >= 1, got {self.frame_count}")

    @property
    def bytes_per_sample(self) -> int:
        return 1 if self.format == "raw8" else 2

    def to_dict(self) -> dict:
        return {
            "format": self.format,
            "width": self.width,
            "height": self.height,
            "bit_depth": self.bit_depth,
            "frame_count": self.frame_count,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FrameFileHeader":
        return cls(
            format=str(d["format"]),
            width=int(d["width"]),
            height=int(d["height"]),
            bit_depth=int(d["bit_depth"]),
            frame_count=int(d.get("frame_count", 1)),
        )


# ----------------------------------------------------------------------
# PGM
# ----------------------------------------------------------------------


def _read_pgm_tokens(data: bytes, path: str) -> tuple[list[int], int]:
    """Parse the PGM header: magic, then 3 integers, honoring # comments.

    Returns (values, payload_offset).
    """
    if not data.startswith(b"P5"):
        raise ValueError(f"{path}: not a binary PGM (missing P5 magic)")
    pos = 2
    values: list[int] = []
    while len(values) < 3:
        # Skip whitespace and comment lines.
        while pos < len(data):
            ch = data[pos : pos + 1]
            if ch.isspace():
                pos += 1
            elif ch == b"#":
                nl = data.find(b"\n", pos)
                pos = len(data) if nl < 0 else nl + 1
            else:
                break
        start = pos
        while pos < len(data) and data[pos : pos + 1].isdigit():
            pos += 1
        if start == pos:
            raise ValueError(f"{path}: malformed PGM header")
        values.append(int(data[start:pos]))
    # Exactly one whitespace byte separates maxval from the payload.
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise ValueError(f"{path}: malformed PGM header (no payload separator)")
    return values, pos + 1


def read_pgm(path: str) -> Frame:
    """Read one frame from a binary (P5) PGM file.

    Samples above maxval 255 are two bytes big-endian.  The frame's
    bit_depth is ceil(log2(maxval + 1)).
    """
    with open(path, "rb") as fh:
        data = fh.read()
    (width, height, maxval), offset = _read_pgm_tokens(data, path)
    if maxval <= 0 or maxval > 65535:
        raise ValueError(f"{path}: PGM maxval {maxval} out of range 1..65535")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    expected = width * height * dtype.itemsize
    payload = data[offset : offset + expected]
    if len(payload) != expected:
        raise ValueError(
            f"{path}: truncated payload, expected {expected} bytes, "
            f"got {len(payload)}"
        )
    codes = np.frombuffer(payload, dtype=dtype).astype(np.uint16)
    if codes.size and int(codes.max()) > maxval:
        raise ValueError(f"{path}: sample exceeds declared maxval {maxval}")
    bit_depth = max(1, math.ceil(math.log2(maxval + 1)))
    return Frame(
        width=width,
        height=height,
        codes=codes.reshape(height, width),
        bit_depth=bit_depth,
        meta={"source": os.fspath(path), "format": "pgm"},
    )


def write_pgm(frame: Frame, path: str) -> None:
    """Write a frame as binary PGM with maxval 2**bit_depth - 1."""
    maxval = (1 << frame.bit_depth) - 1
    header = f"P5\n{frame.width} {frame.height}\n{maxval}\n".encode("ascii")
    if maxval > 255:
        payload = frame.codes.astype(">u2").tobytes()
    else:
        payload = frame.codes.astype("u1").tobytes()
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(payload)
    except OSError as exc:
        raise OSError(f"writing {path}: {exc}") from exc


# ----------------------------------------------------------------------
# Raw dumps
# ----------------------------------------------------------------------


def read_raw(path: str, header: FrameFileHeader) -> list[Frame]:
    """Read frames from a headerless raw dump.

    Args:
        path: file of frame_count * width * height samples, little-endian
            16-bit for raw16le or single bytes for raw8.
        header: declared geometry and encoding.

    Returns:
        frame_count Frames in file order.
    """
    if header.format not in _RAW_FORMATS:
        raise ValueError(
            f"read_raw handles {_RAW_FORMATS}, not {header.format!r} "
            "(use read_pgm for PGM files)"
        )
    with open(path, "rb") as fh:
        data = fh.read()
    n_samples = header.frame_count * header.width * header.height
    expected = n_samples * header.bytes_per_sample
    if len(data) != expected:
        raise ValueError(
            f"{path}: payload is {len(data)} bytes but header declares "
            f"{expected} ({header.frame_count} frames of "
            f"{header.width}x{header.height})"
        )
    dtype = np.dtype("<u2") if header.format == "raw16le" else np.dtype("u1")
    codes = np.frombuffer(data, dtype=dtype).astype(np.uint16)
    limit = (1 << header.bit_depth) - 1
    if codes.size and int(codes.max()) > limit:
        raise ValueError(
            f"{path}: sample {int(codes.max())} exceeds declared "
            f"{header.bit_depth}-bit range"
        )
    codes = codes.reshape(header.frame_count, header.height, header.width)
    return [
        Frame(
            width=header.width,
            height=header.height,
            codes=codes[i],
            bit_depth=header.bit_depth,
            meta={"source": os.fspath(path), "format": header.format, "index": i},
        )
        for i in range(header.frame_count)
    ]


def write_raw(frames: list[Frame], header: FrameFileHeader, path: str) -> None:
    """Write frames as a headerless raw dump matching `header`."""
    if header.format not in _RAW_FORMATS:
        raise ValueError(f"write_raw handles {_RAW_FORMATS}, not {header.format!r}")
    if len(frames) != header.frame_count:
        raise ValueError(
            f"header declares {header.frame_count} frames, got {len(frames)}"
        )
    limit = (1 << header.bit_depth) - 1
    for f in frames:
        if (f.width, f.height) != (header.width, header.height):
            raise ValueError(
                f"frame {f.width}x{f.height} does not match header "
                f"{header.width}x{header.height}"
            )
        if f.codes.size and int(f.codes.max()) > limit:
            raise ValueError(
                f"frame codes exceed declared {header.bit_depth}-bit range"
            )
    dtype = np.dtype("<u2") if header.format == "raw16le" else np.dtype("u1")
    try:
        with open(path, "wb") as fh:
            for f in frames:
                fh.write(f.codes.astype(dtype).tobytes())
    except OSError as exc:
        raise OSError(f"writing {path}: {exc}") from exc


# ----------------------------------------------------------------------
# Sidecar metadata
# ----------------------------------------------------------------------


def sidecar_path(path: str) -> str:
    return os.fspath(path) + ".json"


def write_sidecar(path: str, header: FrameFileHeader, extra: dict | None = None) -> None:
    """Write the JSON sidecar describing a raw dump.

    `extra` keys (e.g. sensor name, n_bar estimate, exposure) pass
    through untouched.
    """
    doc = dict(extra or {})
    doc["header"] = header.to_dict()
    with open(sidecar_path(path), "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def read_sidecar(path: str) -> tuple[FrameFileHeader, dict] | None:
    """Load the sidecar for a raw dump, or None if absent."""
    sc = sidecar_path(path)
    if not os.path.exists(sc):
        return None
    with open(sc, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    header = FrameFileHeader.from_dict(doc["header"])
    extra = {k: v for k, v in doc.items() if k != "header"}
    return header, extra
