"""Matrix CSV round trips, mono WAV ingestion and magnitude STFT.

The WAV reader parses the RIFF container directly so that a truncated or
malformed file is always reported as an error instead of silently yielding
partial data.  Supported encodings are 16-bit PCM and 32-bit IEEE float;
multichannel input is averaged down to mono.

The STFT uses the simplest deterministic convention: frame t covers samples
``[t*hop, t*hop + window_len)`` with no centering and no zero padding, each
frame is multiplied by a periodic Hann window, and the DFT size equals the
window length, keeping bins ``0 .. window_len//2``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .validation import as_nonneg_matrix

__all__ = [
    "AudioBuffer",
    "StftConfig",
    "WavReadError",
    "MatrixParseError",
    "read_wav_mono",
    "stft_magnitude",
    "write_matrix_csv",
    "read_matrix_csv",
]


class WavReadError(ValueError):
    """Missing, truncated or unsupported WAV content."""


class MatrixParseError(ValueError):
    """Malformed matrix CSV content; the message names the offending cell."""


@dataclass(frozen=True)
class AudioBuffer:
    """Mono audio samples in [-1, 1] with their sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        if np.asarray(self.samples).size == 0:
            raise ValueError("audio buffer must be non-empty")
        if self.sample_rate <= 0:
            raise ValueError(f"sample rate must be positive, got {self.sample_rate}")


@dataclass(frozen=True)
class StftConfig:
    """Analysis window length and hop in samples (Hann window only)."""

    window_len: int
    hop: int
    window: str = "hann"

    def __post_init__(self) -> None:
        if self.window_len < 1 or not 0 < self.hop <= self.window_len:
            raise ValueError(
                f"need 0 < hop <= window_len, got hop={self.hop}, window_len={self.window_len}"
            )
        if self.window != "hann":
            raise ValueError(f"unsupported window {self.window!r}; only 'hann' is implemented")


def read_wav_mono(path) -> AudioBuffer:
    """Read a RIFF/WAVE file as normalized mono samples.

    16-bit PCM is divided by 32768; 32-bit IEEE float is taken as is.  Any
    channel count is averaged to mono.  Raises :class:`WavReadError` for a
    corrupt header, an unsupported encoding, or a data chunk shorter than
    its declared size (no partial reads).
    """
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise WavReadError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(raw):
        chunk_id = raw[pos : pos + 4]
        (chunk_size,) = struct.unpack_from("<I", raw, pos + 4)
        body = raw[pos + 8 : pos + 8 + chunk_size]
        if len(body) < chunk_size:
            raise WavReadError(f"{path}: truncated {chunk_id!r} chunk")
        if chunk_id == b"fmt ":
            if chunk_size < 16:
                raise WavReadError(f"{path}: malformed fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            data = body
        pos += 8 + chunk_size + (chunk_size & 1)  # chunks are word aligned

    if fmt is None or data is None:
        raise WavReadError(f"{path}: missing fmt or data chunk")
    audio_format, n_channels, sample_rate, _, _, bits = fmt
    if n_channels < 1:
        raise WavReadError(f"{path}: invalid channel count {n_channels}")

    if audio_format == 1 and bits == 16:
        samples = np.frombuffer(data[: len(data) - len(data) % 2], dtype="<i2")
        samples = samples.astype(float) / 32768.0
    elif audio_format == 3 and bits == 32:
        samples = np.frombuffer(data[: len(data) - len(data) % 4], dtype="<f4")
        samples = samples.astype(float)
    else:
        raise WavReadError(
            f"{path}: unsupported encoding (format={audio_format}, bits={bits}); "
            "expected 16-bit PCM or 32-bit float"
        )
    if samples.size == 0 or samples.size % n_channels != 0:
        raise WavReadError(f"{path}: data chunk does not hold whole frames")
    if n_channels > 1:
        samples = samples.reshape(-1, n_channels).mean(axis=1)
    return AudioBuffer(samples=samples, sample_rate=int(sample_rate))


def stft_magnitude(audio: AudioBuffer, config: StftConfig) -> np.ndarray:
    """Magnitude spectrogram with ``window_len//2 + 1`` rows.

    Frame count is ``(N - window_len)//hop + 1``; the audio must cover at
    least one full window.
    """
    x = np.asarray(audio.samples, dtype=float)
    L, hop = config.window_len, config.hop
    if x.size < L:
        raise ValueError(f"audio has {x.size} samples, shorter than one window of {L}")
    n_frames = (x.size - L) // hop + 1
    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(L) / L)  # periodic Hann
    frames = x[np.arange(n_frames)[:, None] * hop + np.arange(L)[None, :]]
    return np.abs(np.fft.rfft(frames * window, axis=1)).T


def write_matrix_csv(M, path) -> None:
    """Write a nonnegative matrix as headerless CSV, 17 significant digits."""
    M = as_nonneg_matrix(M, "matrix")
    lines = [",".join(format(v, ".17g") for v in row) for row in M]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_matrix_csv(path) -> np.ndarray:
    """Read a matrix written by :func:`write_matrix_csv`.

    Raises :class:`MatrixParseError` naming the 1-based row and column of
    the first ragged, non-numeric or negative cell; an empty file is an
    error rather than an empty matrix.
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MatrixParseError(f"{path}: empty file is not a valid matrix")
    rows = []
    width = None
    for i, line in enumerate(lines, start=1):
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise MatrixParseError(f"{path}: row {i} has {len(cells)} cells, expected {width}")
        row = []
        for j, cell in enumerate(cells, start=1):
            try:
                value = float(cell)
            except ValueError:
                raise MatrixParseError(f"{path}: non-numeric cell at row {i}, column {j}: {cell!r}") from None
            if not np.isfinite(value):
                raise MatrixParseError(f"{path}: non-finite cell at row {i}, column {j}: {cell!r}")
            if value < 0:
                raise MatrixParseError(f"{path}: negative cell at row {i}, column {j}: {cell!r}")
            row.append(value)
        rows.append(row)
    return np.asarray(rows, dtype=float)
