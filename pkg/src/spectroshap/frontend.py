"""Audio loading and the spectro-temporal feature frontend.

Utterances enter as mono PCM16 WAV at 16 kHz, are brought to a fixed
duration by cyclic repetition or front-aligned truncation, and are
converted to magnitude or log-power spectrograms with a symmetric Hamming
window.  The frame count is always ``floor((len - window_len) / hop) + 1``:
trailing samples shorter than one window are dropped, never zero-padded.
"""

from __future__ import annotations

import wave
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

LOG_POWER_FLOOR = 1e-10


class AudioFormatError(ValueError):
    """Input file violates the mono/PCM16/16 kHz contract."""


@dataclass
class Waveform:
    """Time-series audio samples in [-1, 1] with their sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float32)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise ValueError("waveform must be a non-empty 1-D sample array")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("waveform contains non-finite samples")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate={self.sample_rate}, expected positive")

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class StftConfig:
    """Analysis parameters, stored as sample counts to avoid ms rounding.

    The default is a 64 ms window with an 8 ms shift at 16 kHz and a
    1024-point FFT.
    """

    window_len: int = 1024
    hop: int = 128
    fft_size: int = 1024
    window_kind: str = "hamming"
    scale: str = "log_power"

    def __post_init__(self):
        if not (0 < self.hop <= self.window_len <= self.fft_size):
            raise ValueError(
                f"need 0 < hop <= window_len <= fft_size, got "
                f"hop={self.hop}, window_len={self.window_len}, fft_size={self.fft_size}"
            )
        if self.fft_size & (self.fft_size - 1) != 0:
            raise ValueError(f"fft_size={self.fft_size} is not a power of two")
        if self.window_kind != "hamming":
            raise ValueError(f"unsupported window_kind {self.window_kind!r}")
        if self.scale not in ("log_power", "magnitude"):
            raise ValueError(f"unsupported scale {self.scale!r}")


@dataclass
class Spectrogram:
    """M x N spectro-temporal matrix plus axis metadata.

    Row m covers center frequency ``m * bin_hz`` (row 0 = DC); column n
    covers center time ``t0_s + n * frame_s``.
    """

    values: np.ndarray
    bin_hz: float
    frame_s: float
    t0_s: float = 0.0
    scale: str = "magnitude"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float32)
        if self.values.ndim != 2:
            raise ValueError("spectrogram values must be 2-D (bins x frames)")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("spectrogram contains non-finite values")

    @property
    def n_bins(self) -> int:
        return self.values.shape[0]

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]

    @property
    def nyquist_hz(self) -> float:
        return (self.n_bins - 1) * self.bin_hz


def load_wav(path, expected_rate: int = 16000) -> Waveform:
    """Read a mono PCM16 RIFF/WAVE file, normalizing samples by 1/32768.

    Anything that is not mono, 16-bit PCM at ``expected_rate`` is rejected
    with a diagnostic naming the offending property.
    """
    with wave.open(str(path), "rb") as wf:
        channels = wf.getnchannels()
        if channels != 1:
            raise AudioFormatError(f"channels={channels}, expected mono")
        width = wf.getsampwidth()
        if width != 2:
            raise AudioFormatError(f"sample_width={8 * width} bit, expected 16-bit PCM")
        if wf.getcomptype() != "NONE":
            raise AudioFormatError(
                f"compression={wf.getcomptype()!r}, expected uncompressed PCM"
            )
        rate = wf.getframerate()
        if rate != expected_rate:
            raise AudioFormatError(f"sample_rate={rate}, expected {expected_rate}")
        n = wf.getnframes()
        if n == 0:
            raise AudioFormatError("empty audio stream")
        raw = wf.readframes(n)
    pcm = np.frombuffer(raw, dtype="<i2")
    return Waveform(pcm.astype(np.float32) / 32768.0, rate)


def write_wav(path, w: Waveform) -> None:
    """Write mono PCM16; samples are clipped to [-1, 1] and scaled by 32767."""
    pcm = np.clip(w.samples, -1.0, 1.0) * 32767.0
    pcm = np.rint(pcm).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(w.sample_rate)
        wf.writeframes(pcm.tobytes())


def fix_duration(w: Waveform, target_s: float) -> Waveform:
    """Repeat short inputs end-to-end, truncate long ones from the start."""
    if target_s <= 0:
        raise ValueError(f"target_s={target_s}, expected positive")
    target = int(round(target_s * w.sample_rate))
    n = w.samples.size
    if n >= target:
        out = w.samples[:target].copy()
    else:
        reps = -(-target // n)
        out = np.tile(w.samples, reps)[:target]
    return Waveform(out, w.sample_rate)


def stft(w: Waveform, cfg: StftConfig = StftConfig()) -> Spectrogram:
    """Short-time Fourier analysis to a magnitude or log-power spectrogram.

    Log-power values are ``ln(|X|^2 + 1e-10)``; the floor keeps silent
    frames finite.  The Hamming window is symmetric:
    ``0.54 - 0.46 cos(2 pi n / (window_len - 1))``.
    """
    n = w.samples.size
    if n < cfg.window_len:
        raise ValueError(
            f"input of {n} samples is shorter than one window ({cfg.window_len})"
        )
    n_frames = (n - cfg.window_len) // cfg.hop + 1
    frames = sliding_window_view(w.samples, cfg.window_len)[:: cfg.hop][:n_frames]
    window = np.hamming(cfg.window_len)
    spectrum = np.fft.rfft(frames * window, n=cfg.fft_size, axis=1)
    mag = np.abs(spectrum).T
    if cfg.scale == "log_power":
        values = np.log(mag * mag + LOG_POWER_FLOOR)
    else:
        values = mag
    return Spectrogram(
        values=values.astype(np.float32),
        bin_hz=w.sample_rate / cfg.fft_size,
        frame_s=cfg.hop / w.sample_rate,
        t0_s=cfg.window_len / (2 * w.sample_rate),
        scale=cfg.scale,
    )


def write_spectrogram_csv(spec: Spectrogram, path) -> None:
    """CSV export: one row per frequency bin (row 0 = DC), one column per frame."""
    np.savetxt(path, spec.values, fmt="%.9g", delimiter=",")


def read_spectrogram_csv(path) -> np.ndarray:
    """Read back the value matrix written by :func:`write_spectrogram_csv`."""
    values = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    return values.astype(np.float32)
