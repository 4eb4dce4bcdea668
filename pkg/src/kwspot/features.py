"""MFCC front end: pre-emphasis, Hamming frames, mel filterbank, log, DCT-II.

The full pipeline for one clip is
``pre-emphasis -> framing -> Hamming window -> |rfft| -> mel energies ->
log(max(E, floor)) -> orthonormal DCT-II``, keeping the first ``n_coeffs``
coefficients per frame.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
import scipy.fft

from .audio import CANONICAL_RATE, WINDOW_SAMPLES, AudioClip
from .errors import InvalidConfig, ShapeMismatch, WrongLength

STD_GUARD = 1e-6  # lower bound on per-coefficient stddev during scaling


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@dataclass(frozen=True)
class MfccConfig:
    frame_len_samples: int = 400   # 25 ms at 16 kHz
    hop_samples: int = 160         # 10 ms
    fft_size: int = 512
    n_mel_filters: int = 40
    n_coeffs: int = 13
    preemphasis: float = 0.97
    mel_low_hz: float = 20.0
    mel_high_hz: float = 8000.0
    log_floor: float = 1e-10

    def __post_init__(self):
        if self.fft_size < self.frame_len_samples:
            raise InvalidConfig("fft_size must be >= frame_len_samples")
        if self.n_coeffs > self.n_mel_filters:
            raise InvalidConfig("n_coeffs must be <= n_mel_filters")
        if not 0.0 <= self.preemphasis < 1.0:
            raise InvalidConfig("preemphasis must be in [0, 1)")
        if not 0.0 <= self.mel_low_hz < self.mel_high_hz <= CANONICAL_RATE / 2:
            raise InvalidConfig("need 0 <= mel_low_hz < mel_high_hz <= sample_rate/2")
        if self.log_floor <= 0:
            raise InvalidConfig("log_floor must be positive")
        if self.frame_len_samples <= 0 or self.hop_samples <= 0:
            raise InvalidConfig("frame and hop sizes must be positive")

    @property
    def n_frames(self) -> int:
        return (WINDOW_SAMPLES - self.frame_len_samples) // self.hop_samples + 1

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MfccConfig":
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MfccConfig":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class MfccMatrix:
    """n_frames x n_coeffs feature grid for one 1-second clip."""

    values: np.ndarray
    config: MfccConfig

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        if values.shape != (self.config.n_frames, self.config.n_coeffs):
            raise ShapeMismatch(
                f"expected {(self.config.n_frames, self.config.n_coeffs)}, "
                f"got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("MFCC values must be finite")


def mel_center_freqs(config: MfccConfig) -> np.ndarray:
    """Hz positions of the n_mel_filters+2 mel-equally-spaced band edges."""
    mel_pts = np.linspace(hz_to_mel(config.mel_low_hz),
                          hz_to_mel(config.mel_high_hz),
                          config.n_mel_filters + 2)
    return mel_to_hz(mel_pts)


def triangle_weights(freqs: np.ndarray, f_lo: float, f_center: float,
                     f_hi: float) -> np.ndarray:
    """Triangular filter evaluated at ``freqs``: 0 at the edges, 1 at the center."""
    freqs = np.asarray(freqs, dtype=np.float64)
    rising = (freqs - f_lo) / (f_center - f_lo)
    falling = (f_hi - freqs) / (f_hi - f_center)
    return np.maximum(0.0, np.minimum(rising, falling))


def mel_filterbank(config: MfccConfig) -> np.ndarray:
    """Triangular mel filterbank, shape (n_mel_filters, fft_size // 2 + 1).

    Filter centers are equally spaced on the mel scale between mel_low_hz and
    mel_high_hz; each triangle peaks at 1.0 at its own center frequency.
    """
    edges = mel_center_freqs(config)
    bin_freqs = np.arange(config.fft_size // 2 + 1) * (CANONICAL_RATE / config.fft_size)
    bank = np.empty((config.n_mel_filters, len(bin_freqs)), dtype=np.float64)
    for m in range(config.n_mel_filters):
        bank[m] = triangle_weights(bin_freqs, edges[m], edges[m + 1], edges[m + 2])
    return bank


def frame_signal(samples: np.ndarray, config: MfccConfig) -> np.ndarray:
    """Pre-emphasize then slice into overlapping frames, shape (n_frames, frame_len)."""
    x = np.asarray(samples, dtype=np.float64)
    emphasized = np.empty_like(x)
    emphasized[0] = x[0]
    emphasized[1:] = x[1:] - config.preemphasis * x[:-1]
    idx = (np.arange(config.n_frames)[:, None] * config.hop_samples
           + np.arange(config.frame_len_samples)[None, :])
    return emphasized[idx]


def magnitude_spectra(samples: np.ndarray, config: MfccConfig) -> np.ndarray:
    """Hamming-windowed magnitude spectrum per frame, shape (n_frames, n_bins)."""
    frames = frame_signal(samples, config)
    window = np.hamming(config.frame_len_samples)
    return np.abs(np.fft.rfft(frames * window, n=config.fft_size, axis=1))


def mel_energies(clip: AudioClip, config: MfccConfig,
                 bank: np.ndarray | None = None) -> np.ndarray:
    """Per-frame mel filter energies before the log, shape (n_frames, n_mel)."""
    if len(clip.samples) != WINDOW_SAMPLES:
        raise WrongLength(f"expected {WINDOW_SAMPLES} samples, got {len(clip.samples)}")
    if bank is None:
        bank = mel_filterbank(config)
    spectra = magnitude_spectra(clip.samples, config)
    return spectra @ bank.T


def extract_mfcc(clip: AudioClip, config: MfccConfig | None = None,
                 bank: np.ndarray | None = None) -> MfccMatrix:
    """Convert a normalized 1-second clip into its MFCC matrix."""
    if config is None:
        config = MfccConfig()
    energies = mel_energies(clip, config, bank=bank)
    log_e = np.log(np.maximum(energies, config.log_floor))
    coeffs = scipy.fft.dct(log_e, type=2, norm="ortho", axis=1)[:, :config.n_coeffs]
    return MfccMatrix(values=coeffs, config=config)


@dataclass(frozen=True)
class FeatureStats:
    """Per-coefficient mean and stddev, computed on the training split only."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=np.float64))
        object.__setattr__(self, "std", np.asarray(self.std, dtype=np.float64))
        if self.mean.shape != self.std.shape or self.mean.ndim != 1:
            raise ShapeMismatch("mean/std must be matching 1-D vectors")

    @classmethod
    def identity(cls, n_coeffs: int) -> "FeatureStats":
        return cls(mean=np.zeros(n_coeffs), std=np.ones(n_coeffs))

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureStats":
        return cls(mean=np.array(d["mean"]), std=np.array(d["std"]))


def compute_feature_stats(matrices: Sequence[MfccMatrix]) -> FeatureStats:
    """Column mean/stddev over every frame of every training matrix."""
    if not matrices:
        raise InvalidConfig("no matrices to compute statistics from")
    stacked = np.concatenate([m.values for m in matrices], axis=0)
    return FeatureStats(mean=stacked.mean(axis=0), std=stacked.std(axis=0))


def feature_scale(m: MfccMatrix, stats: FeatureStats) -> MfccMatrix:
    """Standardize each coefficient column: (v - mean) / max(std, 1e-6)."""
    if stats.mean.shape[0] != m.values.shape[1]:
        raise ShapeMismatch(
            f"stats cover {stats.mean.shape[0]} coefficients, "
            f"matrix has {m.values.shape[1]}"
        )
    denom = np.maximum(stats.std, STD_GUARD)
    return MfccMatrix(values=(m.values - stats.mean) / denom, config=m.config)
