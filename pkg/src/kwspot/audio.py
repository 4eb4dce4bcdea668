"""PCM clip handling: WAV I/O, length normalization, dataset ingestion, streaming windows.

All clips are mono 16-bit PCM at the canonical 16 kHz rate. Files at other
rates are rejected rather than resampled so the DSP stays bit-reproducible.
"""

from __future__ import annotations

import json
import struct
import wave
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional

import numpy as np

from .errors import EmptyDataset, MalformedWav, UnsupportedEncoding, WrongSampleRate

CANONICAL_RATE = 16000
WINDOW_SAMPLES = CANONICAL_RATE  # 1-second analysis window


@dataclass(frozen=True)
class AudioClip:
    """One mono PCM-16 sample buffer, optionally labeled."""

    samples: np.ndarray  # int16, shape (n,)
    sample_rate_hz: int = CANONICAL_RATE
    label: Optional[str] = None
    source_path: Optional[str] = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.int16)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1:
            raise ValueError("clips are mono: samples must be one-dimensional")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")

    def duration_ms(self) -> float:
        return len(self.samples) * 1000.0 / self.sample_rate_hz


@dataclass(frozen=True)
class StreamWindow:
    """A 1-second slice emitted by the streaming ring buffer."""

    samples: np.ndarray  # int16, shape (WINDOW_SAMPLES,)
    start_time_ms: int


def load_wav(path) -> AudioClip:
    """Read a PCM-16 WAV file; multi-channel input is downmixed by averaging.

    The sample rate is preserved as-is (no resampling here); callers that
    need the canonical rate check it via normalize_length or explicitly.
    """
    path = Path(path)
    try:
        with wave.open(str(path), "rb") as wf:
            n_channels = wf.getnchannels()
            sampwidth = wf.getsampwidth()
            rate = wf.getframerate()
            n_frames = wf.getnframes()
            raw = wf.readframes(n_frames)
    except (wave.Error, EOFError, struct.error) as exc:
        raise MalformedWav(f"{path}: {exc}") from exc
    except OSError as exc:
        raise MalformedWav(f"{path}: {exc}") from exc
    if sampwidth != 2:
        raise UnsupportedEncoding(
            f"{path}: expected 16-bit PCM, got {8 * sampwidth}-bit"
        )
    data = np.frombuffer(raw, dtype="<i2")
    if n_channels > 1:
        usable = (len(data) // n_channels) * n_channels
        frames = data[:usable].reshape(-1, n_channels)
        # Average in int32 then truncate toward zero, like a fixed-point mixer.
        data = (frames.astype(np.int32).sum(axis=1) // n_channels).astype(np.int16)
    return AudioClip(samples=data.astype(np.int16), sample_rate_hz=rate,
                     source_path=str(path))


def save_wav(clip: AudioClip, path) -> None:
    """Write a clip as mono PCM-16 little-endian RIFF/WAVE."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(clip.sample_rate_hz)
        wf.writeframes(clip.samples.astype("<i2").tobytes())


def normalize_length(clip: AudioClip) -> AudioClip:
    """Pad or crop a clip to exactly one second (16000 samples).

    Shorter clips are zero-padded symmetrically (odd remainders put the extra
    sample at the back) so keyword energy stays centered; longer clips are
    center-cropped.
    """
    if clip.sample_rate_hz != CANONICAL_RATE:
        raise WrongSampleRate(
            f"expected {CANONICAL_RATE} Hz, got {clip.sample_rate_hz}"
        )
    n = len(clip.samples)
    if n == WINDOW_SAMPLES:
        return clip
    if n < WINDOW_SAMPLES:
        pad = WINDOW_SAMPLES - n
        front = pad // 2
        samples = np.zeros(WINDOW_SAMPLES, dtype=np.int16)
        samples[front:front + n] = clip.samples
    else:
        start = (n - WINDOW_SAMPLES) // 2
        samples = clip.samples[start:start + WINDOW_SAMPLES].copy()
    return AudioClip(samples=samples, sample_rate_hz=clip.sample_rate_hz,
                     label=clip.label, source_path=clip.source_path)


@dataclass
class DatasetManifest:
    """Directory-per-label dataset listing; paths are relative to root."""

    root: str
    labels: dict[str, list[str]]  # label -> sorted relative WAV paths
    sample_rate_hz: int = CANONICAL_RATE
    unreadable: list[str] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        return {label: len(paths) for label, paths in self.labels.items()}

    def total(self) -> int:
        return sum(len(p) for p in self.labels.values())

    def to_json(self) -> str:
        payload = {
            "labels": self.labels,
            "sample_rate_hz": self.sample_rate_hz,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str, root: str = ".") -> "DatasetManifest":
        payload = json.loads(text)
        return cls(root=root, labels={k: list(v) for k, v in payload["labels"].items()},
                   sample_rate_hz=int(payload["sample_rate_hz"]))


def ingest_dataset(root) -> DatasetManifest:
    """Scan a directory tree with one subdirectory per keyword label.

    Unreadable files are collected and reported on the manifest instead of
    aborting the scan.
    """
    root = Path(root)
    labels: dict[str, list[str]] = {}
    unreadable: list[str] = []
    if root.is_dir():
        for sub in sorted(p for p in root.iterdir() if p.is_dir()):
            rel_paths = []
            for wav_path in sorted(sub.glob("*.wav")):
                try:
                    with open(wav_path, "rb") as fh:
                        header = fh.read(12)
                    if len(header) < 12 or header[:4] != b"RIFF" or header[8:12] != b"WAVE":
                        raise MalformedWav(f"{wav_path}: not RIFF/WAVE")
                except (OSError, MalformedWav):
                    unreadable.append(str(wav_path.relative_to(root)))
                    continue
                rel_paths.append(str(wav_path.relative_to(root)))
            if rel_paths:
                labels[sub.name] = rel_paths
    if not labels:
        raise EmptyDataset(f"no labeled WAV files under {root}")
    return DatasetManifest(root=str(root), labels=labels, unreadable=unreadable)


class RingBuffer:
    """Fixed-capacity PCM ring buffer; never reallocates after construction.

    Single-producer/single-consumer: one writer pushes samples, one reader
    snapshots windows. ``snapshot`` linearizes the newest ``capacity`` samples
    into a caller-supplied buffer (or a fresh copy when none is given).
    """

    def __init__(self, capacity: int = WINDOW_SAMPLES):
        self._buf = np.zeros(capacity, dtype=np.int16)
        self._capacity = capacity
        self._write = 0  # next write position
        self.total_written = 0

    @property
    def capacity(self) -> int:
        return self._capacity

    @property
    def filled(self) -> bool:
        return self.total_written >= self._capacity

    def push(self, samples: np.ndarray) -> None:
        samples = np.asarray(samples, dtype=np.int16)
        n = len(samples)
        if n >= self._capacity:
            self._buf[:] = samples[n - self._capacity:]
            self._write = 0
        else:
            end = self._write + n
            if end <= self._capacity:
                self._buf[self._write:end] = samples
            else:
                first = self._capacity - self._write
                self._buf[self._write:] = samples[:first]
                self._buf[:end - self._capacity] = samples[first:]
            self._write = end % self._capacity
        self.total_written += n

    def snapshot(self, out: Optional[np.ndarray] = None) -> np.ndarray:
        """Copy the newest ``capacity`` samples, oldest first."""
        if out is None:
            out = np.empty(self._capacity, dtype=np.int16)
        tail = self._capacity - self._write
        out[:tail] = self._buf[self._write:]
        out[tail:] = self._buf[:self._write]
        return out


def stream_windows(pcm_source: Iterable[np.ndarray], hop_ms: int) -> Iterator[StreamWindow]:
    """Emit a 1-second window every ``hop_ms`` once one second has accumulated.

    ``pcm_source`` yields int16 chunks of arbitrary size; exhaustion of the
    source ends the stream gracefully. Window start times increase by exactly
    ``hop_ms``.
    """
    if not 50 <= hop_ms <= 1000:
        raise ValueError(f"hop_ms must be in [50, 1000], got {hop_ms}")
    hop_samples = hop_ms * CANONICAL_RATE // 1000
    ring = RingBuffer(WINDOW_SAMPLES)
    next_emit = WINDOW_SAMPLES  # total samples needed before the next window
    for chunk in pcm_source:
        chunk = np.asarray(chunk, dtype=np.int16)
        pos = 0
        while pos < len(chunk):
            take = min(len(chunk) - pos, next_emit - ring.total_written)
            ring.push(chunk[pos:pos + take])
            pos += take
            if ring.total_written == next_emit:
                start_ms = (ring.total_written - WINDOW_SAMPLES) * 1000 // CANONICAL_RATE
                yield StreamWindow(samples=ring.snapshot(), start_time_ms=start_ms)
                next_emit += hop_samples
