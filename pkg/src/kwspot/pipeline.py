"""Sliding-window quantized inference wired into the interpreter.

One pipeline instance consumes raw PCM (arbitrary chunking), emits a window
every ``hop_ms`` once a second of audio has accumulated, classifies it, and
folds the prediction into the command state machine. Event timestamps come
from the sample counter, never the wall clock, so any transport feeding the
same bytes produces the identical event sequence.

Event stream (JSON-serializable dicts):
  PREDICTION  every window's top label, unless debounced
  STATE       after every gated prediction (confidence >= threshold)
  LED         whenever the virtual LED changes
  ERROR       transport-level problems (emitted by callers)

Windows whose top label is a filler (noise/noise2/unknown) are treated as
"nothing heard": no events, no state machine step. Debounce: after a gated
prediction of some label, the same label is suppressed entirely for
``debounce_ms``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import CANONICAL_RATE, WINDOW_SAMPLES, RingBuffer
from .features import extract_mfcc, mel_filterbank
from .interpreter import CommandEvent, InterpreterState, StepConfig, step
from .keywords import FILLER_KEYWORDS
from .quant import QuantizedModel, QuantRuntime

DEBOUNCE_MS = 1000


@dataclass
class PipelineConfig:
    hop_ms: int = 250
    threshold: float = 0.60
    timeout_ms: int = 10000
    debounce_ms: int = DEBOUNCE_MS


class StreamPipeline:
    def __init__(self, qmodel: QuantizedModel, config: PipelineConfig = PipelineConfig(),
                 backend=None):
        if not 50 <= config.hop_ms <= 1000:
            raise ValueError(f"hop_ms must be in [50, 1000], got {config.hop_ms}")
        self.qmodel = qmodel
        self.config = config
        self.runtime = QuantRuntime(qmodel, backend=backend)
        self.mfcc_config = qmodel.mfcc_config
        self._bank = mel_filterbank(self.mfcc_config)
        self._step_config = StepConfig(threshold=config.threshold,
                                       timeout_ms=config.timeout_ms)
        self._hop_samples = config.hop_ms * CANONICAL_RATE // 1000
        self.reset_events()

    def reset_events(self) -> None:
        self._ring = RingBuffer(WINDOW_SAMPLES)
        self._next_emit = WINDOW_SAMPLES
        self._window_scratch = np.empty(WINDOW_SAMPLES, dtype=np.int16)
        self.state = InterpreterState()
        self._last_gated: dict[str, int] = {}

    def initial_event(self) -> dict:
        return self._state_event(0)

    def reset(self) -> dict:
        """Reinitialize the interpreter and stream clock; returns a STATE event."""
        self.reset_events()
        return self.initial_event()

    def feed(self, samples: np.ndarray) -> list[dict]:
        """Push PCM samples; returns the events produced by any due windows."""
        samples = np.asarray(samples, dtype=np.int16)
        events: list[dict] = []
        pos = 0
        while pos < len(samples):
            take = min(len(samples) - pos, self._next_emit - self._ring.total_written)
            self._ring.push(samples[pos:pos + take])
            pos += take
            if self._ring.total_written == self._next_emit:
                end_ms = self._ring.total_written * 1000 // CANONICAL_RATE
                self._ring.snapshot(out=self._window_scratch)
                events.extend(self._process_window(end_ms))
                self._next_emit += self._hop_samples
        return events

    def _process_window(self, ts_ms: int) -> list[dict]:
        from .audio import AudioClip

        clip = AudioClip(samples=self._window_scratch, sample_rate_hz=CANONICAL_RATE)
        features = extract_mfcc(clip, self.mfcc_config, bank=self._bank)
        prediction = self.runtime.run(features)
        label, conf = prediction.top_label, prediction.confidence

        if label in FILLER_KEYWORDS:
            return []  # nothing heard
        last = self._last_gated.get(label)
        if last is not None and ts_ms - last < self.config.debounce_ms:
            return []  # debounced: drop the window's prediction entirely

        events = [{"kind": "PREDICTION", "ts": ts_ms, "label": label,
                   "confidence": round(conf, 6)}]
        if conf < self.config.threshold:
            return events  # visible to the UI, invisible to the machine

        self._last_gated[label] = ts_ms
        prev_led = self.state.led
        self.state, led, _trace = step(
            self.state,
            CommandEvent(keyword=label, confidence=conf, timestamp_ms=ts_ms),
            self._step_config,
        )
        events.append(self._state_event(ts_ms))
        if led != prev_led:
            events.append({"kind": "LED", "ts": ts_ms, "on": led.on,
                           "rgb_set": sorted(led.rgb_set), "blink": led.blink.value})
        return events

    def _state_event(self, ts_ms: int) -> dict:
        return {
            "kind": "STATE",
            "ts": ts_ms,
            "mode": self.state.mode.value,
            "color": self.state.color,
            "color_set": sorted(self.state.color_set),
            "flags": self.state.flags_dict(),
        }
