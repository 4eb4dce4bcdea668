"""Event-driven command interpreter: sleep/active modes, latched flags, virtual LED.

The machine is a pure transition function ``(state, event) -> state``; it has
no wall clock of its own. Inactivity timeouts are applied when the next gated
event arrives: if that event is later than ``timeout_ms`` after the last
accepted activity, the machine drops to sleep before processing it.

Events below the confidence threshold, and filler labels at any confidence,
change nothing: they neither act nor refresh the activity timer.

The LED is an actuator latched by the machine: it only changes when the
``led`` keyword executes the current flags (or on ``off`` via a later ``led``).
``cancel`` resets command flags and colors but does not touch the display.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence

from .errors import UnknownKeyword
from .keywords import CODE_RGB, COLOR_CODES, FILLER_KEYWORDS, KEYWORD_SET


class Mode(Enum):
    SLEEP = "SLEEP"
    ACTIVE = "ACTIVE"


class Blink(Enum):
    NONE = "NONE"
    BLINK = "BLINK"   # 500 ms period
    FAST = "FAST"     # 150 ms
    FLASH = "FLASH"   # 75 ms
    SLOW = "SLOW"     # 1000 ms

BLINK_PERIOD_MS = {Blink.NONE: 0, Blink.BLINK: 500, Blink.FAST: 150,
                   Blink.FLASH: 75, Blink.SLOW: 1000}

FLAG_NAMES = ("ledOn", "ledOff", "andKey", "cancelKey", "blinkKey", "fastKey",
              "flashKey", "slowKey", "plusKey", "quickKey", "toggleKey", "wakeUp")

_FLAG_KEYWORDS = {"and": "andKey", "blink": "blinkKey", "fast": "fastKey",
                  "flash": "flashKey", "slow": "slowKey", "plus": "plusKey",
                  "quick": "quickKey", "toggle": "toggleKey"}


@dataclass(frozen=True)
class CommandEvent:
    keyword: str
    confidence: float
    timestamp_ms: int


@dataclass(frozen=True)
class LedState:
    on: bool = False
    rgb_set: frozenset = frozenset()
    blink: Blink = Blink.NONE

    def to_dict(self) -> dict:
        return {"on": self.on, "rgb_set": sorted(self.rgb_set),
                "blink": self.blink.value}


@dataclass(frozen=True)
class InterpreterState:
    mode: Mode = Mode.SLEEP
    color: int = 0
    color_set: frozenset = frozenset()
    flags: tuple = tuple(False for _ in FLAG_NAMES)
    last_activity_ms: int = 0
    led: LedState = LedState()

    def flag(self, name: str) -> bool:
        return self.flags[FLAG_NAMES.index(name)]

    def flags_dict(self) -> dict:
        return dict(zip(FLAG_NAMES, self.flags))

    def with_flags(self, **updates) -> "InterpreterState":
        flags = list(self.flags)
        for name, value in updates.items():
            flags[FLAG_NAMES.index(name)] = value
        return replace(self, flags=tuple(flags))


@dataclass(frozen=True)
class StepConfig:
    threshold: float = 0.60
    timeout_ms: int = 10000


@dataclass(frozen=True)
class ActionTrace:
    timestamp_ms: int
    keyword: str
    confidence: float
    accepted: bool   # True when the machine acted on the event
    mode: Mode
    color: int
    flags: dict
    led: LedState

    def to_json(self) -> str:
        return json.dumps({
            "ts": self.timestamp_ms,
            "event": self.keyword,
            "confidence": round(self.confidence, 6),
            "accepted": self.accepted,
            "mode": self.mode.value,
            "color": self.color,
            "flags": self.flags,
            "led": self.led.to_dict(),
        }, sort_keys=True)


def derive_blink(state: InterpreterState) -> Blink:
    # precedence: the most urgent modifier wins
    if state.flag("flashKey"):
        return Blink.FLASH
    if state.flag("fastKey"):
        return Blink.FAST
    if state.flag("slowKey"):
        return Blink.SLOW
    if state.flag("blinkKey"):
        return Blink.BLINK
    return Blink.NONE


def step(state: InterpreterState, event: CommandEvent,
         config: StepConfig = StepConfig()) -> tuple[InterpreterState, LedState, ActionTrace]:
    """Process one keyword event; returns (new state, LED state, trace)."""
    if event.keyword not in KEYWORD_SET:
        raise UnknownKeyword(f"unknown keyword {event.keyword!r}")

    gated = event.confidence >= config.threshold and event.keyword not in FILLER_KEYWORDS
    if not gated:
        return state, state.led, _trace(event, False, state)

    # inactivity: fall asleep before honoring the new event
    if (state.mode is Mode.ACTIVE
            and event.timestamp_ms - state.last_activity_ms >= config.timeout_ms):
        state = replace(state, mode=Mode.SLEEP).with_flags(wakeUp=False)

    if state.mode is Mode.SLEEP:
        if event.keyword == "wake_up":
            state = replace(state, mode=Mode.ACTIVE,
                            last_activity_ms=event.timestamp_ms).with_flags(wakeUp=True)
            return state, state.led, _trace(event, True, state)
        return state, state.led, _trace(event, False, state)

    state = replace(state, last_activity_ms=event.timestamp_ms)
    kw = event.keyword
    if kw == "wake_up":
        pass  # already active: refreshes the timer only
    elif kw in COLOR_CODES:
        code = COLOR_CODES[kw]
        if state.flag("andKey"):
            state = replace(state, color=code,
                            color_set=state.color_set | {code}).with_flags(andKey=False)
        else:
            state = replace(state, color=code, color_set=frozenset({code}))
    elif kw == "on":
        state = state.with_flags(ledOn=True, ledOff=False)
    elif kw == "off":
        state = replace(state, color=0,
                        color_set=frozenset()).with_flags(ledOff=True, ledOn=False)
    elif kw in _FLAG_KEYWORDS:
        state = state.with_flags(**{_FLAG_KEYWORDS[kw]: True})
    elif kw == "cancel":
        cleared = {name: False for name in FLAG_NAMES if name != "wakeUp"}
        state = replace(state, color=0, color_set=frozenset()).with_flags(**cleared)
    elif kw == "led":
        if state.flag("ledOff"):
            state = replace(state, led=LedState(on=False))
        elif state.flag("ledOn") and state.color_set:
            rgb = frozenset(CODE_RGB[c] for c in state.color_set)
            state = replace(state, led=LedState(on=True, rgb_set=rgb,
                                                blink=derive_blink(state)))
        # neither latch set: nothing to actuate
    return state, state.led, _trace(event, True, state)


def _trace(event: CommandEvent, accepted: bool, state: InterpreterState) -> ActionTrace:
    return ActionTrace(timestamp_ms=event.timestamp_ms, keyword=event.keyword,
                       confidence=event.confidence, accepted=accepted,
                       mode=state.mode, color=state.color,
                       flags=state.flags_dict(), led=state.led)


def run_sequence(events: Sequence[CommandEvent],
                 config: StepConfig = StepConfig(),
                 initial: Optional[InterpreterState] = None):
    """Left fold of ``step``; returns (final state, final LED, full trace list)."""
    state = initial if initial is not None else InterpreterState()
    traces = []
    led = state.led
    for event in events:
        state, led, trace = step(state, event, config)
        traces.append(trace)
    return state, led, traces
