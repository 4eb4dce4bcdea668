"""Command interpreter vs the independent table-driven reference, plus the
documented semantics examples."""

import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kwspot.errors import UnknownKeyword
from kwspot.interpreter import (
    Blink,
    CommandEvent,
    InterpreterState,
    LedState,
    Mode,
    StepConfig,
    run_sequence,
    step,
)
from kwspot.keywords import KEYWORDS

from fsm_reference import initial_state as ref_initial
from fsm_reference import reference_run, reference_step

BLUE_RGB = (0, 0, 255)
RED_RGB = (255, 0, 0)
ALPHABET = ("wake_up", "blue", "red", "and", "on", "off", "led", "cancel")


def ev(keyword, conf=0.9, ts=0):
    return CommandEvent(keyword=keyword, confidence=conf, timestamp_ms=ts)


def events_at(keywords, conf=0.9, gap_ms=500):
    return [ev(k, conf, i * gap_ms) for i, k in enumerate(keywords)]


def state_as_dict(state: InterpreterState) -> dict:
    """Project the implementation state onto the reference representation."""
    return {
        "mode": state.mode.value,
        "color": state.color,
        "color_set": state.color_set,
        "flags": state.flags_dict(),
        "last_activity": state.last_activity_ms,
        "led_on": state.led.on,
        "led_rgb": state.led.rgb_set,
        "led_blink": state.led.blink.value,
    }


def ref_as_comparable(ref: dict) -> dict:
    return {
        "mode": ref["mode"],
        "color": ref["color"],
        "color_set": ref["color_set"],
        "flags": ref["flags"],
        "last_activity": ref["last_activity"],
        "led_on": ref["led_on"],
        "led_rgb": ref["led_rgb"],
        "led_blink": ref["led_blink"],
    }


class TestDocumentedExamples:
    def test_wake_up_activates(self):
        state, led, trace = step(InterpreterState(), ev("wake_up", 0.90))
        assert state.mode is Mode.ACTIVE
        assert state.flag("wakeUp")
        assert trace.accepted

    def test_blue_on_led_turns_blue(self):
        seq = events_at(["wake_up", "blue", "on", "led"])
        _state, led, _ = run_sequence(seq)
        assert led.on and led.rgb_set == frozenset({BLUE_RGB})

    def test_sub_threshold_color_ignored(self):
        state, _, _ = run_sequence([ev("wake_up", 0.9, 0), ev("blue", 0.55, 500)])
        assert state.color == 0 and state.color_set == frozenset()

    def test_red_and_blue_combo(self):
        seq = events_at(["wake_up", "red", "and", "blue", "on", "led"])
        _, led, _ = run_sequence(seq)
        assert led.rgb_set == frozenset({RED_RGB, BLUE_RGB})

    def test_cancel_resets_all_but_wakeup(self):
        seq = events_at(["wake_up", "blue", "on", "blink", "fast", "plus", "cancel"])
        state, _, _ = run_sequence(seq)
        flags = state.flags_dict()
        assert flags.pop("wakeUp") is True
        assert not any(flags.values())
        assert state.color == 0 and state.color_set == frozenset()
        assert state.mode is Mode.ACTIVE

    def test_timeout_sleeps_before_processing(self):
        state, _, _ = run_sequence([ev("wake_up", 0.9, 0)])
        state, _, trace = step(state, ev("blue", 0.9, 11000),
                               StepConfig(timeout_ms=10000))
        assert state.mode is Mode.SLEEP
        assert not trace.accepted
        assert state.color == 0

    def test_off_then_led_turns_off(self):
        on_seq = events_at(["wake_up", "blue", "on", "led"])
        state, led, _ = run_sequence(on_seq)
        assert led.on
        more = [ev("off", 0.9, 5000), ev("led", 0.9, 5500)]
        state, led, _ = run_sequence(more, initial=state)
        assert not led.on and led.rgb_set == frozenset()
        assert state.color == 0

    def test_wake_while_active_only_refreshes(self):
        seq = events_at(["wake_up", "blue", "wake_up"])
        state, _, _ = run_sequence(seq)
        assert state.color == 1  # color latch untouched
        assert state.last_activity_ms == 1000

    def test_filler_ignored_at_any_confidence(self):
        for filler in ("noise", "noise2", "unknown"):
            state, _, trace = step(InterpreterState(), ev(filler, 0.99))
            assert state == InterpreterState()
            assert not trace.accepted

    def test_unknown_keyword_raises(self):
        with pytest.raises(UnknownKeyword):
            step(InterpreterState(), ev("abracadabra", 0.9))

    def test_blink_precedence(self):
        seq = events_at(["wake_up", "blue", "on", "blink", "fast", "led"])
        _, led, _ = run_sequence(seq)
        assert led.blink is Blink.FAST  # fast outranks blink
        seq2 = events_at(["wake_up", "blue", "on", "blink", "led"])
        _, led2, _ = run_sequence(seq2)
        assert led2.blink is Blink.BLINK

    def test_empty_sequence_identity(self):
        state, led, traces = run_sequence([])
        assert state == InterpreterState()
        assert led == LedState()
        assert traces == []

    def test_wake_off_led(self):
        state, led, _ = run_sequence(events_at(["wake_up", "off", "led"]))
        assert not led.on and state.color == 0

    def test_trace_json_round_trips(self):
        _, _, traces = run_sequence(events_at(["wake_up", "blue"]))
        for trace in traces:
            record = json.loads(trace.to_json())
            assert {"ts", "event", "accepted", "mode", "color", "flags", "led"} <= set(record)


class TestReferenceEquivalence:
    def run_both(self, keywords, conf=0.9, gap_ms=500):
        events = events_at(keywords, conf, gap_ms)
        state, _, _ = run_sequence(events)
        ref = reference_run([(e.keyword, e.confidence, e.timestamp_ms) for e in events])
        return state_as_dict(state), ref_as_comparable(ref)

    def test_exhaustive_up_to_length_four(self):
        checked = 0
        for length in range(0, 5):
            for keywords in itertools.product(ALPHABET, repeat=length):
                ours, theirs = self.run_both(keywords)
                assert ours == theirs, f"diverged on {keywords}"
                checked += 1
        assert checked == 4681  # 8^0 + 8^1 + 8^2 + 8^3 + 8^4

    def test_sleep_gate_exhaustive(self):
        no_wake = tuple(k for k in ALPHABET if k != "wake_up")
        for length in range(0, 5):
            for keywords in itertools.product(no_wake, repeat=length):
                events = events_at(keywords)
                state, led, _ = run_sequence(events)
                assert led == LedState()
                assert state.mode is Mode.SLEEP

    def test_cancel_idempotent_over_reachable_states(self):
        config = StepConfig()
        for length in range(0, 4):
            for keywords in itertools.product(ALPHABET, repeat=length):
                state, _, _ = run_sequence(events_at(keywords))
                ts = 500 * (length + 1)
                once, led1, _ = step(state, ev("cancel", 0.9, ts), config)
                twice, led2, _ = step(once, ev("cancel", 0.9, ts), config)
                assert once == twice
                assert led1 == led2


@st.composite
def random_events(draw):
    n = draw(st.integers(min_value=0, max_value=12))
    events = []
    ts = 0
    for _ in range(n):
        ts += draw(st.sampled_from([200, 500, 900, 4000, 12000]))
        keywords = KEYWORDS
        events.append(CommandEvent(
            keyword=draw(st.sampled_from(keywords)),
            confidence=draw(st.floats(min_value=0.0, max_value=1.0)),
            timestamp_ms=ts,
        ))
    return events


class TestProperties:
    @given(random_events())
    @settings(max_examples=150, deadline=None)
    def test_sub_threshold_invisibility(self, events):
        threshold = 0.60
        full_state, full_led, _ = run_sequence(events)
        visible = [e for e in events if e.confidence >= threshold]
        filt_state, filt_led, _ = run_sequence(visible)
        assert full_state == filt_state
        assert full_led == filt_led

    @given(random_events())
    @settings(max_examples=150, deadline=None)
    def test_color_latch(self, events):
        state, _, traces = run_sequence(events)
        latest = 0
        for trace in traces:
            if not trace.accepted or trace.mode is not Mode.ACTIVE:
                continue
            if trace.keyword in ("blue", "green", "cyan", "red", "magenta",
                                 "yellow", "white"):
                latest = trace.color
            elif trace.keyword in ("off", "cancel"):
                latest = 0
        assert state.color == latest

    @given(random_events())
    @settings(max_examples=100, deadline=None)
    def test_matches_reference_on_random_traffic(self, events):
        state, _, _ = run_sequence(events)
        ref = reference_run([(e.keyword, e.confidence, e.timestamp_ms) for e in events])
        assert state_as_dict(state) == ref_as_comparable(ref)

    @given(random_events())
    @settings(max_examples=100, deadline=None)
    def test_mode_wakeup_flag_invariant(self, events):
        state, _, _ = run_sequence(events)
        if state.mode is Mode.SLEEP:
            assert not state.flag("wakeUp")
        else:
            assert state.flag("wakeUp")
        if state.color > 0:
            assert state.color in state.color_set


class TestReferenceSelfChecks:
    """The reference interpreter's own sanity anchors."""

    def test_reference_blue_on_led(self):
        s = reference_run([("wake_up", 0.9, 0), ("blue", 0.9, 500),
                           ("on", 0.9, 1000), ("led", 0.9, 1500)])
        assert s["led_on"] and s["led_rgb"] == frozenset({BLUE_RGB})

    def test_reference_threshold(self):
        s = reference_run([("wake_up", 0.9, 0), ("blue", 0.5, 500)])
        assert s["color"] == 0

    def test_reference_step_pure(self):
        s0 = ref_initial()
        before = json.dumps({k: sorted(v) if isinstance(v, frozenset) else v
                             for k, v in s0.items() if k != "flags"}, sort_keys=True)
        reference_step(s0, "wake_up", 0.9, 0)
        after = json.dumps({k: sorted(v) if isinstance(v, frozenset) else v
                            for k, v in s0.items() if k != "flags"}, sort_keys=True)
        assert before == after
