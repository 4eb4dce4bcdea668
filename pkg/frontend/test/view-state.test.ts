import { readFileSync } from 'node:fs';
import { join, dirname } from 'node:path';
import { fileURLToPath } from 'node:url';

import { describe, expect, it } from 'vitest';

import { parseEvent, ServiceEvent } from '../src/protocol.js';
import { applyEvent, initialModel, replay } from '../src/view-state.js';

const here = dirname(fileURLToPath(import.meta.url));

function loadRecordedSession(): ServiceEvent[] {
  const text = readFileSync(join(here, 'fixtures', 'session-events.jsonl'), 'utf-8');
  return text.trim().split('\n').map(line => {
    const event = parseEvent(line);
    if (event === null) throw new Error(`fixture line failed to parse: ${line}`);
    return event;
  });
}

describe('view state replay', () => {
  it('reproduces the expected final view from the recorded session', () => {
    const events = loadRecordedSession();
    const model = replay(events);

    expect(model.mode).toBe('ACTIVE');
    expect(model.led.on).toBe(true);
    // red + blue combination: exactly two swatches
    expect(model.led.rgbSet).toHaveLength(2);
    const asStrings = model.led.rgbSet.map(rgb => rgb.join(',')).sort();
    expect(asStrings).toEqual(['0,0,255', '255,0,0']);
    expect(model.flags.wakeUp).toBe(true);
    expect(model.flags.ledOn).toBe(true);
  });

  it('is a pure function of the event history', () => {
    const events = loadRecordedSession();
    const a = replay(events);
    const b = replay(events);
    expect(a).toEqual(b);
    // prefix replay then suffix replay lands in the same place
    const mid = Math.floor(events.length / 2);
    const staged = replay(events.slice(mid), replay(events.slice(0, mid)));
    expect(staged).toEqual(a);
  });

  it('marks sub-threshold predictions as dimmed rows', () => {
    const events = loadRecordedSession();
    const model = replay(events);
    const dim = model.predictions.filter(row => !row.aboveThreshold);
    const bright = model.predictions.filter(row => row.aboveThreshold);
    expect(dim.length).toBeGreaterThan(0);
    expect(bright.length).toBeGreaterThan(0);
    for (const row of dim) expect(row.confidence).toBeLessThan(0.6);
  });

  it('keeps newest predictions first and bounds the log', () => {
    let model = initialModel();
    for (let i = 0; i < 80; i++) {
      model = applyEvent(model, {
        kind: 'PREDICTION', ts: i, label: 'blue', confidence: 0.9,
      });
    }
    expect(model.predictions).toHaveLength(50);
    expect(model.predictions[0].ts).toBe(79);
  });

  it('ignores malformed events without changing the view', () => {
    expect(parseEvent('not json')).toBeNull();
    expect(parseEvent('{"kind":"MYSTERY"}')).toBeNull();
    expect(parseEvent('{"kind":"PREDICTION"}')).toBeNull();
    expect(parseEvent('{"kind":"STATE","mode":"NEITHER","flags":{}}')).toBeNull();
  });

  it('surfaces errors as a toast and state events clear nothing else', () => {
    let model = initialModel();
    model = applyEvent(model, { kind: 'ERROR', message: 'boom' });
    expect(model.lastError).toBe('boom');
    model = applyEvent(model, {
      kind: 'STATE', ts: 5, mode: 'ACTIVE', color: 1, color_set: [1],
      flags: { wakeUp: true },
    });
    expect(model.mode).toBe('ACTIVE');
    expect(model.lastError).toBe('boom');
  });
});
