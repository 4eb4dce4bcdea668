/**
 * Pure view model: a left fold over the server event stream.
 *
 * No interpreter logic lives here — the server is authoritative. Replaying a
 * recorded event log reproduces the identical final view state.
 */

import { LedEvent, ServiceEvent, StateEvent } from './protocol.js';

export const CONFIDENCE_THRESHOLD = 0.6;
export const PREDICTION_LOG_LIMIT = 50;

export interface PredictionRow {
  ts: number;
  label: string;
  confidence: number;
  aboveThreshold: boolean;
}

export interface UiModel {
  connection: 'connecting' | 'connected' | 'disconnected';
  mode: 'SLEEP' | 'ACTIVE';
  color: number;
  colorSet: number[];
  flags: Record<string, boolean>;
  led: { on: boolean; rgbSet: [number, number, number][]; blink: LedEvent['blink'] };
  predictions: PredictionRow[];  // newest first
  lastError: string | null;
}

export function initialModel(): UiModel {
  return {
    connection: 'connecting',
    mode: 'SLEEP',
    color: 0,
    colorSet: [],
    flags: {},
    led: { on: false, rgbSet: [], blink: 'NONE' },
    predictions: [],
    lastError: null,
  };
}

export function applyEvent(model: UiModel, event: ServiceEvent): UiModel {
  switch (event.kind) {
    case 'PREDICTION': {
      const row: PredictionRow = {
        ts: event.ts,
        label: event.label,
        confidence: event.confidence,
        aboveThreshold: event.confidence >= CONFIDENCE_THRESHOLD,
      };
      return {
        ...model,
        predictions: [row, ...model.predictions].slice(0, PREDICTION_LOG_LIMIT),
      };
    }
    case 'STATE': {
      const state = event as StateEvent;
      return {
        ...model,
        mode: state.mode,
        color: state.color,
        colorSet: [...state.color_set],
        flags: { ...state.flags },
      };
    }
    case 'LED': {
      const led = event as LedEvent;
      return {
        ...model,
        led: { on: led.on, rgbSet: led.rgb_set.map(t => [...t] as [number, number, number]), blink: led.blink },
      };
    }
    case 'ERROR':
      return { ...model, lastError: event.message };
  }
}

export function replay(events: ServiceEvent[], start?: UiModel): UiModel {
  let model = start ?? initialModel();
  for (const event of events) {
    model = applyEvent(model, event);
  }
  return model;
}
