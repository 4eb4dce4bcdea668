/** Server event protocol: one JSON object per WebSocket message. */

export interface PredictionEvent {
  kind: 'PREDICTION';
  ts: number;
  label: string;
  confidence: number;
}

export interface StateEvent {
  kind: 'STATE';
  ts: number;
  mode: 'SLEEP' | 'ACTIVE';
  color: number;
  color_set: number[];
  flags: Record<string, boolean>;
}

export interface LedEvent {
  kind: 'LED';
  ts: number;
  on: boolean;
  rgb_set: [number, number, number][];
  blink: 'NONE' | 'BLINK' | 'FAST' | 'FLASH' | 'SLOW';
}

export interface ErrorEvent {
  kind: 'ERROR';
  message: string;
}

export type ServiceEvent = PredictionEvent | StateEvent | LedEvent | ErrorEvent;

/** Parse one message; returns null for anything malformed. */
export function parseEvent(raw: string): ServiceEvent | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== 'object' || data === null) return null;
  const event = data as Record<string, unknown>;
  switch (event.kind) {
    case 'PREDICTION':
      if (typeof event.label === 'string' && typeof event.confidence === 'number'
          && typeof event.ts === 'number') {
        return event as unknown as PredictionEvent;
      }
      return null;
    case 'STATE':
      if ((event.mode === 'SLEEP' || event.mode === 'ACTIVE')
          && typeof event.flags === 'object' && event.flags !== null) {
        return event as unknown as StateEvent;
      }
      return null;
    case 'LED':
      if (typeof event.on === 'boolean' && Array.isArray(event.rgb_set)) {
        return event as unknown as LedEvent;
      }
      return null;
    case 'ERROR':
      if (typeof event.message === 'string') {
        return event as unknown as ErrorEvent;
      }
      return null;
    default:
      return null;
  }
}
