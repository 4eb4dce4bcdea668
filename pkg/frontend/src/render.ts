/** DOM rendering of the UiModel; all state lives in the model, not the DOM. */

import { CONFIDENCE_THRESHOLD, UiModel } from './view-state.js';

const FLAG_ORDER = ['wakeUp', 'ledOn', 'ledOff', 'andKey', 'cancelKey', 'blinkKey',
                    'fastKey', 'flashKey', 'slowKey', 'plusKey', 'quickKey', 'toggleKey'];

const BLINK_PERIOD_MS: Record<string, number> = {
  NONE: 0, BLINK: 500, FAST: 150, FLASH: 75, SLOW: 1000,
};

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

export function render(model: UiModel): void {
  const status = el('connection');
  status.textContent = model.connection;
  status.className = `status status-${model.connection}`;

  const badge = el('mode-badge');
  badge.textContent = model.mode;
  badge.className = `badge badge-${model.mode.toLowerCase()}`;

  const flags = el('flag-grid');
  flags.innerHTML = '';
  for (const name of FLAG_ORDER) {
    const cell = document.createElement('div');
    cell.className = model.flags[name] ? 'flag flag-set' : 'flag';
    cell.textContent = name;
    flags.appendChild(cell);
  }

  const led = el('led-panel');
  led.innerHTML = '';
  if (model.led.on && model.led.rgbSet.length > 0) {
    for (const [r, g, b] of model.led.rgbSet) {
      const swatch = document.createElement('div');
      swatch.className = 'swatch';
      swatch.style.backgroundColor = `rgb(${r}, ${g}, ${b})`;
      const period = BLINK_PERIOD_MS[model.led.blink];
      if (period > 0) {
        swatch.style.animation = `blink ${2 * period}ms step-start infinite`;
      }
      led.appendChild(swatch);
    }
  } else {
    const off = document.createElement('div');
    off.className = 'swatch swatch-off';
    off.textContent = 'off';
    led.appendChild(off);
  }
  el('blink-mode').textContent = model.led.blink;

  const list = el('prediction-list');
  list.innerHTML = '';
  for (const row of model.predictions) {
    const item = document.createElement('div');
    item.className = row.aboveThreshold ? 'prediction' : 'prediction prediction-dim';
    const bar = document.createElement('div');
    bar.className = 'bar';
    bar.style.width = `${Math.round(row.confidence * 100)}%`;
    const text = document.createElement('span');
    text.textContent = `${row.label} ${(row.confidence * 100).toFixed(1)}% @${row.ts}ms`;
    item.appendChild(bar);
    item.appendChild(text);
    list.appendChild(item);
  }
  el('threshold-note').textContent =
    `acceptance threshold: ${(CONFIDENCE_THRESHOLD * 100).toFixed(0)}%`;

  const toast = el('error-toast');
  if (model.lastError) {
    toast.textContent = model.lastError;
    toast.classList.add('visible');
  } else {
    toast.classList.remove('visible');
  }
}
