import { startCapture, CaptureHandle } from './capture.js';
import { render } from './render.js';
import { EventSocket } from './socket.js';
import { applyEvent, initialModel, UiModel } from './view-state.js';

const SERVICE_URL = `ws://${location.hostname || '127.0.0.1'}:7878`;

let model: UiModel = initialModel();
let capture: CaptureHandle | null = null;

function update(next: UiModel): void {
  model = next;
  render(model);
}

const socket = new EventSocket(
  SERVICE_URL,
  event => update(applyEvent(model, event)),
  status => update({ ...model, connection: status }),
);

document.getElementById('mic-button')!.addEventListener('click', async () => {
  if (capture) {
    capture.stop();
    capture = null;
    document.getElementById('mic-button')!.textContent = 'start microphone';
    return;
  }
  capture = await startCapture(
    frame => socket.sendPcm(frame),
    message => update({ ...model, lastError: message }),
  );
  if (capture) {
    document.getElementById('mic-button')!.textContent = 'stop microphone';
  }
});

document.getElementById('reset-button')!.addEventListener('click', () => {
  socket.sendReset();
});

render(model);
