/** Microphone capture: getUserMedia -> 16 kHz PCM-16 frames via a callback. */

import { downsampleTo16k, floatToPcm16, frameSplit } from './pcm.js';

export interface CaptureHandle {
  stop(): void;
}

export async function startCapture(
  onFrame: (frame: ArrayBuffer) => void,
  onError: (message: string) => void,
): Promise<CaptureHandle | null> {
  let stream: MediaStream;
  try {
    stream = await navigator.mediaDevices.getUserMedia({
      audio: { channelCount: 1, echoCancellation: true },
    });
  } catch (err) {
    onError(`microphone permission denied: ${err}`);
    return null;
  }

  const context = new AudioContext();
  const source = context.createMediaStreamSource(stream);
  // ScriptProcessor is deprecated but universally available; 4096-sample
  // blocks keep transmit frames under the protocol limit after decimation.
  const processor = context.createScriptProcessor(4096, 1, 1);
  source.connect(processor);
  processor.connect(context.destination);

  processor.onaudioprocess = (audioEvent: AudioProcessingEvent) => {
    const captured = audioEvent.inputBuffer.getChannelData(0);
    const resampled = downsampleTo16k(new Float32Array(captured), context.sampleRate);
    for (const piece of frameSplit(resampled)) {
      onFrame(floatToPcm16(piece));
    }
  };

  return {
    stop() {
      processor.disconnect();
      source.disconnect();
      stream.getTracks().forEach(track => track.stop());
      void context.close();
    },
  };
}
