"""Local demo service: PCM frames in over WebSocket, interpreter events out.

Protocol (one client at a time):
  client -> server  binary message: little-endian PCM-16 samples, any length
  client -> server  text message: ``reset`` reinitializes the interpreter
  server -> client  one JSON event per message (PREDICTION/STATE/LED/ERROR)

Malformed frames produce an ERROR event and keep the connection; a second
concurrent client is refused with an ERROR and closed.
"""

from __future__ import annotations

import asyncio
import json
import threading
from typing import Optional

import numpy as np
from websockets.asyncio.server import serve as ws_serve
from websockets.exceptions import ConnectionClosed

from .errors import PortInUse
from .pipeline import PipelineConfig, StreamPipeline
from .quant import QuantizedModel


def _dumps(event: dict) -> str:
    return json.dumps(event, sort_keys=True)


class DemoService:
    def __init__(self, qmodel: QuantizedModel, config: PipelineConfig, port: int):
        self.qmodel = qmodel
        self.config = config
        self.port = port
        self._busy = False

    async def handle(self, ws) -> None:
        if self._busy:
            await ws.send(_dumps({"kind": "ERROR",
                                  "message": "another client is connected"}))
            await ws.close()
            return
        self._busy = True
        try:
            pipeline = StreamPipeline(self.qmodel, self.config)
            await ws.send(_dumps(pipeline.initial_event()))
            async for message in ws:
                if isinstance(message, bytes):
                    if len(message) % 2 != 0:
                        await ws.send(_dumps({
                            "kind": "ERROR",
                            "message": "binary frame is not whole PCM-16 samples",
                        }))
                        continue
                    samples = np.frombuffer(message, dtype="<i2")
                    for event in pipeline.feed(samples):
                        await ws.send(_dumps(event))
                elif message == "reset":
                    await ws.send(_dumps(pipeline.reset()))
                else:
                    await ws.send(_dumps({
                        "kind": "ERROR",
                        "message": f"unknown command {message!r}",
                    }))
        except ConnectionClosed:
            pass
        finally:
            self._busy = False

    async def run(self, ready: Optional[threading.Event] = None,
                  stop: Optional[threading.Event] = None) -> None:
        try:
            server = await ws_serve(self.handle, "127.0.0.1", self.port)
        except OSError as exc:
            raise PortInUse(f"port {self.port} is unavailable: {exc}") from exc
        async with server:
            if ready is not None:
                ready.set()
            if stop is None:
                await asyncio.Future()  # run forever
            else:
                while not stop.is_set():
                    await asyncio.sleep(0.05)


def serve_demo(qmodel: QuantizedModel, config: PipelineConfig = PipelineConfig(),
               port: int = 7878, ready: Optional[threading.Event] = None,
               stop: Optional[threading.Event] = None) -> None:
    """Blocking entry point; ``ready``/``stop`` support embedding in tests."""
    service = DemoService(qmodel, config, port)
    asyncio.run(service.run(ready=ready, stop=stop))
