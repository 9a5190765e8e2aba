"""Live session server for the regulator console.

Transports: WebSocket (browser console) on the configured port and
newline-framed JSON over plain TCP (scripted clients) on port+1.  Both carry
the same envelopes: {"type", "session", "seq", "payload"}.

    client -> server: open, attach, start_live, resume, command
    server -> client: hello, opened, attached, frame, command_result,
                      game_over, error

A session owns exactly one stepping world.  Commands are queued and applied
at tick boundaries through the regulator; frames are immutable snapshots
fanned out after stepping, and a slow client only ever skips to the latest
frame (command results and lifecycle messages are never dropped).
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import os

from .config import ConfigError, RunConfig
from .engine import Engine, ReplayPolicy
from .records import RunRecord
from .regulator import Intervention

PROTOCOL = "regulab-gateway-v1"


def envelope(msg_type: str, session: str | None = None, seq: int = 0,
             payload: dict | None = None) -> dict:
    return {"type": msg_type, "session": session, "seq": seq,
            "payload": payload or {}}


class Client:
    """One connected console, regardless of transport."""

    _ids = 0

    def __init__(self, send_text):
        Client._ids += 1
        self.client_id = f"c{Client._ids}"
        self._send_text = send_text
        self.reliable: asyncio.Queue[dict] = asyncio.Queue()
        self.latest_frame: dict | None = None
        self.frame_ready = asyncio.Event()
        self.closed = False

    def queue(self, message: dict) -> None:
        if not self.closed:
            self.reliable.put_nowait(message)

    def queue_frame(self, message: dict) -> None:
        # back-pressure policy: only the newest frame matters
        self.latest_frame = message
        self.frame_ready.set()

    async def writer(self) -> None:
        try:
            while not self.closed:
                reliable_task = asyncio.create_task(self.reliable.get())
                frame_task = asyncio.create_task(self.frame_ready.wait())
                done, pending = await asyncio.wait(
                    {reliable_task, frame_task},
                    return_when=asyncio.FIRST_COMPLETED)
                for task in pending:
                    task.cancel()
                    with contextlib.suppress(asyncio.CancelledError):
                        await task
                if reliable_task in done:
                    await self._send_text(json.dumps(reliable_task.result()))
                if frame_task in done:
                    self.frame_ready.clear()
                    frame, self.latest_frame = self.latest_frame, None
                    if frame is not None:
                        await self._send_text(json.dumps(frame))
        except (ConnectionError, asyncio.CancelledError):
            pass
        finally:
            self.closed = True


class Session:
    def __init__(self, session_id: str, config: RunConfig):
        self.session_id = session_id
        self.config = config
        self.phase = "training"
        self.engine = Engine(config, config.seed, random_agents=True)
        self.clients: set[Client] = set()
        self.seq = 0
        self.total_ticks = config.ticks()
        self.paused = False
        self._resume = asyncio.Event()
        self._resume.set()
        self.task: asyncio.Task | None = None

    # -- lifecycle ---------------------------------------------------------

    def start_live(self, paused: bool = False) -> None:
        self.engine = Engine(self.config, self.config.seed)
        self.phase = "live"
        self.paused = paused
        if paused:
            self._resume.clear()
        else:
            self._resume.set()

    def resume(self) -> None:
        self.paused = False
        self._resume.set()

    async def run(self) -> None:
        pacing = self.config.pacing
        if self.config.scenario == "traffic":
            wall_sleep = 1.0 / pacing.frame_hz
            ticks_per_frame = max(1, round(
                pacing.traffic_speed / pacing.frame_hz / self.config.dt))
        else:
            wall_sleep = pacing.water_period_seconds
            ticks_per_frame = 1
        while True:
            await asyncio.sleep(wall_sleep)
            await self._resume.wait()
            if self.phase != "live":
                # training world idles along at the same cadence
                for _ in range(ticks_per_frame):
                    self.engine.step()
                self.broadcast_frame()
                continue
            for _ in range(ticks_per_frame):
                if self.engine.clock.tick_index >= self.total_ticks:
                    break
                self.engine.step()
            self.broadcast_frame()
            if self.engine.clock.tick_index >= self.total_ticks:
                self.finish()
                return

    def finish(self) -> None:
        self.engine.record.finish(self.engine.final_metrics())
        self.phase = "finished"
        final = dict(self.engine.record.final or {})
        score = final.get("throughput_pct", final.get("utility_pct"))
        message = envelope("game_over", self.session_id, self._next_seq(),
                           {"final": final, "score": score})
        for client in list(self.clients):
            client.queue(message)

    # -- commands -------------------------------------------------------------

    def submit(self, payload: dict, client: Client) -> None:
        tag = payload.get("client_tag")
        if self.phase == "finished":
            client.queue(self._result(tag, False, "finished"))
            return
        try:
            iv = self._to_intervention(payload)
        except (ValueError, KeyError) as e:
            client.queue(self._result(tag, False, f"grid:{e}"))
            return
        if not self._target_exists(iv):
            client.queue(self._result(tag, False, "target"))
            return

        def on_result(decision):
            client.queue(self._result(
                tag, decision.accepted, decision.reason,
                balance=decision.balance, quota_used=decision.quota_used))

        self.engine.submit(iv, not_before_tick=int(payload.get("not_before_tick", 0)),
                           on_result=on_result)

    def _to_intervention(self, payload: dict) -> Intervention:
        kind = payload["kind"]
        tick = self.engine.clock.tick_index
        if kind == "toll-change":
            return Intervention.toll(str(payload["target"]), float(payload["delta"]),
                                     tick, source="human",
                                     client_tag=payload.get("client_tag"))
        if kind == "price-change":
            return Intervention.price(int(payload["target"]), float(payload["delta"]),
                                      tick, self.config.water.price_increment,
                                      source="human",
                                      client_tag=payload.get("client_tag"))
        raise ValueError(f"unknown kind {kind!r}")

    def _target_exists(self, iv: Intervention) -> bool:
        if self.config.scenario == "traffic":
            return self.engine.scenario.road_for_target(str(iv.target)) is not None
        return isinstance(iv.target, int) and 1 <= iv.target <= self.engine.scenario.periods

    def _result(self, tag, accepted: bool, reason: str = "", **extra) -> dict:
        payload = {"client_tag": tag, "accepted": accepted, "reason": reason}
        payload.update({k: v for k, v in extra.items() if v is not None})
        return envelope("command_result", self.session_id, self._next_seq(), payload)

    # -- frames ------------------------------------------------------------------

    def _next_seq(self) -> int:
        self.seq += 1
        return self.seq

    def build_frame(self) -> dict:
        eng = self.engine
        payload: dict = {
            "phase": self.phase,
            "scenario": self.config.scenario,
            "tick": eng.clock.tick_index,
            "elapsed": eng.clock.elapsed,
        }
        if self.config.scenario == "traffic":
            scen = eng.scenario
            statuses = (eng.latest_forecast.statuses if eng.latest_forecast else {})
            payload["roads"] = [{
                "id": r.road_id, "from": r.from_node, "to": r.to_node,
                "occupancy": len(r.cars), "capacity": r.capacity,
                "toll": r.toll, "status": statuses.get(r.road_id, "none"),
            } for r in scen.network.roads]
            payload["cars"] = scen.car_positions()
            payload["transits"] = scen.transits
            if eng.regulator.state.power == "limited":
                payload["budget"] = round(eng.regulator.state.balance, 6)
            if eng.latest_forecast is not None:
                payload["forecast"] = eng.latest_forecast.to_event()
        else:
            payload.update(eng.scenario.sample(eng.clock.tick_index))
            if eng.regulator.state.power == "limited":
                payload["quota_used"] = eng.regulator.state.quota_used
                payload["quota_max"] = eng.regulator.state.quota_max
        return envelope("frame", self.session_id, self._next_seq(), payload)

    def broadcast_frame(self) -> None:
        frame = self.build_frame()
        for client in list(self.clients):
            client.queue_frame(frame)


class Gateway:
    def __init__(self):
        self.sessions: dict[str, Session] = {}
        self._session_counter = 0

    # -- message handling -----------------------------------------------------

    async def handle_client(self, client: Client, messages) -> None:
        writer = asyncio.create_task(client.writer())
        client.queue(envelope("hello", payload={"protocol": PROTOCOL,
                                                "sessions": sorted(self.sessions)}))
        try:
            async for raw in messages:
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError as e:
                    client.queue(envelope("error", payload={"message": f"bad json: {e.msg}"}))
                    continue
                await self.dispatch(client, msg)
        except ConnectionError:
            pass
        finally:
            for session in self.sessions.values():
                session.clients.discard(client)
            client.closed = True
            writer.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await writer

    async def dispatch(self, client: Client, msg: dict) -> None:
        msg_type = msg.get("type")
        payload = msg.get("payload") or {}
        if msg_type == "open":
            await self._open(client, payload)
        elif msg_type == "attach":
            self._attach(client, payload)
        elif msg_type in ("start_live", "resume", "command"):
            session = self.sessions.get(msg.get("session", ""))
            if session is None:
                client.queue(envelope("error", payload={"message": "unknown session"}))
            elif msg_type == "start_live":
                session.start_live(paused=bool(payload.get("paused")))
                client.queue(envelope("started", session.session_id,
                                      session._next_seq(),
                                      {"phase": session.phase}))
                session.broadcast_frame()
            elif msg_type == "resume":
                session.resume()
            else:
                session.submit(payload, client)
        else:
            client.queue(envelope("error", payload={"message": f"unknown type {msg_type!r}"}))

    async def _open(self, client: Client, payload: dict) -> None:
        wanted = payload.get("session")
        if wanted and wanted in self.sessions:
            client.queue(envelope("error", payload={
                "message": f"session {wanted!r} already exists", "reason": "exists"}))
            return
        try:
            config = RunConfig.from_dict(payload.get("config") or {})
        except ConfigError as e:
            client.queue(envelope("error", payload={"message": str(e),
                                                    "field": e.path}))
            return
        self._session_counter += 1
        session_id = wanted or f"s{self._session_counter}"
        session = Session(session_id, config)
        self.sessions[session_id] = session
        session.clients.add(client)
        session.task = asyncio.create_task(session.run())
        client.queue(envelope("opened", session_id, session._next_seq(), {
            "phase": session.phase,
            "frame": session.build_frame()["payload"],
        }))

    def _attach(self, client: Client, payload: dict) -> None:
        session = self.sessions.get(payload.get("session", ""))
        if session is None:
            client.queue(envelope("error", payload={"message": "unknown session"}))
            return
        session.clients.add(client)
        client.queue(envelope("attached", session.session_id, session._next_seq(), {
            "phase": session.phase,
            "frame": session.build_frame()["payload"],
        }))

    # -- transports ---------------------------------------------------------------

    async def serve_tcp(self, host: str, port: int) -> asyncio.AbstractServer:
        async def on_connect(reader: asyncio.StreamReader,
                             writer: asyncio.StreamWriter) -> None:
            async def send_text(text: str) -> None:
                writer.write(text.encode() + b"\n")
                await writer.drain()

            client = Client(send_text)

            async def lines():
                while True:
                    line = await reader.readline()
                    if not line:
                        return
                    yield line.decode()

            try:
                await self.handle_client(client, lines())
            finally:
                writer.close()
                with contextlib.suppress(ConnectionError):
                    await writer.wait_closed()

        return await asyncio.start_server(on_connect, host, port)

    async def serve_ws(self, host: str, port: int):
        import websockets

        async def on_connect(ws) -> None:
            client = Client(ws.send)
            await self.handle_client(client, ws)

        return await websockets.serve(on_connect, host, port)


def serve_forever(config: RunConfig, host: str, port: int) -> None:
    """CLI entry: WebSocket on `port`, line-JSON TCP on `port + 1`."""
    frame_hz = os.environ.get("REGULAB_FRAME_HZ")
    if frame_hz:
        config.pacing.frame_hz = float(frame_hz)

    async def run():
        gateway = Gateway()
        ws_server = await gateway.serve_ws(host, port)
        tcp_server = await gateway.serve_tcp(host, port + 1)
        print(f"gateway: ws://{host}:{port}  tcp://{host}:{port + 1}", flush=True)
        # default session so a console can attach immediately
        async with tcp_server:
            await asyncio.Future()

    asyncio.run(run())


def stream_replay(record: RunRecord, port: int, speed: float,
                  host: str = "127.0.0.1") -> None:
    """Re-simulate a record, broadcasting frames to any connected viewer."""

    async def run():
        gateway = Gateway()
        config = record.config
        factor = speed if speed > 0 else 1000.0  # 0 = as fast as pacing allows
        if config.scenario == "traffic":
            config.pacing.traffic_speed = config.pacing.traffic_speed * factor
        else:
            config.pacing.water_period_seconds /= factor
        session = Session("replay", config)
        session.engine = Engine(config, record.seed, policy=ReplayPolicy(record))
        session.phase = "live"
        gateway.sessions["replay"] = session
        tcp_server = await gateway.serve_tcp(host, port)
        try:
            await session.run()
        finally:
            tcp_server.close()
            await tcp_server.wait_closed()
        divergence = None
        from .records import compare_samples
        divergence = compare_samples(record, session.engine.record)
        if divergence is not None:
            raise RuntimeError(divergence.describe())
        print(f"replay streamed: {len(record.samples())} samples, "
              f"final metrics match", flush=True)

    asyncio.run(run())
