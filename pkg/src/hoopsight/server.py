"""WebSocket session server and static bundle endpoints.

The socket speaks JSON for control/gaze messages and the binary overlay wire
format for frame messages (see PROTOCOL.md).  Frames are paced on a virtual
presentation clock scaled by ``speed``; gaze-state evolution depends only on
sample timestamps and frame indices, never on wall-clock arrival, so a slow
consumer can drop frames without corrupting the session.
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import FileResponse, JSONResponse, PlainTextResponse

from .bundle import GameBundle, list_bundles, load_bundle
from .errors import SessionError
from .ingest import GazeSample, dump_masks, dump_roster
from .session import PLAYING, SessionManager
from .wire import encode_frame


def create_app(bundle_dir: str | Path, speed: float = 1.0,
               viewer_dir: str | Path | None = None) -> FastAPI:
    """Build the app; ``speed`` > 1 accelerates pacing (tests use a large value)."""
    root = Path(bundle_dir)
    bundles: dict[str, GameBundle] = {}
    for name in list_bundles(root):
        bundles[name] = load_bundle(root / name)
    manager = SessionManager(bundles)

    app = FastAPI(title="hoopsight session server")
    app.state.manager = manager

    @app.get("/games")
    def games() -> JSONResponse:
        return JSONResponse([{
            "game_id": b.game_id,
            "frame_rate": b.frame_rate,
            "frame_count": b.frame_count,
            "width": b.width,
            "height": b.height,
        } for b in bundles.values()])

    def _bundle_or_404(game_id: str) -> GameBundle | None:
        return bundles.get(game_id)

    @app.get("/games/{game_id}/meta")
    def meta(game_id: str):
        b = _bundle_or_404(game_id)
        if b is None:
            return JSONResponse({"error": "unknown_game"}, status_code=404)
        return JSONResponse({
            "game_id": b.game_id,
            "frame_rate": b.frame_rate,
            "frame_count": b.frame_count,
            "width": b.width,
            "height": b.height,
            "court_polygon": b.court_polygon,
            "roster": [{"player": e.player, "name": e.name, "team": e.team,
                        "role": e.role} for _, e in sorted(b.roster.entries.items())],
            "video": f"/games/{game_id}/video" if b.video_file else None,
        })

    @app.get("/games/{game_id}/masks")
    def masks(game_id: str):
        b = _bundle_or_404(game_id)
        if b is None:
            return JSONResponse({"error": "unknown_game"}, status_code=404)
        return PlainTextResponse(dump_masks(b.masks))

    @app.get("/games/{game_id}/roster")
    def roster(game_id: str):
        b = _bundle_or_404(game_id)
        if b is None:
            return JSONResponse({"error": "unknown_game"}, status_code=404)
        return PlainTextResponse(dump_roster(b.roster))

    @app.get("/games/{game_id}/video")
    def video(game_id: str):
        b = _bundle_or_404(game_id)
        if b is None or not b.video_file:
            return JSONResponse({"error": "no_video"}, status_code=404)
        path = root / game_id / b.video_file
        if not path.is_file():
            return JSONResponse({"error": "no_video"}, status_code=404)
        return FileResponse(path)

    @app.websocket("/session")
    async def session_socket(ws: WebSocket) -> None:
        await ws.accept()
        loop = asyncio.get_event_loop()
        core = None
        next_frame_at: float | None = None  # monotonic deadline while playing
        try:
            while True:
                playing = core is not None and core.play_state == PLAYING
                if playing and next_frame_at is None:
                    next_frame_at = loop.time() + 1.0 / (core.frame_rate * speed)
                if not playing:
                    next_frame_at = None
                try:
                    if next_frame_at is None:
                        raw = await ws.receive_text()
                    else:
                        timeout = max(0.0, next_frame_at - loop.time())
                        raw = await asyncio.wait_for(ws.receive_text(), timeout)
                except asyncio.TimeoutError:
                    item = core.next_frame()
                    next_frame_at += 1.0 / (core.frame_rate * speed)
                    if item is None:
                        core.control("pause")
                        next_frame_at = None
                        await ws.send_json({"type": "state", "playing": False,
                                            "playhead": core.playhead,
                                            "ended": True})
                    else:
                        frame, commands = item
                        await ws.send_bytes(encode_frame(frame, commands))
                    continue

                msg = json.loads(raw)
                kind = msg.get("type")
                if kind == "create":
                    try:
                        core = manager.create_session(msg.get("game", ""),
                                                      msg.get("config"))
                    except SessionError as exc:
                        await ws.send_json({"type": "error", "code": exc.code,
                                            "message": str(exc)})
                        continue
                    await ws.send_json({
                        "type": "created", "session": core.session_id,
                        "frame_rate": core.frame_rate,
                        "frame_count": core.frame_count,
                        "width": core.bundle.width,
                        "height": core.bundle.height})
                elif core is None:
                    await ws.send_json({"type": "error", "code": "no_session",
                                        "message": "create a session first"})
                elif kind == "gaze":
                    sample = GazeSample(timestamp=float(msg["t"]),
                                        x=float(msg["x"]), y=float(msg["y"]),
                                        valid=bool(msg.get("valid", True)))
                    ack = core.submit_gaze(sample)
                    if ack.accepted:
                        await ws.send_json({"type": "ack", "t": sample.timestamp})
                    else:
                        await ws.send_json({"type": "error", "code": ack.code,
                                            "t": sample.timestamp,
                                            "message": "gaze sample rejected"})
                elif kind == "control":
                    try:
                        state = core.control(msg.get("action", ""),
                                             msg.get("frame"))
                    except SessionError as exc:
                        await ws.send_json({"type": "error", "code": exc.code,
                                            "message": str(exc)})
                        continue
                    await ws.send_json({"type": "state",
                                        "playing": state == PLAYING,
                                        "playhead": core.playhead})
                elif kind == "step":
                    # Lockstep frame pull: deterministic testing without pacing.
                    item = core.step_frame()
                    if item is None:
                        await ws.send_json({"type": "state",
                                            "playing": core.play_state == PLAYING,
                                            "playhead": core.playhead,
                                            "ended": core.playhead >= core.frame_count})
                    else:
                        frame, commands = item
                        await ws.send_bytes(encode_frame(frame, commands))
                else:
                    await ws.send_json({"type": "error", "code": "bad_message",
                                        "message": f"unknown type {kind!r}"})
        except WebSocketDisconnect:
            return

    if viewer_dir is not None and Path(viewer_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=viewer_dir, html=True),
                  name="viewer")

    return app


def serve(bundle_dir: str | Path, port: int, host: str = "127.0.0.1",
          speed: float = 1.0, viewer_dir: str | Path | None = None) -> None:
    import uvicorn

    uvicorn.run(create_app(bundle_dir, speed=speed, viewer_dir=viewer_dir),
                host=host, port=port, log_level="warning")
