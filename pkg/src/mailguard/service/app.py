"""HTTP/JSON API over the message store, plus the viewer UI assets.

The service watches an inbox directory for arriving .eml files, scans
each one exactly once before it can be opened, and drives the
warn-then-decide flow: list, open (with sanitized rendering), delete.
"""

from __future__ import annotations

import asyncio
import json
import logging
import os
from contextlib import asynccontextmanager
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles

from .. import __version__
from ..engine import ScanConfig
from ..ingest import EmptyInput
from ..urls import DEFAULT_LONG_HYPERLINK_LIMIT
from ..visibility import BLACK, WHITE, DEFAULT_THRESHOLD, VisibilityPolicy, parse_color
from .store import EntryGone, EntryNotFound, MessageStore

logger = logging.getLogger("mailguard.service")

_ENV_KEYS = {
    "MAILGUARD_INBOX_DIR": "inbox_dir",
    "MAILGUARD_STORE_DIR": "store_dir",
    "MAILGUARD_PORT": "port",
    "MAILGUARD_HOST": "host",
    "MAILGUARD_POLL_INTERVAL": "poll_interval",
    "MAILGUARD_THRESHOLD": "threshold",
    "MAILGUARD_LONG_LIMIT": "long_hyperlink_limit",
    "MAILGUARD_STATIC_DIR": "static_dir",
}

_FALLBACK_PAGE = """<!doctype html>
<html><head><title>MailGuard</title></head>
<body style="font-family: sans-serif; margin: 3em">
<h1>MailGuard service is running</h1>
<p>The viewer UI is not built. The JSON API is live under <code>/api/</code>;
see <a href="/api/health">/api/health</a>. To serve the UI, build the
frontend and point <code>--static-dir</code> (or MAILGUARD_STATIC_DIR) at
its <code>dist/</code> directory.</p>
</body></html>
"""


@dataclass
class ServiceConfig:
    """Service settings from defaults, config file, env vars, then flags."""

    store_dir: Path = Path("mailguard-store")
    inbox_dir: Path | None = None
    host: str = "127.0.0.1"
    port: int = 8822
    poll_interval: float = 2.0
    threshold: int = DEFAULT_THRESHOLD
    long_hyperlink_limit: int = DEFAULT_LONG_HYPERLINK_LIMIT
    default_foreground: str = "#000000"
    default_background: str = "#FFFFFF"
    static_dir: Path | None = None

    @classmethod
    def load(
        cls,
        config_file: str | Path | None = None,
        overrides: dict | None = None,
        env: dict | None = None,
    ) -> "ServiceConfig":
        env = os.environ if env is None else env
        values: dict = {}
        if config_file is not None:
            values.update(json.loads(Path(config_file).read_text(encoding="utf-8")))
        for var, key in _ENV_KEYS.items():
            if var in env:
                values[key] = env[var]
        if overrides:
            values.update({k: v for k, v in overrides.items() if v is not None})

        config = cls()
        for key, value in values.items():
            if not hasattr(config, key):
                raise ValueError(f"unknown config key: {key}")
            current = getattr(cls(), key)
            if key in ("store_dir", "inbox_dir", "static_dir"):
                value = Path(value)
            elif isinstance(current, bool):
                value = bool(value)
            elif isinstance(current, int):
                value = int(value)
            elif isinstance(current, float):
                value = float(value)
            setattr(config, key, value)
        return config

    def scan_config(self) -> ScanConfig:
        policy = VisibilityPolicy(
            threshold=self.threshold,
            default_foreground=parse_color(self.default_foreground) or BLACK,
            default_background=parse_color(self.default_background) or WHITE,
        )
        return ScanConfig(policy=policy, long_hyperlink_limit=self.long_hyperlink_limit)


def _resolve_static_dir(config: ServiceConfig) -> Path | None:
    candidates = []
    if config.static_dir is not None:
        candidates.append(Path(config.static_dir))
    candidates.append(Path(__file__).parent / "static")
    candidates.append(Path("frontend") / "dist")
    for candidate in candidates:
        if (candidate / "index.html").is_file():
            return candidate
    return None


def create_app(config: ServiceConfig | None = None, store: MessageStore | None = None) -> FastAPI:
    config = config or ServiceConfig()
    if store is None:
        store = MessageStore(config.store_dir, config.scan_config())

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        poller: asyncio.Task | None = None
        if config.inbox_dir is not None:
            await asyncio.to_thread(store.ingest_directory, config.inbox_dir)
            if config.poll_interval > 0:
                poller = asyncio.create_task(_poll_inbox())
        yield
        if poller is not None:
            poller.cancel()
            try:
                await poller
            except asyncio.CancelledError:
                pass

    async def _poll_inbox() -> None:
        while True:
            await asyncio.sleep(config.poll_interval)
            try:
                created = await asyncio.to_thread(store.ingest_directory, config.inbox_dir)
                if created:
                    logger.info("ingested %d new message(s)", len(created))
            except Exception:
                logger.exception("inbox sweep failed")

    app = FastAPI(title="MailGuard", version=__version__, lifespan=lifespan)
    app.state.store = store
    app.state.config = config

    def _entry_or_http_error(entry_id: str):
        try:
            return store.get_entry(entry_id)
        except EntryNotFound:
            raise HTTPException(status_code=404, detail=f"no message {entry_id}")

    @app.get("/api/health")
    def health() -> dict:
        return {
            "engine_version": __version__,
            "counts": store.counts(),
            "store_dir": str(store.root),
        }

    @app.get("/api/messages")
    def list_messages(state: str | None = None, verdict: str | None = None) -> list[dict]:
        try:
            entries = store.list_entries(state=state, verdict=verdict)
        except ValueError:
            raise HTTPException(status_code=422, detail=f"unknown state filter {state!r}")
        return [entry.summary() for entry in entries]

    @app.post("/api/messages", status_code=201)
    async def upload_message(request: Request, response: Response, name: str = "upload") -> dict:
        data = await request.body()
        try:
            entry, created = await asyncio.to_thread(store.add_raw, data, name)
        except EmptyInput:
            raise HTTPException(status_code=400, detail="empty message body")
        if not created:
            response.status_code = 200
        return entry.full_dict()

    @app.get("/api/messages/{entry_id}")
    def get_message(entry_id: str) -> dict:
        return _entry_or_http_error(entry_id).full_dict()

    @app.get("/api/messages/{entry_id}/sanitized")
    def get_sanitized(entry_id: str) -> dict:
        _entry_or_http_error(entry_id)
        try:
            return store.render_by_id(entry_id).to_dict()
        except EntryGone:
            raise HTTPException(status_code=410, detail="message was deleted")

    @app.post("/api/messages/{entry_id}/open")
    def open_message(entry_id: str) -> dict:
        _entry_or_http_error(entry_id)
        try:
            entry, rendering = store.open_entry(entry_id)
        except EntryGone:
            raise HTTPException(status_code=410, detail="message was deleted")
        return {"entry": entry.full_dict(), "rendering": rendering.to_dict()}

    @app.post("/api/messages/{entry_id}/rescan")
    def rescan_message(entry_id: str) -> dict:
        _entry_or_http_error(entry_id)
        try:
            entry = store.rescan_entry(entry_id)
        except EntryGone:
            raise HTTPException(status_code=410, detail="message was deleted")
        return entry.report.to_dict()

    @app.delete("/api/messages/{entry_id}")
    def delete_message(entry_id: str) -> dict:
        entry = _entry_or_http_error(entry_id)
        entry = store.delete_entry(entry_id)
        return {"id": entry.id, "state": entry.state.value, "acknowledged": True}

    static_dir = _resolve_static_dir(config)
    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="viewer")
    else:
        @app.get("/", include_in_schema=False)
        def fallback_index() -> HTMLResponse:
            return HTMLResponse(_FALLBACK_PAGE)

    return app


def run_service(config: ServiceConfig) -> None:
    import uvicorn

    app = create_app(config)
    logger.info("MailGuard service on http://%s:%d", config.host, config.port)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
