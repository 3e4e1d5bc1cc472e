"""HTTP test doubles shared by the ingest and acceptance suites."""
from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from synthdata import CONTRACT

ASSET_TEMPLATE = {
    "name": None,
    "image_url": None,
    "asset_contract": {"address": CONTRACT},
}


def asset(token_id, traits=(("Fur", "Black"),), **overrides):
    record = dict(ASSET_TEMPLATE)
    record["token_id"] = token_id
    record["traits"] = [{"trait_type": t, "value": v} for t, v in traits]
    record.update(overrides)
    return record


def assets_fixture(records) -> bytes:
    return json.dumps({"assets": records}).encode()


class FakeClock:
    """Virtual monotonic clock whose sleep() advances time instantly."""

    def __init__(self):
        self.now = 0.0

    def monotonic(self) -> float:
        return self.now

    def sleep(self, seconds: float):
        assert seconds >= 0
        self.now += seconds


class FakeResponse:
    def __init__(self, status_code, body=b""):
        self.status_code = status_code
        self.content = body


class FakeSession:
    """In-process transport serving a fixed asset list from offset/limit
    params, with optional scripted 429s per offset."""

    def __init__(self, records, fail_plan=None):
        self.records = records
        self.requests = []
        self.fail_plan = dict(fail_plan or {})

    def get(self, url, headers=None, timeout=None):
        self.requests.append((url, dict(headers or {})))
        query = parse_qs(urlparse(url).query)
        offset = int(query["offset"][0])
        limit = int(query["limit"][0])
        remaining = self.fail_plan.get(offset, 0)
        if remaining:
            self.fail_plan[offset] = remaining - 1
            return FakeResponse(429)
        page = self.records[offset : offset + limit]
        return FakeResponse(200, assets_fixture(page))


class StubAssetsHandler(BaseHTTPRequestHandler):
    """Real socket-level stub: paginated assets with scripted 429s."""

    records = []
    fail_plan = {}

    def do_GET(self):
        query = parse_qs(urlparse(self.path).query)
        offset = int(query["offset"][0])
        limit = int(query["limit"][0])
        remaining = self.fail_plan.get(offset, 0)
        if remaining:
            self.fail_plan[offset] = remaining - 1
            self.send_response(429)
            self.end_headers()
            return
        body = assets_fixture(self.records[offset : offset + limit])
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


def start_stub_server(records, fail_plan=None):
    """Returns (server, base_url); caller must server.shutdown()."""
    server = ThreadingHTTPServer(("127.0.0.1", 0), StubAssetsHandler)
    StubAssetsHandler.records = records
    StubAssetsHandler.fail_plan = dict(fail_plan or {})
    import threading

    threading.Thread(target=server.serve_forever, daemon=True).start()
    return server, f"http://127.0.0.1:{server.server_address[1]}/assets"
