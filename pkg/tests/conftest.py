import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from importlib import resources
from pathlib import Path

import pytest

CORPUS = Path(str(resources.files("sescan").joinpath("corpus")))
ATTACKS = {f"A{i}": CORPUS / f"attack_a{i}.sol" for i in range(1, 7)}
BENIGN = {f"A{i}": CORPUS / f"benign_a{i}.sol" for i in range(1, 7)}
SNAPSHOT = CORPUS / "snapshot.csv"


@pytest.fixture
def corpus_dir():
    return CORPUS


class FakeNode:
    """Minimal JSON-RPC endpoint answering eth_getCode from a dict."""

    def __init__(self, codes):
        self.codes = codes
        self.bodies = []
        node = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                body = self.rfile.read(int(self.headers["Content-Length"]))
                node.bodies.append(body)
                req = json.loads(body)
                code = node.codes.get(req["params"][0], "0x")
                out = json.dumps({"jsonrpc": "2.0", "id": req["id"], "result": code}).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(out)))
                self.end_headers()
                self.wfile.write(out)

            def log_message(self, *args):
                pass

        self.server = HTTPServer(("127.0.0.1", 0), Handler)
        self.url = f"http://127.0.0.1:{self.server.server_port}/"
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    def close(self):
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture
def fake_node():
    nodes = []

    def start(codes=None):
        node = FakeNode(codes or {})
        nodes.append(node)
        return node

    yield start
    for n in nodes:
        n.close()


@pytest.fixture
def dead_endpoint():
    # a port that was just free; nothing listens on it
    import socket

    s = socket.socket()
    s.bind(("127.0.0.1", 0))
    port = s.getsockname()[1]
    s.close()
    return f"http://127.0.0.1:{port}/"
