"""Regenerate tests/data/sidecar_annotations/: recorded sidecar layers for
three fixture articles, stored as full interchange documents.

Starts the installed annotation-sidecar on a free port, annotates through
the real wire contract, and serializes the resulting documents. Run from
the repository root:  python tests/data/build_sidecar_fixtures.py
"""

from __future__ import annotations

import json
import socket
import subprocess
import sys
import time
from pathlib import Path

import requests

from fivew1h.annotate import RemoteProvider, annotate, load_qa_prompts
from fivew1h.document import RawArticle, serialize_document

HERE = Path(__file__).resolve().parent
OUT = HERE / "sidecar_annotations"
ARTICLE_IDS = ("a01-verglas", "a06-logement", "a09-ecole")


def start_sidecar() -> tuple[subprocess.Popen, str]:
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()
    proc = subprocess.Popen([sys.executable, "-m", "annotation_sidecar", "--port", str(port)],
                            stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    endpoint = f"http://127.0.0.1:{port}"
    deadline = time.time() + 30
    while time.time() < deadline:
        try:
            if requests.get(f"{endpoint}/health", timeout=1).json().get("status") == "ready":
                return proc, endpoint
        except requests.RequestException:
            pass
        time.sleep(0.2)
    proc.terminate()
    raise RuntimeError("sidecar did not become ready")


def main() -> None:
    OUT.mkdir(exist_ok=True)
    proc, endpoint = start_sidecar()
    try:
        provider = RemoteProvider(endpoint)
        prompts = load_qa_prompts()
        for article_id in ARTICLE_IDS:
            record = json.loads((HERE / "corpus" / "articles" / f"{article_id}.json")
                                .read_text(encoding="utf-8"))
            article = RawArticle(id=record["id"], title=record["title"], body=record["body"],
                                 outlet=record.get("outlet"))
            doc = annotate(article, [provider], qa_prompts=prompts)
            (OUT / f"{article_id}.json").write_text(serialize_document(doc), encoding="utf-8")
            print(f"recorded {article_id}: {doc.n_sentences} sentences, "
                  f"{len(doc.entities)} entities, {len(doc.coref_chains)} chains")
    finally:
        proc.terminate()
        proc.wait(timeout=5)


if __name__ == "__main__":
    main()
