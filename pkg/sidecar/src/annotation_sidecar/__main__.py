"""Run the service:  python -m annotation_sidecar [--host H] [--port P]"""

from __future__ import annotations

import argparse
import os

import uvicorn


def main() -> None:
    parser = argparse.ArgumentParser(prog="annotation-sidecar")
    parser.add_argument("--host", default=os.environ.get("SIDECAR_HOST", "127.0.0.1"))
    parser.add_argument("--port", type=int, default=int(os.environ.get("SIDECAR_PORT", "8765")))
    args = parser.parse_args()
    uvicorn.run("annotation_sidecar.app:app", host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
