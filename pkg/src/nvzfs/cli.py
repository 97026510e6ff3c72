"""Command-line driver: a thin client of the HTTP service.

By default requests are served by an in-process application instance
(no network, fully deterministic); `--server URL` targets a remote
service instead.  File writes happen exclusively on the client side,
once, after the computation has finished.

Exit codes: 0 success, 2 configuration error, 3 numerical-invariant
violation during a run.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class _InProcessClient:
    """Synchronous client served by an in-process ASGI application."""

    def __init__(self, app):
        self._app = app

    def _request(self, method: str, url: str, **kwargs):
        import asyncio

        import httpx

        async def go():
            transport = httpx.ASGITransport(app=self._app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://nvzfs.local", timeout=600.0
            ) as client:
                return await client.request(method, url, **kwargs)

        return asyncio.run(go())

    def get(self, url: str, **kwargs):
        return self._request("GET", url, **kwargs)

    def post(self, url: str, **kwargs):
        return self._request("POST", url, **kwargs)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=600.0)
    from .service.app import app

    return _InProcessClient(app)


def _cmd_presets(args: argparse.Namespace) -> int:
    with _client(args.server) as client:
        payload = client.get("/presets").json()
    for preset in payload["presets"]:
        print(f"{preset['name']}: {preset['description']}")
        for key in sorted(preset["defaults"]):
            print(f"    {key} = {preset['defaults'][key]}")
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    text = Path(args.config).read_text(encoding="utf-8")
    with _client(args.server) as client:
        payload = client.post("/validate", json={"config_text": text}).json()
    for param in payload["parameters"]:
        print(f"{param['key']} = {param['value']}  [{param['source']}]")
    has_error = False
    for check in payload["checks"]:
        print(f"{check['level'].upper()}: {check['name']}: {check['message']}")
        has_error = has_error or check["level"] == "error"
    return EXIT_CONFIG if has_error else EXIT_OK


def _cmd_run(args: argparse.Namespace) -> int:
    text = Path(args.config).read_text(encoding="utf-8")
    jobs = args.jobs if args.jobs else (os.cpu_count() or 1)
    with _client(args.server) as client:
        response = client.post("/run", json={"config_text": text, "jobs": jobs})
        if response.status_code == 400:
            detail = response.json().get("detail", {})
            print(f"config error: {detail.get('error')}", file=sys.stderr)
            if detail.get("field"):
                print(f"offending field: {detail['field']}", file=sys.stderr)
            return EXIT_CONFIG
        if response.status_code == 500:
            detail = response.json().get("detail", {})
            print(f"numerical invariant violated: {detail.get('error')}", file=sys.stderr)
            return EXIT_NUMERICAL
        response.raise_for_status()
        payload = response.json()

    out_dir = Path(args.out) if args.out else _configured_out(payload["parameters"])
    out_dir.mkdir(parents=True, exist_ok=True)
    # Single writer, after all computation: no partial outputs on failure.
    for name in sorted(payload["files"]):
        (out_dir / name).write_text(payload["files"][name], encoding="utf-8", newline="\n")
    for name in sorted(payload["files"]):
        print(f"wrote {out_dir / name}")
    return EXIT_OK


def _configured_out(parameters: list[dict]) -> Path:
    for param in parameters:
        if param["key"] == "out":
            return Path(param["value"])
    return Path("out")


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nvzfs",
        description="Zero-field NV magnetic resonance experiments",
    )
    client_opts = argparse.ArgumentParser(add_help=False)
    client_opts.add_argument(
        "--server",
        default=None,
        help="URL of a running service; default is an in-process instance",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_presets = sub.add_parser(
        "presets", parents=[client_opts], help="list experiment presets and defaults"
    )
    p_presets.set_defaults(func=_cmd_presets)

    p_validate = sub.add_parser(
        "validate", parents=[client_opts], help="resolve and check a configuration"
    )
    p_validate.add_argument("config", help="path to a key-value configuration file")
    p_validate.set_defaults(func=_cmd_validate)

    p_run = sub.add_parser(
        "run", parents=[client_opts], help="run a configuration and write CSV outputs"
    )
    p_run.add_argument("config", help="path to a key-value configuration file")
    p_run.add_argument("--jobs", type=int, default=None, help="parallel sweep workers")
    p_run.add_argument("--out", default=None, help="output directory (overrides config)")
    p_run.set_defaults(func=_cmd_run)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    import httpx

    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except httpx.HTTPError as exc:
        print(f"service unreachable: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
