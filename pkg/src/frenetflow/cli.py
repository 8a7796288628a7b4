"""Command-line interface.

The CLI is a thin HTTP client. By default it mounts the service in-process
and talks to it over an in-memory transport, so local runs and remote runs
(--server) exercise exactly the same request/response contract. Input files
named in the config are read locally and shipped inline; returned artifacts
are written under the output directory.

Exit codes: 0 success, 1 transport or unexpected failure, 2 configuration
error, 3 numerical failure. On 2 and 3 the server's error body is also
written to <outdir>/error.json.
"""
from __future__ import annotations

import argparse
import asyncio
import copy
import json
import sys
from pathlib import Path
from typing import Optional

import httpx

from . import __version__, flows
from .config import load_config_file
from .errors import ConfigError

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_STATUS_TO_EXIT = {200: EXIT_OK, 400: EXIT_CONFIG, 422: EXIT_NUMERICAL}

RUN_SUBCOMMANDS = ("evolve", "solve", "transform", "classify", "diagnose",
                   "compare")

_DESCRIPTIONS = {
    "evolve": "integrate a curve under a flow, snapshotting curves and "
              "curvature/torsion profiles",
    "solve": "integrate the wave equation for a flow, snapshotting wave "
             "states",
    "transform": "map a curve or profile to its wave function, or back",
    "classify": "report a flow's structure: binormality, length-condition "
                "residual, wave-route viability",
    "diagnose": "recompute invariants, rates, and closure defects along a "
                "recorded evolve run",
    "compare": "run the extrinsic and intrinsic routes side by side and "
               "report their divergence",
}


def _resolve(base: Path, value: str) -> Path:
    p = Path(value)
    return p if p.is_absolute() else base / p


def _stage_file(files: list, staged_path: str, src: Path) -> str:
    if not src.exists():
        raise ConfigError(f"input file does not exist: {src}")
    files.append({"path": staged_path, "content": src.read_text()})
    return staged_path


def _stage_inputs(raw: dict, base: Path) -> list:
    """Read every file the config references and rewrite the references to
    request-relative staged paths. Mutates raw (pass a copy)."""
    files: list = []
    initial = raw.get("initial")
    if isinstance(initial, dict) and initial.get("csv"):
        src = _resolve(base, str(initial["csv"]))
        initial["csv"] = _stage_file(files, f"staged/{src.name}", src)
        envelope = src.with_suffix(".json")
        if envelope != src and envelope.exists():
            _stage_file(files, f"staged/{envelope.name}", envelope)
    diagnose = raw.get("diagnose")
    if isinstance(diagnose, dict) and diagnose.get("manifest"):
        src = _resolve(base, str(diagnose["manifest"]))
        if not src.exists():
            raise ConfigError(f"diagnose.manifest does not exist: {src}")
        manifest = json.loads(src.read_text())
        diagnose["manifest"] = _stage_file(files, "staged/manifest.json", src)
        for rel in manifest.get("artifacts", []):
            rel = str(rel)
            if Path(rel).is_absolute() or ".." in Path(rel).parts:
                raise ConfigError(
                    f"manifest artifact path escapes its directory: {rel!r}")
            _stage_file(files, f"staged/{rel}", src.parent / rel)
    return files


def _default_outdir(raw: dict, base: Path) -> Path:
    output = raw.get("output", {})
    directory = output.get("directory", "out") if isinstance(output, dict) \
        else "out"
    return _resolve(base, str(directory))


async def _post_in_process(path: str, payload: dict) -> httpx.Response:
    from .service import create_app
    transport = httpx.ASGITransport(app=create_app())
    async with httpx.AsyncClient(transport=transport,
                                 base_url="http://frenetflow.internal",
                                 timeout=None) as client:
        return await client.post(path, json=payload)


def _post(server: Optional[str], subcommand: str,
          payload: dict) -> httpx.Response:
    if server is None:
        return asyncio.run(_post_in_process(f"/{subcommand}", payload))
    timeout = httpx.Timeout(None, connect=10.0)
    with httpx.Client(base_url=server.rstrip("/"), timeout=timeout) as client:
        return client.post(f"/{subcommand}", json=payload)


def _write_artifacts(outdir: Path, artifacts: list) -> int:
    for artifact in artifacts:
        target = outdir / artifact["path"]
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(artifact["content"])
    return len(artifacts)


def _run_subcommand(subcommand: str, args: argparse.Namespace) -> int:
    config_path = Path(args.config)
    try:
        raw = load_config_file(config_path)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    base = config_path.parent
    outdir = Path(args.out) if args.out else _default_outdir(raw, base)

    staged = copy.deepcopy(raw)
    if getattr(args, "kind", None):
        staged.setdefault("solver", {})["kind"] = args.kind
    try:
        files = _stage_inputs(staged, base)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    payload = {"config": staged, "files": files}

    try:
        response = _post(args.server, subcommand, payload)
    except httpx.HTTPError as exc:
        print(f"error: cannot reach {args.server}: {exc}", file=sys.stderr)
        return EXIT_OTHER

    exit_code = _STATUS_TO_EXIT.get(response.status_code, EXIT_OTHER)
    if exit_code == EXIT_OK:
        body = response.json()
        count = _write_artifacts(outdir, body["artifacts"])
        print(json.dumps(body["summary"], indent=2))
        print(f"wrote {count} files to {outdir}")
        return EXIT_OK

    try:
        body = response.json()
    except ValueError:
        body = {"error": {"kind": "HTTPError",
                          "message": response.text[:2000]}}
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "error.json").write_text(json.dumps(body, indent=2) + "\n")
    message = body.get("error", {}).get("message", response.text[:2000])
    print(f"error: {message}", file=sys.stderr)
    return exit_code


def _serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frenetflow",
        description="Curve flows, their wave-equation transforms, and the "
                    "diagnostics tying the two together.",
        epilog=flows.GRAMMAR_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version",
                        version=f"frenetflow {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    for name in RUN_SUBCOMMANDS:
        p = sub.add_parser(
            name, help=_DESCRIPTIONS[name], description=_DESCRIPTIONS[name],
            epilog=flows.GRAMMAR_HELP,
            formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", required=True,
                       help="run configuration (TOML or JSON)")
        p.add_argument("--out", default=None,
                       help="directory for returned artifacts (default: the "
                            "config's output.directory)")
        p.add_argument("--server", default=None,
                       help="base URL of a running service; default runs "
                            "the service in-process")
        if name == "solve":
            p.add_argument("--kind",
                           choices=("general", "nls", "hirota",
                                    "powerseries"),
                           default=None,
                           help="solver kind, overriding the config's "
                                "[solver] section")

    serve = sub.add_parser("serve", help="run the HTTP service",
                           description="Run the HTTP service.")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.subcommand == "serve":
        return _serve(args)
    return _run_subcommand(args.subcommand, args)


if __name__ == "__main__":
    sys.exit(main())
