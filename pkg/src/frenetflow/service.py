"""HTTP service exposing the six subcommands.

Each POST endpoint runs one subcommand in a fresh scratch directory: request
files are staged into it, the config is parsed against it, and the output
directory is forced inside it, so a request can neither read nor write
outside its own sandbox. All produced files return inline in the response.

Error contract: configuration problems answer 400, numerical failures 422,
both with an {"error": {"kind", "message"}} body.
"""
from __future__ import annotations

import dataclasses
import tempfile
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import __version__, config as config_mod, flows, runner, serialization
from .errors import ConfigError, FrenetFlowError, NumericalError
from .schemas import (ArtifactFile, ErrorDetail, ErrorResponse,
                      GrammarResponse, HealthResponse, RunRequest,
                      RunResponse)

SUBCOMMANDS = tuple(runner.RUNNERS)

_FILE_REF_KEYS = (("initial", "csv"), ("diagnose", "manifest"))


def _error_body(exc: Exception) -> dict:
    detail = ErrorDetail(kind=type(exc).__name__, message=str(exc))
    return ErrorResponse(error=detail).model_dump()


def _check_confined(raw: dict, root: Path) -> None:
    """Reject config file references that resolve outside the run directory."""
    for section, key in _FILE_REF_KEYS:
        ref = raw.get(section, {})
        value = ref.get(key) if isinstance(ref, dict) else None
        if value is None:
            continue
        resolved = (root / value).resolve()
        if not resolved.is_relative_to(root.resolve()):
            raise ConfigError(
                f"{section}.{key} must stay inside the run directory in "
                f"service mode, got {value!r}")


def _execute(subcommand: str, request: RunRequest) -> RunResponse:
    with tempfile.TemporaryDirectory(prefix="frenetflow-") as td:
        root = Path(td)
        for staged in request.files:
            target = root / staged.path
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(staged.content)
        _check_confined(request.config, root)
        cfg = config_mod.parse_run_config(request.config, base_dir=root)
        cfg = dataclasses.replace(cfg, output_dir=root / "out")
        result = runner.run(cfg, subcommand)
        artifacts = [
            ArtifactFile(path=str(p.relative_to(cfg.output_dir)),
                         content=p.read_text())
            for p in result.all_files()
        ]
        manifest = serialization.read_manifest(result.manifest)
    return RunResponse(subcommand=subcommand, summary=result.summary,
                       manifest=manifest, artifacts=artifacts)


def create_app() -> FastAPI:
    app = FastAPI(title="frenetflow", version=__version__)

    @app.exception_handler(ConfigError)
    async def _config_error(request: Request, exc: ConfigError):
        return JSONResponse(status_code=400, content=_error_body(exc))

    @app.exception_handler(NumericalError)
    async def _numerical_error(request: Request, exc: NumericalError):
        return JSONResponse(status_code=422, content=_error_body(exc))

    @app.exception_handler(FrenetFlowError)
    async def _other_error(request: Request, exc: FrenetFlowError):
        return JSONResponse(status_code=400, content=_error_body(exc))

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request,
                                exc: RequestValidationError):
        # same envelope as domain errors, so clients parse one shape
        return JSONResponse(status_code=400, content={
            "error": {"kind": "RequestValidationError", "message": str(exc)}})

    @app.get("/health", response_model=HealthResponse)
    async def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__,
                              subcommands=list(SUBCOMMANDS))

    @app.get("/grammar", response_model=GrammarResponse)
    async def grammar() -> GrammarResponse:
        return GrammarResponse(
            grammar=flows.GRAMMAR_HELP,
            variables=list(flows.VARIABLES),
            functions=list(flows.FUNCTIONS),
            max_derivative_depth=flows.MAX_DERIV_DEPTH,
            constant_pattern="[A-Za-z_][A-Za-z_0-9]*")

    def _register(name: str) -> None:
        # plain def: FastAPI shifts these to a worker thread, keeping the
        # event loop free during long integrations
        @app.post(f"/{name}", response_model=RunResponse, name=name,
                  responses={400: {"model": ErrorResponse},
                             422: {"model": ErrorResponse}})
        def endpoint(request: RunRequest) -> RunResponse:
            return _execute(name, request)

    for name in SUBCOMMANDS:
        _register(name)
    return app
