"""Request and response models for the HTTP service.

Runs are stateless: the client posts a config plus any input files inline,
the server executes in a scratch directory, and every produced file comes
back inline in the response. Staged paths are confined to the scratch
directory, so absolute paths and parent traversal are rejected up front.
"""
from __future__ import annotations

from typing import List, Optional

from pydantic import BaseModel, Field, field_validator


def _validate_relative(path: str) -> str:
    if not path or path.startswith(("/", "\\")):
        raise ValueError(f"path must be relative, got {path!r}")
    parts = path.replace("\\", "/").split("/")
    if ".." in parts:
        raise ValueError(f"path must not contain '..', got {path!r}")
    if any(p == "" for p in parts):
        raise ValueError(f"path has empty components: {path!r}")
    return path


class StagedFile(BaseModel):
    """One input file shipped with the request (CSV, envelope, manifest)."""

    path: str = Field(description="relative path under the run directory")
    content: str

    @field_validator("path")
    @classmethod
    def _relative(cls, v: str) -> str:
        return _validate_relative(v)


class RunRequest(BaseModel):
    """A run: the config dict plus the files it references."""

    config: dict
    files: List[StagedFile] = Field(default_factory=list)


class ArtifactFile(BaseModel):
    """One produced file, path relative to the output directory."""

    path: str
    content: str


class RunResponse(BaseModel):
    subcommand: str
    summary: dict
    manifest: dict
    artifacts: List[ArtifactFile]


class ErrorDetail(BaseModel):
    kind: str = Field(description="exception class name")
    message: str


class ErrorResponse(BaseModel):
    error: ErrorDetail


class HealthResponse(BaseModel):
    status: str
    version: str
    subcommands: List[str]


class GrammarResponse(BaseModel):
    grammar: str
    variables: List[str]
    functions: List[str]
    max_derivative_depth: int
    constant_pattern: Optional[str] = None
