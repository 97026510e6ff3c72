"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class PresetInfo(BaseModel):
    name: str
    description: str
    defaults: dict[str, str]


class PresetList(BaseModel):
    presets: list[PresetInfo]


class ResolvedParameterModel(BaseModel):
    key: str
    value: str
    source: Literal["default", "override"]


class CheckResultModel(BaseModel):
    name: str
    level: Literal["ok", "warning", "error"]
    message: str


class ValidateRequest(BaseModel):
    config_text: str


class ValidationReportModel(BaseModel):
    ok: bool
    parameters: list[ResolvedParameterModel]
    checks: list[CheckResultModel]


class RunRequest(BaseModel):
    config_text: str
    jobs: int = Field(default=1, ge=1, le=256)


class RunResultModel(BaseModel):
    preset: str
    files: dict[str, str]
    parameters: list[ResolvedParameterModel]


class HealthModel(BaseModel):
    status: str
    version: str
