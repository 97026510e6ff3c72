"""FastAPI service wrapping the experiment engine.

The service is stateless: identical requests produce identical responses,
and output files are returned in the response body rather than written
server-side.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import ConfigError, NumericalInvariantError
from ..experiments import (
    PRESET_DEFAULTS,
    PRESET_DESCRIPTIONS,
    run_config_text,
    validate_config,
)
from .schemas import (
    CheckResultModel,
    HealthModel,
    PresetInfo,
    PresetList,
    ResolvedParameterModel,
    RunRequest,
    RunResultModel,
    ValidateRequest,
    ValidationReportModel,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="nvzfs",
        version=__version__,
        description="Zero-field NV magnetic resonance experiments as a service",
    )

    @app.get("/health", response_model=HealthModel)
    def health() -> HealthModel:
        return HealthModel(status="ok", version=__version__)

    @app.get("/presets", response_model=PresetList)
    def presets() -> PresetList:
        return PresetList(
            presets=[
                PresetInfo(
                    name=name,
                    description=PRESET_DESCRIPTIONS[name],
                    defaults=dict(sorted(PRESET_DEFAULTS[name].items())),
                )
                for name in sorted(PRESET_DEFAULTS)
            ]
        )

    @app.post("/validate", response_model=ValidationReportModel)
    def validate(request: ValidateRequest) -> ValidationReportModel:
        report = validate_config(request.config_text)
        return ValidationReportModel(
            ok=report.ok,
            parameters=[
                ResolvedParameterModel(key=p.key, value=p.value, source=p.source)
                for p in report.parameters
            ],
            checks=[
                CheckResultModel(name=c.name, level=c.level, message=c.message)
                for c in report.checks
            ],
        )

    @app.post("/run", response_model=RunResultModel)
    def run(request: RunRequest) -> RunResultModel:
        try:
            result = run_config_text(request.config_text, jobs=request.jobs)
        except ConfigError as exc:
            raise HTTPException(
                status_code=400,
                detail={"error": str(exc), "field": exc.field, "kind": "config"},
            ) from exc
        except NumericalInvariantError as exc:
            raise HTTPException(
                status_code=500,
                detail={"error": str(exc), "kind": "numerical"},
            ) from exc
        return RunResultModel(
            preset=result.preset,
            files=result.files,
            parameters=[
                ResolvedParameterModel(key=p.key, value=p.value, source=p.source)
                for p in result.parameters
            ],
        )

    return app


app = create_app()
