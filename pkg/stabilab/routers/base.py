"""
Scenario routing

Routers group scenario handlers per service and are included into one
``ScenarioApp``, the same way API routers are included into an application.
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Type, Union

import pandas as pd
from loguru import logger
from pydantic import BaseModel, ValidationError

from stabilab.exceptions import ConfigError
from stabilab.models.scenarios import ScenarioConfig, ScenarioName, ScenarioParams
from stabilab.schemas.estimation import RegressionResult

Artifact = Union[pd.DataFrame, RegressionResult]


def resolve_path(path: str, config_dir: Path) -> Path:
    candidate = Path(path)
    return candidate if candidate.is_absolute() else config_dir / candidate


@dataclass(frozen=True)
class RunContext:
    seed: int
    output_dir: Path
    # relative data paths in a config resolve against its directory
    config_dir: Path = field(default_factory=Path.cwd)

    def resolve(self, path: str) -> Path:
        return resolve_path(path, self.config_dir)


@dataclass
class ScenarioResult:
    """Artifacts keyed by file stem plus the one-screen summary"""
    artifacts: Dict[str, Artifact]
    summary: Dict[str, Any]


Handler = Callable[[Any, RunContext], ScenarioResult]


@dataclass(frozen=True)
class Route:
    name: ScenarioName
    params: Type[ScenarioParams]
    handler: Handler
    description: str


class ScenarioRouter:
    def __init__(self, tags: List[str]):
        self.tags = tags
        self.routes: List[Route] = []

    def scenario(self, name: ScenarioName, params: Type[ScenarioParams]):
        """Register the decorated function as the handler of ``name``"""
        def decorator(func: Handler) -> Handler:
            doc = (func.__doc__ or "").strip()
            description = doc.splitlines()[0] if doc else name.value
            self.routes.append(Route(name=name, params=params, handler=func, description=description))
            return func
        return decorator


def _format_errors(error: ValidationError, prefix: str = "") -> List[str]:
    diagnostics = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"])
        where = f"{prefix}.{location}" if prefix and location else (location or prefix or "config")
        diagnostics.append(f"{where}: {item['msg']}")
    return diagnostics


class ScenarioApp:
    def __init__(self):
        self.routes: Dict[ScenarioName, Route] = {}

    def include_router(self, router: ScenarioRouter) -> None:
        for route in router.routes:
            if route.name in self.routes:
                raise ValueError(f"Scenario '{route.name.value}' registered twice")
            self.routes[route.name] = route

    @property
    def scenario_names(self) -> List[str]:
        return [name.value for name in self.routes]

    def diagnostics(self, raw: Any, config_dir: Optional[Path] = None) -> List[str]:
        """
        Every missing or ill-typed entry of a raw config, without running it.

        Input files named by the parameters are looked up relative to
        ``config_dir`` (the working directory by default).

        Returns:
            Empty list iff the config would pass all precondition checks
        """
        if not isinstance(raw, dict):
            return ["config: expected a mapping with 'scenario' and 'parameters'"]
        try:
            config = ScenarioConfig.model_validate(raw)
        except ValidationError as e:
            return _format_errors(e)

        route = self.routes.get(config.scenario)
        if route is None:
            return [f"scenario: '{config.scenario.value}' has no handler; valid: {', '.join(self.scenario_names)}"]
        try:
            params = route.params.model_validate(config.parameters)
        except ValidationError as e:
            return _format_errors(e, prefix="parameters")

        config_dir = Path.cwd() if config_dir is None else config_dir
        return [
            f"parameters.{name}: file not found: {path}"
            for name, path in params.input_files().items()
            if not resolve_path(path, config_dir).is_file()
        ]

    def parse(self, raw: Any, config_dir: Optional[Path] = None) -> Tuple[ScenarioConfig, ScenarioParams]:
        """
        Validate a raw config into (config, parameters).

        Raises:
            ConfigError: listing every diagnostic
        """
        problems = self.diagnostics(raw, config_dir)
        if problems:
            raise ConfigError("; ".join(problems))
        config = ScenarioConfig.model_validate(raw)
        params = self.routes[config.scenario].params.model_validate(config.parameters)
        return config, params

    def dispatch(self, config: ScenarioConfig, params: BaseModel, context: RunContext) -> ScenarioResult:
        route = self.routes[config.scenario]
        logger.info(f"Running scenario '{config.scenario.value}' with seed {context.seed}")
        return route.handler(params, context)
