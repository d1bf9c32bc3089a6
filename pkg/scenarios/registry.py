import importlib
import logging
import pkgutil
from typing import Dict, Type

from scenarios.base import SCENARIO_NAMES, BaseScenario

logger = logging.getLogger(__name__)

_registry: Dict[str, Type[BaseScenario]] = {}


def register(scenario_cls: Type[BaseScenario]) -> Type[BaseScenario]:
    """Register a scenario under the name config files use in `scenario = ...`."""
    name = scenario_cls().name
    if name not in SCENARIO_NAMES:
        raise ValueError(f"{scenario_cls.__name__} registers '{name}', which config files cannot select")
    existing = _registry.get(name)
    if existing is not None and existing is not scenario_cls:
        raise ValueError(f"Scenario '{name}' is claimed by both {existing.__name__} and {scenario_cls.__name__}")
    _registry[name] = scenario_cls
    return scenario_cls


def get_scenario(name: str) -> BaseScenario:
    if name not in _registry:
        available = ", ".join(sorted(_registry)) or "(none discovered)"
        raise ValueError(f"No scenario module provides '{name}'. Available: {available}")
    return _registry[name]()


def list_scenarios() -> Dict[str, str]:
    """Scenario name to description, in config-schema order."""
    return {name: _registry[name]().description for name in SCENARIO_NAMES if name in _registry}


def auto_discover() -> None:
    import scenarios

    for _importer, modname, _ispkg in pkgutil.iter_modules(scenarios.__path__):
        if modname not in ("base", "registry", "__init__"):
            importlib.import_module(f"scenarios.{modname}")
    missing = [name for name in SCENARIO_NAMES if name not in _registry]
    if missing:
        logger.warning(f"No scenario module registers {', '.join(missing)}")
    logger.debug(f"Discovered {len(_registry)} scenarios")
