import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from config import (
    DEFAULT_KAPPA_STRONG,
    DEFAULT_KAPPA_WEAK,
    DEFAULT_METER_N_POINTS,
    DEFAULT_N_POINTS,
    DEFAULT_SHOTS,
    DEFAULT_SQUEEZING,
    DEFAULT_TOMOGRAPHY_PHASES,
    DEFAULT_X_MAX,
    DEFAULT_X_MIN,
    MIN_GRID_POINTS,
    PHASE_WORKERS,
    RESULTS_DIR,
)
from interaction.base import InteractionConfig
from quadrature.grid import QuadratureGrid
from quadrature.states import STATE_KINDS, StateSpec

SCENARIO_NAMES = ("in_phase", "out_of_phase", "weak", "tomography", "qnd_audit", "identity_checks")
SAMPLING_SCENARIOS = ("weak", "tomography")


class ConfigError(ValueError):
    """Invalid scenario file; carries the key and line for the diagnostic."""

    def __init__(self, path, key: str, message: str, line: int | None = None):
        self.path = str(path)
        self.key = key
        self.line = line
        self.message = message
        super().__init__(str(self))

    def __str__(self) -> str:
        return f"{self.path}:{self.line if self.line is not None else '?'}: {self.key}: {self.message}"


# ---------------------------------------------------------------------------
# Scenario file schema
# ---------------------------------------------------------------------------

SCHEMA: dict[str | None, dict[str, type]] = {
    None: {"scenario": str, "seed": int, "output_dir": str},
    "grid": {"x_min": float, "x_max": float, "n_points": int},
    "meter_grid": {"x_min": float, "x_max": float, "n_points": int},
    "signal": {"kind": str, "n": int, "r": float, "epsilon": float, "alpha_re": float, "alpha_im": float},
    "meter": {"kind": str, "r": float, "epsilon": float},
    "interaction": {"kappa": float, "pump_phase": float, "homodyne_angle": float},
    "tomography": {
        "phases": int,
        "shots": int,
        "squeezing": float,
        "exact": bool,
        "sampled": bool,
        "source": str,
        "workers": int,
    },
    "weak": {"shots": int, "meter_squeezing": float},
    "audit": {"outcomes": list, "oracle_squeezing": float, "fock_dim": int},
}

# (table, key): (minimum, maximum); None leaves a side open
RANGES = {
    ("grid", "n_points"): (MIN_GRID_POINTS, None),
    ("meter_grid", "n_points"): (MIN_GRID_POINTS, None),
    ("signal", "n"): (0, None),
    ("signal", "r"): (0.0, None),
    ("meter", "r"): (0.0, None),
    ("interaction", "kappa"): (0.0, None),
    ("tomography", "phases"): (1, None),
    ("tomography", "shots"): (1, None),
    ("tomography", "squeezing"): (0.0, None),
    ("tomography", "workers"): (1, None),
    ("weak", "shots"): (2, None),
    ("weak", "meter_squeezing"): (0.0, None),
    ("audit", "oracle_squeezing"): (0.0, 1.5),
    ("audit", "fock_dim"): (16, 256),
    (None, "seed"): (0, None),
}


def _line_of(text: str, table: str | None, key: str | None = None) -> int | None:
    """1-based line of `key` inside `[table]` (or of the table header when key is None)."""
    current = None
    for number, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        header = re.match(r"^\[([^\[\]]+)\]", stripped)
        if header:
            current = header.group(1).strip()
            if key is None and current == table:
                return number
            continue
        if key is not None and current == table and re.match(rf"^{re.escape(key)}\s*=", stripped):
            return number
    return None


def _qualified(table: str | None, key: str) -> str:
    return key if table is None else f"{table}.{key}"


def _check_type(value, expected: type) -> bool:
    if expected is float:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if expected is int:
        return isinstance(value, int) and not isinstance(value, bool)
    if expected is list:
        return isinstance(value, list) and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        )
    return isinstance(value, expected)


def _validate(raw: dict, text: str, path) -> None:
    for name, value in raw.items():
        if isinstance(value, dict):
            if name not in SCHEMA:
                raise ConfigError(path, name, f"unknown table [{name}]", _line_of(text, name))
            tables = [(name, value)]
        else:
            tables = [(None, {name: value})]
        for table, entries in tables:
            allowed = SCHEMA[table]
            for key, item in entries.items():
                line = _line_of(text, table, key)
                if key not in allowed:
                    raise ConfigError(path, _qualified(table, key), "unknown key", line)
                expected = allowed[key]
                if not _check_type(item, expected):
                    raise ConfigError(
                        path, _qualified(table, key), f"expected {expected.__name__}, got {type(item).__name__}", line
                    )
                low, high = RANGES.get((table, key), (None, None))
                if low is not None and item < low:
                    raise ConfigError(path, _qualified(table, key), f"must be >= {low}, got {item}", line)
                if high is not None and item > high:
                    raise ConfigError(path, _qualified(table, key), f"must be <= {high}, got {item}", line)


# ---------------------------------------------------------------------------
# Resolved configuration
# ---------------------------------------------------------------------------

@dataclass
class ScenarioConfig:
    scenario: str
    seed: Optional[int] = None
    output_dir: Path = RESULTS_DIR
    grid: QuadratureGrid = field(default_factory=lambda: QuadratureGrid(DEFAULT_X_MIN, DEFAULT_X_MAX, DEFAULT_N_POINTS))
    meter_grid: QuadratureGrid = field(
        default_factory=lambda: QuadratureGrid(DEFAULT_X_MIN, DEFAULT_X_MAX, DEFAULT_METER_N_POINTS)
    )
    signal: StateSpec = field(default_factory=StateSpec)
    meter: StateSpec = field(default_factory=StateSpec)
    meter_locked: bool = True
    kappa: float = DEFAULT_KAPPA_STRONG
    pump_phase: float = 0.0
    homodyne_angle: Optional[float] = None
    tomography: dict = field(default_factory=dict)
    weak: dict = field(default_factory=dict)
    audit: dict = field(default_factory=dict)
    source: Optional[Path] = None

    def interaction(self, default_offset: float = np.pi / 2) -> InteractionConfig:
        """Coupling with the configured homodyne angle, or phi + default_offset when none is set."""
        theta = self.homodyne_angle if self.homodyne_angle is not None else self.pump_phase + default_offset
        return InteractionConfig(self.kappa, self.pump_phase, theta)

    def meter_spec(self, homodyne_angle: float) -> StateSpec:
        """Meter state; a squeezed meter without an explicit epsilon is squeezed along the homodyne axis."""
        if self.meter.kind == "squeezed" and self.meter_locked:
            return replace(self.meter, epsilon=float(np.mod(2 * homodyne_angle, 2 * np.pi)))
        return self.meter

    @property
    def tomography_phases(self) -> int:
        return self.tomography.get("phases", DEFAULT_TOMOGRAPHY_PHASES)

    @property
    def tomography_shots(self) -> int:
        return self.tomography.get("shots", DEFAULT_SHOTS)

    @property
    def tomography_squeezing(self) -> float:
        return self.tomography.get("squeezing", DEFAULT_SQUEEZING)

    @property
    def workers(self) -> int:
        return self.tomography.get("workers", PHASE_WORKERS)

    def with_overrides(
        self,
        seed: int | None = None,
        output_dir: Path | None = None,
        phases: int | None = None,
        shots: int | None = None,
    ) -> "ScenarioConfig":
        """CLI flags win over file values."""
        updated = replace(self, tomography=dict(self.tomography), weak=dict(self.weak))
        if seed is not None:
            updated.seed = seed
        if output_dir is not None:
            updated.output_dir = Path(output_dir)
        if phases is not None:
            updated.tomography["phases"] = phases
        if shots is not None:
            updated.tomography["shots"] = shots
            updated.weak["shots"] = shots
        return updated

    def to_dict(self) -> dict:
        def grid_dict(g: QuadratureGrid) -> dict:
            return {"x_min": g.x_min, "x_max": g.x_max, "n_points": g.n_points}

        def spec_dict(s: StateSpec) -> dict:
            return {
                "kind": s.kind,
                "n": s.n,
                "r": s.r,
                "epsilon": s.epsilon,
                "alpha_re": s.alpha.real,
                "alpha_im": s.alpha.imag,
            }

        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "output_dir": str(self.output_dir),
            "grid": grid_dict(self.grid),
            "meter_grid": grid_dict(self.meter_grid),
            "signal": spec_dict(self.signal),
            "meter": {**spec_dict(self.meter), "locked": self.meter_locked},
            "interaction": {
                "kappa": self.kappa,
                "pump_phase": self.pump_phase,
                "homodyne_angle": self.homodyne_angle,
            },
            "tomography": dict(self.tomography),
            "weak": dict(self.weak),
            "audit": dict(self.audit),
        }


def _grid(table: dict, defaults: tuple[float, float, int], path, text: str, name: str) -> QuadratureGrid:
    try:
        return QuadratureGrid(
            float(table.get("x_min", defaults[0])),
            float(table.get("x_max", defaults[1])),
            int(table.get("n_points", defaults[2])),
        )
    except ValueError as e:
        raise ConfigError(path, name, str(e), _line_of(text, name)) from e


def _state(table: dict, path, text: str, name: str) -> StateSpec:
    kind = table.get("kind", "vacuum")
    if kind not in STATE_KINDS:
        raise ConfigError(
            path, f"{name}.kind", f"unknown state kind '{kind}'. Available: {', '.join(STATE_KINDS)}",
            _line_of(text, name, "kind"),
        )
    try:
        return StateSpec(
            kind=kind,
            n=table.get("n", 0),
            r=float(table.get("r", 0.0)),
            epsilon=float(table.get("epsilon", 0.0)),
            alpha=complex(table.get("alpha_re", 0.0), table.get("alpha_im", 0.0)),
        )
    except ValueError as e:
        raise ConfigError(path, name, str(e), _line_of(text, name)) from e


def load_config(path: Path) -> ScenarioConfig:
    """Parse and validate a TOML scenario file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(path, "file", f"cannot read: {e.strerror}") from e
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        line = getattr(e, "lineno", None)
        if line is None:
            match = re.search(r"line (\d+)", str(e))
            line = int(match.group(1)) if match else None
        raise ConfigError(path, "syntax", str(e), line) from e

    _validate(raw, text, path)
    if "scenario" not in raw:
        raise ConfigError(path, "scenario", f"missing; one of {', '.join(SCENARIO_NAMES)}", 1)
    if raw["scenario"] not in SCENARIO_NAMES:
        raise ConfigError(
            path,
            "scenario",
            f"unknown scenario '{raw['scenario']}'. Available: {', '.join(SCENARIO_NAMES)}",
            _line_of(text, None, "scenario"),
        )

    interaction = raw.get("interaction", {})
    meter = raw.get("meter", {})
    return ScenarioConfig(
        scenario=raw["scenario"],
        seed=raw.get("seed"),
        output_dir=Path(raw.get("output_dir", RESULTS_DIR / raw["scenario"])),
        grid=_grid(raw.get("grid", {}), (DEFAULT_X_MIN, DEFAULT_X_MAX, DEFAULT_N_POINTS), path, text, "grid"),
        meter_grid=_grid(
            raw.get("meter_grid", {}), (DEFAULT_X_MIN, DEFAULT_X_MAX, DEFAULT_METER_N_POINTS), path, text, "meter_grid"
        ),
        signal=_state(raw.get("signal", {}), path, text, "signal"),
        meter=_state(meter, path, text, "meter"),
        meter_locked="epsilon" not in meter,
        kappa=float(interaction.get("kappa", DEFAULT_KAPPA_WEAK if raw["scenario"] == "weak" else DEFAULT_KAPPA_STRONG)),
        pump_phase=float(interaction.get("pump_phase", 0.0)),
        homodyne_angle=float(interaction["homodyne_angle"]) if "homodyne_angle" in interaction else None,
        tomography=dict(raw.get("tomography", {})),
        weak=dict(raw.get("weak", {})),
        audit=dict(raw.get("audit", {})),
        source=path,
    )


# ---------------------------------------------------------------------------
# Result type
# ---------------------------------------------------------------------------

@dataclass
class ScenarioResult:
    """Artifacts of one scenario run: tables for CSV, documents for JSON, scalar metrics for the manifest."""

    scenario: str
    frames: dict[str, pd.DataFrame] = field(default_factory=dict)
    documents: dict[str, dict] = field(default_factory=dict)
    metrics: dict[str, float] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Base scenario
# ---------------------------------------------------------------------------

class BaseScenario(ABC):
    """Base class for all scenarios."""

    requires_seed: bool = False

    @property
    @abstractmethod
    def name(self) -> str:
        """Identifier used in the scenario file."""
        ...

    @property
    @abstractmethod
    def description(self) -> str:
        """Human-readable description for list-scenarios."""
        ...

    @abstractmethod
    def run(self, config: ScenarioConfig) -> ScenarioResult:
        ...

    def validate(self, config: ScenarioConfig) -> None:
        if self.requires_seed and config.seed is None:
            path = config.source or "<flags>"
            raise ConfigError(path, "seed", f"scenario '{self.name}' samples outcomes; pass --seed or set seed")
