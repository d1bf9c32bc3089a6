import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from config import (
    CSV_FLOAT_FORMAT,
    DEFAULT_KAPPA_STRONG,
    DEFAULT_METER_N_POINTS,
    DEFAULT_SHOTS,
    DEFAULT_SQUEEZING,
    DEFAULT_X_MAX,
    DEFAULT_X_MIN,
)
from interaction.base import InteractionConfig
from quadrature.grid import QuadratureGrid
from quadrature.states import SqueezedVacuumSpec

logger = logging.getLogger(__name__)

SAMPLES_FILE = "samples.csv"
MARGINALS_FILE = "marginals.csv"
SIDECAR_FILE = "dataset.json"

PHASE_COLUMN = "phase [rad]"
OUTCOME_COLUMN = "outcome [quadrature]"
METER_X_COLUMN = "x_m [quadrature]"
DENSITY_COLUMN = "density [1/quadrature]"


def _default_meter_grid() -> QuadratureGrid:
    return QuadratureGrid(DEFAULT_X_MIN, DEFAULT_X_MAX, DEFAULT_METER_N_POINTS)


def angular_weights(phases) -> np.ndarray:
    """Half the gap to each neighbour on the circle of period pi; pi/n for a uniform sweep."""
    phases = np.asarray(phases, dtype=float)
    after = np.roll(phases, -1)
    after[-1] += np.pi
    before = np.roll(phases, 1)
    before[0] -= np.pi
    return (after - before) / 2


# ---------------------------------------------------------------------------
# Plan
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TomographyPlan:
    """Pump-phase sweep with a squeezed meter locked to the pump and an out-of-phase homodyne."""

    phases: tuple[float, ...]
    shots_per_phase: int = DEFAULT_SHOTS
    squeezing: float = DEFAULT_SQUEEZING
    kappa: float = DEFAULT_KAPPA_STRONG
    seed: int = 0
    meter_grid: QuadratureGrid = field(default_factory=_default_meter_grid)

    def __post_init__(self):
        phases = tuple(float(phi) for phi in self.phases)
        if not phases:
            raise ValueError("Tomography plan needs at least one pump phase")
        if any(phi < 0 or phi >= np.pi for phi in phases):
            raise ValueError(f"Pump phases must lie in [0, pi), got {phases}")
        if any(b <= a for a, b in zip(phases, phases[1:])):
            raise ValueError("Pump phases must be strictly increasing")
        if self.shots_per_phase < 1:
            raise ValueError(f"shots_per_phase must be >= 1, got {self.shots_per_phase}")
        if not np.isfinite(self.kappa) or self.kappa < 0:
            raise ValueError(f"kappa must be finite and >= 0, got {self.kappa}")
        SqueezedVacuumSpec(self.squeezing)
        object.__setattr__(self, "phases", phases)

    @classmethod
    def uniform(cls, n_phases: int, **kwargs) -> "TomographyPlan":
        """n_phases pump phases k pi / n_phases."""
        if n_phases < 1:
            raise ValueError(f"n_phases must be >= 1, got {n_phases}")
        return cls(tuple(np.arange(n_phases) * np.pi / n_phases), **kwargs)

    @property
    def n_phases(self) -> int:
        return len(self.phases)

    def meter_spec(self, pump_phase: float) -> SqueezedVacuumSpec:
        return SqueezedVacuumSpec.locked_to_pump(self.squeezing, pump_phase)

    def interaction(self, pump_phase: float) -> InteractionConfig:
        return InteractionConfig.out_of_phase(self.kappa, pump_phase)

    @staticmethod
    def quadrature_angle(pump_phase: float) -> float:
        """Signal quadrature whose rescaled density the meter records at this pump phase."""
        return pump_phase - np.pi / 2

    def angular_weights(self) -> np.ndarray:
        return angular_weights(self.phases)

    def with_overrides(self, **changes) -> "TomographyPlan":
        values = {**self.to_dict(), **changes}
        values["meter_grid"] = changes.get("meter_grid", self.meter_grid)
        return TomographyPlan(**values)

    def to_dict(self) -> dict:
        return {
            "phases": list(self.phases),
            "shots_per_phase": self.shots_per_phase,
            "squeezing": self.squeezing,
            "kappa": self.kappa,
            "seed": self.seed,
            "meter_grid": {
                "x_min": self.meter_grid.x_min,
                "x_max": self.meter_grid.x_max,
                "n_points": self.meter_grid.n_points,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TomographyPlan":
        values = dict(data)
        values["phases"] = tuple(values["phases"])
        values["meter_grid"] = QuadratureGrid(**values["meter_grid"])
        return cls(**values)


# ---------------------------------------------------------------------------
# Dataset
# ---------------------------------------------------------------------------

@dataclass
class TomographyDataset:
    """Per-phase homodyne samples and/or exact meter marginals on the plan's meter grid."""

    plan: TomographyPlan
    samples: dict[float, np.ndarray] = field(default_factory=dict)
    marginals: dict[float, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        known = set(self.plan.phases)
        for phi in [*self.samples, *self.marginals]:
            if phi not in known:
                raise ValueError(f"Phase {phi} is not part of the plan")
        dx = self.plan.meter_grid.spacing
        for phi, density in self.marginals.items():
            if density.shape != (self.plan.meter_grid.n_points,):
                raise ValueError(f"Marginal at phase {phi:.4f} does not match the meter grid")
            if density.min() < -1e-12:
                raise ValueError(f"Marginal at phase {phi:.4f} has negative density {density.min():.2e}")
            total = density.sum() * dx
            if abs(total - 1) > 1e-6:
                raise ValueError(f"Marginal at phase {phi:.4f} integrates to {total:.8f}, expected 1")

    @property
    def has_samples(self) -> bool:
        return bool(self.samples)

    @property
    def has_marginals(self) -> bool:
        return bool(self.marginals)

    @property
    def phases(self) -> list[float]:
        return sorted({*self.samples, *self.marginals})

    @property
    def shot_counts(self) -> dict[float, int]:
        return {phi: int(s.size) for phi, s in self.samples.items()}

    def sidecar(self) -> dict:
        return {
            **self.plan.to_dict(),
            "shot_counts": {f"{phi:.12g}": n for phi, n in self.shot_counts.items()},
        }

    def samples_frame(self) -> pd.DataFrame:
        phases = sorted(self.samples)
        return pd.DataFrame(
            {
                PHASE_COLUMN: np.concatenate([np.full(self.samples[phi].size, phi) for phi in phases]),
                OUTCOME_COLUMN: np.concatenate([self.samples[phi] for phi in phases]),
            }
        )

    def marginals_frame(self) -> pd.DataFrame:
        phases = sorted(self.marginals)
        x_m = self.plan.meter_grid.points
        return pd.DataFrame(
            {
                PHASE_COLUMN: np.repeat(phases, x_m.size),
                METER_X_COLUMN: np.tile(x_m, len(phases)),
                DENSITY_COLUMN: np.concatenate([self.marginals[phi] for phi in phases]),
            }
        )

    def save(self, directory: Path) -> list[Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        written = []
        if self.has_samples:
            path = directory / SAMPLES_FILE
            self.samples_frame().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
            written.append(path)
        if self.has_marginals:
            path = directory / MARGINALS_FILE
            self.marginals_frame().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
            written.append(path)
        path = directory / SIDECAR_FILE
        path.write_text(json.dumps(self.sidecar(), indent=2))
        written.append(path)
        logger.info(f"Saved tomography dataset ({len(self.phases)} phases) to {directory}")
        return written

    @classmethod
    def load(cls, directory: Path) -> "TomographyDataset":
        directory = Path(directory)
        sidecar = json.loads((directory / SIDECAR_FILE).read_text())
        sidecar.pop("shot_counts", None)
        plan = TomographyPlan.from_dict(sidecar)
        by_text = {f"{phi:.12g}": phi for phi in plan.phases}

        samples = {}
        samples_path = directory / SAMPLES_FILE
        if samples_path.exists():
            df = pd.read_csv(samples_path)
            for phi, group in df.groupby(PHASE_COLUMN, sort=True):
                samples[by_text[f"{phi:.12g}"]] = group[OUTCOME_COLUMN].to_numpy()

        marginals = {}
        marginals_path = directory / MARGINALS_FILE
        if marginals_path.exists():
            df = pd.read_csv(marginals_path)
            for phi, group in df.groupby(PHASE_COLUMN, sort=True):
                marginals[by_text[f"{phi:.12g}"]] = group[DENSITY_COLUMN].to_numpy()
        return cls(plan, samples, marginals)
