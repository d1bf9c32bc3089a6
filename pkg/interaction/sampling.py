from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid


def spawn_generators(seed: int, n: int) -> list[np.random.Generator]:
    """Independent generators for n parallel batches, reproducible from one seed."""
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(n)]


@dataclass(frozen=True, eq=False)
class InverseCdfSampler:
    """Draws from a density tabulated on a grid; linear CDF inside each cell."""

    points: np.ndarray
    density: np.ndarray

    def __post_init__(self):
        density = np.clip(np.asarray(self.density, dtype=float), 0.0, None)
        cdf = cumulative_trapezoid(density, self.points, initial=0.0)
        if cdf[-1] <= 0:
            raise ValueError("Density has no mass on its grid")
        cdf = cdf / cdf[-1]
        keep = np.concatenate([[True], np.diff(cdf) > 0])
        object.__setattr__(self, "_cdf", cdf[keep])
        object.__setattr__(self, "_support", np.asarray(self.points, dtype=float)[keep])

    def cdf(self, x: np.ndarray) -> np.ndarray:
        return np.interp(x, self._support, self._cdf, left=0.0, right=1.0)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return np.interp(rng.random(n), self._cdf, self._support)
