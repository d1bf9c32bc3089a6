from pathlib import Path

import pytest

from quadrature.grid import QuadratureGrid

CONFIGS_DIR = Path(__file__).parent.parent / "configs"


@pytest.fixture
def signal_grid():
    return QuadratureGrid(-8.0, 8.0, 256)


@pytest.fixture
def meter_grid():
    """Wide enough for a unit coupling to shift a unit-width meter off centre."""
    return QuadratureGrid(-16.0, 16.0, 1024)


@pytest.fixture
def odd_grid():
    """Odd point count so x = 0 and p = 0 are grid points."""
    return QuadratureGrid(-8.0, 8.0, 257)


@pytest.fixture
def configs_dir():
    return CONFIGS_DIR


@pytest.fixture
def write_config(tmp_path):
    def _write(text: str, name: str = "scenario.toml") -> Path:
        path = tmp_path / name
        path.write_text(text)
        return path

    return _write
