import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from config import CSV_FLOAT_FORMAT
from scenarios.base import ScenarioConfig, ScenarioResult
from wigner.transform import WignerGrid

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"


# ---------------------------------------------------------------------------
# Table builders
# ---------------------------------------------------------------------------

def marginal_frame(x: np.ndarray, **densities: np.ndarray) -> pd.DataFrame:
    """x plus one density column per keyword, e.g. marginal_frame(x, before=..., after=...)."""
    frame = {"x [quadrature]": x}
    for name, values in densities.items():
        label = "density" if name == "density" else f"density_{name}"
        frame[f"{label} [1/quadrature]"] = values
    return pd.DataFrame(frame)


def wigner_frame(grid: WignerGrid) -> pd.DataFrame:
    records = grid.to_records()
    return pd.DataFrame(
        {
            "x [quadrature]": records["x"],
            "p [quadrature]": records["p"],
            "W [1/quadrature^2]": records["value"],
        }
    )


# ---------------------------------------------------------------------------
# Writers
# ---------------------------------------------------------------------------

def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(document: dict, path: Path) -> Path:
    path.write_text(json.dumps(_jsonable(document), indent=2, sort_keys=True))
    return path


def write_result(result: ScenarioResult, config: ScenarioConfig, output_dir: Path) -> Path:
    """Write every frame as CSV, every document as JSON, then the run manifest. Returns the manifest path."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)

    artifacts = []
    for name, frame in result.frames.items():
        path = output_dir / f"{name}.csv"
        frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
        artifacts.append(path.name)
    for name, document in result.documents.items():
        path = write_json(document, output_dir / f"{name}.json")
        artifacts.append(path.name)

    manifest = {
        "scenario": result.scenario,
        "seed": config.seed,
        "config": config.to_dict(),
        "artifacts": artifacts,
        "metrics": result.metrics,
        "flags": result.flags,
    }
    path = write_json(manifest, output_dir / MANIFEST_FILE)
    logger.info(f"Wrote {len(artifacts)} artifacts and manifest to {output_dir}")
    return path
