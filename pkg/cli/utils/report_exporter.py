import json
import logging
import math
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from modules.verify import config_hash

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'


def plain(value: Any) -> Any:
    """JSON-ready copy: numpy scalars and arrays unwrapped, NaN and infinities as null"""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, np.generic):
        return plain(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


class ReportExporter:
    """Write run outputs to the output directory"""

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def export_table(self, frame: pd.DataFrame, name: str) -> Path:
        """
        Export a table as CSV with 17 significant digits

        Args:
            frame: Table to write
            name: File stem

        Returns:
            Path to generated CSV file
        """
        path = self.out_dir / f"{name}.csv"
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
        logger.info(f"wrote {len(frame)} rows to {path}")
        return path

    def export_report(self, payload: Dict[str, Any], name: str, config: Dict[str, Any],
                      seed: int, timestamp: Optional[datetime] = None) -> Path:
        """
        Export a JSON report with the config echo and its hash

        The hash covers everything except the generated_at field, so reruns
        with the same config and seed agree on it.

        Returns:
            Path to generated JSON file
        """
        body = plain({'config': config, 'seed': seed, **payload})
        body['run_hash'] = config_hash(body)
        body['generated_at'] = (timestamp or datetime.now(timezone.utc)).isoformat()
        path = self.out_dir / f"{name}.json"
        with open(path, 'w', encoding='utf-8') as handle:
            json.dump(body, handle, indent=2, allow_nan=False)
            handle.write('\n')
        logger.info(f"wrote report {path} (run hash {body['run_hash'][:12]})")
        return path
