"""Bundled unit-interval datasets and a plain-text loader."""

from __future__ import annotations

import os
from dataclasses import dataclass

from .estimation import UnitData
from .exceptions import DataError

__all__ = ["NamedDataset", "DATASET_IDS", "builtin", "load", "parse", "dumps", "resolve"]

# Values in the row-major order of the published listings.
_RAW = {
    "dwellings": (
        "Dwellings without basic facilities (OECD Better Life Index), share of homes",
        [
            0.008, 0.007, 0.002, 0.094, 0.123, 0.023, 0.005, 0.005, 0.057, 0.004,
            0.005, 0.001, 0.004, 0.035, 0.002, 0.006, 0.064, 0.025, 0.112, 0.118,
            0.001, 0.259, 0.001, 0.023, 0.009, 0.015, 0.002, 0.003, 0.049, 0.005,
            0.001, 0.03, 0.067, 0.138, 0.359,
        ],
    ),
    "support_network": (
        "Quality of support network (OECD Better Life Index), share of people with someone to rely on",
        [
            0.92, 0.93, 0.88, 0.80, 0.82, 0.96, 0.95, 0.96, 0.94, 0.90,
            0.78, 0.98, 0.89, 0.92, 0.91, 0.77, 0.94, 0.95, 0.96, 0.85,
        ],
    ),
    "voter_turnout": (
        "Voter turnout (OECD Better Life Index)",
        [
            0.92, 0.76, 0.88, 0.68, 0.47, 0.53, 0.66, 0.62, 0.85, 0.64,
            0.69, 0.75, 0.79, 0.58, 0.70, 0.81, 0.63, 0.67, 0.73, 0.53,
            0.77, 0.55, 0.57, 0.90, 0.63, 0.79, 0.82, 0.78, 0.68, 0.49,
            0.66, 0.53, 0.72, 0.87, 0.45, 0.86, 0.68, 0.65,
        ],
    ),
    "flood": (
        "Maximum flood level, Susquehanna River at Harrisburg (Dumonceaux & Antle, 1973)",
        [
            0.26, 0.27, 0.3, 0.32, 0.32, 0.34, 0.38, 0.38, 0.39, 0.4,
            0.41, 0.42, 0.42, 0.42, 0.45, 0.48, 0.49, 0.61, 0.65, 0.74,
        ],
    ),
    "pump_failures": (
        "Time between failures of secondary reactor pumps",
        [
            0.216, 0.015, 0.4082, 0.0746, 0.0358, 0.0199, 0.0402, 0.0101, 0.0605,
            0.0954, 0.1359, 0.0273, 0.0491, 0.3465, 0.007, 0.656, 0.106, 0.0062,
            0.4992, 0.0614, 0.532, 0.0347, 0.1921,
        ],
    ),
    "unit_capacity": (
        "Unit capacity factors (comparison of SC16 and P3 algorithms)",
        [
            0.853, 0.759, 0.866, 0.809, 0.717, 0.544, 0.492, 0.403, 0.344,
            0.213, 0.116, 0.116, 0.092, 0.07, 0.059, 0.048, 0.036, 0.029,
            0.021, 0.014, 0.011, 0.008, 0.006,
        ],
    ),
}

DATASET_IDS = tuple(_RAW)


@dataclass(frozen=True)
class NamedDataset:
    id: str
    description: str
    data: UnitData

    @property
    def index(self) -> int:
        """1-based position in the order the datasets are tabulated."""
        return DATASET_IDS.index(self.id) + 1


def builtin(dataset_id) -> NamedDataset:
    """Return a bundled dataset by id (``"flood"``) or 1-based index (``4``)."""
    key = str(dataset_id).strip().lower().replace("-", "_")
    if key.isdigit() and 1 <= int(key) <= len(DATASET_IDS):
        key = DATASET_IDS[int(key) - 1]
    if key not in _RAW:
        raise KeyError(f"unknown dataset {dataset_id!r}; expected one of {', '.join(DATASET_IDS)}")
    description, values = _RAW[key]
    return NamedDataset(key, description, UnitData(values))


def parse(text: str) -> UnitData:
    """Parse one value per line or comma-separated values.

    Blank lines and ``#`` comments are ignored. Values of exactly 0 or 1 are
    rejected, not clamped.
    """
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        for token in line.split(","):
            token = token.strip()
            if not token:
                continue
            try:
                value = float(token)
            except ValueError:
                raise DataError(f"cannot parse {token!r} as a number", line=lineno) from None
            if not 0.0 < value < 1.0:
                raise DataError(f"value {token} is outside the open interval (0, 1)", line=lineno)
            values.append(value)
    if not values:
        raise DataError("no observations found")
    return UnitData(values)


def load(path) -> UnitData:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dumps(data: UnitData) -> str:
    """Serialise to the one-value-per-line format read by :func:`load`."""
    return "".join(f"{v!r}\n" for v in data.values.tolist())


def resolve(ref: str) -> tuple[str, UnitData]:
    """Turn a ``builtin:<id>`` reference or a file path into ``(label, data)``."""
    if ref.startswith("builtin:"):
        ds = builtin(ref.split(":", 1)[1])
        return ds.id, ds.data
    return os.path.basename(ref) or ref, load(ref)
