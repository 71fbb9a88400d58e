"""Tuned hyperparameter presets for the benchmark sweeps.

The package ships a table of tuned settings, one row per (number of
factors, search-space size): dimension D, the acf flip rate and
activation threshold, and the imf noise level and activation threshold.
``lookup_preset`` resolves a row for a requested size, exactly when the
size is in the table and by nearest size on a log scale otherwise (the
result says which).

An alternative table can be supplied as a CSV file path, either directly
or through the ``RESFACT_PRESETS`` environment variable; same header,
same semantics.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

from .factorizer import VariantSpec

PRESETS_ENV = "RESFACT_PRESETS"
PRESET_FACTOR_COUNTS = (2, 3, 4)
_COLUMNS = (
    "F",
    "search_space",
    "D",
    "acf_flip_rate",
    "acf_activation_threshold",
    "imf_sigma",
    "imf_activation_threshold",
)


@dataclass(frozen=True)
class PresetRow:
    F: int
    search_space: int
    D: int
    acf_flip_rate: float
    acf_activation_threshold: float
    imf_sigma: float
    imf_activation_threshold: float


@dataclass(frozen=True)
class PresetLookup:
    """Resolved hyperparameters for one (F, size, variant) query.

    ``exact`` is False when the nearest table row was substituted for a
    size not present verbatim; ``row`` is the table row that supplied the
    values either way.
    """

    variant: VariantSpec
    D: int
    exact: bool
    row: PresetRow


_cache: dict = {}


def _default_path() -> Optional[str]:
    return os.environ.get(PRESETS_ENV) or None


def _parse_rows(lines) -> tuple:
    reader = csv.DictReader(lines)
    missing = [c for c in _COLUMNS if c not in (reader.fieldnames or ())]
    if missing:
        raise ValueError(f"preset table is missing columns: {missing}")
    rows = []
    for rec in reader:
        rows.append(
            PresetRow(
                F=int(rec["F"]),
                search_space=int(rec["search_space"]),
                D=int(rec["D"]),
                acf_flip_rate=float(rec["acf_flip_rate"]),
                acf_activation_threshold=float(rec["acf_activation_threshold"]),
                imf_sigma=float(rec["imf_sigma"]),
                imf_activation_threshold=float(rec["imf_activation_threshold"]),
            )
        )
    if not rows:
        raise ValueError("preset table contains no rows")
    return tuple(sorted(rows, key=lambda r: (r.F, r.search_space)))


def load_preset_table(path: Optional[str] = None) -> tuple:
    """Load the preset rows, sorted by (F, search_space).

    Resolution order: explicit ``path``, then the ``RESFACT_PRESETS``
    environment variable, then the table shipped inside the package.
    """
    path = path or _default_path()
    key = path or "<builtin>"
    if key in _cache:
        return _cache[key]
    if path is None:
        text = resources.files("resfact").joinpath("data/presets.csv").read_text()
        rows = _parse_rows(text.splitlines())
    else:
        with open(path, newline="") as fh:
            rows = _parse_rows(fh)
    _cache[key] = rows
    return rows


def lookup_preset(
    F: int,
    search_space: int,
    kind: str,
    table: Optional[Sequence[PresetRow]] = None,
) -> PresetLookup:
    """Resolve hyperparameters for a variant at one search-space size.

    Exact-size rows are returned as-is.  Otherwise the row whose size is
    nearest on a log scale substitutes, flagged ``exact=False`` (ties go
    to the smaller size).  ``brn`` has no tuned knobs; it gets the row's
    dimension and a zero activation threshold.
    """
    if F not in PRESET_FACTOR_COUNTS:
        raise ValueError(f"no presets for F={F}; available F: {PRESET_FACTOR_COUNTS}")
    if search_space < 1:
        raise ValueError(f"search_space must be positive, got {search_space}")
    rows = [r for r in (table if table is not None else load_preset_table()) if r.F == F]
    if not rows:
        raise ValueError(f"preset table has no rows for F={F}")
    exact = [r for r in rows if r.search_space == search_space]
    if exact:
        row, is_exact = exact[0], True
    else:
        target = math.log(search_space)
        row = min(rows, key=lambda r: (abs(math.log(r.search_space) - target), r.search_space))
        is_exact = False
    if kind == "brn":
        variant = VariantSpec.brn()
    elif kind == "imf":
        variant = VariantSpec.imf(
            sigma=row.imf_sigma, activation_threshold=row.imf_activation_threshold
        )
    elif kind == "acf":
        variant = VariantSpec.acf(
            flip_rate=row.acf_flip_rate, activation_threshold=row.acf_activation_threshold
        )
    else:
        raise ValueError(f"unknown variant kind {kind!r}")
    return PresetLookup(variant=variant, D=row.D, exact=is_exact, row=row)
