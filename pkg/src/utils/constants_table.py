"""Load skein and co-unit constants from JSON tables."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from config import settings
from src.algebra.scalars import LaurentScalar, RingContext, scalar_from_expression
from src.logic.biangle_counit import CounitConstants
from src.logic.braid_reduction import SkeinConstants
from src.utils.logger import setup_logger
from src.utils.serialization import scalar_from_json

logger = setup_logger("constants_table")

SKEIN_KEYS = ("alpha_plus", "alpha_minus", "alpha_zero", "kink", "unknot")
COUNIT_KEYS = ("base_source", "base_sink", "perm_factor", "state_weight")


def load_table(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ValueError(f"constants table not found: {path}")
    try:
        with path.open(encoding="utf-8") as fh:
            table = json.load(fh)
    except json.JSONDecodeError as e:
        raise ValueError(f"constants table {path} is not valid JSON: {e}") from e
    if not isinstance(table, dict):
        raise ValueError(f"constants table {path} must be a JSON object")
    return table


def parse_entry(ctx: RingContext, value: Any) -> LaurentScalar:
    """A sympy expression in n and x, an integer, or a LaurentScalar document."""
    if isinstance(value, bool):
        raise ValueError(f"boolean is not a constant: {value!r}")
    if isinstance(value, int):
        return LaurentScalar.coerce(value)
    if isinstance(value, str):
        return scalar_from_expression(ctx, value)
    if isinstance(value, dict):
        return scalar_from_json(value)
    raise ValueError(f"unsupported constant entry {value!r}")


def _read(ctx: RingContext, table: dict, keys: tuple[str, ...], path) -> dict[str, LaurentScalar]:
    missing = [k for k in keys if k not in table]
    if missing:
        raise ValueError(f"constants table {path} is missing {missing}")
    return {k: parse_entry(ctx, table[k]) for k in keys}


def load_skein_constants(ctx: RingContext, path: str | Path | None = None) -> SkeinConstants:
    path = path or settings.SKEIN_CONSTANTS_PATH
    values = _read(ctx, load_table(path), SKEIN_KEYS, path)
    logger.info(f"📄 Loaded skein constants for n={ctx.n} from {path}")
    return SkeinConstants(**values)


def load_counit_constants(ctx: RingContext, path: str | Path | None = None) -> CounitConstants:
    path = path or settings.COUNIT_CONSTANTS_PATH
    values = _read(ctx, load_table(path), COUNIT_KEYS, path)
    logger.info(f"📄 Loaded co-unit constants for n={ctx.n} from {path}")
    return CounitConstants(**values)
