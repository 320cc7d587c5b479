import json
from pathlib import Path

import pytest

from src.algebra.scalars import LaurentScalar, RingContext
from src.logic.biangle_counit import CounitConstants
from src.logic.braid_reduction import SkeinConstants
from src.utils.constants_table import (
    load_counit_constants,
    load_skein_constants,
    load_table,
    parse_entry,
)

CONFIG_DIR = Path(__file__).resolve().parents[1] / "config"


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_shipped_skein_table_matches_defaults(n):
    ctx = RingContext(n)
    assert load_skein_constants(ctx, CONFIG_DIR / "skein_constants.json") == SkeinConstants.default(ctx)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_shipped_counit_table_matches_defaults(n):
    ctx = RingContext(n)
    assert load_counit_constants(ctx, CONFIG_DIR / "counit_constants.json") == CounitConstants.default(ctx)


def test_parse_entry_forms(ring3):
    assert parse_entry(ring3, 3) == LaurentScalar.coerce(3)
    assert parse_entry(ring3, "x") == ring3.q_root(1)
    assert parse_entry(ring3, "x**n") == ring3.q(1)
    assert parse_entry(ring3, {"unit": "w_half", "terms": [[2, "1"]]}) == LaurentScalar.monomial(2)


@pytest.mark.parametrize("value", [True, 1.5, None, "x/2", "x + y", "1/(1 + x)", "(("])
def test_parse_entry_rejects(ring3, value):
    with pytest.raises(ValueError):
        parse_entry(ring3, value)


def test_missing_table(tmp_path):
    with pytest.raises(ValueError):
        load_table(tmp_path / "absent.json")


def test_table_must_be_json_object(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ValueError):
        load_table(bad)
    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ValueError):
        load_table(listed)


def test_missing_key(tmp_path, ring3):
    table = json.loads((CONFIG_DIR / "skein_constants.json").read_text(encoding="utf-8"))
    del table["kink"]
    path = tmp_path / "skein.json"
    path.write_text(json.dumps(table), encoding="utf-8")
    with pytest.raises(ValueError):
        load_skein_constants(ring3, path)


def test_non_unit_alpha_rejected(tmp_path, ring3):
    table = json.loads((CONFIG_DIR / "skein_constants.json").read_text(encoding="utf-8"))
    table["alpha_plus"] = "x + 1"
    path = tmp_path / "skein.json"
    path.write_text(json.dumps(table), encoding="utf-8")
    with pytest.raises(ValueError):
        load_skein_constants(ring3, path)
