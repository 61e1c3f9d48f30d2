from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any


_TYPE_MAP = {
    "array": list,
    "bool": bool,
    "dict": dict,
    "float": float,
    "int": int,
    "number": (int, float),
    "null": type(None),
    "str": str,
}

GOLDEN_DIR = Path(__file__).resolve().parents[1] / "golden"


def load_shape(name: str) -> dict[str, Any]:
    return json.loads((GOLDEN_DIR / name).read_text(encoding="utf-8"))


def assert_has_keys(obj: dict[str, Any], keys: list[str]) -> None:
    missing = [key for key in keys if key not in obj]
    assert not missing, f"Missing keys: {missing}"


def assert_type(value: Any, expected_type: str) -> None:
    if "|" in expected_type:
        options = [item.strip() for item in expected_type.split("|") if item.strip()]
        for option in options:
            try:
                assert_type(value, option)
                return
            except AssertionError:
                continue
        raise AssertionError(f"Expected one of {options}, got {type(value).__name__}")

    assert expected_type in _TYPE_MAP, f"Unknown expected type: {expected_type}"
    expected = _TYPE_MAP[expected_type]
    if expected_type == "bool":
        assert isinstance(value, bool), f"Expected bool, got {type(value).__name__}"
        return
    if expected_type in ("int", "number"):
        assert not isinstance(value, bool), f"Expected {expected_type}, got bool"
    assert isinstance(value, expected), f"Expected {expected_type}, got {type(value).__name__}"


def assert_shape(obj: dict[str, Any], shape: dict[str, Any]) -> None:
    """Check required keys, then the declared type of each key present in type_assertions."""
    assert_has_keys(obj, shape["required_keys"])
    for key, expected_type in shape.get("type_assertions", {}).items():
        assert_type(obj[key], expected_type)


def read_csv(text: str) -> tuple[list[str], list[dict[str, str]]]:
    reader = csv.DictReader(io.StringIO(text))
    rows = list(reader)
    return list(reader.fieldnames or []), rows
