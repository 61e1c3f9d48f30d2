from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any


@dataclass(frozen=True)
class SuiteEntry:
    id: str
    statement: str
    flags: tuple[str, ...]
    status: str


@dataclass(frozen=True)
class RegistryData:
    entrypoint: str
    pack: str
    version: str
    suites: tuple[SuiteEntry, ...]

    @property
    def suite_ids(self) -> tuple[str, ...]:
        return tuple(suite.id for suite in self.suites)

    def get(self, suite_id: str) -> SuiteEntry | None:
        return next((suite for suite in self.suites if suite.id == suite_id), None)


def _registry_path() -> Path:
    repo_root = Path(__file__).resolve().parents[1]
    return repo_root / "scripts" / "bessel" / "suites.json"


def load_registry(path: Path | None = None) -> RegistryData:
    path = path or _registry_path()
    raw = json.loads(path.read_text(encoding="utf-8"))
    suites = tuple(
        SuiteEntry(
            id=item["id"],
            statement=item.get("statement", ""),
            flags=tuple(item.get("flags", [])),
            status=item.get("status", "unknown"),
        )
        for item in raw.get("suites", [])
    )
    return RegistryData(
        entrypoint=raw.get("entrypoint", "python -m bessel"),
        pack=raw.get("pack", "unknown"),
        version=raw.get("version", "0.0.0"),
        suites=suites,
    )


def registry_as_json(registry: RegistryData) -> dict[str, Any]:
    return {
        "entrypoint": registry.entrypoint,
        "pack": registry.pack,
        "suites": [
            {
                "flags": list(suite.flags),
                "id": suite.id,
                "statement": suite.statement,
                "status": suite.status,
            }
            for suite in registry.suites
        ],
        "version": registry.version,
    }
