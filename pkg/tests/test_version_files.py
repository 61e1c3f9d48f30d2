from pathlib import Path

from padic_bessel import __version__

ROOT = Path(__file__).resolve().parents[1]


def test_package_version_is_semver():
    parts = __version__.split(".")
    assert len(parts) == 3
    assert all(part.isdigit() for part in parts)


def test_changelog_lists_current_version():
    changelog = (ROOT / "CHANGELOG.md").read_text(encoding="utf-8")
    assert f"## v{__version__}" in changelog


def test_compat_doc_exists():
    assert (ROOT / "docs" / "compat.md").exists()
