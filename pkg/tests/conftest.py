from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import minidump  # noqa: E402


@pytest.fixture(scope="session")
def minidump_path(tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("dump") / "mini.xml"
    return minidump.write_dump(path)


@pytest.fixture(scope="session")
def minidump_bz2_path(tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("dumpbz2") / "mini.xml.bz2"
    return minidump.write_dump(path, compress=True)


@pytest.fixture(scope="session")
def split100_path(tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("dump100") / "hundred.xml"
    return minidump.write_dump(path, pages=minidump.split_fixture_pages(100))
