import pytest

from tcep_fixture import build_fixture


@pytest.fixture(scope="session")
def tcep_dir(tmp_path_factory):
    """Benchmark-format directory with 108 pairs and the ten exclusions."""
    return build_fixture(tmp_path_factory.mktemp("tcep"))
