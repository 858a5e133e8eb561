import pytest

from gridfire import cli


@pytest.fixture(scope="session")
def study_dir(tmp_path_factory):
    """One synthesized study directory shared across the whole session.

    Holds the landscape rasters, fuel catalog, network, weather year,
    reference tables and a study.ini, exactly as `synth` writes them.
    """
    out = tmp_path_factory.mktemp("study")
    rc = cli.main(["synth", "--out", str(out), "--seed", "0"])
    assert rc == 0
    return out
