import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from callpath.fixtures import hub_fixture_spec, transceiver_graph
from callpath.ingest import generate_synthetic


@pytest.fixture(scope="session")
def fig_graph():
    """The tiny transmit/encode/makeHeader/send fixture."""
    return transceiver_graph()


@pytest.fixture(scope="session")
def hub_graph():
    """The shipped 1000-node interface-hub fixture."""
    return generate_synthetic(hub_fixture_spec())
