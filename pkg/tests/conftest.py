import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from arppf import BucketGrid, make_grid  # noqa: E402


@pytest.fixture
def unit_grid() -> BucketGrid:
    return make_grid((0.0, 300.0), (0.0, 100.0), 300, 100)
