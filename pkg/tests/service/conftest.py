from __future__ import annotations

import pytest

from codbench.service.training import ToyTrainingService

TOY = {"images": 4, "size": 32, "batch_size": 2, "max_steps": 2}


@pytest.fixture
def toy_run(config, temp_dir):
    """A two-step toy training run with its exported data set."""
    return ToyTrainingService(config).run(temp_dir / "toy", **TOY)
