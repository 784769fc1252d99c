import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from hyperphg.models import RunConfig  # noqa: E402
from hyperphg.presets import scenario_problem  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1)


@pytest.fixture
def basic_problem():
    return scenario_problem("basic", 10.0)


@pytest.fixture
def fast_config():
    """Small sample counts so command tests stay quick."""

    def build(**sections):
        base = {"run": {"sample_points": 8, "planes": 24, "curvature_points": 3, "max_workers": 2}}
        for name, values in sections.items():
            base.setdefault(name, {}).update(values)
        return RunConfig.model_validate(base)

    return build
