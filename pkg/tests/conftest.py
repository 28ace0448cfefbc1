import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rbslipt import CavityConfig, ModeCache


@pytest.fixture(scope="session")
def session_cache(tmp_path_factory) -> ModeCache:
    """One shared on-disk mode cache so expensive solves run once."""
    return ModeCache(tmp_path_factory.mktemp("mode-cache"))


def reference_cavity(**overrides) -> CavityConfig:
    """Tabulated geometry at reduced resolution for the acceptance suite."""
    defaults = dict(grid_size=512)
    defaults.update(overrides)
    return CavityConfig(**defaults)


def small_cavity(**overrides) -> CavityConfig:
    """Scaled-down geometry that solves in about a second for unit tests."""
    defaults = dict(
        focal_length=0.01,
        lens_gap=0.01,
        cat_radius=0.002,
        gain_radius=0.0006,
        separation=1.0,
        grid_size=128,
        iterations=300,
    )
    defaults.update(overrides)
    return CavityConfig(**defaults)
