import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lassoroot import SeedStream, Series


@pytest.fixture
def random_walk():
    """Seeded standard Gaussian random walk factory: (seed, T) -> Series."""

    def make(seed: int, T: int) -> Series:
        steps = SeedStream(seed).standard_normal(T)
        return Series(np.concatenate(([0.0], np.cumsum(steps))))

    return make


@pytest.fixture
def verdict(pytestconfig):
    """Print one `[criterion N] PASS/FAIL` line past pytest's capture."""
    capman = pytestconfig.pluginmanager.getplugin("capturemanager")

    def _report(num, desc, ok, detail=""):
        suffix = f" ({detail})" if detail else ""
        line = f"[criterion {num}] {'PASS' if ok else 'FAIL'}: {desc}{suffix}"
        if capman is not None:
            with capman.global_and_fixture_disabled():
                print(line, flush=True)
        else:
            print(line, flush=True)
        return ok

    return _report
